#include "unital/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "unital/difference.hpp"
#include "unital/error.hpp"

namespace unital {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaError, what); }

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) schema(std::string("missing key '") + key + "'");
  return *it;
}

int as_int(const json& j, const char* what) {
  if (!j.is_number_integer()) schema(std::string(what) + " must be an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const char* what) {
  if (!j.is_string()) schema(std::string(what) + " must be a string");
  return j.get<std::string>();
}

}  // namespace

std::string_view to_string(OrderingConvention convention) {
  return convention == OrderingConvention::MixedRadix ? "mixed-radix" : "pc-shortlex";
}

OrderingConvention parse_convention(std::string_view text) {
  if (text == "mixed-radix") return OrderingConvention::MixedRadix;
  if (text == "pc-shortlex") return OrderingConvention::PcShortlex;
  throw Error(ErrorCode::SchemaError, "unknown ordering convention '" + std::string(text) + "'");
}

json label_to_json(const ElementLabel& label) {
  switch (label.kind()) {
    case ElementLabel::Kind::Int: return label.value();
    case ElementLabel::Kind::Infinity: return "inf";
    case ElementLabel::Kind::Tuple: {
      json arr = json::array();
      for (const auto& p : label.parts()) arr.push_back(label_to_json(p));
      return arr;
    }
  }
  return nullptr;
}

ElementLabel label_from_json(const json& j) {
  if (j.is_number_integer()) return ElementLabel::integer(j.get<std::int64_t>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "∞") return ElementLabel::infinity();
    schema("unknown label string '" + s + "'");
  }
  if (j.is_array()) {
    if (j.empty()) schema("empty tuple label");
    std::vector<ElementLabel> parts;
    for (const auto& p : j) parts.push_back(label_from_json(p));
    return ElementLabel::tuple(std::move(parts));
  }
  schema("label must be an integer, an array or \"inf\"");
}

json spec_to_json(const GroupSpec& spec) {
  switch (spec.kind) {
    case GroupSpec::Kind::Cyclic: return {{"cyclic", spec.cyclic_order}};
    case GroupSpec::Kind::External: return {{"external", spec.table_path}};
    case GroupSpec::Kind::Product: {
      json arr = json::array();
      for (const auto& f : spec.factors) arr.push_back(spec_to_json(f));
      return {{"product", arr}};
    }
    case GroupSpec::Kind::Semidirect: {
      json action = json::array();
      for (const auto& [g, img] : spec.action) action.push_back({label_to_json(g), label_to_json(img)});
      return {{"semidirect",
               {{"normal", spec_to_json(spec.factors[0])},
                {"actor", spec_to_json(spec.factors[1])},
                {"action", action}}}};
    }
  }
  return nullptr;
}

GroupSpec spec_from_json(const json& j) {
  if (!j.is_object() || j.size() != 1) schema("group spec must be an object with exactly one key");
  const auto& [key, value] = *j.items().begin();
  if (key == "cyclic") {
    const int n = as_int(value, "cyclic order");
    if (n < 1) schema("cyclic order must be positive");
    return GroupSpec::cyclic(n);
  }
  if (key == "external") return GroupSpec::external(as_string(value, "external path"));
  if (key == "product") {
    if (!value.is_array() || value.size() < 2) schema("product needs at least two factors");
    std::vector<GroupSpec> factors;
    for (const auto& f : value) factors.push_back(spec_from_json(f));
    return GroupSpec::product(std::move(factors));
  }
  if (key == "semidirect") {
    if (!value.is_object()) schema("semidirect must be an object");
    const auto& action = field(value, "action");
    if (!action.is_array()) schema("semidirect action must be an array");
    std::vector<std::pair<ElementLabel, ElementLabel>> pairs;
    for (const auto& p : action) {
      if (!p.is_array() || p.size() != 2) schema("action entries are [generator, image] pairs");
      pairs.emplace_back(label_from_json(p[0]), label_from_json(p[1]));
    }
    return GroupSpec::semidirect(spec_from_json(field(value, "normal")), spec_from_json(field(value, "actor")),
                                 std::move(pairs));
  }
  schema("unknown group spec kind '" + key + "'");
}

json candidate_to_json(const OrderingCandidate& c) {
  json j = {{"structure", spec_to_json(c.structure)}, {"convention", std::string(to_string(c.convention))}};
  if (!c.coordinate_order.empty()) j["coordinate_order"] = c.coordinate_order;
  return j;
}

OrderingCandidate candidate_from_json(const json& j) {
  if (!j.is_object()) schema("structure candidate must be an object");
  OrderingCandidate c;
  c.structure = spec_from_json(field(j, "structure"));
  if (j.contains("convention")) c.convention = parse_convention(as_string(j["convention"], "convention"));
  if (j.contains("coordinate_order")) {
    if (!j["coordinate_order"].is_array()) schema("coordinate_order must be an array");
    for (const auto& x : j["coordinate_order"]) c.coordinate_order.push_back(as_int(x, "coordinate"));
  }
  return c;
}

json family_to_json(const DifferenceFamily& family) {
  json blocks = json::array();
  for (const auto& b : family.base_blocks) {
    json arr = json::array();
    for (const auto& l : b) arr.push_back(label_to_json(l));
    blocks.push_back(arr);
  }
  return {{"mode", std::string(to_string(family.mode))}, {"base_blocks", blocks}};
}

json entry_to_json(const CatalogEntry& entry) {
  json j;
  j["id"] = entry.id;
  if (!entry.group_name.empty()) j["group_name"] = entry.group_name;
  j["group"] = spec_to_json(entry.group_spec);
  const json fam = family_to_json(entry.family());
  j["mode"] = fam["mode"];
  j["base_blocks"] = fam["base_blocks"];
  json fp = json::object();
  for (const auto& [k, v] : entry.expected_fingerprint.histogram()) fp[std::to_string(k)] = v;
  j["expected_fingerprint"] = fp;
  j["source"] = entry.source;
  if (!entry.structure_candidates.empty()) {
    json arr = json::array();
    for (const auto& c : entry.structure_candidates) arr.push_back(candidate_to_json(c));
    j["structure_candidates"] = arr;
  }
  return j;
}

CatalogEntry entry_from_json(const json& j, const std::filesystem::path& origin) {
  if (!j.is_object()) schema("entry must be a JSON object");
  CatalogEntry e;
  e.origin = origin;
  e.id = as_string(field(j, "id"), "id");
  if (j.contains("group_name")) e.group_name = as_string(j["group_name"], "group_name");
  e.group_spec = spec_from_json(field(j, "group"));
  try {
    e.mode = parse_mode(as_string(field(j, "mode"), "mode"));
  } catch (const Error& err) {
    if (err.code() == ErrorCode::SchemaError) throw;
    schema(err.what());
  }
  const auto& blocks = field(j, "base_blocks");
  if (!blocks.is_array() || blocks.empty()) schema("base_blocks must be a non-empty array");
  for (const auto& b : blocks) {
    if (!b.is_array()) schema("each base block must be an array");
    std::vector<ElementLabel> block;
    for (const auto& l : b) block.push_back(label_from_json(l));
    e.base_blocks.push_back(std::move(block));
  }
  validate_family_shape(e.family());

  const auto& fp = field(j, "expected_fingerprint");
  if (!fp.is_object()) schema("expected_fingerprint must be an object");
  std::map<int, std::uint64_t> hist;
  for (const auto& [k, v] : fp.items()) {
    int key = 0;
    try {
      std::size_t used = 0;
      key = std::stoi(k, &used);
      if (used != k.size()) throw std::invalid_argument(k);
    } catch (const std::exception&) {
      schema("fingerprint key '" + k + "' is not an integer");
    }
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      schema("fingerprint frequency for key " + k + " must be a non-negative integer");
    }
    if (!hist.emplace(key, v.get<std::uint64_t>()).second) {
      throw Error(ErrorCode::DuplicateKey, "fingerprint key " + k + " repeated");
    }
  }
  e.expected_fingerprint = Fingerprint(std::move(hist));
  if (e.expected_fingerprint.total() != kFingerprintTotal) {
    throw Error(ErrorCode::SumInvariantError, "expected fingerprint of " + e.id + " totals " +
                                                  std::to_string(e.expected_fingerprint.total()));
  }
  e.source = as_string(field(j, "source"), "source");
  if (j.contains("structure_candidates")) {
    if (!j["structure_candidates"].is_array()) schema("structure_candidates must be an array");
    for (const auto& c : j["structure_candidates"]) e.structure_candidates.push_back(candidate_from_json(c));
  }
  return e;
}

CatalogEntry load_entry(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& err) {
    throw Error(ErrorCode::ParseError, file.string() + ": " + err.what());
  }
  return entry_from_json(j, file.parent_path());
}

void save_entry(const CatalogEntry& entry, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  out << entry_to_json(entry).dump(1) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + file.string());
}

CayleyGroup entry_group(const CatalogEntry& entry) {
  try {
    return build_group(entry.group_spec, entry.origin);
  } catch (const Error& err) {
    throw Error(ErrorCode::GroupUnavailable, "group of " + entry.id + " unavailable: " + err.what());
  }
}

ReproductionRecord reproduce(const CatalogEntry& entry, int threads) {
  const auto start = std::chrono::steady_clock::now();
  ReproductionRecord r;
  r.id = entry.id;
  const CayleyGroup group = entry_group(entry);
  const Design design = develop(group, entry.family());
  r.steiner_ok = verify_steiner(design).is_steiner;
  if (r.steiner_ok) {
    r.computed_fingerprint = fingerprint(design, threads);
    r.fingerprint_match =
        format_fingerprint(r.computed_fingerprint) == format_fingerprint(entry.expected_fingerprint);
  }
  r.elapsed = std::chrono::steady_clock::now() - start;
  return r;
}

CayleyGroup apply_coordinate_order(const CayleyGroup& model, const std::vector<int>& coordinate_order) {
  const int k = static_cast<int>(coordinate_order.size());
  bool identity = true;
  for (int i = 0; i < k; ++i) identity = identity && coordinate_order[i] == i;
  if (identity) return model;
  std::vector<int> sorted = coordinate_order;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < k; ++i) {
    if (sorted[i] != i) throw Error(ErrorCode::NotAPermutation, "coordinate order is not a permutation");
  }
  std::vector<ElementLabel> labels;
  for (int g = 0; g < model.order(); ++g) {
    const auto& l = model.label(g);
    if (!l.is_tuple() || static_cast<int>(l.parts().size()) != k) {
      throw Error(ErrorCode::SchemaError, "coordinate order does not match the group's labels");
    }
    std::vector<ElementLabel> parts;
    for (int i = 0; i < k; ++i) parts.push_back(l.parts()[coordinate_order[i]]);
    labels.push_back(ElementLabel::tuple(std::move(parts)));
  }
  std::vector<int> order(model.order());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return labels[a] < labels[b]; });
  std::vector<ElementLabel> new_labels;
  for (int g : order) new_labels.push_back(labels[g]);
  return model.reindexed(order, std::move(new_labels));
}

namespace {

using Mask = std::vector<bool>;

Mask closure(const CayleyGroup& g, const Mask& seed) {
  Mask m(g.order(), false);
  std::vector<int> gens;
  for (int x = 0; x < g.order(); ++x) {
    if (seed[x]) gens.push_back(x);
  }
  std::vector<int> queue{g.identity()};
  m[g.identity()] = true;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    for (int s : gens) {
      const int y = g.mul(queue[i], s);
      if (!m[y]) {
        m[y] = true;
        queue.push_back(y);
      }
    }
  }
  return m;
}

std::size_t count(const Mask& m) { return static_cast<std::size_t>(std::count(m.begin(), m.end(), true)); }

bool is_prime(std::size_t p) {
  if (p < 2) return false;
  for (std::size_t d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

// All subgroups, largest first, ties broken by membership mask.
std::vector<Mask> all_subgroups(const CayleyGroup& g) {
  std::set<Mask> seen;
  std::vector<Mask> work;
  for (int x = 0; x < g.order(); ++x) {
    Mask seed(g.order(), false);
    seed[x] = true;
    Mask c = closure(g, seed);
    if (seen.insert(c).second) work.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < work.size(); ++i) {
    for (int x = 0; x < g.order(); ++x) {
      if (work[i][x]) continue;
      Mask seed = work[i];
      seed[x] = true;
      Mask c = closure(g, seed);
      if (seen.insert(c).second) work.push_back(std::move(c));
    }
  }
  std::vector<Mask> out(seen.begin(), seen.end());
  std::stable_sort(out.begin(), out.end(), [](const Mask& a, const Mask& b) { return count(a) > count(b); });
  return out;
}

bool is_normal_in(const CayleyGroup& g, const Mask& h, const Mask& k) {
  for (int x = 0; x < g.order(); ++x) {
    if (!k[x]) continue;
    for (int y = 0; y < g.order(); ++y) {
      if (h[y] && !h[g.mul(g.mul(g.inv(x), y), x)]) return false;
    }
  }
  return true;
}

// Composition series with prime indices, from the whole group down to 1.
std::vector<std::vector<int>> composition_series(const CayleyGroup& g, const std::vector<Mask>& subs) {
  std::vector<std::vector<int>> out;
  std::vector<int> chain{0};
  std::function<void()> rec = [&] {
    const Mask& cur = subs[chain.back()];
    const std::size_t c = count(cur);
    if (c == 1) {
      out.push_back(chain);
      return;
    }
    for (std::size_t j = 0; j < subs.size(); ++j) {
      const std::size_t d = count(subs[j]);
      if (d >= c || c % d != 0 || !is_prime(c / d)) continue;
      bool inside = true;
      for (int x = 0; x < g.order() && inside; ++x) inside = !subs[j][x] || cur[x];
      if (!inside || !is_normal_in(g, subs[j], cur)) continue;
      chain.push_back(static_cast<int>(j));
      rec();
      chain.pop_back();
    }
  };
  rec();
  return out;
}

// Exponent vectors in shortlex order of their pc-words.
std::vector<std::vector<int>> shortlex_exponents(const std::vector<int>& rel) {
  std::vector<std::vector<int>> vecs{{}};
  for (int r : rel) {
    std::vector<std::vector<int>> next;
    for (const auto& v : vecs) {
      for (int e = 0; e < r; ++e) {
        auto w = v;
        w.push_back(e);
        next.push_back(std::move(w));
      }
    }
    vecs = std::move(next);
  }
  auto word = [](const std::vector<int>& v) {
    std::vector<int> letters;
    for (std::size_t i = 0; i < v.size(); ++i) letters.insert(letters.end(), v[i], static_cast<int>(i));
    return letters;
  };
  std::stable_sort(vecs.begin(), vecs.end(), [&](const auto& a, const auto& b) {
    const auto wa = word(a);
    const auto wb = word(b);
    if (wa.size() != wb.size()) return wa.size() < wb.size();
    return wa < wb;
  });
  return vecs;
}

// Integer-labelled families resolved through `lab` (label -> model element).
bool families_validate(const CayleyGroup& model, const std::vector<int>& lab,
                       const std::vector<std::vector<Block>>& int_blocks) {
  const int n = model.order();
  for (const auto& blocks : int_blocks) {
    std::vector<Block> mapped;
    for (const auto& b : blocks) {
      Block m;
      for (int i = 0; i < kBlockSize; ++i) m[i] = b[i] == n ? n : lab[b[i]];
      mapped.push_back(m);
    }
    if (!check_difference_blocks(model, mapped).ok) return false;
  }
  return true;
}

bool develops_everywhere(const CayleyGroup& group, const std::vector<DifferenceFamily>& families) {
  for (const auto& f : families) {
    try {
      if (!check_difference_family(group, f).ok) return false;
      if (!verify_steiner(develop(group, f)).is_steiner) return false;
    } catch (const Error&) {
      return false;
    }
  }
  return true;
}

std::optional<ReconstructedOrdering> try_pc_shortlex(const OrderingCandidate& cand,
                                                     const std::vector<DifferenceFamily>& families) {
  CayleyGroup model = build_group(cand.structure);
  const int n = model.order();
  std::vector<std::vector<Block>> int_blocks;
  for (const auto& f : families) {
    std::vector<Block> blocks;
    for (const auto& b : f.base_blocks) {
      if (b.size() != kBlockSize) return std::nullopt;
      Block out;
      for (int i = 0; i < kBlockSize; ++i) {
        if (b[i].is_infinity()) {
          out[i] = n;
        } else if (b[i].is_int() && b[i].value() >= 0 && b[i].value() < n) {
          out[i] = static_cast<int>(b[i].value());
        } else {
          return std::nullopt;
        }
      }
      blocks.push_back(out);
    }
    int_blocks.push_back(std::move(blocks));
  }

  const auto subs = all_subgroups(model);
  for (const auto& chain : composition_series(model, subs)) {
    const std::size_t len = chain.size() - 1;
    std::vector<int> rel(len);
    std::vector<std::vector<int>> choices(len);
    for (std::size_t i = 0; i < len; ++i) {
      rel[i] = static_cast<int>(count(subs[chain[i]]) / count(subs[chain[i + 1]]));
      for (int x = 0; x < n; ++x) {
        if (subs[chain[i]][x] && !subs[chain[i + 1]][x]) choices[i].push_back(x);
      }
    }
    const auto vecs = shortlex_exponents(rel);
    std::vector<std::size_t> pick(len, 0);
    while (true) {
      std::vector<int> gens(len);
      for (std::size_t i = 0; i < len; ++i) gens[i] = choices[i][pick[i]];
      std::vector<int> lab(n);
      for (int l = 0; l < n; ++l) {
        int x = model.identity();
        for (std::size_t i = 0; i < len; ++i) {
          for (int e = 0; e < vecs[l][i]; ++e) x = model.mul(x, gens[i]);
        }
        lab[l] = x;
      }
      if (families_validate(model, lab, int_blocks)) {
        CayleyGroup g = model.reindexed(lab);
        if (develops_everywhere(g, families)) return ReconstructedOrdering{cand, gens, std::move(g)};
      }
      std::size_t i = len;
      while (i > 0 && ++pick[i - 1] == choices[i - 1].size()) pick[--i] = 0;
      if (i == 0) break;
    }
  }
  return std::nullopt;
}

}  // namespace

ReconstructedOrdering reconstruct_ordering(const std::vector<OrderingCandidate>& candidates,
                                           const std::vector<DifferenceFamily>& families) {
  for (const auto& cand : candidates) {
    try {
      if (cand.convention == OrderingConvention::PcShortlex) {
        if (auto r = try_pc_shortlex(cand, families)) return std::move(*r);
        continue;
      }
      CayleyGroup g = apply_coordinate_order(build_group(cand.structure), cand.coordinate_order);
      if (develops_everywhere(g, families)) return {cand, {}, std::move(g)};
    } catch (const Error&) {
      // Candidates that cannot be built are simply not valid conventions.
    }
  }
  throw Error(ErrorCode::NotFound, "no candidate ordering validates the given families");
}

bool id_less(const std::string& a, const std::string& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ei = i;
      std::size_t ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      const auto na = std::stoull(a.substr(i, ei - i));
      const auto nb = std::stoull(b.substr(j, ej - j));
      if (na != nb) return na < nb;
      i = ei;
      j = ej;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

std::vector<const CatalogEntry*> Catalog::in_group(const std::string& directory) const {
  std::vector<const CatalogEntry*> out;
  for (const auto& e : entries) {
    if (e.origin.filename() == directory) out.push_back(&e);
  }
  return out;
}

const CatalogEntry& Catalog::find(const std::string& id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  throw Error(ErrorCode::NotFound, "no catalog entry '" + id + "'");
}

Catalog load_catalog(const std::filesystem::path& root) {
  Catalog cat;
  cat.root = root;
  const auto index_path = root / "index.json";
  std::ifstream in(index_path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + index_path.string());
  json index;
  try {
    in >> index;
  } catch (const json::parse_error& err) {
    throw Error(ErrorCode::ParseError, index_path.string() + ": " + err.what());
  }
  for (const auto& g : field(index, "groups")) {
    CatalogGroup group;
    group.name = as_string(field(g, "name"), "group name");
    group.directory = as_string(field(g, "directory"), "group directory");
    if (g.contains("expected_count")) group.expected_count = as_int(g["expected_count"], "expected_count");
    std::vector<std::filesystem::path> files;
    for (const auto& f : std::filesystem::directory_iterator(root / group.directory)) {
      if (f.path().extension() == ".json") files.push_back(f.path());
    }
    for (const auto& f : files) cat.entries.push_back(load_entry(f));
    cat.groups.push_back(std::move(group));
  }
  std::sort(cat.entries.begin(), cat.entries.end(),
            [](const CatalogEntry& a, const CatalogEntry& b) { return id_less(a.id, b.id); });
  for (std::size_t i = 1; i < cat.entries.size(); ++i) {
    if (cat.entries[i].id == cat.entries[i - 1].id) {
      throw Error(ErrorCode::DuplicateKey, "catalog id " + cat.entries[i].id + " appears twice");
    }
  }
  return cat;
}

std::vector<CountCheck> check_counts(const Catalog& catalog) {
  std::vector<CountCheck> out;
  for (const auto& g : catalog.groups) {
    if (!g.expected_count) continue;
    out.push_back({g.name, *g.expected_count, static_cast<int>(catalog.in_group(g.directory).size())});
  }
  return out;
}

bool glob_match(std::string_view pattern, std::string_view text) {
  std::size_t p = 0;
  std::size_t t = 0;
  std::size_t star = std::string_view::npos;
  std::size_t mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p;
      ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

}  // namespace unital
