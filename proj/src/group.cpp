#include "unital/group.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "unital/error.hpp"

namespace unital {

GroupSpec GroupSpec::cyclic(int n) {
  if (n < 1) throw Error(ErrorCode::OrderMismatch, "cyclic order must be positive");
  GroupSpec s;
  s.kind = Kind::Cyclic;
  s.cyclic_order = n;
  return s;
}

GroupSpec GroupSpec::product(std::vector<GroupSpec> factors) {
  GroupSpec s;
  s.kind = Kind::Product;
  s.factors = std::move(factors);
  return s;
}

GroupSpec GroupSpec::semidirect(GroupSpec normal, GroupSpec actor,
                                std::vector<std::pair<ElementLabel, ElementLabel>> action) {
  GroupSpec s;
  s.kind = Kind::Semidirect;
  s.factors.push_back(std::move(normal));
  s.factors.push_back(std::move(actor));
  s.action = std::move(action);
  return s;
}

GroupSpec GroupSpec::external(std::string path) {
  GroupSpec s;
  s.kind = Kind::External;
  s.table_path = std::move(path);
  return s;
}

std::string describe(const GroupSpec& spec) {
  switch (spec.kind) {
    case GroupSpec::Kind::Cyclic: return "Z" + std::to_string(spec.cyclic_order);
    case GroupSpec::Kind::External: return "table(" + spec.table_path + ")";
    case GroupSpec::Kind::Product: {
      std::string out;
      for (std::size_t i = 0; i < spec.factors.size(); ++i) {
        if (i) out += " x ";
        const bool wrap = spec.factors[i].kind == GroupSpec::Kind::Semidirect ||
                          spec.factors[i].kind == GroupSpec::Kind::Product;
        out += wrap ? "(" + describe(spec.factors[i]) + ")" : describe(spec.factors[i]);
      }
      return out;
    }
    case GroupSpec::Kind::Semidirect: {
      std::string out = "(" + describe(spec.factors[0]) + ") : " + describe(spec.factors[1]) + " [";
      for (std::size_t i = 0; i < spec.action.size(); ++i) {
        if (i) out += ", ";
        out += format_element_label(spec.action[i].first) + "->" +
               format_element_label(spec.action[i].second);
      }
      return out + "]";
    }
  }
  return "?";
}

std::string_view to_string(TableDefect::Kind kind) {
  switch (kind) {
    case TableDefect::Kind::Shape: return "shape";
    case TableDefect::Kind::Range: return "range";
    case TableDefect::Kind::LatinRow: return "latin square (row)";
    case TableDefect::Kind::LatinColumn: return "latin square (column)";
    case TableDefect::Kind::Identity: return "identity";
    case TableDefect::Kind::Inverse: return "inverse";
    case TableDefect::Kind::Associativity: return "associativity";
  }
  return "?";
}

bool ValidationReport::has(TableDefect::Kind kind) const noexcept {
  return std::any_of(failures.begin(), failures.end(),
                     [kind](const TableDefect& d) { return d.kind == kind; });
}

std::string ValidationReport::describe() const {
  std::string out;
  for (const auto& f : failures) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(f.kind)) + ": " + f.detail;
  }
  return out;
}

ValidationReport validate_table(const std::vector<std::vector<int>>& t) {
  ValidationReport report;
  const int n = static_cast<int>(t.size());
  auto add = [&](TableDefect::Kind k, std::string detail) {
    report.failures.push_back({k, std::move(detail)});
  };
  if (n == 0) {
    add(TableDefect::Kind::Shape, "empty table");
    return report;
  }
  for (int g = 0; g < n; ++g) {
    if (static_cast<int>(t[g].size()) != n) {
      add(TableDefect::Kind::Shape, "row " + std::to_string(g) + " has " +
                                        std::to_string(t[g].size()) + " entries, expected " +
                                        std::to_string(n));
      return report;
    }
  }
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      if (t[g][h] < 0 || t[g][h] >= n) {
        add(TableDefect::Kind::Range, "entry (" + std::to_string(g) + ", " + std::to_string(h) +
                                          ") = " + std::to_string(t[g][h]));
        return report;
      }
    }
  }

  std::vector<char> seen(n);
  for (int g = 0; g < n; ++g) {
    std::fill(seen.begin(), seen.end(), 0);
    bool bad = false;
    for (int h = 0; h < n && !bad; ++h) bad = seen[t[g][h]]++ != 0;
    if (bad) {
      add(TableDefect::Kind::LatinRow, "row " + std::to_string(g));
      break;
    }
  }
  for (int h = 0; h < n; ++h) {
    std::fill(seen.begin(), seen.end(), 0);
    bool bad = false;
    for (int g = 0; g < n && !bad; ++g) bad = seen[t[g][h]]++ != 0;
    if (bad) {
      add(TableDefect::Kind::LatinColumn, "column " + std::to_string(h));
      break;
    }
  }

  int identity = -1;
  for (int e = 0; e < n && identity < 0; ++e) {
    bool ok = true;
    for (int g = 0; g < n && ok; ++g) ok = t[e][g] == g && t[g][e] == g;
    if (ok) identity = e;
  }
  if (identity < 0) {
    add(TableDefect::Kind::Identity, "no two-sided identity");
  } else {
    for (int g = 0; g < n; ++g) {
      bool found = false;
      for (int h = 0; h < n && !found; ++h) found = t[g][h] == identity && t[h][g] == identity;
      if (!found) {
        add(TableDefect::Kind::Inverse, "element " + std::to_string(g) + " has no two-sided inverse");
        break;
      }
    }
  }

  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const int ab = t[a][b];
      for (int c = 0; c < n; ++c) {
        if (t[a][t[b][c]] != t[ab][c]) {
          add(TableDefect::Kind::Associativity, "triple (" + std::to_string(a) + ", " +
                                                    std::to_string(b) + ", " + std::to_string(c) +
                                                    ")");
          return report;
        }
      }
    }
  }
  return report;
}

CayleyGroup CayleyGroup::from_table(const std::vector<std::vector<int>>& table,
                                    std::vector<ElementLabel> labels) {
  if (auto report = validate_table(table); !report.ok()) {
    throw Error(ErrorCode::ValidationError, report.describe());
  }
  const int n = static_cast<int>(table.size());
  if (labels.empty()) {
    labels.reserve(n);
    for (int i = 0; i < n; ++i) labels.push_back(ElementLabel::integer(i));
  }
  if (static_cast<int>(labels.size()) != n) {
    throw Error(ErrorCode::ValidationError, "label count differs from group order");
  }
  {
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::ValidationError, "element labels are not distinct");
    }
    if (std::any_of(sorted.begin(), sorted.end(), [](const ElementLabel& l) { return l.is_infinity(); })) {
      throw Error(ErrorCode::ValidationError, "infinity cannot label a group element");
    }
  }

  CayleyGroup g;
  g.order_ = n;
  g.table_.resize(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) std::copy(table[a].begin(), table[a].end(), g.table_.begin() + static_cast<std::ptrdiff_t>(a) * n);
  for (int e = 0; e < n; ++e) {
    if (table[e][0] == 0 && table[0][e] == 0) {
      // row e fixes element 0, so in a group e is the identity
      g.identity_ = e;
      break;
    }
  }
  g.inverses_.resize(n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (table[a][b] == g.identity_) {
        g.inverses_[a] = b;
        break;
      }
    }
  }
  g.labels_ = std::move(labels);
  return g;
}

int CayleyGroup::multiply(int g, int h) const {
  if (g < 0 || g >= order_ || h < 0 || h >= order_) {
    throw Error(ErrorCode::IndexOutOfRange, "element index out of range");
  }
  return mul(g, h);
}

int CayleyGroup::inverse(int g) const {
  if (g < 0 || g >= order_) throw Error(ErrorCode::IndexOutOfRange, "element index out of range");
  return inverses_[g];
}

std::span<const int> CayleyGroup::row(int g) const {
  if (g < 0 || g >= order_) throw Error(ErrorCode::IndexOutOfRange, "element index out of range");
  return {table_.data() + static_cast<std::size_t>(g) * order_, static_cast<std::size_t>(order_)};
}

std::vector<std::vector<int>> CayleyGroup::table() const {
  std::vector<std::vector<int>> out(order_);
  for (int g = 0; g < order_; ++g) {
    auto r = row(g);
    out[g].assign(r.begin(), r.end());
  }
  return out;
}

const ElementLabel& CayleyGroup::label(int g) const {
  if (g < 0 || g >= order_) throw Error(ErrorCode::IndexOutOfRange, "element index out of range");
  return labels_[g];
}

std::optional<int> CayleyGroup::find(const ElementLabel& label) const {
  for (int i = 0; i < order_; ++i) {
    if (labels_[i] == label) return i;
  }
  return std::nullopt;
}

int CayleyGroup::resolve(const ElementLabel& label) const {
  if (auto i = find(label)) return *i;
  if (label.is_int() && !labels_.empty() && !labels_.front().is_int()) {
    const auto v = label.value();
    if (v >= 0 && v < order_) return static_cast<int>(v);
  }
  throw Error(ErrorCode::LabelNotInGroup, "label " + format_element_label(label) + " not in group");
}

bool CayleyGroup::is_abelian() const {
  for (int a = 0; a < order_; ++a) {
    for (int b = a + 1; b < order_; ++b) {
      if (mul(a, b) != mul(b, a)) return false;
    }
  }
  return true;
}

int CayleyGroup::element_order(int g) const {
  if (g < 0 || g >= order_) throw Error(ErrorCode::IndexOutOfRange, "element index out of range");
  int k = 1;
  for (int x = g; x != identity_; x = mul(x, g)) ++k;
  return k;
}

CayleyGroup CayleyGroup::reindexed(std::span<const int> order, std::vector<ElementLabel> labels) const {
  if (static_cast<int>(order.size()) != order_) {
    throw Error(ErrorCode::NotAPermutation, "reindexing needs one entry per element");
  }
  std::vector<int> position(order_, -1);
  for (int i = 0; i < order_; ++i) {
    const int old = order[i];
    if (old < 0 || old >= order_ || position[old] != -1) {
      throw Error(ErrorCode::NotAPermutation, "reindexing is not a bijection");
    }
    position[old] = i;
  }
  std::vector<std::vector<int>> t(order_, std::vector<int>(order_));
  for (int i = 0; i < order_; ++i) {
    for (int j = 0; j < order_; ++j) t[i][j] = position[mul(order[i], order[j])];
  }
  return from_table(t, std::move(labels));
}

namespace {

CayleyGroup build_cyclic(int n) {
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  }
  return CayleyGroup::from_table(t);
}

CayleyGroup build_product(const std::vector<CayleyGroup>& parts) {
  int n = 1;
  for (const auto& p : parts) n *= p.order();
  // digits[i][k]: coordinate k of element i, leftmost most significant
  std::vector<std::vector<int>> digits(n, std::vector<int>(parts.size()));
  for (int i = 0; i < n; ++i) {
    int rest = i;
    for (std::size_t k = parts.size(); k-- > 0;) {
      digits[i][k] = rest % parts[k].order();
      rest /= parts[k].order();
    }
  }
  auto encode = [&](const std::vector<int>& d) {
    int idx = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) idx = idx * parts[k].order() + d[k];
    return idx;
  };
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  std::vector<int> d(parts.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (std::size_t k = 0; k < parts.size(); ++k) d[k] = parts[k].mul(digits[a][k], digits[b][k]);
      t[a][b] = encode(d);
    }
  }
  std::vector<ElementLabel> labels;
  labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<ElementLabel> comps;
    for (std::size_t k = 0; k < parts.size(); ++k) comps.push_back(parts[k].label(digits[i][k]));
    labels.push_back(ElementLabel::tuple(std::move(comps)));
  }
  return CayleyGroup::from_table(t, std::move(labels));
}

// Extends generator images to a map on all of `normal`; throws InvalidAction
// unless the result is an automorphism.
std::vector<int> extend_action(const CayleyGroup& normal,
                               const std::vector<std::pair<int, int>>& images) {
  const int n = normal.order();
  std::vector<int> phi(n, -1);
  phi[normal.identity()] = normal.identity();
  std::vector<int> queue{normal.identity()};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const int x = queue[qi];
    for (auto [gen, img] : images) {
      const int y = normal.mul(x, gen);
      const int fy = normal.mul(phi[x], img);
      if (phi[y] == -1) {
        phi[y] = fy;
        queue.push_back(y);
      } else if (phi[y] != fy) {
        throw Error(ErrorCode::InvalidAction, "generator images are not consistent with the relations");
      }
    }
  }
  if (static_cast<int>(queue.size()) != n) {
    throw Error(ErrorCode::InvalidAction, "action generators do not generate the normal subgroup");
  }
  std::vector<char> hit(n, 0);
  for (int v : phi) {
    if (hit[v]++) throw Error(ErrorCode::InvalidAction, "action is not a bijection");
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (phi[normal.mul(a, b)] != normal.mul(phi[a], phi[b])) {
        throw Error(ErrorCode::InvalidAction, "action does not preserve multiplication");
      }
    }
  }
  return phi;
}

CayleyGroup build_semidirect(const CayleyGroup& normal, const CayleyGroup& actor,
                             const GroupSpec& spec) {
  if (spec.factors[1].kind != GroupSpec::Kind::Cyclic) {
    throw Error(ErrorCode::InvalidAction, "semidirect actor must be cyclic");
  }
  std::vector<std::pair<int, int>> images;
  for (const auto& [gen, img] : spec.action) {
    const auto g = normal.find(gen);
    const auto i = normal.find(img);
    if (!g || !i) throw Error(ErrorCode::InvalidAction, "action label not in the normal subgroup");
    images.emplace_back(*g, *i);
  }
  const std::vector<int> phi = extend_action(normal, images);

  const int nn = normal.order();
  const int m = actor.order();
  // powers[h] = phi^h; the actor's generator is label 1, so index h is phi^h
  std::vector<std::vector<int>> powers(m, std::vector<int>(nn));
  std::iota(powers[0].begin(), powers[0].end(), 0);
  for (int h = 1; h < m; ++h) {
    for (int x = 0; x < nn; ++x) powers[h][x] = phi[powers[h - 1][x]];
  }
  int phi_order = 1;
  for (auto cur = phi; cur != powers[0]; ++phi_order) {
    for (int x = 0; x < nn; ++x) cur[x] = phi[cur[x]];
  }
  if (m % phi_order != 0) {
    throw Error(ErrorCode::OrderMismatch, "actor order " + std::to_string(m) +
                                              " is not a multiple of the action order " +
                                              std::to_string(phi_order));
  }

  const int n = nn * m;
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a) {
    const int n1 = a / m, h1 = a % m;
    for (int b = 0; b < n; ++b) {
      const int n2 = b / m, h2 = b % m;
      t[a][b] = normal.mul(n1, powers[h1][n2]) * m + actor.mul(h1, h2);
    }
  }
  std::vector<ElementLabel> labels;
  labels.reserve(n);
  for (int i = 0; i < n; ++i) {
    labels.push_back(ElementLabel::tuple({normal.label(i / m), actor.label(i % m)}));
  }
  return CayleyGroup::from_table(t, std::move(labels));
}

}  // namespace

CayleyGroup build_group(const GroupSpec& spec, const std::filesystem::path& base_dir) {
  switch (spec.kind) {
    case GroupSpec::Kind::Cyclic: return build_cyclic(spec.cyclic_order);
    case GroupSpec::Kind::External: {
      std::filesystem::path p(spec.table_path);
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      return load_cayley_table_file(p);
    }
    case GroupSpec::Kind::Product: {
      if (spec.factors.empty()) throw Error(ErrorCode::OrderMismatch, "product without factors");
      std::vector<CayleyGroup> parts;
      for (const auto& f : spec.factors) parts.push_back(build_group(f, base_dir));
      return build_product(parts);
    }
    case GroupSpec::Kind::Semidirect: {
      if (spec.factors.size() != 2) throw Error(ErrorCode::InvalidAction, "semidirect needs two factors");
      return build_semidirect(build_group(spec.factors[0], base_dir),
                              build_group(spec.factors[1], base_dir), spec);
    }
  }
  throw Error(ErrorCode::SchemaError, "unknown group kind");
}

std::vector<std::vector<int>> read_cayley_table(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  std::size_t li = 0;
  auto blank = [](const std::string& s) {
    return s.find_first_not_of(" \t") == std::string::npos;
  };
  while (li < lines.size() && blank(lines[li])) ++li;
  if (li == lines.size()) throw Error(ErrorCode::ParseError, "empty table file");
  int n = 0;
  {
    std::istringstream hs(lines[li]);
    std::string extra;
    if (!(hs >> n) || n < 1 || (hs >> extra)) {
      throw Error(ErrorCode::ParseError, "line 1 must hold the group order");
    }
    ++li;
  }
  std::vector<std::vector<int>> t;
  t.reserve(n);
  for (int r = 0; r < n; ++r, ++li) {
    if (li >= lines.size()) {
      throw Error(ErrorCode::ParseError, "expected " + std::to_string(n) + " rows, got " + std::to_string(r));
    }
    std::istringstream rs(lines[li]);
    std::vector<int> row;
    std::string tok;
    while (rs >> tok) {
      try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        row.push_back(v);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "row " + std::to_string(r) + ": bad entry '" + tok + "'");
      }
    }
    if (static_cast<int>(row.size()) != n) {
      throw Error(ErrorCode::ParseError, "row " + std::to_string(r) + " has " +
                                             std::to_string(row.size()) + " entries, expected " +
                                             std::to_string(n));
    }
    t.push_back(std::move(row));
  }
  for (; li < lines.size(); ++li) {
    const auto& s = lines[li];
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos || s[first] == '#') continue;
    throw Error(ErrorCode::ParseError, "unexpected content after table: '" + s + "'");
  }
  return t;
}

std::vector<std::vector<int>> read_cayley_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_cayley_table(in);
}

CayleyGroup load_cayley_table(std::istream& in) { return CayleyGroup::from_table(read_cayley_table(in)); }

CayleyGroup load_cayley_table(const std::string& text) {
  std::istringstream in(text);
  return load_cayley_table(in);
}

CayleyGroup load_cayley_table_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return load_cayley_table(in);
}

void write_cayley_table(std::ostream& out, const CayleyGroup& group) {
  out << group.order() << '\n';
  for (int g = 0; g < group.order(); ++g) {
    auto r = group.row(g);
    for (std::size_t h = 0; h < r.size(); ++h) {
      if (h) out << ' ';
      out << r[h];
    }
    out << '\n';
  }
}

}  // namespace unital
