#include "unital/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "unital/catalog.hpp"
#include "unital/difference.hpp"
#include "unital/error.hpp"
#include "unital/isomorph.hpp"
#include "unital/parallel.hpp"
#include "unital/search.hpp"

#ifndef UNITAL_CATALOG_DIR
#define UNITAL_CATALOG_DIR "catalog"
#endif

namespace unital {
namespace {

using nlohmann::json;

struct Options {
  unsigned threads = 1;
  std::string catalog_dir = UNITAL_CATALOG_DIR;
  bool json = false;
};

// Exit code for a failure raised by the library.
int exit_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::NotFound: return kExitMismatch;
    default: return kExitInput;
  }
}

Design develop_entry(const CatalogEntry& entry) { return develop(entry_group(entry), entry.family()); }

std::string point_name(const Design& d, int p) { return format_element_label(d.point_labels()[p], true); }

int cmd_verify(const Options& opt, const std::string& file, std::ostream& out) {
  const auto entry = load_entry(file);
  const auto group = entry_group(entry);
  const auto check = check_difference_family(group, entry.family());
  const Design design = develop(group, entry.family());
  const auto report = verify_steiner(design);
  if (opt.json) {
    json defects = json::array();
    for (const auto& d : report.pair_coverage_defects) {
      defects.push_back({{"pair", {point_name(design, d.p), point_name(design, d.q)}}, {"count", d.count}});
    }
    out << json{{"id", entry.id},
                {"is_steiner", report.is_steiner},
                {"block_count", report.block_count},
                {"duplicate_blocks", report.duplicate_blocks},
                {"difference_check", check.ok},
                {"pair_defects", defects}}
               .dump()
        << '\n';
  } else {
    out << entry.id << ": " << (report.is_steiner ? "S(2,6,126) verified" : "not a Steiner system") << '\n';
    out << "blocks: " << report.block_count << " (duplicates removed: " << report.duplicate_blocks << ")\n";
    out << "difference check: " << (check.ok ? "ok" : "failed") << '\n';
    const std::size_t shown = std::min<std::size_t>(report.pair_coverage_defects.size(), 20);
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& d = report.pair_coverage_defects[i];
      out << "  pair {" << point_name(design, d.p) << ", " << point_name(design, d.q) << "} covered " << d.count
          << " times\n";
    }
    if (report.pair_coverage_defects.size() > shown) {
      out << "  ... " << report.pair_coverage_defects.size() - shown << " more pair defects\n";
    }
    if (!check.ok) out << check.describe(group);
  }
  return report.is_steiner ? kExitOk : kExitMismatch;
}

int cmd_fingerprint(const Options& opt, const std::string& file, std::ostream& out) {
  const auto entry = load_entry(file);
  const Design design = develop_entry(entry);
  const auto fp = fingerprint(design, static_cast<int>(opt.threads));
  if (opt.json) {
    json h = json::object();
    for (const auto& [k, v] : fp.histogram()) h[std::to_string(k)] = v;
    out << json{{"id", entry.id}, {"fingerprint", h}, {"text", format_fingerprint(fp)}}.dump() << '\n';
  } else {
    out << format_fingerprint(fp) << '\n';
  }
  return kExitOk;
}

int cmd_develop(const std::string& file, const std::string& target, std::ostream& out) {
  const auto entry = load_entry(file);
  const Design design = develop_entry(entry);
  std::ofstream f(target);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + target);
  for (const auto& b : design.blocks()) {
    for (int i = 0; i < kBlockSize; ++i) f << (i ? " " : "") << point_name(design, b[i]);
    f << '\n';
  }
  out << "wrote " << design.block_count() << " blocks to " << target << '\n';
  return kExitOk;
}

int cmd_iso(const Options& opt, const std::string& a, const std::string& b, double limit, std::ostream& out) {
  const auto ea = load_entry(a);
  const auto eb = load_entry(b);
  SearchLimits limits;
  limits.time_limit_seconds = limit;
  IsoResult r;
  try {
    r = are_isomorphic(develop_entry(ea), develop_entry(eb), limits);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotFound) {
      out << "undecided: " << e.what() << '\n';
      return kExitBudget;
    }
    throw;
  }
  if (opt.json) {
    json j = {{"a", ea.id}, {"b", eb.id}, {"isomorphic", r.isomorphic}};
    if (r.witness) j["witness"] = *r.witness;
    out << j.dump() << '\n';
  } else {
    out << (r.isomorphic ? "isomorphic" : "non-isomorphic") << '\n';
  }
  return kExitOk;
}

int cmd_aut(const Options& opt, const std::string& file, double limit, std::ostream& out) {
  const auto entry = load_entry(file);
  const auto group = entry_group(entry);
  const Design design = develop(group, entry.family());
  SearchLimits limits;
  limits.time_limit_seconds = limit;
  const auto r = automorphism_group(design, limits);
  bool translations = true;
  for (int g = 0; g < group.order(); ++g) {
    translations = translations && is_automorphism(design, left_translation(group, g, design.point_count()));
  }
  if (opt.json) {
    out << json{{"id", entry.id},
                {"order", r.order},
                {"complete", r.complete},
                {"generators", r.generators.size()},
                {"translations_are_automorphisms", translations}}
               .dump()
        << '\n';
  } else {
    out << entry.id << ": automorphism group order " << r.order << (r.complete ? "" : " (lower bound)") << '\n';
    out << "generators: " << r.generators.size() << ", search nodes: " << r.nodes << '\n';
    out << "left translations: " << (translations ? "all automorphisms" : "FAILED") << '\n';
  }
  if (!translations) return kExitMismatch;
  return r.complete ? kExitOk : kExitBudget;
}

int cmd_catalog_check(const Options& opt, const std::string& filter, std::ostream& out, std::ostream& err) {
  const Catalog cat = load_catalog(opt.catalog_dir);
  std::vector<const CatalogEntry*> picked;
  for (const auto& e : cat.entries) {
    if (filter.empty() || glob_match(filter, e.id)) picked.push_back(&e);
  }
  struct Row {
    ReproductionRecord record;
    std::string error;
  };
  std::vector<Row> rows(picked.size());
  parallel_for(0, static_cast<int>(picked.size()), opt.threads, [&](int i, unsigned) {
    try {
      rows[i].record = reproduce(*picked[i], 1);
    } catch (const Error& e) {
      rows[i].record.id = picked[i]->id;
      rows[i].error = e.what();
    }
  });
  int failures = 0;
  for (const auto& row : rows) {
    const auto& r = row.record;
    const bool pass = row.error.empty() && r.steiner_ok && r.fingerprint_match;
    failures += pass ? 0 : 1;
    if (opt.json) {
      json j = {{"id", r.id},
                {"steiner_ok", r.steiner_ok},
                {"fingerprint_match", r.fingerprint_match},
                {"fingerprint", format_fingerprint(r.computed_fingerprint)},
                {"seconds", r.elapsed.count()},
                {"pass", pass}};
      if (!row.error.empty()) j["error"] = row.error;
      out << j.dump() << '\n';
    } else {
      out << std::left << std::setw(14) << r.id << (pass ? "PASS" : "FAIL") << "  steiner=" << (r.steiner_ok ? "yes" : "no")
          << " fingerprint=" << (r.fingerprint_match ? "match" : "differs") << "  " << std::fixed
          << std::setprecision(3) << r.elapsed.count() << "s";
      if (!row.error.empty()) out << "  " << row.error;
      out << '\n';
    }
  }
  if (filter.empty()) {
    for (const auto& c : check_counts(cat)) {
      failures += c.ok() ? 0 : 1;
      if (opt.json) {
        out << json{{"group", c.group}, {"expected", c.expected}, {"actual", c.actual}, {"pass", c.ok()}}.dump()
            << '\n';
      } else {
        out << "count " << c.group << ": " << c.actual << " of " << c.expected << (c.ok() ? "  PASS" : "  FAIL")
            << '\n';
      }
    }
  }
  if (!opt.json) out << rows.size() << " entries checked, " << failures << " failures\n";
  if (rows.empty()) err << "no catalog entries match '" << filter << "'\n";
  return failures == 0 ? kExitOk : kExitMismatch;
}

json read_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, file + ": " + e.what());
  }
}

struct SearchArgs {
  std::string group_file;
  std::string mode = "one-rotational";
  std::uint64_t max_nodes = 1'000'000;
  std::uint64_t max_solutions = 1;
  double time_limit = 60;
  bool canonicalize = false;
  std::string fixed_file;
};

int cmd_search(const Options& opt, const SearchArgs& a, std::ostream& out, std::ostream& err) {
  json spec_json = read_json_file(a.group_file);
  if (spec_json.is_object() && spec_json.contains("group")) spec_json = spec_json["group"];
  const GroupSpec spec = spec_from_json(spec_json);
  const auto base = std::filesystem::path(a.group_file).parent_path();
  const CayleyGroup group = build_group(spec, base);
  const DevelopmentMode mode = parse_mode(a.mode);
  SearchBudget budget{a.max_nodes, a.max_solutions, a.time_limit};

  int count = 0;
  const FamilySink sink = [&](const DifferenceFamily& fam) {
    ++count;
    CatalogEntry e;
    e.id = "search-" + std::to_string(count);
    e.group_spec = spec;
    e.mode = fam.mode;
    e.base_blocks = fam.base_blocks;
    e.expected_fingerprint = fingerprint(develop(group, fam), static_cast<int>(opt.threads));
    e.source = "search";
    out << entry_to_json(e).dump() << '\n';
    out.flush();
  };

  SearchOutcome r;
  if (!a.fixed_file.empty()) {
    const json fixed = read_json_file(a.fixed_file);
    if (!fixed.is_object() || !fixed.contains("base_blocks") || !fixed["base_blocks"].is_array()) {
      throw Error(ErrorCode::SchemaError, a.fixed_file + ": expected an object with base_blocks");
    }
    std::vector<std::vector<ElementLabel>> blocks;
    for (const auto& b : fixed["base_blocks"]) {
      std::vector<ElementLabel> block;
      for (const auto& l : b) block.push_back(label_from_json(l));
      blocks.push_back(std::move(block));
    }
    if (!blocks.empty()) validate_family_shape({mode, blocks});
    r = complete_family(make_partial(group, mode, std::move(blocks)), budget, sink);
  } else {
    const auto autos = a.canonicalize ? cyclic_multipliers(group) : std::vector<std::vector<int>>{};
    r = search_families(group, mode, budget, a.canonicalize, autos, sink);
  }
  err << "search: " << r.families.size() << " families, " << r.nodes << " nodes"
      << (r.budget_hit ? ", budget exhausted" : ", exhaustive within limits") << '\n';
  return r.budget_hit ? kExitBudget : kExitOk;
}

int cmd_group_validate(const std::string& file, std::ostream& out) {
  const auto table = read_cayley_table_file(file);
  const auto report = validate_table(table);
  if (report.ok()) {
    out << "valid group table of order " << table.size() << '\n';
    return kExitOk;
  }
  out << report.describe() << '\n';
  return kExitMismatch;
}

int cmd_group_reconstruct(const std::vector<std::string>& files, const std::string& target, std::ostream& out) {
  std::vector<OrderingCandidate> candidates;
  std::vector<DifferenceFamily> families;
  for (const auto& f : files) {
    const auto e = load_entry(f);
    if (candidates.empty()) candidates = e.structure_candidates;
    families.push_back(e.family());
  }
  if (candidates.empty()) throw Error(ErrorCode::SchemaError, "no structure_candidates in the given entries");
  const auto r = reconstruct_ordering(candidates, families);
  std::ofstream f(target);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + target);
  write_cayley_table(f, r.group);
  f << "# " << to_string(r.candidate.convention) << " ordering of " << describe(r.candidate.structure) << '\n';
  if (!r.pcgs.empty()) {
    f << "# pcgs (model indices):";
    for (int g : r.pcgs) f << ' ' << g;
    f << '\n';
  }
  f << "# validated against " << families.size() << " families\n";
  out << "wrote " << target << " (" << to_string(r.candidate.convention) << ", " << families.size()
      << " families validated)\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Unitals of order 5: develop, verify, fingerprint and compare S(2,6,126) designs"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--threads", opt.threads, "worker threads (0 = all cores)");
  app.add_option("--catalog-dir", opt.catalog_dir, "catalog root");

  std::string file, file_b, target, filter;
  double limit = 600;
  bool json_flag = false;

  auto* verify = app.add_subcommand("verify", "develop a family and verify S(2,6,126)");
  verify->add_option("family", file)->required();
  verify->add_flag("--json", json_flag);

  auto* fp = app.add_subcommand("fingerprint", "hyperbolic frequency fingerprint");
  fp->add_option("family", file)->required();
  fp->add_flag("--json", json_flag);

  auto* dev = app.add_subcommand("develop", "write the developed blocks");
  dev->add_option("family", file)->required();
  dev->add_option("--out", target, "output file")->required();

  auto* iso = app.add_subcommand("iso", "decide isomorphism of two developed designs");
  iso->add_option("a", file)->required();
  iso->add_option("b", file_b)->required();
  iso->add_option("--time-limit", limit, "seconds");
  iso->add_flag("--json", json_flag);

  auto* aut = app.add_subcommand("aut", "automorphism group order");
  aut->add_option("family", file)->required();
  aut->add_option("--time-limit", limit, "seconds");
  aut->add_flag("--json", json_flag);

  auto* catalog = app.add_subcommand("catalog", "catalog tools");
  catalog->require_subcommand(1);
  auto* check = catalog->add_subcommand("check", "reproduce catalog entries");
  check->add_option("--filter", filter, "id glob");
  check->add_flag("--json", json_flag);

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "bounded difference-family search");
  search->add_option("--group", sa.group_file, "group spec JSON file")->required();
  search->add_option("--mode", sa.mode, "transitive | one-rotational")->required();
  search->add_option("--max-nodes", sa.max_nodes);
  search->add_option("--max-solutions", sa.max_solutions);
  search->add_option("--time-limit", sa.time_limit, "seconds");
  search->add_flag("--canonicalize", sa.canonicalize);
  search->add_option("--fixed", sa.fixed_file, "family JSON whose base blocks are kept");

  auto* group = app.add_subcommand("group", "group tables");
  group->require_subcommand(1);
  auto* validate = group->add_subcommand("validate", "check the group axioms of a table");
  validate->add_option("table", file)->required();
  std::vector<std::string> entries;
  auto* reconstruct = group->add_subcommand("reconstruct", "find an element ordering that validates entries");
  reconstruct->add_option("entries", entries)->required();
  reconstruct->add_option("--out", target)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  opt.json = json_flag;

  try {
    if (*verify) return cmd_verify(opt, file, out);
    if (*fp) return cmd_fingerprint(opt, file, out);
    if (*dev) return cmd_develop(file, target, out);
    if (*iso) return cmd_iso(opt, file, file_b, limit, out);
    if (*aut) return cmd_aut(opt, file, limit, out);
    if (*check) return cmd_catalog_check(opt, filter, out, err);
    if (*search) return cmd_search(opt, sa, out, err);
    if (*validate) return cmd_group_validate(file, out);
    if (*reconstruct) return cmd_group_reconstruct(entries, target, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e);
  }
  return kExitUsage;
}

}  // namespace unital
