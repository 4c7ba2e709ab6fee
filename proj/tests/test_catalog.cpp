#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "unital/catalog.hpp"
#include "unital/error.hpp"

using namespace unital;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("unital-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static inline int counter = 0;
};

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
}

ErrorCode load_error(const std::string& text) {
  TempDir dir;
  write(dir.path / "e.json", text);
  try {
    load_entry(dir.path / "e.json");
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

std::string ex1_1_text() {
  std::ifstream in(fixture::catalog_dir() / "z125" / "ex1-1.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  return s.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("loading the first entry") {
  const auto e = load_entry(fixture::catalog_dir() / "z125" / "ex1-1.json");
  CHECK(e.id == "ex1-1");
  CHECK(e.mode == DevelopmentMode::OneRotational);
  REQUIRE(e.base_blocks.size() == 5);
  CHECK(e.base_blocks[4][5].is_infinity());
  CHECK(e.base_blocks[4][0] == ElementLabel::integer(0));
  CHECK(e.base_blocks[4][1] == ElementLabel::integer(25));
  CHECK(format_fingerprint(e.expected_fingerprint) == "{1=25000, 2=580500, 3=3042000, 4=3912500}");
}

TEST_CASE("malformed entries") {
  const auto good = ex1_1_text();
  CHECK(load_error(replace(good, "[0, 1, 3, 15, 47, 74]", "[0, 1, 3, 15, 47]")) == ErrorCode::SchemaError);
  CHECK(load_error(replace(good, "\"1\": 25000", "\"1\": 25001")) == ErrorCode::SumInvariantError);
  CHECK(load_error(replace(good, "\"one-rotational\"", "\"sideways\"")) == ErrorCode::SchemaError);
  CHECK(load_error(good.substr(0, good.size() / 2)) == ErrorCode::ParseError);
  CHECK(load_error(replace(good, "\"id\": \"ex1-1\",", "")) == ErrorCode::SchemaError);
  try {
    load_entry("/nonexistent/entry.json");
    FAIL("missing file accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("save and load are inverse on every shipped entry") {
  TempDir dir;
  for (const auto& e : fixture::catalog().entries) {
    const auto file = dir.path / (e.id + ".json");
    save_entry(e, file);
    const auto back = load_entry(file);
    REQUIRE_MESSAGE(back.id == e.id, e.id);
    CHECK(back.group_name == e.group_name);
    CHECK(back.group_spec == e.group_spec);
    CHECK(back.mode == e.mode);
    CHECK(back.base_blocks == e.base_blocks);
    CHECK(back.expected_fingerprint == e.expected_fingerprint);
    CHECK(back.source == e.source);
    CHECK(back.structure_candidates == e.structure_candidates);
    CHECK(entry_to_json(back) == entry_to_json(e));
  }
}

TEST_CASE("every expected fingerprint totals 7560000") {
  for (const auto& e : fixture::catalog().entries) CHECK_MESSAGE(e.expected_fingerprint.total() == 7'560'000, e.id);
}

TEST_CASE("reproduction") {
  const auto r = reproduce(fixture::entry("ex1-1"));
  CHECK(r.id == "ex1-1");
  CHECK(r.steiner_ok);
  CHECK(r.fingerprint_match);

  const auto classical = reproduce(fixture::entry("ex3-1"));
  CHECK(format_fingerprint(classical.computed_fingerprint) == "{4=7560000}");
  CHECK(classical.fingerprint_match);

  auto bad = fixture::entry("ex1-1");
  bad.base_blocks[0][5] = ElementLabel::integer(73);
  const auto broken = reproduce(bad);
  CHECK_FALSE(broken.steiner_ok);
  CHECK_FALSE(broken.fingerprint_match);

  auto missing = fixture::entry("sg126-1-1");
  missing.group_spec = GroupSpec::external("../tables/absent.txt");
  try {
    reproduce(missing);
    FAIL("missing table accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GroupUnavailable);
  }
}

TEST_CASE("all shipped entries reproduce") {
  for (const auto& e : fixture::catalog().entries) {
    const auto r = reproduce(e);
    CHECK_MESSAGE(r.steiner_ok, e.id);
    CHECK_MESSAGE(r.fingerprint_match, e.id);
  }
}

TEST_CASE("counts of the fully transcribed groups") {
  const std::map<std::string, int> expected{{"z125", 8},     {"z5xz25", 32},  {"z5xz5-z5", 20}, {"z25-z5", 29},
                                            {"z5xz5xz5", 8}, {"sg126-1", 3},  {"sg126-3", 1},   {"sg126-7", 2}};
  const auto checks = check_counts(fixture::catalog());
  for (const auto& [dir, n] : expected) {
    CHECK_MESSAGE(fixture::catalog().in_group(dir).size() == static_cast<std::size_t>(n), dir);
    const auto& groups = fixture::catalog().groups;
    const auto g = std::find_if(groups.begin(), groups.end(), [&](const CatalogGroup& c) { return c.directory == dir; });
    REQUIRE(g != groups.end());
    const auto it = std::find_if(checks.begin(), checks.end(), [&](const CountCheck& c) { return c.group == g->name; });
    REQUIRE(it != checks.end());
    CHECK(it->ok());
  }
  int one_rotational = 0;
  for (const auto& e : fixture::catalog().entries) one_rotational += e.mode == DevelopmentMode::OneRotational;
  CHECK(one_rotational == 97);
  CHECK_THROWS_AS(fixture::catalog().find("ex9-9"), Error);
}

TEST_CASE("index problems") {
  TempDir dir;
  const auto entry = ex1_1_text();
  write(dir.path / "a" / "ex1-1.json", entry);
  write(dir.path / "b" / "ex1-1.json", entry);
  write(dir.path / "index.json",
        R"({"groups": [{"name": "A", "directory": "a", "expected_count": 1},
                       {"name": "B", "directory": "b", "expected_count": 1}]})");
  try {
    load_catalog(dir.path);
    FAIL("duplicate id accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DuplicateKey);
  }
  write(dir.path / "index.json", R"({"groups": [{"name": "A", "directory": "a", "expected_count": 2}]})");
  const auto c = load_catalog(dir.path);
  REQUIRE(check_counts(c).size() == 1);
  CHECK(check_counts(c)[0].actual == 1);
  CHECK_FALSE(check_counts(c)[0].ok());
}

TEST_CASE("id ordering and globbing") {
  CHECK(id_less("ex1-2", "ex1-10"));
  CHECK_FALSE(id_less("ex1-10", "ex1-2"));
  CHECK(id_less("ex5-8", "sg126-1-1"));
  CHECK(id_less("sg126-3-1", "sg126-10-1"));
  CHECK(glob_match("ex1-*", "ex1-7"));
  CHECK_FALSE(glob_match("ex1-*", "ex2-1"));
  CHECK(glob_match("sg126-?-1", "sg126-7-1"));
  CHECK_FALSE(glob_match("sg126-?-1", "sg126-10-1"));
  CHECK(glob_match("*", ""));
  CHECK(glob_match("*-1", "sg126-8-1"));
}

TEST_CASE("ordering reconstruction") {
  const auto& ex1 = fixture::entry("ex1-1");
  const auto cyclic = reconstruct_ordering({{GroupSpec::cyclic(125), OrderingConvention::MixedRadix, {}}}, {ex1.family()});
  CHECK(cyclic.group.order() == 125);

  std::vector<DifferenceFamily> ex4;
  for (const auto* e : fixture::catalog().in_group("z25-z5")) ex4.push_back(e->family());
  const auto spec = fixture::entry("ex4-1").group_spec;
  int validated = 0;
  for (const std::vector<int>& order : {std::vector<int>{}, std::vector<int>{1, 0}}) {
    try {
      const auto r = reconstruct_ordering({{spec, OrderingConvention::MixedRadix, order}}, ex4);
      ++validated;
      CHECK(order.empty());
      CHECK(r.group.table() == build_group(spec).table());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotFound);
    }
  }
  CHECK(validated == 1);

  auto wrong = spec;
  wrong.action[0].second = ElementLabel::integer(7);
  for (const std::vector<int>& order : {std::vector<int>{}, std::vector<int>{1, 0}}) {
    try {
      reconstruct_ordering({{wrong, OrderingConvention::MixedRadix, order}}, ex4);
      FAIL("wrong action validated");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotFound);
    }
  }
}

TEST_CASE("pc-shortlex reconstruction reproduces a shipped table") {
  const auto& e = fixture::entry("sg126-3-1");
  REQUIRE_FALSE(e.structure_candidates.empty());
  const auto r = reconstruct_ordering(e.structure_candidates, {e.family()});
  CHECK(r.candidate.convention == OrderingConvention::PcShortlex);
  CHECK(r.group.table() == read_cayley_table_file(fixture::catalog_dir() / "tables" / "sg126-3.txt"));
}

TEST_CASE("coordinate reordering") {
  const auto model = build_group(GroupSpec::product({GroupSpec::cyclic(5), GroupSpec::cyclic(25)}));
  const auto swapped = apply_coordinate_order(model, {1, 0});
  CHECK(swapped.label(1) == parse_element_label("(0, 1)"));
  CHECK(swapped.label(5) == parse_element_label("(1, 0)"));
  CHECK(swapped.table() == oracle::product_table(25, 5));
}
