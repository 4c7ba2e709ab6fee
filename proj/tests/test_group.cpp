#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "unital/error.hpp"
#include "unital/group.hpp"
#include "unital/label.hpp"

using namespace unital;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

ElementLabel tup(std::vector<ElementLabel> parts) { return ElementLabel::tuple(std::move(parts)); }
ElementLabel num(int v) { return ElementLabel::integer(v); }

GroupSpec z25_by_z5(int image) {
  return GroupSpec::semidirect(GroupSpec::cyclic(25), GroupSpec::cyclic(5), {{num(1), num(image)}});
}

GroupSpec z5z5_by_z5() {
  return GroupSpec::semidirect(GroupSpec::product({GroupSpec::cyclic(5), GroupSpec::cyclic(5)}), GroupSpec::cyclic(5),
                               {{tup({num(0), num(1)}), tup({num(0), num(1)})},
                                {tup({num(1), num(0)}), tup({num(1), num(1)})}});
}

bool has_noncommuting_pair(const CayleyGroup& g) {
  for (int a = 0; a < g.order(); ++a) {
    for (int b = 0; b < g.order(); ++b) {
      if (g.mul(a, b) != g.mul(b, a)) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("labels parse and print") {
  CHECK(parse_element_label("(2, 13)") == tup({num(2), num(13)}));
  CHECK(parse_element_label("inf").is_infinity());
  CHECK(parse_element_label("∞").is_infinity());
  CHECK(parse_element_label("((0, 1), 3)") == tup({tup({num(0), num(1)}), num(3)}));
  CHECK(format_element_label(parse_element_label(" ( (0,1) ,3 ) ")) == "((0, 1), 3)");
  CHECK(format_element_label(parse_element_label("((0, 1), 3)"), true) == "((0,1),3)");
  CHECK(format_element_label(parse_element_label("∞")) == "inf");
  for (const char* bad : {"", "(", "(1,", "1 2", "x", "(1,,2)", "()"}) {
    CHECK_MESSAGE(code_of([&] { parse_element_label(bad); }) == ErrorCode::ParseError, bad);
  }
}

TEST_CASE("label round trip on every catalog group") {
  std::set<std::string> seen;
  for (const auto& e : fixture::catalog().entries) {
    if (!seen.insert(describe(e.group_spec)).second) continue;
    const auto& g = fixture::group_of(e);
    std::set<ElementLabel> distinct(g.labels().begin(), g.labels().end());
    CHECK(static_cast<int>(distinct.size()) == g.order());
    for (int x = 0; x < g.order(); ++x) {
      const auto back = parse_element_label(format_element_label(g.label(x)));
      REQUIRE(back == g.label(x));
      REQUIRE(g.find(back) == x);
    }
  }
}

TEST_CASE("cyclic group") {
  const auto g = build_group(GroupSpec::cyclic(5));
  CHECK(g.identity() == 0);
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) CHECK(g.multiply(a, b) == (a + b) % 5);
  }
  const auto z125 = build_group(GroupSpec::cyclic(125));
  CHECK(z125.multiply(100, 50) == 25);
  CHECK(z125.inverse(z125.identity()) == z125.identity());
  CHECK(z125.is_abelian());
  CHECK(code_of([&] { z125.multiply(125, 0); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { z125.inverse(-1); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("semidirect products follow the twisted multiplication") {
  const auto g = build_group(z25_by_z5(6));
  CHECK(g.order() == 125);
  const int a = g.resolve(tup({num(0), num(1)}));
  const int b = g.resolve(tup({num(1), num(0)}));
  CHECK(g.label(g.multiply(a, b)) == tup({num(6), num(1)}));
  CHECK(has_noncommuting_pair(g));

  // inverse((1,1)) found by scanning the row for the identity
  const int x = g.resolve(tup({num(1), num(1)}));
  int scanned = -1;
  for (int y = 0; y < g.order(); ++y) {
    if (g.multiply(x, y) == g.identity()) scanned = y;
  }
  CHECK(g.inverse(x) == scanned);
  CHECK(g.label(scanned).parts()[1] == num(4));
  CHECK(g.label(g.identity()) == tup({num(0), num(0)}));

  const auto h = build_group(z5z5_by_z5());
  const int p = h.resolve(tup({tup({num(1), num(0)}), num(1)}));
  const int q = h.resolve(tup({tup({num(1), num(0)}), num(0)}));
  CHECK(h.label(h.multiply(p, q)) == tup({tup({num(2), num(1)}), num(1)}));
  CHECK(has_noncommuting_pair(h));
}

TEST_CASE("mixed-radix order puts the leftmost coordinate first") {
  const auto g = build_group(GroupSpec::product({GroupSpec::cyclic(5), GroupSpec::cyclic(25)}));
  CHECK(g.label(1) == tup({num(0), num(1)}));
  CHECK(g.label(25) == tup({num(1), num(0)}));
  CHECK(g.table() == oracle::product_table(5, 25));
  CHECK(g.is_abelian());
}

TEST_CASE("semidirect order and action checks") {
  CHECK(build_group(GroupSpec::semidirect(GroupSpec::cyclic(7), GroupSpec::cyclic(6), {{num(1), num(3)}})).order() ==
        42);
  // 2 has order 3 mod 7, so Z2 cannot act by it
  CHECK(code_of([] {
          build_group(GroupSpec::semidirect(GroupSpec::cyclic(7), GroupSpec::cyclic(2), {{num(1), num(2)}}));
        }) == ErrorCode::OrderMismatch);
  CHECK(code_of([] { build_group(z25_by_z5(5)); }) == ErrorCode::InvalidAction);
  CHECK(code_of([] { build_group(GroupSpec::cyclic(0)); }) == ErrorCode::OrderMismatch);
}

TEST_CASE("table loader") {
  const auto z2 = load_cayley_table(std::string("2\n0 1\n1 0\n"));
  CHECK(z2.order() == 2);
  CHECK(z2.label(1) == num(1));

  try {
    load_cayley_table(std::string("2\n0 0\n1 0\n"));
    FAIL("accepted a non-Latin table");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ValidationError);
    CHECK(std::string(e.what()).find("row 0") != std::string::npos);
  }
  CHECK(code_of([] { load_cayley_table(std::string("2\n0 1\n1\n")); }) == ErrorCode::ParseError);
  CHECK(code_of([] { load_cayley_table(std::string("x\n")); }) == ErrorCode::ParseError);

  std::ostringstream text;
  text << 6 << '\n';
  for (const auto& row : oracle::product_table(2, 3)) {
    for (int v : row) text << v << ' ';
    text << '\n';
  }
  text << "# Z2 x Z3\n";
  const auto z6 = load_cayley_table(text.str());
  CHECK(z6.identity() == 0);
  CHECK(z6.table() == oracle::product_table(2, 3));

  std::ostringstream out;
  write_cayley_table(out, z6);
  CHECK(load_cayley_table(out.str()).table() == z6.table());
}

TEST_CASE("validation names the failing invariant") {
  auto t = build_group(GroupSpec::cyclic(125)).table();
  CHECK(validate_table(t).ok());

  // only table[3][3] changes, so (1, 2, 3) is the first triple that breaks
  t[3][3] = 99;
  const auto rep = validate_table(t);
  REQUIRE(rep.has(TableDefect::Kind::Associativity));
  CHECK(rep.describe().find("triple (1, 2, 3)") != std::string::npos);
  CHECK(rep.has(TableDefect::Kind::LatinRow));
  CHECK_FALSE(oracle::is_group(t));

  std::mt19937 rng(7);
  const auto square = oracle::non_associative_latin_square(rng);
  const auto sq = validate_table(square);
  CHECK(sq.has(TableDefect::Kind::Associativity));
  CHECK_FALSE(sq.has(TableDefect::Kind::LatinRow));
  CHECK_FALSE(sq.has(TableDefect::Kind::LatinColumn));
}

TEST_CASE("random mutations are caught and match the oracle") {
  std::mt19937 rng(2024);
  const std::vector<std::vector<std::vector<int>>> bases{
      build_group(GroupSpec::cyclic(12)).table(), oracle::product_table(2, 6),
      build_group(GroupSpec::semidirect(GroupSpec::cyclic(7), GroupSpec::cyclic(3), {{num(1), num(2)}})).table()};
  int caught = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto t = bases[trial % bases.size()];
    const int n = static_cast<int>(t.size());
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int r = pick(rng);
    const int c1 = pick(rng);
    int c2 = pick(rng);
    while (c2 == c1) c2 = pick(rng);
    std::swap(t[r][c1], t[r][c2]);
    const bool ok = validate_table(t).ok();
    CHECK(ok == oracle::is_group(t));
    caught += ok ? 0 : 1;
  }
  CHECK(caught == 300);
}

TEST_CASE("every shipped table satisfies the group axioms") {
  for (const auto& path : std::filesystem::directory_iterator(fixture::catalog_dir() / "tables")) {
    const auto t = read_cayley_table_file(path.path());
    CHECK_MESSAGE(oracle::is_group(t), path.path().string());
    CHECK(validate_table(t).ok());
    CHECK(t.size() == 126);
  }
}

TEST_CASE("reindexing keeps the group") {
  const auto g = build_group(z25_by_z5(6));
  std::mt19937 rng(3);
  auto order = fixture::random_permutation(g.order(), rng);
  const auto h = g.reindexed(order);
  CHECK(validate_table(h.table()).ok());
  for (int i = 0; i < 20; ++i) {
    const int a = rng() % g.order();
    const int b = rng() % g.order();
    CHECK(order[h.mul(a, b)] == g.mul(order[a], order[b]));
  }
}
