#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "unital/difference.hpp"

using namespace unital;

namespace {

DifferenceFamily ints(DevelopmentMode mode, const std::vector<std::vector<int>>& blocks) {
  DifferenceFamily f{mode, {}};
  for (const auto& b : blocks) {
    f.base_blocks.emplace_back();
    for (int x : b) f.base_blocks.back().push_back(x < 0 ? ElementLabel::infinity() : ElementLabel::integer(x));
  }
  return f;
}

}  // namespace

TEST_CASE("coverage of the four full cyclic blocks") {
  const auto& e = fixture::entry("ex1-1");
  const auto& g = fixture::group_of(e);
  auto f = e.family();
  f.base_blocks.pop_back();
  const auto cov = difference_coverage(g, f);
  CHECK(cov.total() == 120);
  for (int d = 1; d < 125; ++d) {
    const bool subgroup = d % 25 == 0;
    CHECK_MESSAGE(cov.counts[d] == (subgroup ? 0 : 1), d);
  }
  CHECK(cov.counts[0] == 0);

  // the infinity block contributes the subgroup differences, 5 times each
  const auto full = difference_coverage(g, e.family());
  CHECK(full.total() == 140);
  for (int d : {25, 50, 75, 100}) CHECK(full.counts[d] == 5);
}

TEST_CASE("a repeated block doubles its differences") {
  const auto g = build_group(GroupSpec::cyclic(126));
  const auto once = difference_coverage(g, ints(DevelopmentMode::Transitive, {{0, 1, 3, 6, 11, 17}}));
  const auto twice =
      difference_coverage(g, ints(DevelopmentMode::Transitive, {{0, 1, 3, 6, 11, 17}, {0, 1, 3, 6, 11, 17}}));
  for (int d = 0; d < 126; ++d) CHECK(twice.counts[d] == 2 * once.counts[d]);
}

TEST_CASE("single block in Z126 against a direct count") {
  const auto g = build_group(GroupSpec::cyclic(126));
  const std::vector<int> b{0, 1, 3, 6, 11, 17};
  std::vector<std::int64_t> expected(126, 0);
  for (int a : b) {
    for (int c : b) {
      if (a != c) ++expected[((a - c) % 126 + 126) % 126];
    }
  }
  const auto cov = difference_coverage(g, ints(DevelopmentMode::Transitive, {b}));
  CHECK(cov.counts == expected);
  CHECK(cov.total() == 30);
  std::set<int> support;
  for (int d = 1; d <= 63; ++d) {
    if (cov.counts[d]) support.insert(d);
  }
  CHECK(support == std::set<int>{1, 2, 3, 5, 6, 8, 10, 11, 14, 16, 17});
}

TEST_CASE("exact families pass, corrupted ones name the defects") {
  const auto& e = fixture::entry("ex1-1");
  const auto& g = fixture::group_of(e);
  CHECK(check_difference_family(g, e.family()).ok);

  auto f = e.family();
  f.base_blocks[0][5] = ElementLabel::integer(73);
  const auto res = check_difference_family(g, f);
  CHECK_FALSE(res.ok);
  REQUIRE_FALSE(res.defects.empty());
  // 74 - 0 is lost, 72 = 73 - 1 is now covered twice
  bool under = false;
  bool over = false;
  for (const auto& d : res.defects) {
    if (d.element == 74) under = under || d.coverage == 0;
    if (d.element == 72) over = over || d.coverage == 2;
  }
  CHECK(under);
  CHECK(over);
  CHECK(res.describe(g).find("covered 0x") != std::string::npos);

  CHECK_FALSE(check_difference_family(g, {DevelopmentMode::OneRotational, {}}).ok);
}

TEST_CASE("left stabilisers and orbit representatives") {
  const auto& g = fixture::group_of(fixture::entry("ex1-1"));
  CHECK(block_stabilizer_order(g, Block{0, 25, 50, 75, 100, 125}) == 5);
  CHECK(block_stabilizer_order(g, Block{0, 1, 3, 15, 47, 74}) == 1);
  CHECK(orbit_representative(g, Block{10, 35, 60, 85, 110, 125}) == Block{0, 25, 50, 75, 100, 125});
  CHECK(orbit_representative(g, Block{1, 2, 4, 16, 48, 75}) == orbit_representative(g, Block{0, 1, 3, 15, 47, 74}));
}

TEST_CASE("agrees with develop and verify on the catalog") {
  std::mt19937 rng(9);
  for (const auto& e : fixture::catalog().entries) {
    if (e.id.rfind("sg126-10-", 0) == 0 && rng() % 20 != 0) continue;
    const auto& g = fixture::group_of(e);
    const bool algebraic = check_difference_family(g, e.family()).ok;
    const bool developed = verify_steiner(develop(g, e.family())).is_steiner;
    CHECK_MESSAGE(algebraic == developed, e.id);
    CHECK_MESSAGE(algebraic, e.id);
  }
}

TEST_CASE("agrees with develop and verify on corrupted families") {
  std::mt19937 rng(21);
  const auto& entries = fixture::catalog().entries;
  int rejected = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto& e = entries[rng() % entries.size()];
    const auto& g = fixture::group_of(e);
    auto f = e.family();
    auto& block = f.base_blocks[rng() % f.base_blocks.size()];
    const auto pos = rng() % block.size();
    if (block[pos].is_infinity()) continue;
    const auto replacement = g.label(static_cast<int>(rng() % g.order()));
    if (std::find(block.begin(), block.end(), replacement) != block.end()) continue;
    block[pos] = replacement;
    const bool algebraic = check_difference_family(g, f).ok;
    const bool developed = verify_steiner(develop(g, f)).is_steiner;
    CHECK_MESSAGE(algebraic == developed, e.id);
    rejected += algebraic ? 0 : 1;
  }
  CHECK(rejected > 0);
}

TEST_CASE("same-orbit blocks count once") {
  // a translate of a listed block adds nothing new to the design
  const auto& e = fixture::entry("ex1-2");
  const auto& g = fixture::group_of(e);
  auto f = e.family();
  auto shifted = f.base_blocks[0];
  for (auto& x : shifted) x = ElementLabel::integer((x.value() + 7) % 125);
  f.base_blocks.push_back(shifted);
  CHECK(check_difference_family(g, f).ok == verify_steiner(develop(g, f)).is_steiner);
  CHECK(check_difference_family(g, f).ok);
}

TEST_CASE("non-abelian families use left differences") {
  for (const char* id : {"ex3-2", "ex4-1", "sg126-1-1", "sg126-8-25"}) {
    const auto& e = fixture::entry(id);
    const auto& g = fixture::group_of(e);
    const auto blocks = resolve_blocks(g, e.family());
    std::vector<std::int64_t> right(g.order(), 0);
    for (const auto& b : blocks) {
      for (int x : b) {
        for (int y : b) {
          if (x != y && x < g.order() && y < g.order()) ++right[g.mul(x, g.inv(y))];
        }
      }
    }
    CHECK(check_difference_family(g, e.family()).ok);
    CHECK(difference_coverage(g, e.family()).counts != right);
  }
}
