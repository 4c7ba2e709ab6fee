#include <functional>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "unital/difference.hpp"
#include "unital/error.hpp"
#include "unital/isomorph.hpp"
#include "unital/search.hpp"

using namespace unital;

namespace {

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

void check_all_valid(const CayleyGroup& g, const SearchOutcome& out) {
  for (const auto& f : out.families) {
    CHECK(check_difference_family(g, f).ok);
    CHECK(verify_steiner(develop(g, f)).is_steiner);
  }
}

std::vector<std::vector<ElementLabel>> without(std::vector<std::vector<ElementLabel>> blocks, std::size_t i) {
  blocks.erase(blocks.begin() + static_cast<std::ptrdiff_t>(i));
  return blocks;
}

}  // namespace

TEST_CASE("completing the infinity block") {
  const auto& e = fixture::entry("ex1-1");
  const auto& g = fixture::group_of(e);
  const auto partial = make_partial(g, DevelopmentMode::OneRotational, without(e.base_blocks, 4));
  CHECK_FALSE(partial.has_infinity_block);
  int open = 0;
  for (bool u : partial.uncovered) open += u;
  CHECK(open == 4);
  CHECK_FALSE(partial.uncovered[g.identity()]);

  const auto out = complete_family(partial, {});
  CHECK_FALSE(out.budget_hit);
  REQUIRE(out.families.size() == 1);
  CHECK(out.families[0].base_blocks.back() == e.base_blocks[4]);
  check_all_valid(g, out);
}

TEST_CASE("a complete family returns itself") {
  const auto& e = fixture::entry("ex1-1");
  const auto& g = fixture::group_of(e);
  const auto out = complete_family(make_partial(g, DevelopmentMode::OneRotational, e.base_blocks),
                                   SearchBudget{1'000'000, 10, 60});
  REQUIRE(out.families.size() == 1);
  CHECK(out.families[0] == e.family());
}

TEST_CASE("removing any full block of a cyclic family is recoverable") {
  for (const auto* e : fixture::catalog().in_group("z125")) {
    const auto& g = fixture::group_of(*e);
    for (std::size_t i = 0; i < 4; ++i) {
      const auto out = complete_family(make_partial(g, e->mode, without(e->base_blocks, i)), {});
      CHECK_MESSAGE(out.families.size() == 1, e->id);
      CHECK(out.nodes <= 1'000'000);
      check_all_valid(g, out);
    }
  }
}

TEST_CASE("non-abelian and short-orbit completions") {
  for (const char* id : {"ex3-4", "ex4-2", "sg126-1-1", "sg126-3-1", "sg126-7-2"}) {
    const auto& e = fixture::entry(id);
    const auto& g = fixture::group_of(e);
    const auto blocks = resolve_blocks(g, e.family());
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const auto out =
          complete_family(make_partial(g, e.mode, without(e.base_blocks, i)), SearchBudget{1'000'000, 5, 60});
      CHECK_MESSAGE(!out.families.empty(), id);
      check_all_valid(g, out);
      // the removed block's orbit is among the completions
      const auto want = orbit_representative(g, blocks[i]);
      bool found = false;
      for (const auto& f : out.families) {
        for (const auto& b : resolve_blocks(g, f)) found = found || orbit_representative(g, b) == want;
      }
      CHECK_MESSAGE(found, id << " block " << i << " stabiliser " << block_stabilizer_order(g, blocks[i]));
    }
  }
}

TEST_CASE("inconsistent partials") {
  const auto& e = fixture::entry("ex1-1");
  const auto& g = fixture::group_of(e);
  auto twice = without(e.base_blocks, 4);
  twice[1] = twice[0];
  CHECK(error_of([&] { make_partial(g, DevelopmentMode::OneRotational, twice); }) == ErrorCode::InconsistentPartial);

  auto overlap = without(e.base_blocks, 4);
  overlap[1][1] = ElementLabel::integer(1);  // 1 - 0 is already covered by block 0
  CHECK(error_of([&] { make_partial(g, DevelopmentMode::OneRotational, overlap); }) ==
        ErrorCode::InconsistentPartial);

  auto two_inf = e.base_blocks;
  two_inf.push_back({ElementLabel::integer(0), ElementLabel::integer(5), ElementLabel::integer(10),
                     ElementLabel::integer(15), ElementLabel::integer(20), ElementLabel::infinity()});
  CHECK(error_of([&] { make_partial(g, DevelopmentMode::OneRotational, two_inf); }) ==
        ErrorCode::InconsistentPartial);

  auto partial = make_partial(g, DevelopmentMode::OneRotational, without(e.base_blocks, 0));
  partial.uncovered[1] = !partial.uncovered[1];
  CHECK(error_of([&] { complete_family(partial, {}); }) == ErrorCode::InconsistentPartial);

  CHECK(error_of([&] { make_partial(g, DevelopmentMode::Transitive, {}); }) == ErrorCode::ModeOrderMismatch);
}

TEST_CASE("budgets") {
  const auto& g = fixture::group_of(fixture::entry("ex1-1"));
  const auto out = search_families(g, DevelopmentMode::OneRotational, SearchBudget{1, 1, 60}, false);
  CHECK(out.families.empty());
  CHECK(out.budget_hit);

  const auto timed = search_families(g, DevelopmentMode::OneRotational, SearchBudget{0, 1, 0.5}, false);
  CHECK(timed.budget_hit);
  check_all_valid(g, timed);
}

TEST_CASE("canonical search needs an abelian group") {
  const auto& g = fixture::group_of(fixture::entry("ex4-1"));
  CHECK(error_of([&] { search_families(g, DevelopmentMode::OneRotational, SearchBudget{10, 1, 1}, true); }) ==
        ErrorCode::UnsupportedCanonicalization);
  CHECK_NOTHROW(search_families(g, DevelopmentMode::OneRotational, SearchBudget{10, 1, 1}, false));
}

TEST_CASE("cyclic multipliers") {
  const auto& g = fixture::group_of(fixture::entry("ex1-1"));
  const auto m = cyclic_multipliers(g);
  CHECK(m.size() == 99);  // units other than 1
  for (const auto& perm : m) {
    for (int a = 0; a < 125; a += 7) {
      for (int b = 0; b < 125; b += 11) REQUIRE(perm[g.mul(a, b)] == g.mul(perm[a], perm[b]));
    }
  }
  CHECK(cyclic_multipliers(fixture::group_of(fixture::entry("ex2-1"))).empty());
}

TEST_CASE("two open blocks") {
  const auto& e = fixture::entry("ex1-2");
  const auto& g = fixture::group_of(e);
  const auto partial = make_partial(g, e.mode, without(without(e.base_blocks, 3), 2));
  std::set<std::string> keys;
  const auto out = complete_family(partial, SearchBudget{0, 50, 60}, [&](const DifferenceFamily& f) {
    CHECK(check_difference_family(g, f).ok);
    keys.insert(canonical_key(develop(g, f)));
  });
  CHECK_FALSE(out.budget_hit);
  CHECK_FALSE(out.families.empty());
  CHECK(keys.count(canonical_key(develop(g, e.family()))) == 1);
}

TEST_CASE("canonical search emits pairwise non-isomorphic families") {
  const auto& g = fixture::group_of(fixture::entry("ex1-1"));
  std::set<std::string> keys;
  const auto out = search_families(g, DevelopmentMode::OneRotational, SearchBudget{200'000, 5, 30}, true,
                                   cyclic_multipliers(g), [&](const DifferenceFamily& f) {
                                     CHECK(keys.insert(canonical_key(develop(g, f))).second);
                                   });
  CHECK(keys.size() == out.families.size());
  check_all_valid(g, out);
}

TEST_CASE("searches are deterministic") {
  const auto& e = fixture::entry("ex1-5");
  const auto& g = fixture::group_of(e);
  const auto partial = make_partial(g, e.mode, without(without(e.base_blocks, 1), 0));
  const auto a = complete_family(partial, SearchBudget{0, 20, 60});
  const auto b = complete_family(partial, SearchBudget{0, 20, 60});
  CHECK(a.families == b.families);
  CHECK(a.nodes == b.nodes);
}
