#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "unital/design.hpp"
#include "unital/group.hpp"

namespace unital {

struct SearchBudget {
  std::uint64_t max_nodes = 1'000'000;
  std::uint64_t max_solutions = 1;
  double time_limit_seconds = 60;
};

/// Accepted base blocks plus the differences they leave open. Build with
/// make_partial so that `uncovered` stays consistent with `fixed_blocks`.
struct PartialFamily {
  const CayleyGroup* group = nullptr;
  DevelopmentMode mode = DevelopmentMode::OneRotational;
  std::vector<std::vector<ElementLabel>> fixed_blocks;
  std::vector<bool> uncovered;  // indexed by element; identity is never uncovered
  bool has_infinity_block = false;
};

/// Throws InconsistentPartial when a difference is covered more than once,
/// a block repeats an orbit, or more than one block contains infinity.
PartialFamily make_partial(const CayleyGroup& group, DevelopmentMode mode,
                           std::vector<std::vector<ElementLabel>> fixed_blocks);

struct SearchOutcome {
  std::vector<DifferenceFamily> families;
  bool budget_hit = false;
  std::uint64_t nodes = 0;
};

using FamilySink = std::function<void(const DifferenceFamily&)>;

/// Exhaustive within the budget. New blocks always contain the identity and
/// the smallest open difference; in one-rotational mode the missing block
/// through infinity is H + {inf} for a subgroup H of order 5.
SearchOutcome complete_family(const PartialFamily& partial, const SearchBudget& budget,
                              const FamilySink& sink = {});

/// Searches from scratch. With `canonicalize`, a family is emitted only if
/// no element of the group generated by `automorphisms` maps it to a
/// smaller family, and only if its developed design is new up to
/// isomorphism. Throws UnsupportedCanonicalization for non-abelian groups.
SearchOutcome search_families(const CayleyGroup& group, DevelopmentMode mode, const SearchBudget& budget,
                              bool canonicalize, const std::vector<std::vector<int>>& automorphisms = {},
                              const FamilySink& sink = {});

/// x -> u*x for every unit u, as permutations of element indices. Requires
/// a cyclic group; returns an empty list otherwise.
std::vector<std::vector<int>> cyclic_multipliers(const CayleyGroup& group);

}  // namespace unital
