#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unital/design.hpp"
#include "unital/group.hpp"

namespace unital {

// counts[d] = number of ordered pairs (a, b), a != b, of finite entries of
// one base block with b^-1 * a == d, summed over the listed blocks.
struct DifferenceCoverage {
  std::vector<std::int64_t> counts;
  std::int64_t total() const;
};

DifferenceCoverage difference_coverage(const CayleyGroup& group, const DifferenceFamily& family);

struct DifferenceDefect {
  int element;        // group index; -1 stands for the pairs {x, inf}
  std::int64_t coverage;  // number of developed blocks through {e, element}
};

struct DifferenceCheck {
  bool ok = false;
  std::vector<DifferenceDefect> defects;
  std::string describe(const CayleyGroup& group) const;
};

/// Decides, without developing, whether the left development of `family`
/// is an S(2,6,126). Base blocks lying in a common orbit count once, block
/// stabilisers are divided out, and the pairs {x, inf} are counted over the
/// translates of the infinity blocks.
DifferenceCheck check_difference_family(const CayleyGroup& group, const DifferenceFamily& family);

/// Same check on blocks already resolved to point indices (infinity = |G|).
DifferenceCheck check_difference_blocks(const CayleyGroup& group, const std::vector<Block>& blocks);

/// Order of the left stabiliser {g : gB = B} of a block (infinity = |G|).
int block_stabilizer_order(const CayleyGroup& group, const Block& block);

/// Smallest sorted translate of a block; equal for blocks in one orbit.
Block orbit_representative(const CayleyGroup& group, const Block& block);

}  // namespace unital
