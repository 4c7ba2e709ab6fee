#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unital/design.hpp"
#include "unital/fingerprint.hpp"

namespace unital {

struct OrderedPartition {
  std::vector<std::vector<int>> cells;
  std::vector<int> cell_of;
};

/// Points grouped by their fingerprint profile (cells ordered by profile),
/// then refined until stable under block incidence and the pairwise
/// hyperbolic counts. Isomorphism invariant.
OrderedPartition initial_partition(const Design& design);

struct SearchLimits {
  std::uint64_t max_nodes = 0;     // 0 = unlimited
  double time_limit_seconds = 0;   // 0 = unlimited
};

struct AutomorphismResult {
  std::uint64_t order = 1;  // exact when complete, otherwise a lower bound
  bool complete = false;
  std::vector<std::vector<int>> generators;
  std::vector<int> base;  // points individualised along the first path
  std::uint64_t nodes = 0;
};

/// Full automorphism group via individualisation-refinement with orbit
/// counting along the first path. Every generator is re-verified.
AutomorphismResult automorphism_group(const Design& design, const SearchLimits& limits = {});

/// Order of the automorphism group; throws NotFound if `limits` cut the
/// search short. Default budget is ten minutes.
std::uint64_t automorphism_order(const Design& design);

struct CanonicalForm {
  std::string key;             // relabelled block list, one byte per point
  std::vector<int> labeling;   // point -> canonical position
  bool complete = false;
  std::uint64_t nodes = 0;
};

CanonicalForm canonical_form(const Design& design, const SearchLimits& limits = {});

/// Equal for two designs exactly when they are isomorphic. Throws NotFound
/// if the limits are hit.
std::string canonical_key(const Design& design, const SearchLimits& limits = {});

struct IsoResult {
  bool isomorphic = false;
  std::optional<std::vector<int>> witness;  // point of a -> point of b
};

/// Complete decision. Designs with different fingerprints are rejected
/// without searching. Witnesses are checked before they are returned.
IsoResult are_isomorphic(const Design& a, const Design& b, const SearchLimits& limits = {});

}  // namespace unital
