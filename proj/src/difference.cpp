#include "unital/difference.hpp"

#include <algorithm>

#include "unital/error.hpp"

namespace unital {

std::int64_t DifferenceCoverage::total() const {
  std::int64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

DifferenceCoverage difference_coverage(const CayleyGroup& group, const DifferenceFamily& family) {
  const auto blocks = resolve_blocks(group, family);
  const int n = group.order();
  DifferenceCoverage cov;
  cov.counts.assign(n, 0);
  for (const auto& b : blocks) {
    for (int i = 0; i < kBlockSize; ++i) {
      for (int j = 0; j < kBlockSize; ++j) {
        if (i == j || b[i] >= n || b[j] >= n) continue;
        ++cov.counts[group.mul(group.inv(b[j]), b[i])];
      }
    }
  }
  return cov;
}

int block_stabilizer_order(const CayleyGroup& group, const Block& block) {
  const int n = group.order();
  Block sorted = block;
  std::sort(sorted.begin(), sorted.end());
  // a stabilising g maps some finite entry a to the first finite entry f, so
  // g = f * a^-1; checking those candidates suffices
  const int first = sorted[0];
  if (first >= n) return n;
  int count = 0;
  for (int a : sorted) {
    if (a >= n) continue;
    const int g = group.mul(first, group.inv(a));
    Block img;
    for (int i = 0; i < kBlockSize; ++i) img[i] = sorted[i] < n ? group.mul(g, sorted[i]) : sorted[i];
    std::sort(img.begin(), img.end());
    if (img == sorted) ++count;
  }
  return count;
}

Block orbit_representative(const CayleyGroup& group, const Block& block) {
  const int n = group.order();
  Block best{};
  bool have = false;
  for (int a : block) {
    if (a >= n) continue;
    const int g = group.inv(a);
    Block img;
    for (int i = 0; i < kBlockSize; ++i) img[i] = block[i] < n ? group.mul(g, block[i]) : block[i];
    std::sort(img.begin(), img.end());
    if (!have || img < best) best = img;
    have = true;
  }
  if (!have) {
    best = block;
    std::sort(best.begin(), best.end());
  }
  return best;
}

DifferenceCheck check_difference_blocks(const CayleyGroup& group, const std::vector<Block>& input) {
  const int n = group.order();
  // develop() merges base blocks from a common orbit, so do the same here
  std::vector<Block> reps;
  std::vector<Block> blocks;
  for (const auto& b : input) {
    const Block r = orbit_representative(group, b);
    if (std::find(reps.begin(), reps.end(), r) != reps.end()) continue;
    reps.push_back(r);
    blocks.push_back(b);
  }

  // Pair {e, q} lies in g*B iff g = a^-1 and q = a^-1 * b for a, b in B.
  // Each distinct block through e is reached once per stabiliser element.
  std::vector<std::int64_t> weighted(n, 0);  // scaled by 60 = lcm of stabiliser orders
  std::int64_t infinity_weighted = 0;
  bool has_infinity = false;
  for (const auto& b : blocks) {
    const int s = block_stabilizer_order(group, b);
    const std::int64_t w = 60 / s;
    for (int i = 0; i < kBlockSize; ++i) {
      if (b[i] >= n) {
        has_infinity = true;
        continue;
      }
      const int ai = group.inv(b[i]);
      for (int j = 0; j < kBlockSize; ++j) {
        if (i == j) continue;
        if (b[j] >= n) {
          infinity_weighted += w;
          continue;
        }
        weighted[group.mul(ai, b[j])] += w;
      }
    }
  }

  DifferenceCheck result;
  for (int q = 0; q < n; ++q) {
    if (q == group.identity()) continue;
    if (weighted[q] != 60) result.defects.push_back({q, weighted[q] / 60});
  }
  const bool one_rotational = has_infinity || n == kUnitalPoints - 1;
  if (one_rotational && infinity_weighted != 60) {
    result.defects.push_back({-1, infinity_weighted / 60});
  }
  const int points = one_rotational ? n + 1 : n;
  result.ok = result.defects.empty() && points == kUnitalPoints;
  return result;
}

DifferenceCheck check_difference_family(const CayleyGroup& group, const DifferenceFamily& family) {
  const int expected = family.mode == DevelopmentMode::Transitive ? kUnitalPoints : kUnitalPoints - 1;
  if (group.order() != expected) {
    throw Error(ErrorCode::ModeOrderMismatch,
                std::string(to_string(family.mode)) + " families need a group of order " +
                    std::to_string(expected));
  }
  return check_difference_blocks(group, resolve_blocks(group, family));
}

std::string DifferenceCheck::describe(const CayleyGroup& group) const {
  if (ok) return "exact";
  std::string out;
  for (const auto& d : defects) {
    if (!out.empty()) out += ", ";
    if (d.element < 0) out += "{x, inf}";
    else out += format_element_label(group.label(d.element));
    out += " covered " + std::to_string(d.coverage) + "x";
  }
  return out.empty() ? "wrong point count" : out;
}

}  // namespace unital
