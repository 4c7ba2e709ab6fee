#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "unital/group.hpp"
#include "unital/label.hpp"

namespace unital {

inline constexpr int kUnitalPoints = 126;
inline constexpr int kUnitalBlocks = 525;
inline constexpr int kBlockSize = 6;
inline constexpr int kMaxPoints = 128;

enum class DevelopmentMode : std::uint8_t { Transitive, OneRotational };

std::string_view to_string(DevelopmentMode mode);
DevelopmentMode parse_mode(std::string_view text);

struct DifferenceFamily {
  DevelopmentMode mode = DevelopmentMode::Transitive;
  std::vector<std::vector<ElementLabel>> base_blocks;

  friend bool operator==(const DifferenceFamily&, const DifferenceFamily&) = default;
};

/// Six distinct entries per block; infinity only in one-rotational mode and
/// at most once per block. Throws Error(SchemaError).
void validate_family_shape(const DifferenceFamily& family);

using Block = std::array<int, kBlockSize>;

// Point set of one block as a 128-bit mask.
struct LineMask {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  void set(int p) noexcept {
    if (p < 64) lo |= std::uint64_t{1} << p;
    else hi |= std::uint64_t{1} << (p - 64);
  }
  bool test(int p) const noexcept {
    return p < 64 ? (lo >> p) & 1U : (hi >> (p - 64)) & 1U;
  }
  bool intersects(const LineMask& o) const noexcept { return ((lo & o.lo) | (hi & o.hi)) != 0; }
};

/// Incidence structure with sorted, deduplicated blocks of six points and
/// precomputed pair-to-block lookup. Immutable once built.
class Design {
public:
  Design(int point_count, std::vector<Block> blocks, std::vector<ElementLabel> point_labels = {});

  int point_count() const noexcept { return points_; }
  int block_count() const noexcept { return static_cast<int>(blocks_.size()); }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  const Block& block(int b) const { return blocks_.at(static_cast<std::size_t>(b)); }
  const LineMask& mask(int b) const noexcept { return masks_[b]; }
  /// Blocks dropped as duplicates while the block list was built.
  int duplicates_removed() const noexcept { return duplicates_; }

  /// The block through p and q; throws SamePoint, IndexOutOfRange, or
  /// NotASteinerSystem when no block contains the pair.
  int line_through(int p, int q) const;
  /// Unchecked lookup, -1 when the pair is uncovered or p == q.
  int line_index(int p, int q) const noexcept { return line_of_[p * points_ + q]; }

  std::span<const int> blocks_through(int p) const;
  const std::vector<ElementLabel>& point_labels() const noexcept { return labels_; }

private:
  int points_;
  int duplicates_ = 0;
  std::vector<Block> blocks_;
  std::vector<LineMask> masks_;
  std::vector<std::int16_t> line_of_;
  std::vector<int> incidence_;        // blocks through each point, concatenated
  std::vector<int> incidence_start_;  // size points_ + 1
  std::vector<ElementLabel> labels_;
};

/// Orbits of the given blocks under left multiplication by every element of
/// `group`; point indices >= group.order() are fixed by the action.
Design develop_orbits(const CayleyGroup& group, const std::vector<Block>& base_blocks,
                      int point_count, std::vector<ElementLabel> point_labels = {});

/// Left development of a difference family; infinity becomes point |G|.
/// Does not check the Steiner property.
Design develop(const CayleyGroup& group, const DifferenceFamily& family);

/// Base blocks as point indices (infinity = |G|), in family order.
std::vector<Block> resolve_blocks(const CayleyGroup& group, const DifferenceFamily& family);

struct PairDefect {
  int p;
  int q;
  int count;
};

struct VerificationReport {
  bool is_steiner = false;
  int block_count = 0;
  std::vector<PairDefect> pair_coverage_defects;
  int duplicate_blocks = 0;
};

VerificationReport verify_steiner(const Design& design);

/// Applies a point permutation (point p becomes perm[p]).
Design relabel(const Design& design, std::span<const int> perm);

/// Point permutation induced by left multiplication with g; fixed points
/// beyond the group stay put.
std::vector<int> left_translation(const CayleyGroup& group, int g, int point_count);

/// True when the permutation maps the block set of `design` onto itself.
bool is_automorphism(const Design& design, std::span<const int> perm);

}  // namespace unital
