#include "unital/design.hpp"

#include <algorithm>
#include <string>

#include "unital/error.hpp"

namespace unital {

std::string_view to_string(DevelopmentMode mode) {
  return mode == DevelopmentMode::Transitive ? "transitive" : "one-rotational";
}

DevelopmentMode parse_mode(std::string_view text) {
  if (text == "transitive") return DevelopmentMode::Transitive;
  if (text == "one-rotational" || text == "1-rotational") return DevelopmentMode::OneRotational;
  throw Error(ErrorCode::ParseError, "unknown development mode '" + std::string(text) + "'");
}

void validate_family_shape(const DifferenceFamily& family) {
  for (std::size_t b = 0; b < family.base_blocks.size(); ++b) {
    const auto& block = family.base_blocks[b];
    const std::string where = "base block " + std::to_string(b);
    if (block.size() != kBlockSize) {
      throw Error(ErrorCode::SchemaError, where + " has " + std::to_string(block.size()) +
                                              " entries, expected 6");
    }
    auto sorted = block;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorCode::SchemaError, where + " repeats an element");
    }
    const auto infinities = std::count_if(block.begin(), block.end(),
                                          [](const ElementLabel& l) { return l.is_infinity(); });
    if (infinities > 0 && family.mode != DevelopmentMode::OneRotational) {
      throw Error(ErrorCode::SchemaError, where + " uses infinity in transitive mode");
    }
  }
}

Design::Design(int point_count, std::vector<Block> blocks, std::vector<ElementLabel> point_labels)
    : points_(point_count), labels_(std::move(point_labels)) {
  if (points_ < 1 || points_ > kMaxPoints) {
    throw Error(ErrorCode::IndexOutOfRange, "point count must lie in 1..128");
  }
  for (auto& b : blocks) {
    std::sort(b.begin(), b.end());
    for (int p : b) {
      if (p < 0 || p >= points_) throw Error(ErrorCode::IndexOutOfRange, "block point out of range");
    }
    if (std::adjacent_find(b.begin(), b.end()) != b.end()) {
      throw Error(ErrorCode::SchemaError, "block repeats a point");
    }
  }
  std::sort(blocks.begin(), blocks.end());
  const auto before = blocks.size();
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
  duplicates_ = static_cast<int>(before - blocks.size());
  blocks_ = std::move(blocks);

  if (labels_.empty()) {
    for (int p = 0; p < points_; ++p) labels_.push_back(ElementLabel::integer(p));
  }

  masks_.resize(blocks_.size());
  line_of_.assign(static_cast<std::size_t>(points_) * points_, -1);
  std::vector<int> degree(points_, 0);
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    const auto& b = blocks_[bi];
    for (int i = 0; i < kBlockSize; ++i) {
      masks_[bi].set(b[i]);
      ++degree[b[i]];
      for (int j = 0; j < kBlockSize; ++j) {
        if (i == j) continue;
        auto& slot = line_of_[b[i] * points_ + b[j]];
        if (slot < 0) slot = static_cast<std::int16_t>(bi);
      }
    }
  }
  incidence_start_.assign(points_ + 1, 0);
  for (int p = 0; p < points_; ++p) incidence_start_[p + 1] = incidence_start_[p] + degree[p];
  incidence_.resize(incidence_start_.back());
  std::vector<int> fill(incidence_start_.begin(), incidence_start_.end() - 1);
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    for (int p : blocks_[bi]) incidence_[fill[p]++] = static_cast<int>(bi);
  }
}

int Design::line_through(int p, int q) const {
  if (p < 0 || p >= points_ || q < 0 || q >= points_) {
    throw Error(ErrorCode::IndexOutOfRange, "point out of range");
  }
  if (p == q) throw Error(ErrorCode::SamePoint, "line_through needs two distinct points");
  const int b = line_index(p, q);
  if (b < 0) {
    throw Error(ErrorCode::NotASteinerSystem,
                "no block through " + std::to_string(p) + " and " + std::to_string(q));
  }
  return b;
}

std::span<const int> Design::blocks_through(int p) const {
  if (p < 0 || p >= points_) throw Error(ErrorCode::IndexOutOfRange, "point out of range");
  return {incidence_.data() + incidence_start_[p],
          static_cast<std::size_t>(incidence_start_[p + 1] - incidence_start_[p])};
}

Design develop_orbits(const CayleyGroup& group, const std::vector<Block>& base_blocks,
                      int point_count, std::vector<ElementLabel> point_labels) {
  const int n = group.order();
  std::vector<Block> blocks;
  blocks.reserve(base_blocks.size() * static_cast<std::size_t>(n));
  for (const auto& base : base_blocks) {
    for (int g = 0; g < n; ++g) {
      Block img;
      for (int i = 0; i < kBlockSize; ++i) {
        img[i] = base[i] < n ? group.mul(g, base[i]) : base[i];
      }
      blocks.push_back(img);
    }
  }
  return Design(point_count, std::move(blocks), std::move(point_labels));
}

std::vector<Block> resolve_blocks(const CayleyGroup& group, const DifferenceFamily& family) {
  validate_family_shape(family);
  std::vector<Block> out;
  out.reserve(family.base_blocks.size());
  for (const auto& labels : family.base_blocks) {
    Block b;
    for (int i = 0; i < kBlockSize; ++i) {
      b[i] = labels[i].is_infinity() ? group.order() : group.resolve(labels[i]);
    }
    out.push_back(b);
  }
  return out;
}

Design develop(const CayleyGroup& group, const DifferenceFamily& family) {
  const int expected = family.mode == DevelopmentMode::Transitive ? kUnitalPoints : kUnitalPoints - 1;
  if (group.order() != expected) {
    throw Error(ErrorCode::ModeOrderMismatch,
                std::string(to_string(family.mode)) + " development needs a group of order " +
                    std::to_string(expected) + ", got " + std::to_string(group.order()));
  }
  const auto base = resolve_blocks(group, family);
  const int points = family.mode == DevelopmentMode::Transitive ? group.order() : group.order() + 1;
  std::vector<ElementLabel> labels = group.labels();
  if (points > group.order()) labels.push_back(ElementLabel::infinity());
  return develop_orbits(group, base, points, std::move(labels));
}

VerificationReport verify_steiner(const Design& design) {
  VerificationReport report;
  report.block_count = design.block_count();
  report.duplicate_blocks = design.duplicates_removed();
  const int n = design.point_count();
  std::vector<int> cover(static_cast<std::size_t>(n) * n, 0);
  for (const auto& b : design.blocks()) {
    for (int i = 0; i < kBlockSize; ++i) {
      for (int j = i + 1; j < kBlockSize; ++j) ++cover[b[i] * n + b[j]];
    }
  }
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const int c = cover[p * n + q];
      if (c != 1) report.pair_coverage_defects.push_back({p, q, c});
    }
  }
  report.is_steiner = n == kUnitalPoints && report.block_count == kUnitalBlocks &&
                      report.pair_coverage_defects.empty();
  return report;
}

namespace {

void check_permutation(std::span<const int> perm, int n) {
  if (static_cast<int>(perm.size()) != n) {
    throw Error(ErrorCode::NotAPermutation, "permutation has " + std::to_string(perm.size()) +
                                                " entries, expected " + std::to_string(n));
  }
  std::vector<char> seen(n, 0);
  for (int v : perm) {
    if (v < 0 || v >= n || seen[v]++) throw Error(ErrorCode::NotAPermutation, "not a bijection");
  }
}

}  // namespace

Design relabel(const Design& design, std::span<const int> perm) {
  check_permutation(perm, design.point_count());
  std::vector<Block> blocks;
  blocks.reserve(design.blocks().size());
  for (const auto& b : design.blocks()) {
    Block img;
    for (int i = 0; i < kBlockSize; ++i) img[i] = perm[b[i]];
    blocks.push_back(img);
  }
  return Design(design.point_count(), std::move(blocks));
}

std::vector<int> left_translation(const CayleyGroup& group, int g, int point_count) {
  std::vector<int> perm(point_count);
  for (int p = 0; p < point_count; ++p) perm[p] = p < group.order() ? group.multiply(g, p) : p;
  return perm;
}

bool is_automorphism(const Design& design, std::span<const int> perm) {
  check_permutation(perm, design.point_count());
  for (const auto& b : design.blocks()) {
    Block img;
    for (int i = 0; i < kBlockSize; ++i) img[i] = perm[b[i]];
    std::sort(img.begin(), img.end());
    if (!std::binary_search(design.blocks().begin(), design.blocks().end(), img)) return false;
  }
  return true;
}

}  // namespace unital
