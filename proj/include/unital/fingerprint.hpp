#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "unital/design.hpp"

namespace unital {

inline constexpr std::uint64_t kFingerprintTotal = 7'560'000;

/// Histogram count -> frequency; zero frequencies are never stored.
class Fingerprint {
public:
  Fingerprint() = default;
  explicit Fingerprint(std::map<int, std::uint64_t> histogram);

  void add(int key, std::uint64_t frequency);
  Fingerprint& operator+=(const Fingerprint& other);

  const std::map<int, std::uint64_t>& histogram() const noexcept { return histogram_; }
  std::uint64_t frequency(int key) const;
  std::uint64_t total() const;
  bool empty() const noexcept { return histogram_.empty(); }

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
  friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;

private:
  std::map<int, std::uint64_t> histogram_;
};

/// Hyperbolic frequency fingerprint. For every ordered non-collinear triple
/// (o, x, y) and every p on line xy other than x and y, counts the points u on
/// line oy (u != o, y) whose line through p misses line ox; the histogram of
/// those counts is the fingerprint. Throws NotASteinerSystem.
Fingerprint fingerprint(const Design& design, unsigned threads = 1);

/// profile[o] restricted to triples starting at o; they sum to the fingerprint.
std::vector<Fingerprint> point_profiles(const Design& design, unsigned threads = 1);

using PairCounts = std::array<std::uint32_t, 5>;

/// Refinement of the profiles by the second triple element: entry
/// [o * n + x] histograms the counts with that o and x. Diagonal is zero.
std::vector<PairCounts> pair_profiles(const Design& design, unsigned threads = 1);

/// "{1=25000, 2=580500}" with ascending keys; "{}" when empty.
std::string format_fingerprint(const Fingerprint& fp);
/// Inverse of format_fingerprint; keys must be strictly ascending.
Fingerprint parse_fingerprint(std::string_view text);

}  // namespace unital
