#include "unital/fingerprint.hpp"

#include <cctype>
#include <charconv>

#include "unital/error.hpp"
#include "unital/parallel.hpp"

namespace unital {

Fingerprint::Fingerprint(std::map<int, std::uint64_t> histogram) {
  for (auto [k, v] : histogram) add(k, v);
}

void Fingerprint::add(int key, std::uint64_t frequency) {
  if (frequency != 0) histogram_[key] += frequency;
}

Fingerprint& Fingerprint::operator+=(const Fingerprint& other) {
  for (auto [k, v] : other.histogram_) add(k, v);
  return *this;
}

std::uint64_t Fingerprint::frequency(int key) const {
  auto it = histogram_.find(key);
  return it == histogram_.end() ? 0 : it->second;
}

std::uint64_t Fingerprint::total() const {
  std::uint64_t t = 0;
  for (auto [k, v] : histogram_) t += v;
  return t;
}

namespace {

void require_steiner(const Design& design) {
  if (!verify_steiner(design).is_steiner) {
    throw Error(ErrorCode::NotASteinerSystem, "fingerprint needs a verified S(2,6,126)");
  }
}

// Fills per_x[x][c] for one base point o.
void hyperbolic_counts(const Design& d, int o, PairCounts* per_x) {
  const int n = d.point_count();
  for (int x = 0; x < n; ++x) {
    per_x[x] = {};
    if (x == o) continue;
    const int lox = d.line_index(o, x);
    const LineMask& ox = d.mask(lox);
    auto& counts = per_x[x];
    for (int y = 0; y < n; ++y) {
      if (ox.test(y)) continue;  // also skips o and x
      const Block& xy = d.block(d.line_index(x, y));
      const Block& oy = d.block(d.line_index(o, y));
      int us[4];
      int nu = 0;
      for (int u : oy) {
        if (u != o && u != y) us[nu++] = u;
      }
      for (int p : xy) {
        if (p == x || p == y) continue;
        int c = 0;
        for (int k = 0; k < 4; ++k) {
          c += !d.mask(d.line_index(p, us[k])).intersects(ox);
        }
        ++counts[c];
      }
    }
  }
}

}  // namespace

std::vector<PairCounts> pair_profiles(const Design& design, unsigned threads) {
  require_steiner(design);
  const int n = design.point_count();
  std::vector<PairCounts> out(static_cast<std::size_t>(n) * n);
  parallel_for(0, n, threads, [&](int o, unsigned) { hyperbolic_counts(design, o, &out[o * n]); });
  return out;
}

std::vector<Fingerprint> point_profiles(const Design& design, unsigned threads) {
  require_steiner(design);
  const int n = design.point_count();
  std::vector<Fingerprint> out(n);
  std::vector<std::vector<PairCounts>> scratch(resolve_threads(threads), std::vector<PairCounts>(n));
  parallel_for(0, n, threads, [&](int o, unsigned w) {
    hyperbolic_counts(design, o, scratch[w].data());
    std::array<std::uint64_t, 5> sum{};
    for (const auto& pc : scratch[w]) {
      for (int c = 0; c < 5; ++c) sum[c] += pc[c];
    }
    for (int c = 0; c < 5; ++c) out[o].add(c, sum[c]);
  });
  return out;
}

Fingerprint fingerprint(const Design& design, unsigned threads) {
  Fingerprint total;
  for (const auto& p : point_profiles(design, threads)) total += p;
  return total;
}

std::string format_fingerprint(const Fingerprint& fp) {
  std::string out = "{";
  bool first = true;
  for (auto [k, v] : fp.histogram()) {
    if (!first) out += ", ";
    first = false;
    out += std::to_string(k) + "=" + std::to_string(v);
  }
  return out + "}";
}

Fingerprint parse_fingerprint(std::string_view text) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& what) -> Error {
    return Error(ErrorCode::ParseError, what + " at offset " + std::to_string(pos) + " in '" +
                                            std::string(text) + "'");
  };
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto number = [&]() -> std::uint64_t {
    skip_ws();
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
    if (ec != std::errc() || ptr == text.data() + pos) throw fail("expected non-negative integer");
    pos = static_cast<std::size_t>(ptr - text.data());
    return v;
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) throw fail(std::string("expected '") + c + "'");
    ++pos;
  };

  std::map<int, std::uint64_t> hist;
  expect('{');
  skip_ws();
  if (pos < text.size() && text[pos] == '}') {
    ++pos;
  } else {
    int last = -1;
    while (true) {
      const auto key = number();
      expect('=');
      const auto value = number();
      if (key > 1000) throw fail("key out of range");
      const int k = static_cast<int>(key);
      if (hist.count(k)) throw Error(ErrorCode::DuplicateKey, "key " + std::to_string(k) + " repeated");
      if (k < last) throw fail("keys must be ascending");
      hist[k] = value;
      last = k;
      skip_ws();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      expect('}');
      break;
    }
  }
  skip_ws();
  if (pos != text.size()) throw fail("trailing characters");
  return Fingerprint(std::move(hist));
}

}  // namespace unital
