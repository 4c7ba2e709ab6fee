#include "unital/search.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <optional>
#include <set>
#include <string>

#include "unital/difference.hpp"
#include "unital/error.hpp"
#include "unital/isomorph.hpp"

namespace unital {
namespace {

constexpr int kFull = 60;  // coverage weight of one complete difference

void check_mode(const CayleyGroup& group, DevelopmentMode mode) {
  const int expected = mode == DevelopmentMode::Transitive ? kUnitalPoints : kUnitalPoints - 1;
  if (group.order() != expected) {
    throw Error(ErrorCode::ModeOrderMismatch, std::string(to_string(mode)) + " search needs a group of order " +
                                                  std::to_string(expected));
  }
}

std::vector<std::vector<int>> subgroups_of_order(const CayleyGroup& g, int order) {
  std::set<std::vector<int>> seen;
  for (int x = 0; x < g.order(); ++x) {
    if (g.element_order(x) != order && order != 6) continue;
    for (int y = 0; y < g.order(); ++y) {
      if (order != 6 && y != x) continue;
      std::vector<bool> in(g.order(), false);
      std::vector<int> elems{g.identity()};
      in[g.identity()] = true;
      for (std::size_t i = 0; i < elems.size() && elems.size() <= static_cast<std::size_t>(order); ++i) {
        for (int s : {x, y}) {
          const int z = g.mul(elems[i], s);
          if (!in[z]) {
            in[z] = true;
            elems.push_back(z);
          }
        }
      }
      if (static_cast<int>(elems.size()) != order) continue;
      std::sort(elems.begin(), elems.end());
      seen.insert(elems);
    }
  }
  return {seen.begin(), seen.end()};
}

class Searcher {
public:
  Searcher(const CayleyGroup& g, DevelopmentMode mode, const SearchBudget& budget)
      : g_(g), n_(g.order()), mode_(mode), budget_(budget), start_(std::chrono::steady_clock::now()) {
    cov_.assign(n_, 0);
  }

  // Adds a block; false (and nothing changed) if it would over-cover.
  bool place(const Block& b) {
    const int stab = block_stabilizer_order(g_, b);
    const int w = kFull / stab;
    std::vector<int> touched;
    bool ok = kFull % stab == 0;
    for (int i = 0; i < kBlockSize && ok; ++i) {
      for (int j = 0; j < kBlockSize; ++j) {
        if (i == j || b[i] >= n_ || b[j] >= n_) continue;
        const int q = g_.mul(g_.inv(b[j]), b[i]);
        cov_[q] += w;
        touched.push_back(q);
      }
    }
    for (int q : touched) ok = ok && cov_[q] <= kFull;
    if (!ok) {
      for (int q : touched) cov_[q] -= w;
      return false;
    }
    stack_.push_back({b, w, std::move(touched), infinity_count(b)});
    placed_.push_back(b);
    infinity_blocks_ += stack_.back().infinities;
    return true;
  }

  void unplace() {
    auto& top = stack_.back();
    for (int q : top.touched) cov_[q] -= top.weight;
    infinity_blocks_ -= top.infinities;
    stack_.pop_back();
    placed_.pop_back();
  }

  bool consistent() const {
    for (int q = 0; q < n_; ++q) {
      if (q == g_.identity()) continue;
      if (cov_[q] != 0 && cov_[q] != kFull) return false;
    }
    return infinity_blocks_ <= 1;
  }

  std::vector<bool> uncovered() const {
    std::vector<bool> out(n_, false);
    for (int q = 0; q < n_; ++q) out[q] = q != g_.identity() && cov_[q] == 0;
    return out;
  }

  bool has_infinity() const noexcept { return infinity_blocks_ > 0; }

  void run(const std::function<void(const std::vector<Block>&)>& emit) {
    emit_ = &emit;
    if (!tick()) return;
    dfs();
  }

  // Consulted for every candidate at the first level the search chooses
  // freely; returning false skips the candidate.
  using BlockFilter = std::function<bool(const std::vector<Block>& placed, const Block& candidate, int d)>;
  void set_first_block_filter(BlockFilter f) { first_filter_ = std::move(f); }
  int first_free_depth() const noexcept { return first_free_depth_; }

  bool budget_hit() const noexcept { return hit_; }
  std::uint64_t nodes() const noexcept { return nodes_; }
  void stop() { stopped_ = true; }

private:
  struct Placed {
    Block block;
    int weight;
    std::vector<int> touched;
    int infinities;
  };

  int infinity_count(const Block& b) const {
    return static_cast<int>(std::count_if(b.begin(), b.end(), [&](int x) { return x >= n_; }));
  }

  bool tick() {
    ++nodes_;
    if (budget_.max_nodes != 0 && nodes_ > budget_.max_nodes) hit_ = true;
    if (budget_.time_limit_seconds > 0 && (nodes_ & 255) == 0) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
      if (el.count() > budget_.time_limit_seconds) hit_ = true;
    }
    return !hit_ && !stopped_;
  }

  bool halted() const noexcept { return hit_ || stopped_; }

  void dfs() {
    if (halted()) return;
    if (mode_ == DevelopmentMode::OneRotational && infinity_blocks_ == 0) {
      if (h_candidates_.empty()) h_candidates_ = subgroups_of_order(g_, 5);
      for (const auto& h : h_candidates_) {
        if (!tick()) return;
        Block b;
        for (int i = 0; i < 5; ++i) b[i] = h[i];
        b[5] = n_;
        if (!open(h)) continue;
        if (place(b)) {
          dfs();
          unplace();
        }
        if (halted()) return;
      }
      return;
    }
    int d = -1;
    for (int q = 0; q < n_; ++q) {
      if (q != g_.identity() && cov_[q] == 0) {
        d = q;
        break;
      }
    }
    if (first_free_depth_ < 0) first_free_depth_ = static_cast<int>(stack_.size());
    if (d < 0) {
      (*emit_)(placed_);
      return;
    }
    if (g_.inv(d) != d) {
      Block b{};
      b[0] = g_.identity();
      b[1] = d;
      std::vector<char> used(n_, 0);
      used[d] = used[g_.inv(d)] = 1;
      extend(b, 2, used);
      if (halted()) return;
    }
    short_orbits(d);
  }

  bool open(const std::vector<int>& elems) const {
    return std::all_of(elems.begin(), elems.end(), [&](int x) { return x == g_.identity() || cov_[x] == 0; });
  }

  // Full-orbit blocks: every ordered difference new and distinct.
  bool admitted(const Block& b, int d) const {
    return !first_filter_ || static_cast<int>(stack_.size()) != first_free_depth_ || first_filter_(placed_, b, d);
  }

  void extend(Block& b, int size, std::vector<char>& used) {
    if (size == kBlockSize) {
      if (admitted(b, b[1]) && place(b)) {
        dfs();
        unplace();
      }
      return;
    }
    const int from = size == 2 ? 0 : b[size - 1] + 1;
    std::vector<int> diffs;
    for (int x = from; x < n_; ++x) {
      if (x == b[0] || x == b[1]) continue;
      if (!tick()) return;
      diffs.clear();
      bool ok = true;
      for (int i = 0; i < size && ok; ++i) {
        const int q1 = g_.mul(g_.inv(b[i]), x);
        const int q2 = g_.inv(q1);
        if (q1 == q2 || cov_[q1] != 0 || used[q1] || used[q2]) ok = false;
        for (int q : diffs) ok = ok && q != q1 && q != q2;
        diffs.push_back(q1);
        diffs.push_back(q2);
      }
      if (!ok) continue;
      for (int q : diffs) used[q] = 1;
      b[size] = x;
      extend(b, size + 1, used);
      for (int q : diffs) used[q] = 0;
      if (halted()) return;
    }
  }

  // Blocks fixed by a subgroup T of order 2, 3 or 6: unions of right
  // cosets Tx that contain T itself.
  void short_orbits(int d) {
    if (mode_ != DevelopmentMode::Transitive) return;
    if (short_candidates_.empty() && !short_built_) build_short_candidates();
    for (const auto& b : short_candidates_) {
      if (std::find(b.begin(), b.end(), d) == b.end()) continue;
      if (!tick()) return;
      if (admitted(b, d) && place(b)) {
        dfs();
        unplace();
      }
      if (halted()) return;
    }
  }

  void build_short_candidates() {
    short_built_ = true;
    std::set<Block> seen;
    for (int s : {2, 3, 6}) {
      for (const auto& t : subgroups_of_order(g_, s)) {
        std::vector<std::vector<int>> cosets;
        std::vector<char> hit(n_, 0);
        for (int x : t) hit[x] = 1;
        for (int x = 0; x < n_; ++x) {
          if (hit[x]) continue;
          std::vector<int> c;
          for (int y : t) c.push_back(g_.mul(y, x));
          for (int y : c) hit[y] = 1;
          cosets.push_back(std::move(c));
        }
        const int need = kBlockSize / s - 1;
        std::vector<int> pick(need);
        std::function<void(int, int)> choose = [&](int k, int from) {
          if (k == need) {
            std::vector<int> elems = t;
            for (int c : pick) elems.insert(elems.end(), cosets[c].begin(), cosets[c].end());
            Block b;
            std::copy(elems.begin(), elems.end(), b.begin());
            std::sort(b.begin(), b.end());
            if (block_stabilizer_order(g_, b) == s && seen.insert(b).second) short_candidates_.push_back(b);
            return;
          }
          for (int c = from; c < static_cast<int>(cosets.size()); ++c) {
            pick[k] = c;
            choose(k + 1, c + 1);
          }
        };
        choose(0, 0);
      }
    }
  }

  const CayleyGroup& g_;
  int n_;
  DevelopmentMode mode_;
  SearchBudget budget_;
  std::chrono::steady_clock::time_point start_;
  std::vector<int> cov_;
  std::vector<Placed> stack_;
  std::vector<Block> placed_;
  BlockFilter first_filter_;
  int first_free_depth_ = -1;
  int infinity_blocks_ = 0;
  const std::function<void(const std::vector<Block>&)>* emit_ = nullptr;
  std::vector<std::vector<int>> h_candidates_;
  std::vector<Block> short_candidates_;
  bool short_built_ = false;
  std::uint64_t nodes_ = 0;
  bool hit_ = false;
  bool stopped_ = false;
};

std::vector<ElementLabel> to_labels(const CayleyGroup& g, const Block& b) {
  std::vector<ElementLabel> out;
  for (int x : b) out.push_back(x >= g.order() ? ElementLabel::infinity() : g.label(x));
  return out;
}

std::vector<Block> signature(const CayleyGroup& g, const std::vector<Block>& blocks) {
  std::vector<Block> reps;
  for (const auto& b : blocks) reps.push_back(orbit_representative(g, b));
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  return reps;
}

std::vector<Block> image(const CayleyGroup& g, const std::vector<int>& alpha, const std::vector<Block>& blocks) {
  std::vector<Block> out;
  for (const auto& b : blocks) {
    Block m;
    for (int i = 0; i < kBlockSize; ++i) m[i] = b[i] >= g.order() ? b[i] : alpha[b[i]];
    out.push_back(m);
  }
  return signature(g, out);
}

// Elements of the generated group, capped; past the cap only the listed
// generators are used.
std::vector<std::vector<int>> closure(const std::vector<std::vector<int>>& gens, std::size_t cap) {
  if (gens.empty()) return {};
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  std::vector<int> id(gens[0].size());
  std::iota(id.begin(), id.end(), 0);
  seen.insert(id);
  out.push_back(id);
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (const auto& s : gens) {
      std::vector<int> c(s.size());
      for (std::size_t x = 0; x < s.size(); ++x) c[x] = s[out[i][x]];
      if (seen.insert(c).second) {
        out.push_back(std::move(c));
        if (out.size() > cap) return gens;
      }
    }
  }
  return out;
}

// Orders families by (translate of the block covering the root difference
// d that contains the identity and d, then the orbit signature) and keeps
// only the least family in each orbit of the automorphisms that fix the
// blocks placed before the search started choosing.
class Symmetry {
public:
  Symmetry(const CayleyGroup& g, std::vector<std::vector<int>> elements) : g_(g), elements_(std::move(elements)) {
    for (const auto& a : elements_) {
      std::vector<int> inv(a.size());
      for (std::size_t x = 0; x < a.size(); ++x) inv[a[x]] = static_cast<int>(x);
      inverses_.push_back(std::move(inv));
    }
  }

  bool first_block_minimal(const std::vector<Block>& placed, const Block& b, int d) {
    refresh(placed);
    Block sorted = b;
    std::sort(sorted.begin(), sorted.end());
    std::vector<char> diff(g_.order(), 0);
    for (int x : b) {
      for (int y : b) {
        if (x != y && x < g_.order() && y < g_.order()) diff[g_.mul(g_.inv(x), y)] = 1;
      }
    }
    for (int i : applicable_) {
      if (!diff[inverses_[i][d]]) continue;
      const auto img = cover(map(elements_[i], b), d);
      if (img && *img < sorted) return false;
    }
    return true;
  }

  bool family_minimal(const std::vector<Block>& blocks, int root_depth) {
    const std::vector<Block> root(blocks.begin(), blocks.begin() + root_depth);
    refresh(root);
    const int d = root_difference(root);
    const auto own = key(blocks, d);
    for (int i : applicable_) {
      std::vector<Block> img;
      for (const auto& b : blocks) img.push_back(map(elements_[i], b));
      if (key(img, d) < own) return false;
    }
    return true;
  }

private:
  using Key = std::pair<Block, std::vector<Block>>;

  Block map(const std::vector<int>& a, const Block& b) const {
    Block m;
    for (int i = 0; i < kBlockSize; ++i) m[i] = b[i] >= g_.order() ? b[i] : a[b[i]];
    return m;
  }

  // Translate of b containing the identity and d, if b covers d.
  std::optional<Block> cover(const Block& b, int d) const {
    for (int x : b) {
      for (int y : b) {
        if (x == y || x >= g_.order() || y >= g_.order() || g_.mul(g_.inv(x), y) != d) continue;
        Block t;
        for (int i = 0; i < kBlockSize; ++i) t[i] = b[i] >= g_.order() ? b[i] : g_.mul(g_.inv(x), b[i]);
        std::sort(t.begin(), t.end());
        return t;
      }
    }
    return std::nullopt;
  }

  Key key(const std::vector<Block>& blocks, int d) const {
    Key k{Block{}, signature(g_, blocks)};
    for (const auto& b : blocks) {
      if (auto c = cover(b, d)) {
        k.first = *c;
        break;
      }
    }
    return k;
  }

  int root_difference(const std::vector<Block>& root) const {
    std::vector<char> covered(g_.order(), 0);
    for (const auto& b : root) {
      for (int x : b) {
        for (int y : b) {
          if (x != y && x < g_.order() && y < g_.order()) covered[g_.mul(g_.inv(x), y)] = 1;
        }
      }
    }
    for (int q = 0; q < g_.order(); ++q) {
      if (q != g_.identity() && !covered[q]) return q;
    }
    return g_.identity();
  }

  void refresh(const std::vector<Block>& placed) {
    auto sig = signature(g_, placed);
    if (have_ && sig == cached_) return;
    have_ = true;
    cached_ = sig;
    applicable_.clear();
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (image(g_, elements_[i], placed) == sig) applicable_.push_back(static_cast<int>(i));
    }
  }

  const CayleyGroup& g_;
  std::vector<std::vector<int>> elements_;
  std::vector<std::vector<int>> inverses_;
  bool have_ = false;
  std::vector<Block> cached_;
  std::vector<int> applicable_;
};

}  // namespace

PartialFamily make_partial(const CayleyGroup& group, DevelopmentMode mode,
                           std::vector<std::vector<ElementLabel>> fixed_blocks) {
  check_mode(group, mode);
  DifferenceFamily fam{mode, fixed_blocks};
  std::vector<Block> blocks;
  try {
    blocks = resolve_blocks(group, fam);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::SchemaError && fixed_blocks.empty()) {
      blocks.clear();
    } else {
      throw;
    }
  }
  Searcher s(group, mode, {});
  std::set<Block> reps;
  for (const auto& b : blocks) {
    if (!reps.insert(orbit_representative(group, b)).second) {
      throw Error(ErrorCode::InconsistentPartial, "two fixed blocks lie in the same orbit");
    }
    if (!s.place(b)) throw Error(ErrorCode::InconsistentPartial, "fixed blocks cover a difference twice");
  }
  if (!s.consistent()) {
    throw Error(ErrorCode::InconsistentPartial, "fixed blocks cover differences unevenly or repeat infinity");
  }
  PartialFamily p;
  p.group = &group;
  p.mode = mode;
  p.fixed_blocks = std::move(fixed_blocks);
  p.uncovered = s.uncovered();
  p.has_infinity_block = s.has_infinity();
  return p;
}

namespace {

using Accept = std::function<bool(const std::vector<Block>& blocks, int root_depth)>;

SearchOutcome run_search(const CayleyGroup& g, DevelopmentMode mode, const std::vector<Block>& fixed,
                         const SearchBudget& budget, const Accept& accept, const FamilySink& sink,
                         Searcher::BlockFilter first_filter = {}) {
  Searcher s(g, mode, budget);
  s.set_first_block_filter(std::move(first_filter));
  for (const auto& b : fixed) {
    if (!s.place(b)) throw Error(ErrorCode::InconsistentPartial, "fixed blocks cover a difference twice");
  }
  SearchOutcome out;
  std::set<std::vector<Block>> seen;
  const std::function<void(const std::vector<Block>&)> emit = [&](const std::vector<Block>& blocks) {
    if (!seen.insert(signature(g, blocks)).second) return;
    if (!check_difference_blocks(g, blocks).ok) {
      throw Error(ErrorCode::ValidationError, "search produced a family that fails the difference check");
    }
    if (accept && !accept(blocks, s.first_free_depth())) return;
    DifferenceFamily fam;
    fam.mode = mode;
    for (const auto& b : blocks) fam.base_blocks.push_back(to_labels(g, b));
    if (sink) sink(fam);
    out.families.push_back(std::move(fam));
    if (budget.max_solutions != 0 && out.families.size() >= budget.max_solutions) s.stop();
  };
  s.run(emit);
  out.budget_hit = s.budget_hit();
  out.nodes = s.nodes();
  return out;
}

}  // namespace

SearchOutcome complete_family(const PartialFamily& partial, const SearchBudget& budget, const FamilySink& sink) {
  if (partial.group == nullptr) throw Error(ErrorCode::InconsistentPartial, "partial family has no group");
  const CayleyGroup& g = *partial.group;
  const PartialFamily fresh = make_partial(g, partial.mode, partial.fixed_blocks);
  if (fresh.uncovered != partial.uncovered) {
    throw Error(ErrorCode::InconsistentPartial, "uncovered set disagrees with the fixed blocks");
  }
  std::vector<Block> fixed;
  if (!partial.fixed_blocks.empty()) fixed = resolve_blocks(g, {partial.mode, partial.fixed_blocks});
  return run_search(g, partial.mode, fixed, budget, {}, sink);
}

SearchOutcome search_families(const CayleyGroup& group, DevelopmentMode mode, const SearchBudget& budget,
                              bool canonicalize, const std::vector<std::vector<int>>& automorphisms,
                              const FamilySink& sink) {
  check_mode(group, mode);
  if (canonicalize && !group.is_abelian()) {
    throw Error(ErrorCode::UnsupportedCanonicalization, "canonical pruning needs an abelian group");
  }
  if (!canonicalize) return run_search(group, mode, {}, budget, {}, sink);

  for (const auto& a : automorphisms) {
    if (static_cast<int>(a.size()) != group.order()) {
      throw Error(ErrorCode::NotAPermutation, "automorphism has the wrong length");
    }
  }
  Symmetry sym(group, closure(automorphisms, 20000));
  const int points = mode == DevelopmentMode::Transitive ? group.order() : group.order() + 1;
  std::set<std::string> keys;
  const Accept accept = [&](const std::vector<Block>& blocks, int root_depth) {
    if (!sym.family_minimal(blocks, root_depth)) return false;
    return keys.insert(canonical_key(develop_orbits(group, blocks, points))).second;
  };
  return run_search(group, mode, {}, budget, accept, sink,
                    [&](const std::vector<Block>& placed, const Block& b, int d) { return sym.first_block_minimal(placed, b, d); });
}

std::vector<std::vector<int>> cyclic_multipliers(const CayleyGroup& group) {
  const int n = group.order();
  int gen = -1;
  for (int x = 0; x < n && gen < 0; ++x) {
    if (group.element_order(x) == n) gen = x;
  }
  if (gen < 0) return {};
  // power[k] = gen^k, log[gen^k] = k
  std::vector<int> power(n), log(n);
  power[0] = group.identity();
  for (int k = 1; k < n; ++k) power[k] = group.mul(power[k - 1], gen);
  for (int k = 0; k < n; ++k) log[power[k]] = k;
  std::vector<std::vector<int>> out;
  for (int u = 2; u < n; ++u) {
    if (std::gcd(u, n) != 1) continue;
    std::vector<int> perm(n);
    for (int x = 0; x < n; ++x) perm[x] = power[(static_cast<long>(log[x]) * u) % n];
    out.push_back(std::move(perm));
  }
  return out;
}

}  // namespace unital
