#include "unital/isomorph.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "unital/error.hpp"

namespace unital {
namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t z = h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Ordered partition of the points. Cells are contiguous runs of `elems`
// and are named by their start position.
struct Partition {
  std::vector<int> elems;
  std::vector<int> start_of;
  std::vector<int> len_at;
  int cells = 0;

  bool discrete() const noexcept { return cells == static_cast<int>(elems.size()); }
};

class UnionFind {
public:
  explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<int> parent_;
};

UnionFind orbits_fixing(int n, const std::vector<std::vector<int>>& gens, const std::vector<int>& fixed) {
  UnionFind uf(n);
  for (const auto& g : gens) {
    const bool fixes = std::all_of(fixed.begin(), fixed.end(), [&](int p) { return g[p] == p; });
    if (!fixes) continue;
    for (int p = 0; p < n; ++p) uf.unite(p, g[p]);
  }
  return uf;
}

// Invariants shared by every node of the search tree: block incidence and
// the per-pair hyperbolic count histograms, reduced to small colour codes.
class Engine {
public:
  explicit Engine(const Design& d) : d_(d), n_(d.point_count()), nb_(d.block_count()) {
    if (!verify_steiner(d).is_steiner) {
      throw Error(ErrorCode::NotASteinerSystem, "isomorphism tools need a verified S(2,6,126)");
    }
    const auto pairs = pair_profiles(d);
    std::vector<PairCounts> distinct;
    for (int o = 0; o < n_; ++o) {
      for (int x = 0; x < n_; ++x) {
        if (o != x) distinct.push_back(pairs[o * n_ + x]);
      }
    }
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    colors_ = static_cast<int>(distinct.size());
    std::vector<int> color(static_cast<std::size_t>(n_) * n_, 0);
    for (int o = 0; o < n_; ++o) {
      for (int x = 0; x < n_; ++x) {
        if (o == x) continue;
        color[o * n_ + x] = static_cast<int>(
            std::lower_bound(distinct.begin(), distinct.end(), pairs[o * n_ + x]) - distinct.begin());
      }
    }
    pair_code_.assign(static_cast<std::size_t>(n_) * n_, 0);
    for (int o = 0; o < n_; ++o) {
      for (int x = 0; x < n_; ++x) {
        if (o != x) pair_code_[o * n_ + x] = color[o * n_ + x] * colors_ + color[x * n_ + o];
      }
    }
    use_pairs_ = colors_ > 1;

    profiles_.assign(n_, {});
    for (int o = 0; o < n_; ++o) {
      for (int x = 0; x < n_; ++x) {
        for (int c = 0; c < 5; ++c) profiles_[o][c] += pairs[o * n_ + x][c];
      }
      Fingerprint fp;
      for (int c = 0; c < 5; ++c) fp.add(c, profiles_[o][c]);
      fingerprint_ += fp;
    }
    degree_ = static_cast<int>(d.blocks_through(0).size());
  }

  int points() const noexcept { return n_; }
  const Design& design() const noexcept { return d_; }
  const Fingerprint& fingerprint() const noexcept { return fingerprint_; }

  Partition root(std::uint64_t& trace) const {
    Partition p;
    p.elems.resize(n_);
    std::iota(p.elems.begin(), p.elems.end(), 0);
    std::stable_sort(p.elems.begin(), p.elems.end(),
                     [&](int a, int b) { return profiles_[a] < profiles_[b]; });
    p.start_of.assign(n_, 0);
    p.len_at.assign(n_, 0);
    trace = 0x5eed;
    for (int i = 0; i < n_;) {
      int j = i;
      while (j < n_ && profiles_[p.elems[j]] == profiles_[p.elems[i]]) ++j;
      for (int k = i; k < j; ++k) p.start_of[p.elems[k]] = i;
      p.len_at[i] = j - i;
      ++p.cells;
      trace = mix(trace, static_cast<std::uint64_t>(j - i));
      i = j;
    }
    trace = mix(trace, refine(p));
    return p;
  }

  Partition individualize(const Partition& parent, int v, std::uint64_t& trace) const {
    Partition p = parent;
    const int s = p.start_of[v];
    const int len = p.len_at[s];
    const auto it = std::find(p.elems.begin() + s, p.elems.begin() + s + len, v);
    std::iter_swap(p.elems.begin() + s, it);
    p.len_at[s] = 1;
    p.len_at[s + 1] = len - 1;
    for (int i = s + 1; i < s + len; ++i) p.start_of[p.elems[i]] = s + 1;
    ++p.cells;
    trace = mix(refine(p), static_cast<std::uint64_t>(s));
    return p;
  }

  // First smallest non-singleton cell, or -1 when discrete.
  int target_cell(const Partition& p) const {
    int best = -1;
    for (int s = 0; s < n_; s += p.len_at[s]) {
      const int len = p.len_at[s];
      if (len > 1 && (best < 0 || len < p.len_at[best])) best = s;
    }
    return best;
  }

  std::string certificate(const Partition& p) const {
    std::vector<int> lab(n_);
    for (int i = 0; i < n_; ++i) lab[p.elems[i]] = i;
    std::vector<Block> blocks;
    blocks.reserve(d_.blocks().size());
    for (const auto& b : d_.blocks()) {
      Block img;
      for (int i = 0; i < kBlockSize; ++i) img[i] = lab[b[i]];
      std::sort(img.begin(), img.end());
      blocks.push_back(img);
    }
    std::sort(blocks.begin(), blocks.end());
    std::string out;
    out.reserve(blocks.size() * kBlockSize);
    for (const auto& b : blocks) {
      for (int x : b) out.push_back(static_cast<char>(x));
    }
    return out;
  }

private:
  std::uint64_t refine(Partition& p) const {
    std::uint64_t h = 0x51ed;
    std::vector<Block> keys(nb_);
    std::vector<int> by_key(nb_);
    std::vector<int> color(nb_);
    while (true) {
      for (int b = 0; b < nb_; ++b) {
        const Block& blk = d_.block(b);
        for (int i = 0; i < kBlockSize; ++i) keys[b][i] = p.start_of[blk[i]];
        std::sort(keys[b].begin(), keys[b].end());
      }
      std::iota(by_key.begin(), by_key.end(), 0);
      std::sort(by_key.begin(), by_key.end(), [&](int a, int b) { return keys[a] < keys[b]; });
      for (int i = 0, c = 0; i < nb_; ++i) {
        if (i > 0 && keys[by_key[i]] != keys[by_key[i - 1]]) ++c;
        color[by_key[i]] = c;
      }
      bool split = false;
      for (int s = 0; s < n_;) {
        const int len = p.len_at[s];
        if (len > 1 && split_cell(p, s, len, color, h)) split = true;
        s += len;
      }
      if (!split) break;
    }
    return h;
  }

  bool split_cell(Partition& p, int s, int len, const std::vector<int>& color, std::uint64_t& h) const {
    const int width = degree_ + (use_pairs_ ? n_ - 1 : 0);
    std::vector<std::int64_t> sig(static_cast<std::size_t>(len) * width);
    for (int i = 0; i < len; ++i) {
      const int v = p.elems[s + i];
      std::int64_t* row = sig.data() + static_cast<std::size_t>(i) * width;
      int k = 0;
      for (int b : d_.blocks_through(v)) row[k++] = color[b];
      std::sort(row, row + degree_);
      if (use_pairs_) {
        const std::int64_t span = static_cast<std::int64_t>(colors_) * colors_;
        for (int x = 0; x < n_; ++x) {
          if (x != v) row[k++] = p.start_of[x] * span + pair_code_[v * n_ + x];
        }
        std::sort(row + degree_, row + width);
      }
    }
    auto row_of = [&](int i) { return sig.begin() + static_cast<std::ptrdiff_t>(i) * width; };
    auto less = [&](int a, int b) {
      return std::lexicographical_compare(row_of(a), row_of(a) + width, row_of(b), row_of(b) + width);
    };
    auto same = [&](int a, int b) { return std::equal(row_of(a), row_of(a) + width, row_of(b)); };

    std::vector<int> idx(len);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), less);
    if (same(idx.front(), idx.back())) return false;

    std::vector<int> old(p.elems.begin() + s, p.elems.begin() + s + len);
    h = mix(h, static_cast<std::uint64_t>(s));
    int group_start = 0;
    for (int i = 0; i <= len; ++i) {
      if (i < len && (i == 0 || same(idx[i - 1], idx[i]))) continue;
      const int gs = s + group_start;
      p.len_at[gs] = i - group_start;
      for (int k = group_start; k < i; ++k) {
        p.elems[s + k] = old[idx[k]];
        p.start_of[old[idx[k]]] = gs;
      }
      std::uint64_t sh = static_cast<std::uint64_t>(i - group_start);
      for (auto it = row_of(idx[group_start]); it != row_of(idx[group_start]) + width; ++it) {
        sh = mix(sh, static_cast<std::uint64_t>(*it));
      }
      h = mix(h, sh);
      if (group_start != 0) ++p.cells;
      group_start = i;
    }
    return true;
  }

  const Design& d_;
  int n_;
  int nb_;
  int degree_ = 0;
  int colors_ = 1;
  bool use_pairs_ = false;
  std::vector<int> pair_code_;
  std::vector<std::array<std::uint64_t, 5>> profiles_;
  Fingerprint fingerprint_;
};

class Budget {
public:
  explicit Budget(const SearchLimits& limits)
      : limits_(limits), start_(std::chrono::steady_clock::now()) {}

  // Counts one node; false once a limit is exceeded.
  bool tick() {
    ++nodes_;
    if (exhausted_) return false;
    if (limits_.max_nodes != 0 && nodes_ > limits_.max_nodes) exhausted_ = true;
    if (limits_.time_limit_seconds > 0 && (nodes_ & 63) == 0) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
      if (el.count() > limits_.time_limit_seconds) exhausted_ = true;
    }
    return !exhausted_;
  }
  bool exhausted() const noexcept { return exhausted_; }
  std::uint64_t nodes() const noexcept { return nodes_; }

private:
  SearchLimits limits_;
  std::chrono::steady_clock::time_point start_;
  std::uint64_t nodes_ = 0;
  bool exhausted_ = false;
};

std::vector<int> map_leaves(const Partition& from, const Partition& to) {
  std::vector<int> g(from.elems.size());
  for (std::size_t i = 0; i < from.elems.size(); ++i) g[from.elems[i]] = to.elems[i];
  return g;
}

bool is_identity(const std::vector<int>& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] != static_cast<int>(i)) return false;
  }
  return true;
}

void add_generator(const Design& d, std::vector<std::vector<int>>& gens, std::vector<int> g) {
  if (is_identity(g)) return;
  if (!is_automorphism(d, g)) {
    throw Error(ErrorCode::ValidationError, "search produced a map that is not an automorphism");
  }
  gens.push_back(std::move(g));
}

struct FirstPath {
  std::vector<Partition> nodes;        // nodes[i] sits at depth i
  std::vector<std::uint64_t> traces;
  std::vector<int> base;               // base[i] individualised at nodes[i]
  std::string leaf_certificate;
};

class AutomorphismSearch {
public:
  AutomorphismSearch(const Engine& engine, Budget& budget) : eng_(engine), budget_(budget) {}

  AutomorphismResult run() {
    std::uint64_t t = 0;
    Partition cur = eng_.root(t);
    path_.nodes.push_back(cur);
    path_.traces.push_back(t);
    for (int tc; (tc = eng_.target_cell(cur)) >= 0;) {
      const int b = cur.elems[tc];
      path_.base.push_back(b);
      cur = eng_.individualize(cur, b, t);
      budget_.tick();
      path_.nodes.push_back(cur);
      path_.traces.push_back(t);
    }
    path_.leaf_certificate = eng_.certificate(cur);

    const int n = eng_.points();
    unsigned __int128 order = 1;
    for (int level = static_cast<int>(path_.base.size()) - 1; level >= 0; --level) {
      const Partition& node = path_.nodes[level];
      const int tc = eng_.target_cell(node);
      const std::vector<int> cell(node.elems.begin() + tc, node.elems.begin() + tc + node.len_at[tc]);
      const std::vector<int> fixed(path_.base.begin(), path_.base.begin() + level);
      const int b = path_.base[level];
      UnionFind uf = orbits_fixing(n, gens_, fixed);
      std::vector<int> failed;
      for (int c : cell) {
        if (budget_.exhausted()) break;
        if (uf.find(c) == uf.find(b)) continue;
        if (std::any_of(failed.begin(), failed.end(), [&](int f) { return uf.find(f) == uf.find(c); })) continue;
        std::uint64_t ct = 0;
        Partition child = eng_.individualize(node, c, ct);
        std::optional<std::vector<int>> g;
        if (budget_.tick() && ct == path_.traces[level + 1]) g = match(child, level + 1);
        if (g) {
          add_generator(eng_.design(), gens_, std::move(*g));
          uf = orbits_fixing(n, gens_, fixed);
        } else {
          failed.push_back(c);
        }
      }
      const auto orbit = std::count_if(cell.begin(), cell.end(), [&](int c) { return uf.find(c) == uf.find(b); });
      order *= static_cast<unsigned>(orbit);
    }

    AutomorphismResult r;
    r.complete = !budget_.exhausted();
    r.order = order > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(order);
    r.generators = gens_;
    r.base = path_.base;
    r.nodes = budget_.nodes();
    return r;
  }

  const FirstPath& path() const noexcept { return path_; }
  std::vector<std::vector<int>>& generators() noexcept { return gens_; }

private:
  // Looks for a leaf below `p` with the first leaf's certificate.
  std::optional<std::vector<int>> match(const Partition& p, int depth) {
    if (p.discrete()) {
      if (eng_.certificate(p) == path_.leaf_certificate) return map_leaves(path_.nodes.back(), p);
      return std::nullopt;
    }
    const int tc = eng_.target_cell(p);
    const int ref = eng_.target_cell(path_.nodes[depth]);
    if (ref < 0 || tc != ref || p.len_at[tc] != path_.nodes[depth].len_at[ref]) return std::nullopt;
    const std::vector<int> cell(p.elems.begin() + tc, p.elems.begin() + tc + p.len_at[tc]);
    for (int c : cell) {
      if (!budget_.tick()) return std::nullopt;
      std::uint64_t t = 0;
      Partition child = eng_.individualize(p, c, t);
      if (t != path_.traces[depth + 1]) continue;
      if (auto g = match(child, depth + 1)) return g;
    }
    return std::nullopt;
  }

  const Engine& eng_;
  Budget& budget_;
  FirstPath path_;
  std::vector<std::vector<int>> gens_;
};

// Searches for the leaf with the smallest (trace sequence, certificate),
// skipping children equivalent under known automorphisms that fix the path.
class CanonicalSearch {
public:
  CanonicalSearch(const Engine& engine, Budget& budget, std::vector<std::vector<int>>& gens)
      : eng_(engine), budget_(budget), gens_(gens) {}

  CanonicalForm run() {
    std::uint64_t t = 0;
    Partition root = eng_.root(t);
    std::vector<std::uint64_t> traces{t};
    std::vector<int> path;
    dfs(root, traces, path);

    CanonicalForm out;
    out.complete = have_best_ && !budget_.exhausted();
    out.nodes = budget_.nodes();
    if (!have_best_) return out;
    out.key = best_cert_;
    out.labeling.assign(eng_.points(), 0);
    for (int i = 0; i < eng_.points(); ++i) out.labeling[best_leaf_.elems[i]] = i;
    return out;
  }

private:
  // <0: path traces precede the best leaf's, 0: equal prefix, >0: worse.
  int compare_to_best(const std::vector<std::uint64_t>& traces) const {
    const std::size_t m = std::min(traces.size(), best_traces_.size());
    for (std::size_t i = 0; i < m; ++i) {
      if (traces[i] != best_traces_[i]) return traces[i] < best_traces_[i] ? -1 : 1;
    }
    return 0;
  }

  void dfs(const Partition& p, std::vector<std::uint64_t>& traces, std::vector<int>& path) {
    if (have_best_) {
      const int c = compare_to_best(traces);
      if (c > 0) return;
      if (c == 0 && traces.size() > best_traces_.size()) return;
    }
    if (p.discrete()) {
      std::string cert = eng_.certificate(p);
      int c = have_best_ ? compare_to_best(traces) : -1;
      if (c == 0 && traces.size() < best_traces_.size()) c = -1;
      if (c == 0) c = cert.compare(best_cert_) < 0 ? -1 : (cert == best_cert_ ? 0 : 1);
      if (c < 0) {
        have_best_ = true;
        best_traces_ = traces;
        best_cert_ = std::move(cert);
        best_leaf_ = p;
      } else if (c == 0) {
        const auto before = gens_.size();
        add_generator(eng_.design(), gens_, map_leaves(best_leaf_, p));
        if (gens_.size() != before) ++gens_version_;
      }
      return;
    }
    const int tc = eng_.target_cell(p);
    const std::vector<int> cell(p.elems.begin() + tc, p.elems.begin() + tc + p.len_at[tc]);
    std::vector<int> explored;
    std::size_t seen_version = static_cast<std::size_t>(-1);
    UnionFind uf(eng_.points());
    for (int c : cell) {
      if (budget_.exhausted()) return;
      if (seen_version != gens_version_) {
        uf = orbits_fixing(eng_.points(), gens_, path);
        seen_version = gens_version_;
      }
      if (std::any_of(explored.begin(), explored.end(), [&](int e) { return uf.find(e) == uf.find(c); })) continue;
      explored.push_back(c);
      if (!budget_.tick()) return;
      std::uint64_t t = 0;
      Partition child = eng_.individualize(p, c, t);
      traces.push_back(t);
      path.push_back(c);
      dfs(child, traces, path);
      path.pop_back();
      traces.pop_back();
    }
  }

  const Engine& eng_;
  Budget& budget_;
  std::vector<std::vector<int>>& gens_;
  std::size_t gens_version_ = 0;
  bool have_best_ = false;
  std::vector<std::uint64_t> best_traces_;
  std::string best_cert_;
  Partition best_leaf_;
};

}  // namespace

OrderedPartition initial_partition(const Design& design) {
  Engine eng(design);
  std::uint64_t t = 0;
  const Partition p = eng.root(t);
  OrderedPartition out;
  out.cell_of.assign(design.point_count(), 0);
  for (int s = 0; s < design.point_count(); s += p.len_at[s]) {
    out.cells.emplace_back(p.elems.begin() + s, p.elems.begin() + s + p.len_at[s]);
    std::sort(out.cells.back().begin(), out.cells.back().end());
    for (int v : out.cells.back()) out.cell_of[v] = static_cast<int>(out.cells.size()) - 1;
  }
  return out;
}

AutomorphismResult automorphism_group(const Design& design, const SearchLimits& limits) {
  Engine eng(design);
  Budget budget(limits);
  AutomorphismSearch search(eng, budget);
  return search.run();
}

std::uint64_t automorphism_order(const Design& design) {
  SearchLimits limits;
  limits.time_limit_seconds = 600;
  const auto r = automorphism_group(design, limits);
  if (!r.complete) {
    throw Error(ErrorCode::NotFound, "automorphism search exceeded its budget; lower bound " +
                                         std::to_string(r.order));
  }
  return r.order;
}

namespace {

CanonicalForm canonical_form_with(const Engine& eng, const SearchLimits& limits) {
  Budget budget(limits);
  AutomorphismSearch aut(eng, budget);
  aut.run();
  auto gens = aut.generators();
  CanonicalSearch search(eng, budget, gens);
  return search.run();
}

}  // namespace

CanonicalForm canonical_form(const Design& design, const SearchLimits& limits) {
  Engine eng(design);
  return canonical_form_with(eng, limits);
}

std::string canonical_key(const Design& design, const SearchLimits& limits) {
  auto cf = canonical_form(design, limits);
  if (!cf.complete) throw Error(ErrorCode::NotFound, "canonical labelling exceeded its budget");
  return std::move(cf.key);
}

IsoResult are_isomorphic(const Design& a, const Design& b, const SearchLimits& limits) {
  Engine ea(a);
  Engine eb(b);
  if (ea.fingerprint() != eb.fingerprint()) return {};
  const auto ca = canonical_form_with(ea, limits);
  const auto cb = canonical_form_with(eb, limits);
  if (!ca.complete || !cb.complete) {
    throw Error(ErrorCode::NotFound, "isomorphism search exceeded its budget");
  }
  if (ca.key != cb.key) return {};
  const int n = a.point_count();
  std::vector<int> b_at(n);
  for (int p = 0; p < n; ++p) b_at[cb.labeling[p]] = p;
  std::vector<int> witness(n);
  for (int p = 0; p < n; ++p) witness[p] = b_at[ca.labeling[p]];
  if (relabel(a, witness).blocks() != b.blocks()) {
    throw Error(ErrorCode::ValidationError, "isomorphism witness failed verification");
  }
  return {true, std::move(witness)};
}

}  // namespace unital
