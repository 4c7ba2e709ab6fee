#include "fixtures.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace fixture {

std::filesystem::path catalog_dir() { return UNITAL_CATALOG_DIR; }

const unital::Catalog& catalog() {
  static const unital::Catalog c = unital::load_catalog(catalog_dir());
  return c;
}

const unital::CatalogEntry& entry(const std::string& id) { return catalog().find(id); }

const unital::CayleyGroup& group_of(const unital::CatalogEntry& e) {
  static std::map<std::string, unital::CayleyGroup> cache;
  const auto key = unital::describe(e.group_spec) + "|" + e.origin.string();
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, unital::entry_group(e)).first;
  return it->second;
}

unital::Design design_of(const unital::CatalogEntry& e) { return unital::develop(group_of(e), e.family()); }

oracle::Blocks blocks_of(const unital::Design& d) { return {d.blocks().begin(), d.blocks().end()}; }

std::vector<int> random_permutation(int n, std::mt19937& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

}  // namespace fixture
