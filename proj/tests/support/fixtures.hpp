#pragma once

#include <filesystem>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "unital/catalog.hpp"
#include "unital/design.hpp"

namespace fixture {

std::filesystem::path catalog_dir();

/// Loaded once per process.
const unital::Catalog& catalog();
const unital::CatalogEntry& entry(const std::string& id);

/// Groups are built once per distinct spec.
const unital::CayleyGroup& group_of(const unital::CatalogEntry& e);
unital::Design design_of(const unital::CatalogEntry& e);
inline unital::Design design(const std::string& id) { return design_of(entry(id)); }

oracle::Blocks blocks_of(const unital::Design& d);
std::vector<int> random_permutation(int n, std::mt19937& rng);

}  // namespace fixture
