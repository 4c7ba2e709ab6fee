#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "unital/design.hpp"
#include "unital/fingerprint.hpp"
#include "unital/group.hpp"

namespace unital {

/// How element indices are assigned to a concrete model of a group.
enum class OrderingConvention {
  MixedRadix,  // lexicographic over the (possibly permuted) coordinate tuple
  PcShortlex,  // pc-words g1^e1...gk^ek over a polycyclic generating sequence, shortlex
};

std::string_view to_string(OrderingConvention convention);
OrderingConvention parse_convention(std::string_view text);

struct OrderingCandidate {
  GroupSpec structure;
  OrderingConvention convention = OrderingConvention::MixedRadix;
  // MixedRadix only: top-level coordinate i of the new labels is old
  // coordinate coordinate_order[i]. Empty means written order.
  std::vector<int> coordinate_order;

  friend bool operator==(const OrderingCandidate&, const OrderingCandidate&) = default;
};

struct CatalogEntry {
  std::string id;
  std::string group_name;
  GroupSpec group_spec;
  DevelopmentMode mode = DevelopmentMode::Transitive;
  std::vector<std::vector<ElementLabel>> base_blocks;
  Fingerprint expected_fingerprint;
  std::string source;
  std::vector<OrderingCandidate> structure_candidates;
  std::filesystem::path origin;  // directory external tables resolve against

  DifferenceFamily family() const { return {mode, base_blocks}; }
};

// JSON forms shared by the catalog files, the CLI and search output.
nlohmann::json label_to_json(const ElementLabel& label);
ElementLabel label_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const GroupSpec& spec);
GroupSpec spec_from_json(const nlohmann::json& j);
nlohmann::json candidate_to_json(const OrderingCandidate& candidate);
OrderingCandidate candidate_from_json(const nlohmann::json& j);
nlohmann::json family_to_json(const DifferenceFamily& family);

nlohmann::json entry_to_json(const CatalogEntry& entry);
/// Throws SchemaError for structural problems and SumInvariantError when
/// the expected fingerprint does not total 7,560,000.
CatalogEntry entry_from_json(const nlohmann::json& j, const std::filesystem::path& origin = {});

/// Throws IoError, ParseError, SchemaError or SumInvariantError.
CatalogEntry load_entry(const std::filesystem::path& file);
void save_entry(const CatalogEntry& entry, const std::filesystem::path& file);

/// Builds the entry's group. Throws GroupUnavailable if it cannot be built
/// (for instance a missing external table).
CayleyGroup entry_group(const CatalogEntry& entry);

struct ReproductionRecord {
  std::string id;
  bool steiner_ok = false;
  bool fingerprint_match = false;
  Fingerprint computed_fingerprint;
  std::chrono::duration<double> elapsed{};
};

ReproductionRecord reproduce(const CatalogEntry& entry, int threads = 1);

struct ReconstructedOrdering {
  OrderingCandidate candidate;
  std::vector<int> pcgs;  // PcShortlex: generator indices in the model group
  CayleyGroup group;
};

/// First candidate (in list order, then deterministic pcgs order) under
/// which every family develops to a verified S(2,6,126). Throws NotFound.
ReconstructedOrdering reconstruct_ordering(const std::vector<OrderingCandidate>& candidates,
                                           const std::vector<DifferenceFamily>& families);

/// Model group renumbered along a candidate's mixed-radix convention.
CayleyGroup apply_coordinate_order(const CayleyGroup& model, const std::vector<int>& coordinate_order);

/// Natural ordering of ids ("ex1-2" < "ex1-10").
bool id_less(const std::string& a, const std::string& b);

struct CatalogGroup {
  std::string name;
  std::string directory;
  std::optional<int> expected_count;  // absent when the count is not checked
};

struct Catalog {
  std::filesystem::path root;
  std::vector<CatalogGroup> groups;
  std::vector<CatalogEntry> entries;  // sorted by id_less

  std::vector<const CatalogEntry*> in_group(const std::string& directory) const;
  const CatalogEntry& find(const std::string& id) const;  // throws NotFound
};

/// Reads root/index.json and every entry file of the listed groups.
Catalog load_catalog(const std::filesystem::path& root);

struct CountCheck {
  std::string group;
  int expected = 0;
  int actual = 0;
  bool ok() const noexcept { return expected == actual; }
};

std::vector<CountCheck> check_counts(const Catalog& catalog);

/// Shell-style glob with '*' and '?'.
bool glob_match(std::string_view pattern, std::string_view text);

}  // namespace unital
