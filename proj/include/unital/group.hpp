#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "unital/label.hpp"

namespace unital {

// Algebraic recipe for a finite group. Semidirect products take the normal
// subgroup first and a cyclic actor second; `action` lists the image of each
// normal-subgroup generator under the actor's generator (label 1).
struct GroupSpec {
  enum class Kind : std::uint8_t { Cyclic, Product, Semidirect, External };

  Kind kind = Kind::Cyclic;
  int cyclic_order = 1;
  std::vector<GroupSpec> factors;  // Product: all factors; Semidirect: {normal, actor}
  std::vector<std::pair<ElementLabel, ElementLabel>> action;
  std::string table_path;

  static GroupSpec cyclic(int n);
  static GroupSpec product(std::vector<GroupSpec> factors);
  static GroupSpec semidirect(GroupSpec normal, GroupSpec actor,
                              std::vector<std::pair<ElementLabel, ElementLabel>> action);
  static GroupSpec external(std::string path);

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;
};

std::string describe(const GroupSpec& spec);

struct TableDefect {
  enum class Kind : std::uint8_t { Shape, Range, LatinRow, LatinColumn, Identity, Inverse, Associativity };
  Kind kind;
  std::string detail;
};

std::string_view to_string(TableDefect::Kind kind);

// One entry per failed invariant class, each naming its first offender.
struct ValidationReport {
  std::vector<TableDefect> failures;
  bool ok() const noexcept { return failures.empty(); }
  bool has(TableDefect::Kind kind) const noexcept;
  std::string describe() const;
};

ValidationReport validate_table(const std::vector<std::vector<int>>& table);

/// Immutable multiplication table of a finite group. Row g, column h holds g*h.
class CayleyGroup {
public:
  /// Validates exhaustively; throws Error(ValidationError) on failure.
  static CayleyGroup from_table(const std::vector<std::vector<int>>& table,
                                std::vector<ElementLabel> labels = {});

  int order() const noexcept { return order_; }
  int identity() const noexcept { return identity_; }

  int multiply(int g, int h) const;
  int inverse(int g) const;
  // Unchecked fast paths for inner loops.
  int mul(int g, int h) const noexcept { return table_[static_cast<std::size_t>(g) * order_ + h]; }
  int inv(int g) const noexcept { return inverses_[g]; }

  std::span<const int> row(int g) const;
  std::vector<std::vector<int>> table() const;
  std::span<const int> inverses() const noexcept { return inverses_; }

  const ElementLabel& label(int g) const;
  const std::vector<ElementLabel>& labels() const noexcept { return labels_; }
  std::optional<int> find(const ElementLabel& label) const;
  /// Exact label match, or an integer read as an element index when the
  /// group's own labels are not integers. Throws LabelNotInGroup otherwise.
  int resolve(const ElementLabel& label) const;

  bool is_abelian() const;
  int element_order(int g) const;

  /// Same group, elements renumbered: new index i is old element `order[i]`.
  CayleyGroup reindexed(std::span<const int> order, std::vector<ElementLabel> labels = {}) const;

private:
  int order_ = 0;
  int identity_ = 0;
  std::vector<int> table_;
  std::vector<int> inverses_;
  std::vector<ElementLabel> labels_;
};

/// Builds the group; element indices follow mixed-radix order over the
/// written coordinates (leftmost most significant). External tables are
/// resolved relative to `base_dir`.
CayleyGroup build_group(const GroupSpec& spec, const std::filesystem::path& base_dir = {});

/// Parses the table file format without validating the group axioms.
std::vector<std::vector<int>> read_cayley_table(std::istream& in);
std::vector<std::vector<int>> read_cayley_table_file(const std::filesystem::path& path);
CayleyGroup load_cayley_table(std::istream& in);
CayleyGroup load_cayley_table(const std::string& text);
CayleyGroup load_cayley_table_file(const std::filesystem::path& path);
void write_cayley_table(std::ostream& out, const CayleyGroup& group);

}  // namespace unital
