#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace unital {

// Name of a group element as printed in difference families: an integer,
// a parenthesised tuple of labels, or the fixed point at infinity.
class ElementLabel {
public:
  enum class Kind : std::uint8_t { Int, Tuple, Infinity };

  ElementLabel() = default;
  static ElementLabel integer(std::int64_t value);
  static ElementLabel tuple(std::vector<ElementLabel> parts);
  static ElementLabel infinity();

  Kind kind() const noexcept { return kind_; }
  bool is_int() const noexcept { return kind_ == Kind::Int; }
  bool is_tuple() const noexcept { return kind_ == Kind::Tuple; }
  bool is_infinity() const noexcept { return kind_ == Kind::Infinity; }

  std::int64_t value() const;
  const std::vector<ElementLabel>& parts() const;

  friend bool operator==(const ElementLabel&, const ElementLabel&) = default;
  friend std::strong_ordering operator<=>(const ElementLabel& a, const ElementLabel& b);

private:
  Kind kind_ = Kind::Int;
  std::int64_t value_ = 0;
  std::vector<ElementLabel> parts_;
};

/// Accepts "17", "(2, 13)", "((0, 1), 3)", "inf" and "∞". Whitespace is free.
ElementLabel parse_element_label(std::string_view text);

/// Normalised form: tuples as "(a, b)", infinity as "inf". With `compact`
/// the separator is "," so the label contains no blanks.
std::string format_element_label(const ElementLabel& label, bool compact = false);

}  // namespace unital
