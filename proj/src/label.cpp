#include "unital/label.hpp"

#include <cctype>
#include <charconv>

#include "unital/error.hpp"

namespace unital {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::LabelNotInGroup: return "LabelNotInGroup";
    case ErrorCode::ModeOrderMismatch: return "ModeOrderMismatch";
    case ErrorCode::SamePoint: return "SamePoint";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::NotASteinerSystem: return "NotASteinerSystem";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::SumInvariantError: return "SumInvariantError";
    case ErrorCode::GroupUnavailable: return "GroupUnavailable";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InconsistentPartial: return "InconsistentPartial";
    case ErrorCode::UnsupportedCanonicalization: return "UnsupportedCanonicalization";
    case ErrorCode::IoError: return "IoError";
  }
  return "Error";
}

ElementLabel ElementLabel::integer(std::int64_t value) {
  ElementLabel l;
  l.kind_ = Kind::Int;
  l.value_ = value;
  return l;
}

ElementLabel ElementLabel::tuple(std::vector<ElementLabel> parts) {
  ElementLabel l;
  l.kind_ = Kind::Tuple;
  l.parts_ = std::move(parts);
  return l;
}

ElementLabel ElementLabel::infinity() {
  ElementLabel l;
  l.kind_ = Kind::Infinity;
  return l;
}

std::int64_t ElementLabel::value() const {
  if (kind_ != Kind::Int) throw Error(ErrorCode::ParseError, "label is not an integer");
  return value_;
}

const std::vector<ElementLabel>& ElementLabel::parts() const {
  if (kind_ != Kind::Tuple) throw Error(ErrorCode::ParseError, "label is not a tuple");
  return parts_;
}

std::strong_ordering operator<=>(const ElementLabel& a, const ElementLabel& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  switch (a.kind_) {
    case ElementLabel::Kind::Int: return a.value_ <=> b.value_;
    case ElementLabel::Kind::Infinity: return std::strong_ordering::equal;
    case ElementLabel::Kind::Tuple: break;
  }
  const std::size_t n = std::min(a.parts_.size(), b.parts_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.parts_[i] <=> b.parts_[i]; c != 0) return c;
  }
  return a.parts_.size() <=> b.parts_.size();
}

namespace {

class LabelParser {
public:
  explicit LabelParser(std::string_view text) : text_(text) {}

  ElementLabel parse_all() {
    ElementLabel l = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return l;
  }

private:
  ElementLabel parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    if (text_.compare(pos_, 3, "inf") == 0) {
      pos_ += 3;
      return ElementLabel::infinity();
    }
    if (text_.compare(pos_, 3, "\xE2\x88\x9E") == 0) {  // U+221E
      pos_ += 3;
      return ElementLabel::infinity();
    }
    if (text_[pos_] == '(') {
      ++pos_;
      std::vector<ElementLabel> parts;
      skip_ws();
      if (peek() == ')') fail("empty tuple");
      while (true) {
        parts.push_back(parse());
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == ')') {
          ++pos_;
          break;
        }
        fail("expected ',' or ')'");
      }
      return ElementLabel::tuple(std::move(parts));
    }
    std::int64_t v = 0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr == first) fail("expected integer");
    pos_ += static_cast<std::size_t>(ptr - first);
    return ElementLabel::integer(v);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const char* what) const {
    throw Error(ErrorCode::ParseError,
                std::string(what) + " at offset " + std::to_string(pos_) + " in '" +
                    std::string(text_) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void format_into(std::string& out, const ElementLabel& label, bool compact) {
  switch (label.kind()) {
    case ElementLabel::Kind::Int: out += std::to_string(label.value()); return;
    case ElementLabel::Kind::Infinity: out += "inf"; return;
    case ElementLabel::Kind::Tuple: break;
  }
  out += '(';
  bool first = true;
  for (const auto& p : label.parts()) {
    if (!first) out += compact ? "," : ", ";
    first = false;
    format_into(out, p, compact);
  }
  out += ')';
}

}  // namespace

ElementLabel parse_element_label(std::string_view text) { return LabelParser(text).parse_all(); }

std::string format_element_label(const ElementLabel& label, bool compact) {
  std::string out;
  format_into(out, label, compact);
  return out;
}

}  // namespace unital
