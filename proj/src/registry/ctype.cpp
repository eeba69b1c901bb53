#include "ctm/ctype.hpp"

namespace ctm {
namespace {

constexpr std::array<std::string_view, kCTypeCount> kNames = {
    "PATH", "URL", "SQL", "HOST", "PORT", "XCOORD", "YCOORD",
    "WIDTH", "HEIGHT", "YEAR", "MONTH", "DAY", "OTHER"};

}  // namespace

std::string_view to_string(CType t) { return kNames[index_of(t)]; }

std::optional<CType> parse_ctype(std::string_view s) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == s) return kAllCTypes[i];
  }
  return std::nullopt;
}

std::string_view carrier(CType t) {
  switch (t) {
    case CType::PATH:
    case CType::URL:
    case CType::SQL:
    case CType::HOST:
      return "String";
    case CType::OTHER:
      return "any";
    default:
      return "int";
  }
}

}  // namespace ctm
