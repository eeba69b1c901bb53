#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace ctm {

enum class CType {
  PATH,
  URL,
  SQL,
  HOST,
  PORT,
  XCOORD,
  YCOORD,
  WIDTH,
  HEIGHT,
  YEAR,
  MONTH,
  DAY,
  OTHER,
};

inline constexpr std::size_t kCTypeCount = 13;

inline constexpr std::array<CType, kCTypeCount> kAllCTypes = {
    CType::PATH,  CType::URL,    CType::SQL,   CType::HOST, CType::PORT,  CType::XCOORD, CType::YCOORD,
    CType::WIDTH, CType::HEIGHT, CType::YEAR,  CType::MONTH, CType::DAY,  CType::OTHER};

std::string_view to_string(CType t);
std::optional<CType> parse_ctype(std::string_view s);

/// Java type that carries values of this c-type: "String", "int", or "any"
/// for OTHER.
std::string_view carrier(CType t);

inline constexpr std::size_t index_of(CType t) { return static_cast<std::size_t>(t); }

}  // namespace ctm
