#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctm {

class UnknownTypeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Globally unique method identity: declaring class, method name and a
/// JVM-style descriptor using simple type names, e.g.
/// `foo.bar.Config.findString([LString;I)I`. Constructors are named `<init>`.
struct MethodId {
  std::string class_fqname;
  std::string method_name;
  std::string descriptor;

  std::string text() const { return class_fqname + "." + method_name + descriptor; }

  /// Parses `<class>.<name><descriptor>`; throws std::invalid_argument.
  static MethodId parse(std::string_view text);

  friend auto operator<=>(const MethodId& a, const MethodId& b) {
    // Ordering by text keeps multi-hit registry picks reproducible.
    return a.text() <=> b.text();
  }
  friend bool operator==(const MethodId& a, const MethodId& b) = default;
};

struct DecodedSignature {
  std::vector<std::string> params;
  std::string return_type;
};

/// Descriptor fragment for one source-level type: primitives use their JVM
/// letter, reference types `L<SimpleName>;`, each array level a leading `[`.
std::string encode_type(std::string_view type_text);

std::string encode_descriptor(const std::vector<std::string>& params,
                              std::string_view return_type);

MethodId encode_method_id(std::string_view class_fqname, std::string_view name,
                          const std::vector<std::string>& param_types,
                          std::string_view return_type);

/// Inverse of encode_descriptor (types come back as simple names).
/// Throws std::invalid_argument on malformed input.
DecodedSignature decode_descriptor(std::string_view descriptor);

std::size_t descriptor_arity(std::string_view descriptor);

/// Last dotted segment, keeping any array suffix: `java.io.File[]` -> `File[]`.
std::string simple_type_name(std::string_view type_text);

bool is_primitive_type(std::string_view type_text);

}  // namespace ctm
