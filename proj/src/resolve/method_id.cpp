#include "ctm/method_id.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace ctm {
namespace {

constexpr std::array<std::pair<std::string_view, char>, 9> kPrimitiveCodes = {{
    {"boolean", 'Z'},
    {"byte", 'B'},
    {"char", 'C'},
    {"short", 'S'},
    {"int", 'I'},
    {"long", 'J'},
    {"float", 'F'},
    {"double", 'D'},
    {"void", 'V'},
}};

bool valid_identifier_path(std::string_view s) {
  if (s.empty()) return false;
  bool seg_start = true;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (c == '.') {
      if (seg_start) return false;
      seg_start = true;
      continue;
    }
    bool ok = std::isalnum(u) || c == '_' || c == '$' || u >= 0x80;
    if (!ok || (seg_start && std::isdigit(u))) return false;
    seg_start = false;
  }
  return !seg_start;
}

// Decodes one field type starting at `pos`; advances `pos`.
std::string decode_one(std::string_view d, std::size_t& pos) {
  int dims = 0;
  while (pos < d.size() && d[pos] == '[') {
    ++dims;
    ++pos;
  }
  if (pos >= d.size()) throw std::invalid_argument("truncated descriptor");
  std::string base;
  char c = d[pos];
  if (c == 'L') {
    auto semi = d.find(';', pos);
    if (semi == std::string_view::npos || semi == pos + 1)
      throw std::invalid_argument("unterminated reference type in descriptor");
    base = std::string(d.substr(pos + 1, semi - pos - 1));
    pos = semi + 1;
  } else {
    for (auto [name, code] : kPrimitiveCodes) {
      if (code == c) base = name;
    }
    if (base.empty()) throw std::invalid_argument(std::string("bad descriptor code '") + c + "'");
    ++pos;
  }
  for (int i = 0; i < dims; ++i) base += "[]";
  return base;
}

}  // namespace

bool is_primitive_type(std::string_view type_text) {
  for (auto [name, code] : kPrimitiveCodes) {
    if (name == type_text) return true;
  }
  return false;
}

std::string simple_type_name(std::string_view type_text) {
  auto bracket = type_text.find('[');
  std::string_view base = type_text.substr(0, bracket);
  std::string_view dims = bracket == std::string_view::npos ? "" : type_text.substr(bracket);
  auto dot = base.rfind('.');
  if (dot != std::string_view::npos) base = base.substr(dot + 1);
  return std::string(base) + std::string(dims);
}

std::string encode_type(std::string_view type_text) {
  std::string_view t = type_text;
  std::string prefix;
  for (;;) {
    if (t.ends_with("[]")) {
      prefix += '[';
      t.remove_suffix(2);
    } else if (t.ends_with("...")) {
      prefix += '[';
      t.remove_suffix(3);
    } else {
      break;
    }
  }
  for (auto [name, code] : kPrimitiveCodes) {
    if (name == t) return prefix + code;
  }
  if (!valid_identifier_path(t))
    throw UnknownTypeError("not a type name: '" + std::string(type_text) + "'");
  return prefix + "L" + simple_type_name(t) + ";";
}

std::string encode_descriptor(const std::vector<std::string>& params,
                              std::string_view return_type) {
  std::string d = "(";
  for (const auto& p : params) d += encode_type(p);
  d += ")";
  d += encode_type(return_type.empty() ? "void" : return_type);
  return d;
}

MethodId encode_method_id(std::string_view class_fqname, std::string_view name,
                          const std::vector<std::string>& param_types,
                          std::string_view return_type) {
  return MethodId{std::string(class_fqname), std::string(name),
                  encode_descriptor(param_types, return_type)};
}

DecodedSignature decode_descriptor(std::string_view d) {
  if (d.empty() || d.front() != '(') throw std::invalid_argument("descriptor must start with '('");
  DecodedSignature sig;
  std::size_t pos = 1;
  while (pos < d.size() && d[pos] != ')') sig.params.push_back(decode_one(d, pos));
  if (pos >= d.size()) throw std::invalid_argument("descriptor missing ')'");
  ++pos;
  sig.return_type = decode_one(d, pos);
  if (pos != d.size()) throw std::invalid_argument("trailing characters after descriptor");
  return sig;
}

std::size_t descriptor_arity(std::string_view descriptor) {
  return decode_descriptor(descriptor).params.size();
}

MethodId MethodId::parse(std::string_view text) {
  auto paren = text.find('(');
  if (paren == std::string_view::npos) throw std::invalid_argument("method id lacks a descriptor");
  std::string_view head = text.substr(0, paren);
  auto dot = head.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == head.size())
    throw std::invalid_argument("method id needs <class>.<name>");
  MethodId id{std::string(head.substr(0, dot)), std::string(head.substr(dot + 1)),
              std::string(text.substr(paren))};
  if (!valid_identifier_path(id.class_fqname))
    throw std::invalid_argument("bad class name '" + id.class_fqname + "'");
  if (id.method_name != "<init>" && !valid_identifier_path(id.method_name))
    throw std::invalid_argument("bad method name '" + id.method_name + "'");
  decode_descriptor(id.descriptor);
  return id;
}

}  // namespace ctm
