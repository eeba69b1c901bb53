#include "ctm/ast.hpp"

namespace ctm {

std::string_view to_string(ExprKind kind) {
  switch (kind) {
    case ExprKind::constant: return "constant";
    case ExprKind::var_ref: return "var_ref";
    case ExprKind::field_access: return "field_access";
    case ExprKind::method_call: return "method_call";
    case ExprKind::new_object: return "new_object";
    case ExprKind::unary_op: return "unary_op";
    case ExprKind::binary_op: return "binary_op";
    case ExprKind::assignment: return "assignment";
    case ExprKind::cast: return "cast";
    case ExprKind::conditional: return "conditional";
    case ExprKind::array_access: return "array_access";
    case ExprKind::new_array: return "new_array";
    case ExprKind::array_init: return "array_init";
    case ExprKind::lambda: return "lambda";
    case ExprKind::method_ref: return "method_ref";
    case ExprKind::switch_expr: return "switch_expr";
  }
  return "?";
}

std::vector<const Expr*> Expr::arguments() const {
  std::vector<const Expr*> out;
  if (kind != ExprKind::method_call && kind != ExprKind::new_object) return out;
  std::size_t first = has_receiver ? 1 : 0;
  for (std::size_t i = first; i < children.size(); ++i) out.push_back(&children[i]);
  return out;
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.literal != b.literal || a.op != b.op ||
      a.type != b.type || a.has_receiver != b.has_receiver || a.postfix != b.postfix ||
      a.children.size() != b.children.size() || (a.body == nullptr) != (b.body == nullptr))
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_structure(a.children[i], b.children[i])) return false;
  return true;
}

std::string to_sexpr(const Expr& e) {
  std::string s = "(" + std::string(to_string(e.kind));
  for (const std::string* part : {&e.name, &e.literal, &e.op, &e.type}) {
    if (!part->empty()) s += " " + *part;
  }
  if (e.postfix) s += " postfix";
  if (e.body) s += " {...}";
  for (const auto& c : e.children) s += " " + to_sexpr(c);
  return s + ")";
}

std::size_t component_count(const Expr& e) {
  std::size_t own = 0;
  switch (e.kind) {
    case ExprKind::constant:
    case ExprKind::var_ref:
    case ExprKind::field_access:
    case ExprKind::method_call:
    case ExprKind::new_object:
    case ExprKind::new_array:
    case ExprKind::lambda:
    case ExprKind::method_ref:
    case ExprKind::switch_expr:
      own = 1;
      break;
    default:
      break;
  }
  for (const auto& c : e.children) own += component_count(c);
  return own;
}

bool is_constant_only(const Expr& e) {
  switch (e.kind) {
    case ExprKind::var_ref:
    case ExprKind::field_access:
    case ExprKind::method_call:
    case ExprKind::new_object:
    case ExprKind::method_ref:
      return false;
    default:
      break;
  }
  for (const auto& c : e.children)
    if (!is_constant_only(c)) return false;
  return true;
}

}  // namespace ctm
