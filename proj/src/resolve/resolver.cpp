#include "ctm/resolver.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace ctm {
namespace {

constexpr std::array<std::pair<std::string_view, std::string_view>, 8> kBoxes = {{
    {"boolean", "Boolean"},
    {"byte", "Byte"},
    {"char", "Character"},
    {"short", "Short"},
    {"int", "Integer"},
    {"long", "Long"},
    {"float", "Float"},
    {"double", "Double"},
}};

int numeric_rank(std::string_view t) {
  if (t == "byte") return 1;
  if (t == "short" || t == "char") return 2;
  if (t == "int") return 3;
  if (t == "long") return 4;
  if (t == "float") return 5;
  if (t == "double") return 6;
  return 0;
}

std::string literal_type(std::string_view lit) {
  if (lit.empty()) return "";
  if (lit == "true" || lit == "false") return "boolean";
  if (lit == "null") return "";
  if (lit.front() == '"') return "String";
  if (lit.front() == '\'') return "char";
  if (lit.ends_with(".class")) return "Class";
  if (!std::isdigit(static_cast<unsigned char>(lit.front())) && lit.front() != '.') return "";
  char last = static_cast<char>(std::tolower(static_cast<unsigned char>(lit.back())));
  if (last == 'l') return "long";
  bool hex = lit.size() > 1 && lit[0] == '0' && (lit[1] == 'x' || lit[1] == 'X');
  if (hex) return lit.find_first_of("pP") == std::string_view::npos ? "int" : "double";
  if (last == 'f') return "float";
  if (last == 'd' || lit.find_first_of(".eE") != std::string_view::npos) return "double";
  return "int";
}

std::string strip_one_dim(const std::string& t) {
  if (t.ends_with("[]")) return t.substr(0, t.size() - 2);
  return "";
}

}  // namespace

std::optional<std::string> ScopeTable::lookup(std::string_view name) const {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
    auto f = it->find(name);
    if (f != it->end()) return f->second;
  }
  return std::nullopt;
}

bool param_compatible(std::string_view param, std::string_view arg) {
  if (arg.empty()) return true;
  std::string p = simple_type_name(param);
  std::string a = simple_type_name(arg);
  if (p == a || p == "Object") return true;
  int rp = numeric_rank(p), ra = numeric_rank(a);
  if (rp && ra) return ra <= rp && p != "char" && !(a == "char" && p == "short");
  for (auto [prim, box] : kBoxes) {
    if ((p == prim && a == box) || (p == box && a == prim)) return true;
  }
  return false;
}

std::optional<std::string> Resolver::resolve_type(std::string_view written) const {
  return tree_.resolve_type_name(written, ctx_, enclosing_);
}

std::string Resolver::declared_type(const std::string& written, const Expr* init) const {
  if (written == "var") {
    if (init && init->kind == ExprKind::new_object) return init->name;
    return "";
  }
  return written;
}

std::string Resolver::super_of(const std::string& type_fq) const {
  const TypeInfo* t = tree_.find_type(type_fq);
  if (!t || t->supertypes.empty()) return "";
  return t->supertypes.front();
}

std::optional<std::string> Resolver::field_type(std::string_view owner,
                                                std::string_view field) const {
  for (const auto& a : tree_.ancestors(owner)) {
    const TypeInfo* t = tree_.find_type(a);
    if (!t) continue;
    auto it = t->fields.find(std::string(field));
    if (it != t->fields.end()) return it->second;
  }
  return std::nullopt;
}

// A local or field named `name`. A present but empty value means the
// variable exists and its type is unknown.
std::optional<std::string> Resolver::variable_type(std::string_view name,
                                                   const ScopeTable& scopes) const {
  if (auto local = scopes.lookup(name)) {
    if (local->empty()) return std::string();
    auto r = resolve_type(*local);
    return r ? *r : *local;
  }
  for (std::string e = enclosing_; !e.empty();) {
    if (auto f = field_type(e, name)) return *f;
    const TypeInfo* t = tree_.find_type(e);
    if (!t) break;
    e = t->outer;
  }
  return std::nullopt;
}

std::optional<std::string> Resolver::qualified_name(const Expr& e) const {
  if (e.kind == ExprKind::var_ref) return e.name;
  if (e.kind == ExprKind::field_access && !e.children.empty()) {
    auto head = qualified_name(e.children.front());
    if (head) return *head + "." + e.name;
  }
  return std::nullopt;
}

std::optional<std::string> Resolver::receiver_type(const Expr& recv,
                                                   const ScopeTable& scopes) const {
  switch (recv.kind) {
    case ExprKind::var_ref: {
      if (recv.name == "this") return enclosing_.empty() ? std::nullopt : std::optional(enclosing_);
      if (recv.name == "super") {
        auto s = super_of(enclosing_);
        return s.empty() ? std::nullopt : std::optional(s);
      }
      if (auto v = variable_type(recv.name, scopes)) {
        if (v->empty()) return std::nullopt;
        return v;
      }
      return resolve_type(recv.name);
    }
    case ExprKind::field_access: {
      if (auto owner = receiver_type(recv.children.front(), scopes)) {
        if (recv.name == "length" && owner->ends_with("[]")) return std::string("int");
        if (auto f = field_type(*owner, recv.name)) return f;
      }
      if (auto q = qualified_name(recv)) return resolve_type(*q);
      return std::nullopt;
    }
    default: {
      auto t = type_of(recv, scopes);
      if (t.empty()) return std::nullopt;
      return t;
    }
  }
}

std::vector<const MethodInfo*> Resolver::methods_in_hierarchy(const std::string& type_fq,
                                                              std::string_view name,
                                                              std::size_t arity) const {
  std::vector<const MethodInfo*> out;
  auto related = tree_.ancestors(type_fq);
  for (auto& d : tree_.descendants(type_fq)) related.push_back(std::move(d));
  for (const auto& r : related) {
    const TypeInfo* t = tree_.find_type(r);
    if (!t) continue;
    for (const auto& m : t->methods) {
      if (m.id.method_name == name && m.param_types.size() == arity) out.push_back(&m);
    }
  }
  return out;
}

std::vector<const MethodInfo*> Resolver::unqualified_candidates(std::string_view name,
                                                                std::size_t arity) const {
  for (std::string e = enclosing_; !e.empty();) {
    auto c = methods_in_hierarchy(e, name, arity);
    if (!c.empty()) return c;
    const TypeInfo* t = tree_.find_type(e);
    if (!t) break;
    e = t->outer;
  }
  std::vector<const MethodInfo*> out;
  for (const auto& imp : ctx_.imports) {
    if (!imp.static_import) continue;
    std::string owner;
    if (imp.on_demand) {
      owner = imp.target;
    } else {
      auto dot = imp.target.rfind('.');
      if (dot == std::string::npos || imp.target.substr(dot + 1) != name) continue;
      owner = imp.target.substr(0, dot);
    }
    const TypeInfo* t = tree_.find_type(owner);
    if (!t) continue;
    for (const auto& m : t->methods) {
      if (m.id.method_name == name && m.param_types.size() == arity) out.push_back(&m);
    }
  }
  return out;
}

std::vector<const MethodInfo*> Resolver::constructor_candidates(const Expr& call,
                                                                std::size_t arity) const {
  std::vector<const MethodInfo*> out;
  auto type = resolve_type(call.name);
  if (!type) return out;
  const TypeInfo* t = tree_.find_type(*type);
  if (!t) return out;
  for (const auto& m : t->methods) {
    if (m.id.method_name == "<init>" && m.param_types.size() == arity) out.push_back(&m);
  }
  return out;
}

std::vector<MethodId> Resolver::most_precise(const std::vector<const MethodInfo*>& cands,
                                             const std::vector<std::string>& arg_types) const {
  auto compatible = [&](const std::string& param, const std::string& arg) {
    if (param_compatible(param, arg)) return true;
    std::string p = simple_type_name(param);
    for (const auto& a : tree_.ancestors(arg)) {
      if (simple_type_name(a) == p) return true;
    }
    return false;
  };
  std::vector<const MethodInfo*> kept;
  std::vector<int> exact;
  for (const MethodInfo* m : cands) {
    bool ok = true;
    int hits = 0;
    for (std::size_t i = 0; i < arg_types.size() && i < m->param_types.size(); ++i) {
      if (arg_types[i].empty()) continue;
      if (!compatible(m->param_types[i], arg_types[i])) {
        ok = false;
        break;
      }
      if (simple_type_name(m->param_types[i]) == simple_type_name(arg_types[i])) ++hits;
    }
    if (ok) {
      kept.push_back(m);
      exact.push_back(hits);
    }
  }
  std::vector<MethodId> out;
  if (kept.empty()) {
    for (const MethodInfo* m : cands) out.push_back(m->id);
  } else {
    int best = *std::max_element(exact.begin(), exact.end());
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (exact[i] == best) out.push_back(kept[i]->id);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<MethodId> Resolver::resolve_call(const Expr& call, const ScopeTable& scopes) const {
  if (call.kind != ExprKind::method_call && call.kind != ExprKind::new_object) return {};
  auto args = call.arguments();
  std::size_t arity = args.size();
  std::vector<const MethodInfo*> cands;
  std::string global_name = call.name;

  if (call.kind == ExprKind::new_object) {
    cands = constructor_candidates(call, arity);
    global_name = "<init>";
  } else if (!call.has_receiver && (call.name == "this" || call.name == "super")) {
    std::string owner = call.name == "this" ? enclosing_ : super_of(enclosing_);
    if (const TypeInfo* t = tree_.find_type(owner)) {
      for (const auto& m : t->methods) {
        if (m.id.method_name == "<init>" && m.param_types.size() == arity) cands.push_back(&m);
      }
    }
    if (cands.empty()) return {};
    global_name.clear();
  } else if (const Expr* recv = call.receiver()) {
    if (auto type = receiver_type(*recv, scopes)) cands = methods_in_hierarchy(*type, call.name, arity);
  } else {
    cands = unqualified_candidates(call.name, arity);
  }

  if (cands.empty() && !global_name.empty()) {
    std::string simple = simple_type_name(call.name);
    for (const MethodInfo* m : tree_.methods_named(global_name, arity)) {
      if (global_name == "<init>" && simple_type_name(m->id.class_fqname) != simple) continue;
      cands.push_back(m);
    }
  }
  if (cands.empty()) return {};

  std::vector<std::string> arg_types;
  arg_types.reserve(arity);
  for (const Expr* a : args) arg_types.push_back(type_of(*a, scopes));
  return most_precise(cands, arg_types);
}

std::string Resolver::type_of(const Expr& e, const ScopeTable& scopes) const {
  auto norm = [&](const std::string& t) -> std::string {
    if (t.empty()) return t;
    auto r = resolve_type(t);
    return r ? *r : t;
  };
  switch (e.kind) {
    case ExprKind::constant:
      return norm(literal_type(e.literal));
    case ExprKind::var_ref:
    case ExprKind::field_access: {
      if (e.kind == ExprKind::var_ref && e.name != "this" && e.name != "super") {
        auto v = variable_type(e.name, scopes);
        return v ? *v : "";
      }
      auto r = receiver_type(e, scopes);
      return r ? *r : "";
    }
    case ExprKind::method_call: {
      auto cands = resolve_call(e, scopes);
      std::string ret;
      for (const auto& id : cands) {
        const TypeInfo* t = tree_.find_type(id.class_fqname);
        if (!t) return "";
        auto m = std::find_if(t->methods.begin(), t->methods.end(),
                              [&](const MethodInfo& x) { return x.id == id; });
        if (m == t->methods.end() || m->id.method_name == "<init>") return "";
        if (!ret.empty() && ret != m->return_type) return "";
        ret = m->return_type;
      }
      return ret == "void" ? "" : norm(ret);
    }
    case ExprKind::new_object:
      return norm(e.name);
    case ExprKind::new_array:
      return norm(e.type) + "[]";
    case ExprKind::cast:
      return norm(e.type);
    case ExprKind::unary_op:
      if (e.op == "!" || e.op == "instanceof") return "boolean";
      return e.children.empty() ? "" : type_of(e.children.front(), scopes);
    case ExprKind::binary_op: {
      static const std::set<std::string, std::less<>> kBool = {"==", "!=", "<", ">", "<=",
                                                              ">=", "&&", "||"};
      if (kBool.count(e.op)) return "boolean";
      if (e.children.size() != 2) return "";
      std::string l = type_of(e.children[0], scopes);
      std::string r = type_of(e.children[1], scopes);
      if (e.op == "+" && (simple_type_name(l) == "String" || simple_type_name(r) == "String"))
        return norm("String");
      int rl = numeric_rank(l), rr = numeric_rank(r);
      if (rl && rr) {
        if (e.op == "<<" || e.op == ">>" || e.op == ">>>") return rl < 3 ? "int" : l;
        std::string wide = rl >= rr ? l : r;
        return numeric_rank(wide) < 3 ? "int" : wide;
      }
      if (l == "boolean" && r == "boolean") return "boolean";
      return "";
    }
    case ExprKind::assignment:
      return e.children.empty() ? "" : type_of(e.children.front(), scopes);
    case ExprKind::conditional: {
      if (e.children.size() != 3) return "";
      std::string a = type_of(e.children[1], scopes);
      return a == type_of(e.children[2], scopes) ? a : "";
    }
    case ExprKind::array_access:
      return e.children.empty() ? "" : strip_one_dim(type_of(e.children.front(), scopes));
    default:
      return "";
  }
}

std::vector<MethodId> resolve_call(const Expr& call, const ScopeTable& scopes,
                                   const FileContext& ctx, const PackageTree& tree,
                                   std::string_view enclosing) {
  Resolver r(tree, ctx, std::string(enclosing));
  return r.resolve_call(call, scopes);
}

}  // namespace ctm
