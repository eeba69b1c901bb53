#include "ctm/package_tree.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace ctm {
namespace {

std::pair<std::string, std::string> split_array_suffix(std::string_view t) {
  auto b = t.find('[');
  if (b == std::string_view::npos) return {std::string(t), ""};
  return {std::string(t.substr(0, b)), std::string(t.substr(b))};
}

std::string package_of(const std::string& class_fq) {
  auto dot = class_fq.rfind('.');
  return dot == std::string::npos ? std::string() : class_fq.substr(0, dot);
}

std::string erase_type_var(const std::string& t, const std::set<std::string>& class_params,
                           const std::vector<std::string>& method_params) {
  auto [base, dims] = split_array_suffix(t);
  if (class_params.count(base) ||
      std::find(method_params.begin(), method_params.end(), base) != method_params.end())
    return "Object" + dims;
  return t;
}

}  // namespace

std::vector<std::string> erased_param_types(const MethodDecl& m,
                                            const std::set<std::string>& class_type_params) {
  std::vector<std::string> out;
  out.reserve(m.params.size());
  for (const auto& p : m.params) out.push_back(erase_type_var(p.type, class_type_params, m.type_params));
  return out;
}

MethodId method_id_for(const std::string& class_fq, const MethodDecl& m,
                       const std::set<std::string>& class_type_params) {
  std::string ret = m.is_constructor
                        ? std::string("void")
                        : erase_type_var(m.return_type, class_type_params, m.type_params);
  return encode_method_id(class_fq, m.is_constructor ? "<init>" : m.name,
                          erased_param_types(m, class_type_params), ret);
}

const TypeInfo* PackageTree::find_type(std::string_view fq_name) const {
  auto it = types_.find(std::string(fq_name));
  return it == types_.end() ? nullptr : &it->second;
}

std::vector<const MethodInfo*> PackageTree::methods_named(std::string_view name,
                                                          std::size_t arity) const {
  std::vector<const MethodInfo*> out;
  auto it = methods_by_name_.find(std::string(name));
  if (it == methods_by_name_.end()) return out;
  for (const auto& [type_fq, index] : it->second) {
    const MethodInfo& m = types_.at(type_fq).methods[index];
    if (m.param_types.size() == arity) out.push_back(&m);
  }
  return out;
}

bool PackageTree::contains_method(const MethodId& id) const {
  const TypeInfo* t = find_type(id.class_fqname);
  if (!t) return false;
  return std::any_of(t->methods.begin(), t->methods.end(),
                     [&](const MethodInfo& m) { return m.id == id; });
}

void PackageTree::register_package(const std::string& package, const std::string& type_fq) {
  packages_[package].insert(type_fq);
  std::string prefix = package;
  for (auto dot = prefix.rfind('.'); dot != std::string::npos; dot = prefix.rfind('.')) {
    prefix = prefix.substr(0, dot);
    packages_[prefix];
  }
}

TypeInfo& PackageTree::ensure_type(const std::string& fq, const std::string& package) {
  auto [it, inserted] = types_.try_emplace(fq);
  if (inserted) {
    it->second.fq_name = fq;
    it->second.simple_name = simple_type_name(fq);
    it->second.package_name = package;
    register_package(package, fq);
  }
  return it->second;
}

void PackageTree::add_type(const TypeDecl& decl, const std::string& package,
                           const std::string& outer, std::size_t context_index) {
  bool existed = types_.count(decl.fq_name) > 0 && types_.at(decl.fq_name).from_source;
  if (existed) diagnostics_.push_back("duplicate type " + decl.fq_name + " merged");
  TypeInfo& t = ensure_type(decl.fq_name, package);
  t.outer = outer;
  t.from_source = true;
  t.type_params.insert(decl.type_params.begin(), decl.type_params.end());
  for (const auto& f : decl.fields) t.fields[f.name] = f.type;
  for (const auto& m : decl.methods) {
    MethodInfo info;
    try {
      info.id = method_id_for(decl.fq_name, m, t.type_params);
    } catch (const UnknownTypeError& e) {
      diagnostics_.push_back(decl.fq_name + "." + m.name + ": " + e.what());
      continue;
    }
    bool dup = std::any_of(t.methods.begin(), t.methods.end(),
                           [&](const MethodInfo& x) { return x.id == info.id; });
    if (dup) continue;
    info.param_types = erased_param_types(m, t.type_params);
    info.return_type = m.is_constructor ? "void" : m.return_type;
    info.is_static = m.is_static;
    t.methods.push_back(std::move(info));
  }
  PendingSupers ps{decl.fq_name, {}, context_index};
  if (!decl.extends.empty()) ps.written.push_back(decl.extends);
  for (const auto& i : decl.implements) ps.written.push_back(i);
  pending_supers_.push_back(std::move(ps));
  pending_types_.push_back({decl.fq_name, context_index});
  for (const auto& n : decl.nested) add_type(n, package, decl.fq_name, context_index);
}

void PackageTree::add_unit(const CompilationUnit& unit) {
  contexts_.push_back(FileContext{unit.package_name, unit.imports});
  std::size_t idx = contexts_.size() - 1;
  for (const auto& td : unit.type_decls) add_type(td, unit.package_name, "", idx);
}

void PackageTree::add_signature(const MethodId& id) {
  if (contains_method(id)) return;
  auto sig = decode_descriptor(id.descriptor);
  TypeInfo& t = ensure_type(id.class_fqname, package_of(id.class_fqname));
  MethodInfo info;
  info.id = id;
  info.param_types = std::move(sig.params);
  info.return_type = std::move(sig.return_type);
  t.methods.push_back(std::move(info));
}

void PackageTree::add_signature_list(std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    std::string entry = line.substr(first, last - first + 1);
    try {
      add_signature(MethodId::parse(entry));
    } catch (const std::invalid_argument& e) {
      diagnostics_.push_back(std::string(origin) + ":" + std::to_string(lineno) +
                             ": malformed signature: " + e.what());
    }
  }
}

std::string PackageTree::resolve_or_keep(const std::string& written, std::size_t ctx,
                                         const std::string& enclosing) const {
  if (written.empty() || is_primitive_type(split_array_suffix(written).first)) return written;
  auto r = resolve_type_name(written, contexts_.at(ctx), enclosing);
  return r ? *r : written;
}

void PackageTree::finalize() {
  for (const auto& ps : pending_supers_) {
    TypeInfo& t = types_.at(ps.type_fq);
    for (const auto& w : ps.written) {
      auto r = resolve_type_name(w, contexts_.at(ps.context_index), t.outer);
      if (r && *r != t.fq_name) {
        if (std::find(t.supertypes.begin(), t.supertypes.end(), *r) == t.supertypes.end())
          t.supertypes.push_back(*r);
      } else if (!r) {
        t.has_unknown_supertype = true;
      }
    }
  }
  for (const auto& pt : pending_types_) {
    TypeInfo& t = types_.at(pt.type_fq);
    for (auto& [name, type] : t.fields) type = resolve_or_keep(type, pt.context_index, t.fq_name);
    for (auto& m : t.methods) {
      if (m.id.method_name != "<init>")
        m.return_type = resolve_or_keep(m.return_type, pt.context_index, t.fq_name);
    }
  }
  // Signature-list return types are simple names; qualify them when the
  // simple name is unambiguous.
  std::map<std::string, std::vector<std::string>> by_simple;
  for (const auto& [fq, t] : types_) by_simple[t.simple_name].push_back(fq);
  for (auto& [fq, t] : types_) {
    if (t.from_source) continue;
    for (auto& m : t.methods) {
      auto [base, dims] = split_array_suffix(m.return_type);
      auto it = by_simple.find(base);
      if (it != by_simple.end() && it->second.size() == 1) m.return_type = it->second[0] + dims;
    }
  }
  subtypes_.clear();
  methods_by_name_.clear();
  for (const auto& [fq, t] : types_) {
    for (const auto& s : t.supertypes) subtypes_[s].push_back(fq);
    for (std::size_t i = 0; i < t.methods.size(); ++i)
      methods_by_name_[t.methods[i].id.method_name].emplace_back(fq, i);
  }
  pending_supers_.clear();
  pending_types_.clear();
  finalized_ = true;
}

std::optional<std::string> PackageTree::resolve_type_name(std::string_view written,
                                                          const FileContext& ctx,
                                                          std::string_view enclosing) const {
  auto [base, dims] = split_array_suffix(written);
  if (base.empty() || is_primitive_type(base)) return std::nullopt;
  auto found = [&](const std::string& fq) -> std::optional<std::string> {
    if (find_type(fq)) return fq + dims;
    return std::nullopt;
  };
  if (base.find('.') != std::string::npos) {
    if (auto r = found(base)) return r;
    auto dot = base.find('.');
    auto head = resolve_type_name(base.substr(0, dot), ctx, enclosing);
    if (head) return found(*head + base.substr(dot));
    return std::nullopt;
  }
  for (std::string e(enclosing); !e.empty();) {
    if (simple_type_name(e) == base && find_type(e)) return e + dims;
    for (const auto& a : ancestors(e)) {
      if (auto r = found(a + "." + base)) return r;
    }
    const TypeInfo* t = find_type(e);
    if (t) {
      e = t->outer;
    } else {
      auto dot = e.rfind('.');
      e = dot == std::string::npos ? std::string() : e.substr(0, dot);
    }
  }
  for (const auto& imp : ctx.imports) {
    if (imp.static_import || imp.on_demand) continue;
    if (simple_type_name(imp.target) == base) return found(imp.target);
  }
  if (auto r = found(ctx.package_name.empty() ? base : ctx.package_name + "." + base)) return r;
  for (const auto& imp : ctx.imports) {
    if (imp.static_import || !imp.on_demand) continue;
    if (auto r = found(imp.target + "." + base)) return r;
  }
  return found("java.lang." + base);
}

std::vector<std::string> PackageTree::ancestors(std::string_view fq) const {
  std::vector<std::string> out{std::string(fq)};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const TypeInfo* t = find_type(out[i]);
    if (!t) continue;
    for (const auto& s : t->supertypes) {
      if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    }
  }
  return out;
}

std::vector<std::string> PackageTree::descendants(std::string_view fq) const {
  std::vector<std::string> out;
  std::deque<std::string> queue{std::string(fq)};
  std::set<std::string> seen{std::string(fq)};
  while (!queue.empty()) {
    auto cur = queue.front();
    queue.pop_front();
    auto it = subtypes_.find(cur);
    if (it == subtypes_.end()) continue;
    for (const auto& s : it->second) {
      if (seen.insert(s).second) {
        out.push_back(s);
        queue.push_back(s);
      }
    }
  }
  return out;
}

PackageTree build_package_tree(const std::vector<CompilationUnit>& units,
                               std::optional<std::string_view> extra_signatures) {
  PackageTree tree;
  for (const auto& u : units) tree.add_unit(u);
  if (extra_signatures) tree.add_signature_list(*extra_signatures, "signatures");
  tree.finalize();
  return tree;
}

}  // namespace ctm
