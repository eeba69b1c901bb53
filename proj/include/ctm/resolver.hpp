#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ctm/ast.hpp"
#include "ctm/method_id.hpp"
#include "ctm/package_tree.hpp"

namespace ctm {

/// Chain of name -> declared type maps, innermost last.
class ScopeTable {
 public:
  ScopeTable() { frames_.emplace_back(); }

  void push() { frames_.emplace_back(); }
  void pop() {
    if (frames_.size() > 1) frames_.pop_back();
  }
  /// Binds in the innermost frame. An empty type means "declared, type unknown".
  void declare(const std::string& name, const std::string& type) { frames_.back()[name] = type; }
  /// Innermost binding; nullopt when the name is not a local.
  std::optional<std::string> lookup(std::string_view name) const;
  std::size_t depth() const { return frames_.size(); }

 private:
  std::vector<std::map<std::string, std::string, std::less<>>> frames_;
};

/// Call-site resolution for one file. `enclosing` is the fq name of the
/// innermost type declaration around the code being scanned.
class Resolver {
 public:
  Resolver(const PackageTree& tree, FileContext ctx, std::string enclosing = {})
      : tree_(tree), ctx_(std::move(ctx)), enclosing_(std::move(enclosing)) {}

  void set_enclosing(std::string fq) { enclosing_ = std::move(fq); }
  const std::string& enclosing() const { return enclosing_; }

  /// Candidate methods for a method_call or new_object node, sorted by
  /// MethodId text. Never throws; unresolvable calls give an empty set.
  std::vector<MethodId> resolve_call(const Expr& call, const ScopeTable& scopes) const;

  /// Static type of an expression as far as it can be told: a fq name for
  /// types in the tree, a primitive or simple name otherwise. Empty when
  /// unknown.
  std::string type_of(const Expr& e, const ScopeTable& scopes) const;

  /// Type text for a local declaration, after `var` inference from a
  /// new_object initializer.
  std::string declared_type(const std::string& written, const Expr* init) const;

 private:
  std::optional<std::string> resolve_type(std::string_view written) const;
  std::optional<std::string> receiver_type(const Expr& recv, const ScopeTable& scopes) const;
  std::optional<std::string> qualified_name(const Expr& e) const;
  std::optional<std::string> field_type(std::string_view owner, std::string_view field) const;
  std::optional<std::string> variable_type(std::string_view name, const ScopeTable& scopes) const;
  std::vector<const MethodInfo*> methods_in_hierarchy(const std::string& type_fq,
                                                      std::string_view name,
                                                      std::size_t arity) const;
  std::vector<const MethodInfo*> unqualified_candidates(std::string_view name,
                                                        std::size_t arity) const;
  std::vector<const MethodInfo*> constructor_candidates(const Expr& call, std::size_t arity) const;
  std::vector<MethodId> most_precise(const std::vector<const MethodInfo*>& cands,
                                     const std::vector<std::string>& arg_types) const;
  std::string super_of(const std::string& type_fq) const;

  const PackageTree& tree_;
  FileContext ctx_;
  std::string enclosing_;
};

/// Free-function form of Resolver::resolve_call.
std::vector<MethodId> resolve_call(const Expr& call, const ScopeTable& scopes,
                                   const FileContext& ctx, const PackageTree& tree,
                                   std::string_view enclosing = {});

/// True when an argument of static type `arg` may be passed to a parameter
/// declared as `param`, judged textually on simple names. Unknown argument
/// types and Object parameters are compatible with anything.
bool param_compatible(std::string_view param, std::string_view arg);

}  // namespace ctm
