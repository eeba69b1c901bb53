#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ctm/ast.hpp"
#include "ctm/method_id.hpp"

namespace ctm {

struct MethodInfo {
  MethodId id;
  std::vector<std::string> param_types;  // as declared (simple names for signature-list entries)
  std::string return_type;               // resolved to a known type when possible
  bool is_static = false;
};

struct TypeInfo {
  std::string fq_name;
  std::string simple_name;
  std::string package_name;
  std::string outer;                 // enclosing type, empty for top level
  std::vector<std::string> supertypes;  // resolved fq names of known supertypes
  bool has_unknown_supertype = false;
  std::map<std::string, std::string> fields;  // name -> type (resolved when possible)
  std::vector<MethodInfo> methods;
  std::set<std::string> type_params;
  bool from_source = false;
};

/// Import and package context of one compilation unit, used to turn type
/// names written in that file into fully qualified names.
struct FileContext {
  std::string package_name;
  std::vector<ImportDecl> imports;
};

/// Hierarchical symbol table of packages, types and method signatures built
/// from parsed sources plus an optional plain-text signature list.
class PackageTree {
 public:
  const TypeInfo* find_type(std::string_view fq_name) const;
  const std::map<std::string, TypeInfo>& types() const { return types_; }

  /// Package paths, each mapped to the fq names of the types it contains
  /// directly. Parent packages appear even when empty.
  const std::map<std::string, std::set<std::string>>& packages() const { return packages_; }

  /// Every registered method with this name and parameter count.
  std::vector<const MethodInfo*> methods_named(std::string_view name, std::size_t arity) const;

  bool contains_method(const MethodId& id) const;

  /// Resolves a type name as written in a file to a known fq name. Nested
  /// types of the enclosing chain, single-type imports, the file's own
  /// package, on-demand imports and java.lang are tried in that order.
  /// Array suffixes are preserved.
  std::optional<std::string> resolve_type_name(std::string_view written,
                                               const FileContext& ctx,
                                               std::string_view enclosing = {}) const;

  /// Known supertypes, transitively, starting with `fq` itself.
  std::vector<std::string> ancestors(std::string_view fq) const;
  /// Known subtypes, transitively, excluding `fq`.
  std::vector<std::string> descendants(std::string_view fq) const;

  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  // Construction (single merge phase, see build_package_tree).
  void add_unit(const CompilationUnit& unit);
  void add_signature(const MethodId& id);
  void add_signature_list(std::string_view text, std::string_view origin);
  void finalize();

 private:
  struct PendingSupers {
    std::string type_fq;
    std::vector<std::string> written;
    std::size_t context_index;
  };
  struct PendingType {
    std::string type_fq;
    std::size_t context_index;
  };

  void add_type(const TypeDecl& decl, const std::string& package, const std::string& outer,
                std::size_t context_index);
  TypeInfo& ensure_type(const std::string& fq, const std::string& package);
  void register_package(const std::string& package, const std::string& type_fq);
  std::string resolve_or_keep(const std::string& written, std::size_t ctx,
                              const std::string& enclosing) const;

  std::map<std::string, TypeInfo> types_;
  std::map<std::string, std::set<std::string>> packages_;
  std::map<std::string, std::vector<std::string>> subtypes_;
  std::map<std::string, std::vector<std::pair<std::string, std::size_t>>> methods_by_name_;
  std::vector<FileContext> contexts_;
  std::vector<PendingSupers> pending_supers_;
  std::vector<PendingType> pending_types_;
  std::vector<std::string> diagnostics_;
  bool finalized_ = false;
};

/// Builds the tree from parsed units plus the text of an optional signature
/// list (`<class_fqname>.<name><descriptor>` per line, `#` comments).
/// Malformed signature lines and duplicate type names produce diagnostics.
PackageTree build_package_tree(const std::vector<CompilationUnit>& units,
                               std::optional<std::string_view> extra_signatures = std::nullopt);

/// Declared parameter types of a source method, with class and method type
/// variables replaced by Object.
std::vector<std::string> erased_param_types(const MethodDecl& m,
                                            const std::set<std::string>& class_type_params);

MethodId method_id_for(const std::string& class_fq, const MethodDecl& m,
                       const std::set<std::string>& class_type_params);

}  // namespace ctm
