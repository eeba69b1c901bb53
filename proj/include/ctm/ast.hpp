#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ctm {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

struct SourcePos {
  int line = 0;
  int column = 0;
  std::size_t begin = 0;  // byte offset of the first token
  std::size_t end = 0;    // one past the last token
};

enum class ExprKind {
  constant,
  var_ref,
  field_access,
  method_call,
  new_object,
  unary_op,
  binary_op,
  assignment,
  cast,
  conditional,
  array_access,
  // Constructs outside the core expression grammar that still need a node
  // so their bodies can be scanned.
  new_array,
  array_init,
  lambda,
  method_ref,
  switch_expr,
};

std::string_view to_string(ExprKind kind);

struct Body;

/// One node of an expression tree.
///
/// Child layout by kind:
///   field_access  [receiver]
///   method_call   [receiver?] args...   (has_receiver tells which)
///   new_object    args...               (name is the type as written)
///   new_array     dims... [array_init?] (type is the element type)
///   unary_op      [operand]             (postfix set for x++ / x--)
///   binary_op     [lhs, rhs]
///   assignment    [target, value]
///   cast          [operand]             (type is the target type)
///   conditional   [cond, then, else]
///   array_access  [array, index]
///   method_ref    [receiver]
///   switch_expr   [selector]            (cases live in body)
///   lambda        []                    (params and statements in body)
struct Expr {
  ExprKind kind = ExprKind::constant;
  std::string name;
  std::string literal;
  std::string op;
  std::string type;
  bool has_receiver = false;
  bool postfix = false;
  std::vector<Expr> children;
  SourcePos pos;
  // Lambda bodies, anonymous class bodies, switch-expression cases.
  std::shared_ptr<const Body> body;

  /// Argument list of a call-like node (method_call / new_object).
  std::vector<const Expr*> arguments() const;
  const Expr* receiver() const {
    return has_receiver && !children.empty() ? &children.front() : nullptr;
  }
};

/// Structural equality: ignores positions and attached bodies.
bool same_structure(const Expr& a, const Expr& b);

/// S-expression dump, e.g. `(new_object java.io.File (var_ref x))`.
std::string to_sexpr(const Expr& e);

struct LocalVar {
  std::string name;
  std::string type;  // erased type text, empty when unknown (`var`, lambda)
  int line = 0;
};

enum class StmtKind {
  block,
  local_var,
  expr,
  if_,
  loop,     // while / do / classic for; vars hold for-init declarations
  foreach,  // vars[0] is the loop variable, exprs[0] the iterable
  try_,     // vars hold resources; children: block, catches..., finally?
  catch_,   // vars[0] is the exception parameter
  switch_,  // exprs[0] is the selector; children are case bodies
  return_,
  throw_,
  yield_,
  labeled,
  sync,
  assert_,
  local_type,
  other,    // break, continue, empty statement
};

struct TypeDecl;

struct Stmt {
  StmtKind kind = StmtKind::other;
  int line = 0;
  std::vector<LocalVar> vars;
  // Initializers aligned with vars for local_var; for other kinds the
  // statement's own expressions in source order.
  std::vector<Expr> exprs;
  std::vector<bool> var_has_init;
  std::vector<Stmt> children;
  std::shared_ptr<const Body> body;  // local_type: the declared type
};

struct FieldDecl {
  std::string name;
  std::string type;
  int line = 0;
  bool is_static = false;
  bool has_init = false;
  Expr init;
};

struct MethodDecl {
  std::string name;
  std::vector<LocalVar> params;
  std::string return_type;  // empty for constructors
  std::vector<std::string> type_params;
  std::vector<Stmt> body;
  bool has_body = false;
  bool is_constructor = false;
  bool is_static = false;
  bool is_varargs = false;
  int line = 0;
};

enum class TypeKind { class_, interface_, enum_, record_, annotation_ };

struct TypeDecl {
  TypeKind kind = TypeKind::class_;
  std::string name;     // simple name
  std::string fq_name;  // dotted, nested types joined with '.'
  std::vector<std::string> type_params;
  std::string extends;  // erased, as written
  std::vector<std::string> implements;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  std::vector<std::vector<Stmt>> initializers;
  std::vector<TypeDecl> nested;
  std::vector<std::string> enum_constants;
  int line = 0;
};

struct Body {
  std::vector<LocalVar> params;
  std::vector<Stmt> stmts;
  std::vector<TypeDecl> types;
};

struct ImportDecl {
  std::string target;
  bool on_demand = false;
  bool static_import = false;
};

struct CompilationUnit {
  std::string file_path;
  std::string package_name;
  std::vector<ImportDecl> imports;
  std::vector<TypeDecl> type_decls;
  std::size_t line_count = 0;
};

/// Counts expression components: each variable reference, field access
/// step, method call, object creation and constant counts one; operators,
/// casts and parentheses count zero.
std::size_t component_count(const Expr& e);

/// True when the expression contains no identifier-bearing node.
bool is_constant_only(const Expr& e);

}  // namespace ctm
