#include "ctm/parser.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <utility>

#include "ctm/lexer.hpp"

namespace ctm {
namespace {

constexpr std::array<std::string_view, 8> kPrimitives = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double"};

bool is_primitive(std::string_view w) {
  return std::find(kPrimitives.begin(), kPrimitives.end(), w) != kPrimitives.end();
}

int binary_precedence(std::string_view op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "|") return 3;
  if (op == "^") return 4;
  if (op == "&") return 5;
  if (op == "==" || op == "!=") return 6;
  if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") return 7;
  if (op == "<<" || op == ">>" || op == ">>>") return 8;
  if (op == "+" || op == "-") return 9;
  if (op == "*" || op == "/" || op == "%") return 10;
  return 0;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  CompilationUnit unit(const std::string& path) {
    CompilationUnit cu;
    cu.file_path = path;
    skip_annotations();
    if (accept("package")) {
      cu.package_name = qualified_name();
      expect(";");
    }
    while (at("import")) {
      next();
      ImportDecl imp;
      imp.static_import = accept("static");
      imp.target = ident();
      while (accept(".")) {
        if (accept("*")) {
          imp.on_demand = true;
          break;
        }
        imp.target += "." + ident();
      }
      expect(";");
      cu.imports.push_back(std::move(imp));
    }
    while (!at_eof()) {
      if (accept(";")) continue;
      Modifiers mods = modifiers();
      (void)mods;
      if (!at_type_decl_start())
        fail("expected a type declaration");
      cu.type_decls.push_back(type_decl(cu.package_name));
    }
    return cu;
  }

  Expr standalone_expression() {
    Expr e = expression();
    if (!at_eof()) fail("unexpected trailing input");
    return e;
  }

 private:
  struct Modifiers {
    bool is_static = false;
    bool is_default = false;
  };

  // --- token helpers -----------------------------------------------------

  const Token& tok(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  bool at_eof() const { return tok().kind == TokenKind::eof; }
  bool at(std::string_view text, std::size_t ahead = 0) const {
    const Token& t = tok(ahead);
    return t.kind != TokenKind::eof && t.kind != TokenKind::string_literal &&
           t.kind != TokenKind::char_literal && t.text == text;
  }
  bool at_ident(std::size_t ahead = 0) const {
    return tok(ahead).kind == TokenKind::identifier;
  }
  // Two tokens with nothing between them (for `>>`, `>=` recombination).
  bool adjacent(std::size_t ahead) const {
    return tok(ahead).end == tok(ahead + 1).begin;
  }
  void next() {
    if (!at_eof()) ++pos_;
  }
  bool accept(std::string_view text) {
    if (at(text)) {
      next();
      return true;
    }
    return false;
  }
  void expect(std::string_view text) {
    if (!accept(text)) fail("expected '" + std::string(text) + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = tok();
    std::string found = t.kind == TokenKind::eof ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(msg + ", found " + found, t.line, t.column);
  }
  std::string ident() {
    if (!at_ident()) fail("expected identifier");
    std::string s = tok().text;
    next();
    return s;
  }
  std::string qualified_name() {
    std::string s = ident();
    while (at(".") && at_ident(1)) {
      next();
      s += "." + ident();
    }
    return s;
  }

  void finish(Expr& e, std::size_t start) const {
    const Token& first = toks_[start];
    e.pos.line = first.line;
    e.pos.column = first.column;
    e.pos.begin = first.begin;
    e.pos.end = pos_ > start ? toks_[pos_ - 1].end : first.end;
  }

  // Skips a balanced bracket group starting at the current opener.
  void skip_balanced(std::string_view open, std::string_view close) {
    int depth = 0;
    do {
      if (at_eof()) fail("unbalanced '" + std::string(open) + "'");
      if (at(open)) ++depth;
      else if (at(close)) --depth;
      next();
    } while (depth > 0);
  }

  // --- annotations and modifiers -----------------------------------------

  bool at_annotation() const { return at("@") && !at("interface", 1); }

  void skip_annotations() {
    while (at_annotation()) {
      next();
      qualified_name();
      if (at("(")) skip_balanced("(", ")");
    }
  }

  Modifiers modifiers() {
    Modifiers m;
    for (;;) {
      if (at_annotation()) {
        skip_annotations();
        continue;
      }
      const Token& t = tok();
      if (t.kind == TokenKind::keyword &&
          (t.text == "public" || t.text == "private" || t.text == "protected" ||
           t.text == "static" || t.text == "final" || t.text == "abstract" ||
           t.text == "native" || t.text == "synchronized" || t.text == "transient" ||
           t.text == "volatile" || t.text == "strictfp" ||
           (t.text == "default" && !at(":", 1) && !at("->", 1)))) {
        if (t.text == "static") m.is_static = true;
        if (t.text == "default") m.is_default = true;
        next();
        continue;
      }
      if (t.kind == TokenKind::identifier && t.text == "sealed" &&
          (at_ident(1) || tok(1).kind == TokenKind::keyword)) {
        next();
        continue;
      }
      if (t.kind == TokenKind::identifier && t.text == "non" && at("-", 1) &&
          tok(2).text == "sealed") {
        next();
        next();
        next();
        continue;
      }
      return m;
    }
  }

  bool at_type_decl_start() const {
    if (at("class") || at("interface") || at("enum")) return true;
    if (at("@") && at("interface", 1)) return true;
    return at("record") && at_ident(1) && (at("(", 2) || at("<", 2));
  }

  // --- types ---------------------------------------------------------------

  bool type_arguments_opt() {
    if (!at("<")) return true;
    next();
    if (accept(">")) return true;  // diamond
    for (;;) {
      skip_annotations();
      if (accept("?")) {
        if (accept("extends") || accept("super")) {
          if (!type_opt()) return false;
        }
      } else if (!type_opt()) {
        return false;
      }
      if (accept(",")) continue;
      return accept(">");
    }
  }

  // Parses a type and returns its erased text; restores position and
  // returns nullopt when the tokens do not form a type.
  std::optional<std::string> type_opt() {
    std::size_t save = pos_;
    skip_annotations();
    std::string out;
    const Token& t = tok();
    if (t.kind == TokenKind::keyword && (is_primitive(t.text) || t.text == "void")) {
      out = t.text;
      next();
    } else if (t.kind == TokenKind::identifier) {
      out = t.text;
      next();
      if (!type_arguments_opt()) {
        pos_ = save;
        return std::nullopt;
      }
      while (at(".") && (at_ident(1) || at("@", 1))) {
        next();
        skip_annotations();
        out += "." + ident();
        if (!type_arguments_opt()) {
          pos_ = save;
          return std::nullopt;
        }
      }
    } else {
      pos_ = save;
      return std::nullopt;
    }
    for (;;) {
      skip_annotations();
      if (at("[") && at("]", 1)) {
        next();
        next();
        out += "[]";
      } else {
        break;
      }
    }
    return out;
  }

  std::string type() {
    auto t = type_opt();
    if (!t) fail("expected type");
    return *t;
  }

  std::vector<std::string> type_parameters() {
    std::vector<std::string> names;
    if (!at("<")) return names;
    next();
    while (!accept(">")) {
      skip_annotations();
      names.push_back(ident());
      if (accept("extends")) {
        type();
        while (accept("&")) type();
      }
      if (!accept(",") && !at(">")) fail("malformed type parameters");
    }
    return names;
  }

  std::vector<std::string> type_list() {
    std::vector<std::string> out{type()};
    while (accept(",")) out.push_back(type());
    return out;
  }

  // --- declarations --------------------------------------------------------

  TypeDecl type_decl(const std::string& outer) {
    TypeDecl td;
    td.line = tok().line;
    if (accept("class")) {
      td.kind = TypeKind::class_;
    } else if (accept("interface")) {
      td.kind = TypeKind::interface_;
    } else if (accept("enum")) {
      td.kind = TypeKind::enum_;
    } else if (at("@")) {
      next();
      next();
      td.kind = TypeKind::annotation_;
    } else if (at("record")) {
      next();
      td.kind = TypeKind::record_;
    } else {
      fail("expected type declaration");
    }
    td.name = ident();
    td.fq_name = outer.empty() ? td.name : outer + "." + td.name;
    td.type_params = type_parameters();
    std::vector<LocalVar> components;
    if (td.kind == TypeKind::record_) components = formal_parameters(nullptr);
    if (accept("extends")) {
      auto supers = type_list();
      if (td.kind == TypeKind::interface_) {
        td.implements = supers;
      } else {
        td.extends = supers.front();
      }
    }
    if (accept("implements")) td.implements = type_list();
    if (at_ident() && tok().text == "permits") {
      next();
      type_list();
    }
    for (const auto& c : components) {
      FieldDecl f;
      f.name = c.name;
      f.type = c.type;
      f.line = c.line;
      td.fields.push_back(f);
      MethodDecl accessor;
      accessor.name = c.name;
      accessor.return_type = c.type;
      accessor.line = c.line;
      td.methods.push_back(std::move(accessor));
    }
    if (td.kind == TypeKind::record_) {
      MethodDecl ctor;
      ctor.name = td.name;
      ctor.is_constructor = true;
      ctor.params = components;
      ctor.line = td.line;
      td.methods.push_back(std::move(ctor));
    }
    type_body(td);
    return td;
  }

  void type_body(TypeDecl& td) {
    expect("{");
    if (td.kind == TypeKind::enum_) enum_constants(td);
    while (!accept("}")) {
      if (at_eof()) fail("unterminated type body");
      member(td);
    }
  }

  void enum_constants(TypeDecl& td) {
    while (!at(";") && !at("}")) {
      skip_annotations();
      td.enum_constants.push_back(ident());
      std::vector<Expr> args;
      if (at("(")) args = arguments();
      if (!args.empty()) {
        // Enum constant arguments still need scanning; keep them as an
        // initializer expression statement.
        Stmt s;
        s.kind = StmtKind::expr;
        s.line = args.front().pos.line;
        s.exprs = std::move(args);
        td.initializers.push_back({std::move(s)});
      }
      if (at("{")) {
        TypeDecl anon;
        anon.name = td.enum_constants.back();
        anon.fq_name = td.fq_name + "." + anon.name;
        anon.extends = td.name;
        anon.line = tok().line;
        type_body(anon);
        td.nested.push_back(std::move(anon));
      }
      if (!accept(",")) break;
    }
    accept(";");
  }

  void member(TypeDecl& td) {
    if (accept(";")) return;
    if (at("{")) {
      td.initializers.push_back(block_stmts());
      return;
    }
    if (at("static") && at("{", 1)) {
      next();
      td.initializers.push_back(block_stmts());
      return;
    }
    int line = tok().line;
    Modifiers mods = modifiers();
    if (at_type_decl_start()) {
      td.nested.push_back(type_decl(td.fq_name));
      return;
    }
    auto tparams = type_parameters();
    skip_annotations();
    if (at_ident() && tok().text == td.name && at("(", 1)) {
      MethodDecl m;
      m.line = tok().line;
      m.name = ident();
      m.is_constructor = true;
      m.type_params = tparams;
      m.params = formal_parameters(&m.is_varargs);
      if (accept("throws")) type_list();
      m.body = block_stmts();
      m.has_body = true;
      td.methods.push_back(std::move(m));
      return;
    }
    if (td.kind == TypeKind::record_ && at_ident() && tok().text == td.name && at("{", 1)) {
      // Compact canonical constructor: parameters are the record components.
      next();
      auto it = std::find_if(td.methods.begin(), td.methods.end(),
                             [](const MethodDecl& m) { return m.is_constructor; });
      if (it != td.methods.end()) {
        it->body = block_stmts();
        it->has_body = true;
      } else {
        block_stmts();
      }
      return;
    }
    std::string ty = type();
    int name_line = tok().line;
    std::string name = ident();
    if (at("(")) {
      MethodDecl m;
      m.line = name_line;
      m.name = std::move(name);
      m.type_params = std::move(tparams);
      m.is_static = mods.is_static;
      m.params = formal_parameters(&m.is_varargs);
      while (at("[") && at("]", 1)) {
        next();
        next();
        ty += "[]";
      }
      m.return_type = std::move(ty);
      if (accept("throws")) type_list();
      if (accept("default")) {
        // annotation element default value
        element_value();
      }
      if (at("{")) {
        m.body = block_stmts();
        m.has_body = true;
      } else {
        expect(";");
      }
      td.methods.push_back(std::move(m));
      return;
    }
    (void)line;
    for (;;) {
      FieldDecl f;
      f.name = std::move(name);
      f.type = ty;
      f.line = name_line;
      f.is_static = mods.is_static;
      while (at("[") && at("]", 1)) {
        next();
        next();
        f.type += "[]";
      }
      if (accept("=")) {
        f.init = variable_initializer();
        f.has_init = true;
      }
      td.fields.push_back(std::move(f));
      if (!accept(",")) break;
      name_line = tok().line;
      name = ident();
    }
    expect(";");
  }

  void element_value() {
    if (at("{")) {
      skip_balanced("{", "}");
    } else if (at("@")) {
      skip_annotations();
    } else {
      ternary();
    }
  }

  std::vector<LocalVar> formal_parameters(bool* varargs) {
    std::vector<LocalVar> params;
    expect("(");
    while (!accept(")")) {
      modifiers();
      LocalVar p;
      p.line = tok().line;
      p.type = type();
      if (accept("...")) {
        p.type += "[]";
        if (varargs) *varargs = true;
      }
      if (at("this")) {
        // receiver parameter, not a real parameter
        next();
      } else {
        if (at_ident() && at(".", 1) && at("this", 2)) {
          next();
          next();
          next();
        } else {
          p.name = ident();
          while (at("[") && at("]", 1)) {
            next();
            next();
            p.type += "[]";
          }
          params.push_back(std::move(p));
        }
      }
      if (!accept(",") && !at(")")) fail("expected ',' or ')' in parameter list");
    }
    return params;
  }

  // --- statements ----------------------------------------------------------

  std::vector<Stmt> block_stmts() {
    expect("{");
    std::vector<Stmt> out;
    while (!accept("}")) {
      if (at_eof()) fail("unterminated block");
      out.push_back(statement());
    }
    return out;
  }

  Stmt block() {
    Stmt s;
    s.kind = StmtKind::block;
    s.line = tok().line;
    s.children = block_stmts();
    return s;
  }

  // Lookahead: does a local variable declaration start here?
  bool at_local_var_decl() {
    std::size_t save = pos_;
    while (at("final") || at_annotation()) {
      if (at("final")) next();
      else skip_annotations();
    }
    bool result = false;
    if (auto t = type_opt()) {
      if (at_ident() &&
          (at("=", 1) || at(";", 1) || at(",", 1) || at("[", 1) || at(":", 1))) {
        result = true;
      }
    }
    pos_ = save;
    return result;
  }

  Stmt local_var_decl(bool allow_foreach_colon = false) {
    Stmt s;
    s.kind = StmtKind::local_var;
    s.line = tok().line;
    while (at("final") || at_annotation()) {
      if (at("final")) next();
      else skip_annotations();
    }
    std::string ty = type();
    for (;;) {
      LocalVar v;
      v.line = tok().line;
      v.name = ident();
      v.type = ty == "var" ? std::string() : ty;
      while (at("[") && at("]", 1)) {
        next();
        next();
        v.type += "[]";
      }
      bool has_init = false;
      Expr init;
      if (accept("=")) {
        init = variable_initializer();
        has_init = true;
        if (ty == "var" && init.kind == ExprKind::new_object) v.type = init.name;
      }
      s.vars.push_back(std::move(v));
      s.exprs.push_back(std::move(init));
      s.var_has_init.push_back(has_init);
      if (allow_foreach_colon && at(":")) break;
      if (!accept(",")) break;
    }
    return s;
  }

  Stmt local_type_stmt() {
    Stmt s;
    s.kind = StmtKind::local_type;
    s.line = tok().line;
    modifiers();
    auto body = std::make_shared<Body>();
    body->types.push_back(type_decl(""));
    s.body = std::move(body);
    return s;
  }

  Stmt expr_stmt(StmtKind kind, Expr e, int line) {
    Stmt s;
    s.kind = kind;
    s.line = line;
    s.exprs.push_back(std::move(e));
    return s;
  }

  Stmt statement() {
    int line = tok().line;
    if (at("{")) return block();
    if (accept(";")) {
      Stmt s;
      s.line = line;
      return s;
    }
    const Token& t = tok();
    if (t.kind == TokenKind::keyword) {
      if (t.text == "if") return if_stmt();
      if (t.text == "while") {
        next();
        Stmt s;
        s.kind = StmtKind::loop;
        s.line = line;
        s.exprs.push_back(paren_expression());
        s.children.push_back(statement());
        return s;
      }
      if (t.text == "do") {
        next();
        Stmt s;
        s.kind = StmtKind::loop;
        s.line = line;
        s.children.push_back(statement());
        expect("while");
        s.exprs.push_back(paren_expression());
        expect(";");
        return s;
      }
      if (t.text == "for") return for_stmt();
      if (t.text == "try") return try_stmt();
      if (t.text == "switch" ) {
        next();
        return switch_body(line);
      }
      if (t.text == "return" || t.text == "throw") {
        bool is_return = t.text == "return";
        next();
        Stmt s;
        s.kind = is_return ? StmtKind::return_ : StmtKind::throw_;
        s.line = line;
        if (!at(";")) s.exprs.push_back(expression());
        expect(";");
        return s;
      }
      if (t.text == "break" || t.text == "continue") {
        next();
        if (at_ident()) next();
        expect(";");
        Stmt s;
        s.line = line;
        return s;
      }
      if (t.text == "synchronized" && at("(", 1)) {
        next();
        Stmt s;
        s.kind = StmtKind::sync;
        s.line = line;
        s.exprs.push_back(paren_expression());
        s.children.push_back(block());
        return s;
      }
      if (t.text == "assert") {
        next();
        Stmt s;
        s.kind = StmtKind::assert_;
        s.line = line;
        s.exprs.push_back(expression());
        if (accept(":")) s.exprs.push_back(expression());
        expect(";");
        return s;
      }
      if (t.text == "class" || t.text == "interface" || t.text == "enum" ||
          t.text == "abstract" || (t.text == "static" && !at(".", 1)) ||
          (t.text == "final" && !at_local_var_decl())) {
        return local_type_stmt();
      }
    }
    if (at_ident()) {
      if (t.text == "yield" && !at("=", 1) && !at(".", 1) && !at("(", 1) &&
          !at("[", 1) && !at("++", 1) && !at("--", 1) && !at(";", 1)) {
        next();
        Stmt s = expr_stmt(StmtKind::yield_, expression(), line);
        expect(";");
        return s;
      }
      if (at(":", 1)) {
        next();
        next();
        Stmt s;
        s.kind = StmtKind::labeled;
        s.line = line;
        s.children.push_back(statement());
        return s;
      }
      if (t.text == "record" && at_ident(1) && (at("(", 2) || at("<", 2)))
        return local_type_stmt();
    }
    if (at_annotation()) {
      std::size_t save = pos_;
      skip_annotations();
      bool type_follows = at_type_decl_start() || at("abstract") || at("final") ||
                          at("static");
      pos_ = save;
      if (type_follows && !at_local_var_decl()) return local_type_stmt();
    }
    if (at_local_var_decl()) {
      Stmt s = local_var_decl();
      expect(";");
      return s;
    }
    Stmt s = expr_stmt(StmtKind::expr, expression(), line);
    expect(";");
    return s;
  }

  Expr paren_expression() {
    expect("(");
    Expr e = expression();
    expect(")");
    return e;
  }

  Stmt if_stmt() {
    Stmt s;
    s.kind = StmtKind::if_;
    s.line = tok().line;
    expect("if");
    s.exprs.push_back(paren_expression());
    s.children.push_back(statement());
    if (accept("else")) s.children.push_back(statement());
    return s;
  }

  Stmt for_stmt() {
    int line = tok().line;
    expect("for");
    expect("(");
    if (at_local_var_decl()) {
      Stmt decl = local_var_decl(true);
      if (accept(":")) {
        Stmt s;
        s.kind = StmtKind::foreach;
        s.line = line;
        s.vars.push_back(decl.vars.front());
        s.exprs.push_back(expression());
        expect(")");
        s.children.push_back(statement());
        return s;
      }
      Stmt s;
      s.kind = StmtKind::loop;
      s.line = line;
      s.children.push_back(std::move(decl));
      expect(";");
      for_rest(s);
      return s;
    }
    Stmt s;
    s.kind = StmtKind::loop;
    s.line = line;
    Stmt init;
    init.kind = StmtKind::expr;
    init.line = line;
    if (!at(";")) {
      init.exprs.push_back(expression());
      while (accept(",")) init.exprs.push_back(expression());
    }
    s.children.push_back(std::move(init));
    expect(";");
    for_rest(s);
    return s;
  }

  void for_rest(Stmt& s) {
    if (!at(";")) s.exprs.push_back(expression());
    expect(";");
    if (!at(")")) {
      s.exprs.push_back(expression());
      while (accept(",")) s.exprs.push_back(expression());
    }
    expect(")");
    s.children.push_back(statement());
  }

  Stmt try_stmt() {
    Stmt s;
    s.kind = StmtKind::try_;
    s.line = tok().line;
    expect("try");
    if (accept("(")) {
      while (!accept(")")) {
        if (at_local_var_decl()) {
          Stmt d = local_var_decl();
          for (std::size_t i = 0; i < d.vars.size(); ++i) {
            s.vars.push_back(d.vars[i]);
            s.exprs.push_back(std::move(d.exprs[i]));
            s.var_has_init.push_back(d.var_has_init[i]);
          }
        } else {
          // Java 9 resource reference
          s.exprs.push_back(expression());
        }
        if (!accept(";") && !at(")")) fail("expected ';' or ')' in resources");
      }
    }
    s.children.push_back(block());
    while (at("catch")) {
      Stmt c;
      c.kind = StmtKind::catch_;
      c.line = tok().line;
      next();
      expect("(");
      modifiers();
      LocalVar v;
      v.line = tok().line;
      v.type = type();
      while (accept("|")) type();
      v.name = ident();
      expect(")");
      c.vars.push_back(std::move(v));
      c.children.push_back(block());
      s.children.push_back(std::move(c));
    }
    if (accept("finally")) s.children.push_back(block());
    return s;
  }

  // Parses `(selector) { cases }` after the `switch` keyword.
  Stmt switch_body(int line) {
    Stmt s;
    s.kind = StmtKind::switch_;
    s.line = line;
    s.exprs.push_back(paren_expression());
    Stmt cases;
    cases.kind = StmtKind::block;
    cases.line = tok().line;
    expect("{");
    while (!accept("}")) {
      if (at_eof()) fail("unterminated switch");
      if (at("case") || at("default")) {
        case_label();
        if (accept("->")) {
          int l = tok().line;
          if (at("{")) {
            cases.children.push_back(block());
          } else if (at("throw")) {
            cases.children.push_back(statement());
          } else {
            cases.children.push_back(expr_stmt(StmtKind::yield_, expression(), l));
            expect(";");
          }
        } else {
          expect(":");
        }
        continue;
      }
      cases.children.push_back(statement());
    }
    s.children.push_back(std::move(cases));
    return s;
  }

  void case_label() {
    if (accept("default")) return;
    expect("case");
    for (;;) {
      if (accept("default")) {
        // `case null, default`
      } else {
        Expr label = ternary();
        if (at_ident() && tok().text != "when") next();  // type pattern binding
        (void)label;
      }
      if (at_ident() && tok().text == "when") {
        next();
        expression();
      }
      if (!accept(",")) break;
    }
  }

  // --- expressions ---------------------------------------------------------

  bool at_lambda() const {
    if (at_ident() && at("->", 1)) return true;
    if (!at("(")) return false;
    int depth = 0;
    for (std::size_t i = 0;; ++i) {
      const Token& t = tok(i);
      if (t.kind == TokenKind::eof) return false;
      if (t.kind == TokenKind::punct && t.text == "(") ++depth;
      if (t.kind == TokenKind::punct && t.text == ")" && --depth == 0)
        return at("->", i + 1);
    }
  }

  Expr lambda() {
    std::size_t start = pos_;
    auto body = std::make_shared<Body>();
    if (at_ident()) {
      LocalVar p;
      p.line = tok().line;
      p.name = ident();
      body->params.push_back(std::move(p));
    } else {
      expect("(");
      while (!accept(")")) {
        modifiers();
        LocalVar p;
        p.line = tok().line;
        if (at_ident() && (at(",", 1) || at(")", 1))) {
          p.name = ident();
        } else {
          p.type = type();
          if (p.type == "var") p.type.clear();
          if (accept("...")) p.type += "[]";
          p.name = ident();
        }
        body->params.push_back(std::move(p));
        if (!accept(",") && !at(")")) fail("expected ',' or ')' in lambda parameters");
      }
    }
    expect("->");
    if (at("{")) {
      body->stmts = block_stmts();
    } else {
      int line = tok().line;
      body->stmts.push_back(expr_stmt(StmtKind::return_, expression(), line));
    }
    Expr e;
    e.kind = ExprKind::lambda;
    e.body = std::move(body);
    finish(e, start);
    return e;
  }

  Expr expression() {
    if (at_lambda()) return lambda();
    std::size_t start = pos_;
    Expr lhs = ternary();
    std::string op;
    std::size_t n = assignment_op(op);
    if (n == 0) return lhs;
    pos_ += n;
    Expr e;
    e.kind = ExprKind::assignment;
    e.op = op;
    e.children.push_back(std::move(lhs));
    e.children.push_back(expression());
    finish(e, start);
    return e;
  }

  std::size_t assignment_op(std::string& op) const {
    static constexpr std::array<std::string_view, 10> simple = {
        "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<="};
    for (auto s : simple) {
      if (at(s)) {
        op = s;
        return 1;
      }
    }
    if (at(">") && adjacent(0) && at(">", 1) && adjacent(1)) {
      if (at("=", 2)) {
        op = ">>=";
        return 3;
      }
      if (at(">", 2) && adjacent(2) && at("=", 3)) {
        op = ">>>=";
        return 4;
      }
    }
    return 0;
  }

  Expr ternary() {
    std::size_t start = pos_;
    Expr cond = binary(1);
    if (!at("?")) return cond;
    next();
    Expr e;
    e.kind = ExprKind::conditional;
    e.children.push_back(std::move(cond));
    e.children.push_back(at_lambda() ? lambda() : ternary_branch());
    expect(":");
    e.children.push_back(at_lambda() ? lambda() : ternary());
    finish(e, start);
    return e;
  }

  Expr ternary_branch() {
    // The middle operand may itself be an assignment-free expression.
    return ternary();
  }

  // Reads the binary operator at the cursor, returning how many tokens it
  // spans (0 when none).
  std::size_t binary_op(std::string& op) const {
    const Token& t = tok();
    if (t.kind == TokenKind::keyword && t.text == "instanceof") {
      op = "instanceof";
      return 1;
    }
    if (t.kind != TokenKind::punct) return 0;
    if (t.text == ">") {
      if (adjacent(0) && at(">", 1)) {
        if (adjacent(1) && at(">", 2)) {
          if (adjacent(2) && at("=", 3)) return 0;  // >>>=
          op = ">>>";
          return 3;
        }
        if (adjacent(1) && at("=", 2)) return 0;  // >>=
        op = ">>";
        return 2;
      }
      if (adjacent(0) && at("=", 1)) {
        op = ">=";
        return 2;
      }
      op = ">";
      return 1;
    }
    if (binary_precedence(t.text) > 0) {
      op = t.text;
      return 1;
    }
    return 0;
  }

  Expr binary(int min_prec) {
    std::size_t start = pos_;
    Expr lhs = unary();
    for (;;) {
      std::string op;
      std::size_t n = binary_op(op);
      if (n == 0) return lhs;
      int prec = binary_precedence(op);
      if (prec < min_prec) return lhs;
      pos_ += n;
      Expr e;
      if (op == "instanceof") {
        accept("final");
        e.kind = ExprKind::unary_op;
        e.op = op;
        e.type = type();
        if (at("(")) skip_balanced("(", ")");  // record pattern
        if (at_ident()) e.name = ident();      // pattern binding
        e.children.push_back(std::move(lhs));
      } else {
        e.kind = ExprKind::binary_op;
        e.op = op;
        e.children.push_back(std::move(lhs));
        e.children.push_back(binary(prec + 1));
      }
      finish(e, start);
      lhs = std::move(e);
    }
  }

  bool at_cast() {
    if (!at("(")) return false;
    std::size_t save = pos_;
    next();
    bool primitive = tok().kind == TokenKind::keyword && is_primitive(tok().text);
    auto t = type_opt();
    bool ok = false;
    if (t) {
      while (accept("&")) {
        if (!type_opt()) {
          t.reset();
          break;
        }
      }
    }
    if (t && accept(")")) {
      if (primitive && t->find('[') == std::string::npos) {
        ok = true;
      } else {
        const Token& n = tok();
        switch (n.kind) {
          case TokenKind::identifier:
          case TokenKind::int_literal:
          case TokenKind::float_literal:
          case TokenKind::char_literal:
          case TokenKind::string_literal:
            ok = true;
            break;
          case TokenKind::keyword:
            ok = n.text == "this" || n.text == "super" || n.text == "new" ||
                 n.text == "switch" || is_primitive(n.text) || n.text == "void";
            break;
          case TokenKind::punct:
            ok = n.text == "(" || n.text == "!" || n.text == "~";
            break;
          default:
            break;
        }
      }
    }
    pos_ = save;
    return ok;
  }

  Expr unary() {
    std::size_t start = pos_;
    const Token& t = tok();
    if (t.kind == TokenKind::punct &&
        (t.text == "+" || t.text == "-" || t.text == "!" || t.text == "~" ||
         t.text == "++" || t.text == "--")) {
      Expr e;
      e.kind = ExprKind::unary_op;
      e.op = t.text;
      next();
      e.children.push_back(unary());
      finish(e, start);
      return e;
    }
    if (at_cast()) {
      next();
      Expr e;
      e.kind = ExprKind::cast;
      e.type = type();
      while (accept("&")) type();
      expect(")");
      e.children.push_back(at_lambda() ? lambda() : unary());
      finish(e, start);
      return e;
    }
    Expr base = primary();
    return postfix(std::move(base), start);
  }

  std::vector<Expr> arguments() {
    std::vector<Expr> args;
    expect("(");
    while (!accept(")")) {
      args.push_back(expression());
      if (!accept(",") && !at(")")) fail("expected ',' or ')' in argument list");
    }
    return args;
  }

  Expr make_constant(std::size_t start) {
    Expr e;
    e.kind = ExprKind::constant;
    finish(e, start);
    return e;
  }

  Expr primary() {
    std::size_t start = pos_;
    const Token& t = tok();
    switch (t.kind) {
      case TokenKind::int_literal:
      case TokenKind::float_literal:
      case TokenKind::char_literal:
      case TokenKind::string_literal: {
        Expr e = make_constant(start);
        e.literal = t.text;
        next();
        finish(e, start);
        return e;
      }
      case TokenKind::identifier: {
        if (t.text == "true" || t.text == "false" || t.text == "null") {
          Expr e;
          e.kind = ExprKind::constant;
          e.literal = t.text;
          next();
          finish(e, start);
          return e;
        }
        Expr e;
        e.name = t.text;
        next();
        if (at("(")) {
          e.kind = ExprKind::method_call;
          e.children = arguments();
        } else {
          e.kind = ExprKind::var_ref;
        }
        finish(e, start);
        return e;
      }
      case TokenKind::keyword:
        return keyword_primary(start);
      case TokenKind::punct:
        if (t.text == "(") {
          next();
          Expr inner = expression();
          expect(")");
          finish(inner, start);
          return inner;
        }
        if (t.text == "{") return array_initializer();
        break;
      default:
        break;
    }
    fail("expected expression");
  }

  Expr keyword_primary(std::size_t start) {
    const Token& t = tok();
    if (t.text == "this" || t.text == "super") {
      Expr e;
      e.name = t.text;
      next();
      if (at("(")) {
        e.kind = ExprKind::method_call;
        e.children = arguments();
      } else {
        e.kind = ExprKind::var_ref;
      }
      finish(e, start);
      return e;
    }
    if (t.text == "new") return creator(start);
    if (t.text == "switch") {
      next();
      Stmt sw = switch_body(toks_[start].line);
      Expr e;
      e.kind = ExprKind::switch_expr;
      e.children.push_back(std::move(sw.exprs.front()));
      auto body = std::make_shared<Body>();
      body->stmts = std::move(sw.children);
      e.body = std::move(body);
      finish(e, start);
      return e;
    }
    if (is_primitive(t.text) || t.text == "void") {
      // int.class, int[].class, int[]::new
      next();
      while (at("[") && at("]", 1)) {
        next();
        next();
      }
      if (at("::")) {
        Expr recv = make_constant(start);
        recv.literal = recv_text(start);
        return method_ref(std::move(recv), start);
      }
      expect(".");
      expect("class");
      Expr e = make_constant(start);
      e.literal = recv_text(start);
      return e;
    }
    fail("expected expression");
  }

  std::string recv_text(std::size_t start) const {
    std::string s;
    for (std::size_t i = start; i < pos_; ++i) s += toks_[i].text;
    return s;
  }

  Expr creator(std::size_t start) {
    expect("new");
    if (at("<")) type_arguments_opt();
    skip_annotations();
    std::string base;
    if (tok().kind == TokenKind::keyword && is_primitive(tok().text)) {
      base = tok().text;
      next();
    } else {
      base = ident();
      if (!type_arguments_opt()) fail("malformed type arguments");
      while (at(".")) {
        next();
        skip_annotations();
        base += "." + ident();
        if (!type_arguments_opt()) fail("malformed type arguments");
      }
    }
    if (at("[")) {
      Expr e;
      e.kind = ExprKind::new_array;
      e.type = base;
      while (at("[")) {
        next();
        if (accept("]")) {
          e.type += "[]";
          continue;
        }
        e.children.push_back(expression());
        expect("]");
        e.type += "[]";
      }
      if (at("{")) e.children.push_back(array_initializer());
      finish(e, start);
      return e;
    }
    Expr e;
    e.kind = ExprKind::new_object;
    e.name = base;
    e.children = arguments();
    if (at("{")) {
      TypeDecl anon;
      anon.name = "$anon";
      anon.fq_name = "$anon";
      anon.extends = base;
      anon.line = tok().line;
      type_body(anon);
      auto body = std::make_shared<Body>();
      body->types.push_back(std::move(anon));
      e.body = std::move(body);
    }
    finish(e, start);
    return e;
  }

  Expr array_initializer() {
    std::size_t start = pos_;
    expect("{");
    Expr e;
    e.kind = ExprKind::array_init;
    while (!accept("}")) {
      e.children.push_back(variable_initializer());
      if (!accept(",") && !at("}")) fail("expected ',' or '}' in array initializer");
    }
    finish(e, start);
    return e;
  }

  Expr variable_initializer() { return at("{") ? array_initializer() : expression(); }

  Expr method_ref(Expr recv, std::size_t start) {
    expect("::");
    if (at("<")) type_arguments_opt();
    Expr e;
    e.kind = ExprKind::method_ref;
    e.name = at("new") ? (next(), std::string("new")) : ident();
    e.has_receiver = true;
    e.children.push_back(std::move(recv));
    finish(e, start);
    return e;
  }

  Expr postfix(Expr e, std::size_t start) {
    for (;;) {
      if (at(".")) {
        next();
        if (at("<")) {
          if (!type_arguments_opt()) fail("malformed type arguments");
        }
        if (at("new")) {
          Expr inner = creator(pos_);
          finish(inner, start);
          e = std::move(inner);
          continue;
        }
        if (at("this") || at("super")) {
          Expr q;
          q.kind = ExprKind::var_ref;
          q.name = tok().text;
          next();
          finish(q, start);
          e = std::move(q);
          continue;
        }
        if (at("class")) {
          next();
          Expr c;
          c.kind = ExprKind::constant;
          finish(c, start);
          c.literal = recv_text(start);
          e = std::move(c);
          continue;
        }
        Expr m;
        m.name = ident();
        m.has_receiver = true;
        m.children.push_back(std::move(e));
        if (at("(")) {
          m.kind = ExprKind::method_call;
          auto args = arguments();
          for (auto& a : args) m.children.push_back(std::move(a));
        } else {
          m.kind = ExprKind::field_access;
        }
        finish(m, start);
        e = std::move(m);
        continue;
      }
      if (at("[")) {
        if (at("]", 1)) {
          // array type in expression position: Foo[].class / Foo[]::new
          while (at("[") && at("]", 1)) {
            next();
            next();
          }
          if (at("::")) {
            Expr recv = make_constant(start);
            recv.literal = recv_text(start);
            e = method_ref(std::move(recv), start);
            continue;
          }
          expect(".");
          expect("class");
          Expr c = make_constant(start);
          c.literal = recv_text(start);
          e = std::move(c);
          continue;
        }
        next();
        Expr a;
        a.kind = ExprKind::array_access;
        a.children.push_back(std::move(e));
        a.children.push_back(expression());
        expect("]");
        finish(a, start);
        e = std::move(a);
        continue;
      }
      if (at("::")) {
        e = method_ref(std::move(e), start);
        continue;
      }
      if (at("++") || at("--")) {
        Expr u;
        u.kind = ExprKind::unary_op;
        u.op = tok().text;
        u.postfix = true;
        next();
        u.children.push_back(std::move(e));
        finish(u, start);
        e = std::move(u);
        continue;
      }
      return e;
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

CompilationUnit parse_source(std::string_view text, const std::string& path) {
  Parser p(tokenize(text));
  CompilationUnit cu = p.unit(path);
  cu.line_count = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
  return cu;
}

Expr parse_expression(std::string_view text) {
  Parser p(tokenize(text));
  return p.standalone_expression();
}

}  // namespace ctm
