#include "ctm/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "ctm/ast.hpp"

namespace ctm {
namespace {

constexpr std::array<std::string_view, 50> kKeywords = {
    "abstract",   "assert",       "boolean",   "break",      "byte",
    "case",       "catch",        "char",      "class",      "const",
    "continue",   "default",      "do",        "double",     "else",
    "enum",       "extends",      "final",     "finally",    "float",
    "for",        "goto",         "if",        "implements", "import",
    "instanceof", "int",          "interface", "long",       "native",
    "new",        "package",      "private",   "protected",  "public",
    "return",     "short",        "static",    "strictfp",   "super",
    "switch",     "synchronized", "this",      "throw",      "throws",
    "transient",  "try",          "void",      "volatile",   "while",
};

// Longest first within each leading character; `>` is deliberately absent.
constexpr std::array<std::string_view, 44> kPuncts = {
    "<<=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    "+=",  "-=",  "*=", "/=", "&=", "|=", "^=", "%=", "<<", "(",  ")",
    "{",   "}",   "[",  "]",  ";",  ",",  ".",  "@",  "=",  "<",  "!",
    "~",   "?",   ":",  "+",  "-",  "*",  "/",  "&",  "|",  "^",  "%",
};

bool ident_start(unsigned char c) {
  return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool ident_part(unsigned char c) { return ident_start(c) || std::isdigit(c); }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_trivia();
      Token t;
      t.line = line_;
      t.column = column();
      t.begin = pos_;
      if (pos_ >= src_.size()) {
        t.kind = TokenKind::eof;
        t.end = pos_;
        out.push_back(std::move(t));
        return out;
      }
      lex_one(t);
      t.end = pos_;
      t.text = std::string(src_.substr(t.begin, t.end - t.begin));
      out.push_back(std::move(t));
    }
  }

 private:
  int column() const { return static_cast<int>(pos_ - line_start_) + 1; }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg, int line, int col) const {
    throw SyntaxError(msg, line, col);
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') advance();
      } else if (c == '/' && peek(1) == '*') {
        int l = line_, col = column();
        advance();
        advance();
        while (!(peek() == '*' && peek(1) == '/')) {
          if (pos_ >= src_.size()) fail("unterminated comment", l, col);
          advance();
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lex_one(Token& t) {
    auto c = static_cast<unsigned char>(peek());
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_part(static_cast<unsigned char>(peek())))
        advance();
      auto word = src_.substr(t.begin, pos_ - t.begin);
      t.kind = is_java_keyword(word) ? TokenKind::keyword : TokenKind::identifier;
      return;
    }
    if (std::isdigit(c) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      lex_number(t);
      return;
    }
    if (c == '"') {
      if (peek(1) == '"' && peek(2) == '"') {
        lex_text_block(t);
      } else {
        lex_quoted(t, '"');
      }
      t.kind = TokenKind::string_literal;
      return;
    }
    if (c == '\'') {
      lex_quoted(t, '\'');
      t.kind = TokenKind::char_literal;
      return;
    }
    if (c == '>') {
      advance();
      t.kind = TokenKind::punct;
      return;
    }
    auto rest = src_.substr(pos_);
    for (auto p : kPuncts) {
      if (rest.starts_with(p)) {
        for (std::size_t i = 0; i < p.size(); ++i) advance();
        t.kind = TokenKind::punct;
        return;
      }
    }
    fail(std::string("unexpected character '") + static_cast<char>(c) + "'", t.line,
         t.column);
  }

  void lex_number(Token& t) {
    bool is_float = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      advance();
      advance();
      while (std::isxdigit(static_cast<unsigned char>(peek())) || peek() == '_' ||
             peek() == '.') {
        if (peek() == '.') is_float = true;
        advance();
      }
      if (peek() == 'p' || peek() == 'P') {
        is_float = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    } else if (peek() == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
      advance();
      advance();
      while (peek() == '0' || peek() == '1' || peek() == '_') advance();
    } else {
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        is_float = true;
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      } else if (peek() == '.' && !ident_start(static_cast<unsigned char>(peek(1))) &&
                 peek(1) != '.') {
        // `1.` is a valid double literal
        is_float = true;
        advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        is_float = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
    }
    char s = peek();
    if (s == 'f' || s == 'F' || s == 'd' || s == 'D') {
      is_float = true;
      advance();
    } else if (s == 'l' || s == 'L') {
      advance();
    }
    t.kind = is_float ? TokenKind::float_literal : TokenKind::int_literal;
  }

  void lex_quoted(Token& t, char quote) {
    advance();
    for (;;) {
      if (pos_ >= src_.size() || peek() == '\n')
        fail("unterminated literal", t.line, t.column);
      char ch = peek();
      advance();
      if (ch == '\\') {
        if (pos_ >= src_.size()) fail("unterminated literal", t.line, t.column);
        advance();
      } else if (ch == quote) {
        return;
      }
    }
  }

  void lex_text_block(Token& t) {
    advance();
    advance();
    advance();
    for (;;) {
      if (pos_ >= src_.size()) fail("unterminated text block", t.line, t.column);
      if (peek() == '\\') {
        advance();
        if (pos_ < src_.size()) advance();
        continue;
      }
      if (peek() == '"' && peek(1) == '"' && peek(2) == '"') {
        advance();
        advance();
        advance();
        return;
      }
      advance();
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_start_ = 0;
  int line_ = 1;
};

}  // namespace

bool is_java_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::string normalized_span(std::string_view source, std::size_t begin,
                            std::size_t end) {
  end = std::min(end, source.size());
  if (begin >= end) return {};
  auto toks = tokenize(source.substr(begin, end - begin));
  std::string out;
  std::size_t prev_end = 0;
  bool first = true;
  for (const auto& t : toks) {
    if (t.kind == TokenKind::eof) break;
    if (!first && t.begin > prev_end) out += ' ';
    out += t.text;
    prev_end = t.end;
    first = false;
  }
  return out;
}

}  // namespace ctm
