#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ctm {

enum class TokenKind {
  identifier,
  keyword,
  int_literal,
  float_literal,
  char_literal,
  string_literal,
  punct,
  eof,
};

struct Token {
  TokenKind kind = TokenKind::eof;
  std::string text;
  int line = 1;
  int column = 1;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits Java source into tokens. Comments and whitespace are dropped.
/// `>` is always emitted as a single-character token so that nested generic
/// closers lex cleanly; the parser recombines adjacent `>` for shifts and
/// `>=`.
///
/// Throws SyntaxError on unterminated literals and comments.
std::vector<Token> tokenize(std::string_view source);

bool is_java_keyword(std::string_view word);

/// Source span re-emitted token by token; any whitespace or comment between
/// two tokens becomes a single space.
std::string normalized_span(std::string_view source, std::size_t begin,
                            std::size_t end);

}  // namespace ctm
