// Copyright 2026 The rex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rex/soltx/lexer.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>
#include <utility>

namespace rex::soltx {

namespace {

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$';
}

bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_hex_digit(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

// Longest first so maximal munch works with a linear scan.
constexpr std::array<std::string_view, 36> kOperators = {
    ">>>=", ">>>", "<<=", ">>=", "**=", "...", "&&", "||", "==", "!=",
    "<=",   ">=",  "<<",  ">>",  "**",  "++",  "--", "+=", "-=", "*=",
    "/=",   "%=",  "|=",  "&=",  "^=",  "=>",  "->", ":=", "=:", "::",
    "+",    "-",   "*",   "/",   "%",   "=",
};

std::size_t utf8_sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

const std::unordered_set<std::string_view>& keyword_set() {
  static const std::unordered_set<std::string_view> kWords = {
      "abstract",  "address",     "anonymous", "as",        "assembly",
      "bool",      "break",       "byte",      "bytes",     "calldata",
      "catch",     "constant",    "constructor", "continue", "contract",
      "delete",    "do",          "else",      "emit",      "enum",
      "error",     "event",       "external",  "fallback",  "false",
      "fixed",     "for",         "function",  "if",        "immutable",
      "import",    "indexed",     "interface", "internal",  "is",
      "library",   "mapping",     "memory",    "modifier",  "new",
      "override",  "payable",     "pragma",    "private",   "public",
      "pure",      "receive",     "return",    "returns",   "storage",
      "string",    "struct",      "throw",     "true",      "try",
      "type",      "ufixed",      "unchecked", "using",     "var",
      "view",      "virtual",     "while",     "int",       "uint",
  };
  return kWords;
}

// uint8..uint256, int8..int256, bytes1..bytes32.
bool is_sized_elementary_type(std::string_view w) {
  auto digits_after = [&](std::string_view prefix) -> bool {
    if (w.size() <= prefix.size() || w.substr(0, prefix.size()) != prefix) {
      return false;
    }
    for (char c : w.substr(prefix.size())) {
      if (!is_digit(c)) return false;
    }
    return w[prefix.size()] != '0';
  };
  return digits_after("uint") || digits_after("int") || digits_after("bytes");
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) {
      const std::size_t start = pos_;
      const TokenKind kind = scan_one();
      tokens_.push_back(Token{kind, Span{start, pos_}});
    }
    return std::move(tokens_);
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  TokenKind scan_one() {
    const char c = peek();
    if (is_space(c)) {
      while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
      return TokenKind::kWhitespace;
    }
    if (c == '/' && peek(1) == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      return TokenKind::kLineComment;
    }
    if (c == '/' && peek(1) == '*') {
      const std::size_t start = pos_;
      const std::size_t close = src_.find("*/", pos_ + 2);
      if (close == std::string::npos) {
        throw Error(ErrorCode::kUnterminatedComment, "block comment never closed",
                    Span{start, src_.size()});
      }
      pos_ = close + 2;
      return TokenKind::kBlockComment;
    }
    if (c == '"' || c == '\'') {
      scan_string_body();
      return TokenKind::kStringLiteral;
    }
    if (is_digit(c)) return scan_number();
    if (is_ident_start(c)) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      const std::string_view word(src_.data() + start, pos_ - start);
      if ((word == "hex" || word == "unicode") &&
          (peek() == '"' || peek() == '\'')) {
        scan_string_body();
        return TokenKind::kStringLiteral;
      }
      return is_keyword(word) ? TokenKind::kKeyword : TokenKind::kIdentifier;
    }
    for (std::string_view op : kOperators) {
      if (src_.compare(pos_, op.size(), op) == 0) {
        pos_ += op.size();
        return TokenKind::kPunct;
      }
    }
    pos_ += std::min(utf8_sequence_length(static_cast<unsigned char>(c)),
                     src_.size() - pos_);
    return TokenKind::kPunct;
  }

  // pos_ is at the opening quote.
  void scan_string_body() {
    const std::size_t start = pos_;
    const char quote = src_[pos_++];
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == '\n') break;
      ++pos_;
      if (c == quote) return;
    }
    pos_ = std::min(pos_, src_.size());
    throw Error(ErrorCode::kUnterminatedString, "string literal never closed",
                Span{start, pos_});
  }

  TokenKind scan_number() {
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      const bool lower_x = peek(1) == 'x';
      pos_ += 2;
      std::size_t hex_digits = 0;
      bool underscore = false;
      while (pos_ < src_.size() &&
             (is_hex_digit(src_[pos_]) || src_[pos_] == '_')) {
        if (src_[pos_] == '_') {
          underscore = true;
        } else {
          ++hex_digits;
        }
        ++pos_;
      }
      if (hex_digits == 40 && !underscore && lower_x &&
          !is_ident_char(peek())) {
        return TokenKind::kHexAddressLiteral;
      }
      return TokenKind::kNumberLiteral;
    }
    while (pos_ < src_.size() && (is_digit(src_[pos_]) || src_[pos_] == '_')) {
      ++pos_;
    }
    if (peek() == '.' && is_digit(peek(1))) {
      ++pos_;
      while (pos_ < src_.size() &&
             (is_digit(src_[pos_]) || src_[pos_] == '_')) {
        ++pos_;
      }
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (is_digit(peek(1)) || (peek(1) == '-' && is_digit(peek(2))))) {
      pos_ += peek(1) == '-' ? 2 : 1;
      while (pos_ < src_.size() && is_digit(src_[pos_])) ++pos_;
    }
    return TokenKind::kNumberLiteral;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  std::vector<Token> tokens_;
};

}  // namespace

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::kLineComment: return "LineComment";
    case TokenKind::kBlockComment: return "BlockComment";
    case TokenKind::kStringLiteral: return "StringLiteral";
    case TokenKind::kHexAddressLiteral: return "HexAddressLiteral";
    case TokenKind::kNumberLiteral: return "NumberLiteral";
    case TokenKind::kIdentifier: return "Identifier";
    case TokenKind::kKeyword: return "Keyword";
    case TokenKind::kPunct: return "Punct";
    case TokenKind::kWhitespace: return "Whitespace";
  }
  return "?";
}

bool is_keyword(std::string_view word) {
  return keyword_set().count(word) > 0 || is_sized_elementary_type(word);
}

bool is_identifier(std::string_view word) {
  if (word.empty() || !is_ident_start(word.front())) return false;
  for (char c : word) {
    if (!is_ident_char(c)) return false;
  }
  return !is_keyword(word);
}

TokenStream::TokenStream(std::string source, std::vector<Token> tokens)
    : source_(std::move(source)), tokens_(std::move(tokens)) {
  pair_brackets();
}

std::string_view TokenStream::text(std::size_t i) const {
  return text(tokens_[i]);
}

std::string_view TokenStream::text(const Token& t) const {
  return std::string_view(source_).substr(t.span.begin, t.size());
}

bool TokenStream::is(std::size_t i, TokenKind kind,
                     std::string_view expected) const {
  return i < tokens_.size() && tokens_[i].kind == kind && text(i) == expected;
}

std::optional<std::size_t> TokenStream::next_significant(std::size_t i) const {
  for (std::size_t j = i + 1; j < tokens_.size(); ++j) {
    if (!tokens_[j].is_trivia()) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> TokenStream::prev_significant(std::size_t i) const {
  for (std::size_t j = i; j-- > 0;) {
    if (!tokens_[j].is_trivia()) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> TokenStream::matching(std::size_t i) const {
  if (i >= partner_.size() || partner_[i] == kNoPartner) return std::nullopt;
  return partner_[i];
}

void TokenStream::pair_brackets() {
  partner_.assign(tokens_.size(), kNoPartner);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].kind != TokenKind::kPunct || tokens_[i].size() != 1) {
      continue;
    }
    const char c = source_[tokens_[i].span.begin];
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(i);
      continue;
    }
    const char open = c == ')' ? '(' : c == ']' ? '[' : c == '}' ? '{' : 0;
    if (open == 0) continue;
    if (stack.empty() || source_[tokens_[stack.back()].span.begin] != open) {
      balanced_ = false;
      continue;
    }
    partner_[i] = stack.back();
    partner_[stack.back()] = i;
    stack.pop_back();
  }
  if (!stack.empty()) balanced_ = false;
}

TokenStream lex(std::string source) {
  std::vector<Token> tokens = Lexer(source).run();
  return TokenStream(std::move(source), std::move(tokens));
}

}  // namespace rex::soltx
