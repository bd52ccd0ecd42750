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

// Lossless Solidity lexer. Every byte of the input belongs to exactly one
// token, so concatenating token texts reproduces the source. All source
// transforms in rex::soltx operate on this token stream.

#ifndef REX_SOLTX_LEXER_HPP_
#define REX_SOLTX_LEXER_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rex/error.hpp"

namespace rex::soltx {

enum class TokenKind {
  kLineComment,
  kBlockComment,
  kStringLiteral,
  kHexAddressLiteral,
  kNumberLiteral,
  kIdentifier,
  kKeyword,
  kPunct,
  kWhitespace,
};

std::string_view token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind;
  Span span;

  std::size_t size() const { return span.end - span.begin; }
  bool is_trivia() const {
    return kind == TokenKind::kWhitespace || kind == TokenKind::kLineComment ||
           kind == TokenKind::kBlockComment;
  }
};

// Owns the source text; tokens index into it.
class TokenStream {
 public:
  TokenStream(std::string source, std::vector<Token> tokens);

  const std::string& source() const { return source_; }
  std::size_t source_len() const { return source_.size(); }
  const std::vector<Token>& tokens() const { return tokens_; }
  std::size_t size() const { return tokens_.size(); }
  const Token& operator[](std::size_t i) const { return tokens_[i]; }

  std::string_view text(std::size_t i) const;
  std::string_view text(const Token& t) const;

  // True when token i is of `kind` and its text equals `text`.
  bool is(std::size_t i, TokenKind kind, std::string_view text) const;
  bool is_punct(std::size_t i, std::string_view text) const {
    return is(i, TokenKind::kPunct, text);
  }

  // Index of the next/previous non-trivia token, or nullopt.
  std::optional<std::size_t> next_significant(std::size_t i) const;
  std::optional<std::size_t> prev_significant(std::size_t i) const;

  // For an opening `(`, `[` or `{` at i, the index of its partner; for a
  // closing one, the index of its opener. nullopt when unbalanced.
  std::optional<std::size_t> matching(std::size_t i) const;

  // Every bracket in the stream has a partner of the right shape.
  bool balanced() const { return balanced_; }

 private:
  static constexpr std::size_t kNoPartner = static_cast<std::size_t>(-1);

  void pair_brackets();

  std::string source_;
  std::vector<Token> tokens_;
  std::vector<std::size_t> partner_;
  bool balanced_ = true;
};

// Throws Error{kUnterminatedComment|kUnterminatedString} with the offending
// span.
TokenStream lex(std::string source);

bool is_keyword(std::string_view word);
bool is_identifier(std::string_view word);

}  // namespace rex::soltx

#endif  // REX_SOLTX_LEXER_HPP_
