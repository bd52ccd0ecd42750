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

#include "rex/soltx/transforms.hpp"

#include <cctype>
#include <optional>
#include <regex>
#include <set>
#include <unordered_set>

#include "rex/error.hpp"
#include "rex/soltx/keccak.hpp"
#include "rex/soltx/lexer.hpp"
#include "rex/soltx/structure.hpp"
#include "soltx/rewriter.hpp"

namespace rex::soltx {

namespace {

bool is_blank(std::string_view line) {
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r' && c != '\f' && c != '\v') {
      return false;
    }
  }
  return true;
}

// Keeps the first of any run of consecutive blank lines.
std::string collapse_blank_lines(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool prev_blank = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
    const std::string_view line =
        text.substr(pos, (nl == std::string_view::npos ? text.size() : nl) - pos);
    const bool blank = is_blank(line);
    if (!(blank && prev_blank)) out.append(text.substr(pos, end - pos));
    prev_blank = blank;
    pos = end;
  }
  return out;
}

std::unordered_set<std::string> identifier_set(const TokenStream& ts) {
  std::unordered_set<std::string> out;
  for (const Token& t : ts.tokens()) {
    if (t.kind == TokenKind::kIdentifier) out.emplace(ts.text(t));
  }
  return out;
}

bool is_chain_head_keyword(const TokenStream& ts, std::size_t i) {
  return ts.is(i, TokenKind::kKeyword, "payable") ||
         ts.is(i, TokenKind::kKeyword, "address");
}

// First token index of the receiver expression ending just before `dot`.
// Walks left through identifiers, `.`, and balanced ()/[] groups.
std::optional<std::size_t> receiver_start(const TokenStream& ts,
                                          std::size_t dot) {
  std::optional<std::size_t> cur = ts.prev_significant(dot);
  std::optional<std::size_t> start;
  while (cur) {
    const std::size_t i = *cur;
    if (ts.is_punct(i, ")") || ts.is_punct(i, "]")) {
      const auto open = ts.matching(i);
      if (!open) return std::nullopt;
      start = *open;
      const auto prev = ts.prev_significant(*open);
      if (prev && (ts[*prev].kind == TokenKind::kIdentifier ||
                   is_chain_head_keyword(ts, *prev) ||
                   ts.is_punct(*prev, ")") || ts.is_punct(*prev, "]"))) {
        cur = prev;
        continue;
      }
      break;
    }
    if (ts[i].kind == TokenKind::kIdentifier || is_chain_head_keyword(ts, i)) {
      start = i;
      const auto prev = ts.prev_significant(i);
      if (prev && ts.is_punct(*prev, ".")) {
        cur = ts.prev_significant(*prev);
        if (!cur) return std::nullopt;
        continue;
      }
      break;
    }
    break;
  }
  return start;
}

// `payable(...)` spanning exactly [first, last].
bool is_payable_wrapped(const TokenStream& ts, std::size_t first,
                        std::size_t last) {
  if (!ts.is(first, TokenKind::kKeyword, "payable")) return false;
  const auto open = ts.next_significant(first);
  if (!open || !ts.is_punct(*open, "(")) return false;
  return ts.matching(*open) == last;
}

// `.transfer(`, `.send(` or `.call{... value: ...}` starting at a dot.
bool is_value_transfer_member(const TokenStream& ts, std::size_t dot) {
  if (!ts.is_punct(dot, ".")) return false;
  const auto member = ts.next_significant(dot);
  if (!member || ts[*member].kind != TokenKind::kIdentifier) return false;
  const std::string_view name = ts.text(*member);
  const auto after = ts.next_significant(*member);
  if (!after) return false;
  if (name == "transfer" || name == "send") return ts.is_punct(*after, "(");
  if (name != "call" || !ts.is_punct(*after, "{")) return false;
  const auto close = ts.matching(*after);
  if (!close) return false;
  for (std::size_t j = *after + 1; j < *close; ++j) {
    if (ts.is(j, TokenKind::kIdentifier, "value")) {
      const auto colon = ts.next_significant(j);
      if (colon && ts.is_punct(*colon, ":")) return true;
    }
  }
  return false;
}

std::string replace_all(std::string text, std::string_view from,
                        std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string indent_lines(std::string_view text, std::string_view indent,
                         bool skip_first) {
  std::string out;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line = text.substr(
        pos, (nl == std::string_view::npos ? text.size() : nl) - pos);
    if (!(first && skip_first) && !line.empty()) out.append(indent);
    out.append(line);
    first = false;
    if (nl == std::string_view::npos) break;
    out.push_back('\n');
    pos = nl + 1;
  }
  return out;
}

std::string line_indent(std::string_view source, std::size_t offset) {
  const std::size_t line_start = source.rfind('\n', offset == 0 ? 0 : offset - 1);
  std::size_t i = line_start == std::string_view::npos ? 0 : line_start + 1;
  std::string indent;
  while (i < offset && (source[i] == ' ' || source[i] == '\t')) {
    indent.push_back(source[i++]);
  }
  return indent;
}

}  // namespace

std::string strip_comments(std::string_view source) {
  const TokenStream ts = lex(std::string(source));
  std::string out;
  out.reserve(source.size());
  for (const Token& t : ts.tokens()) {
    if (t.kind == TokenKind::kLineComment) continue;
    if (t.kind == TokenKind::kBlockComment) {
      out.push_back(' ');
      continue;
    }
    out.append(ts.text(t));
  }
  return collapse_blank_lines(out);
}

std::string migrate_pragma(std::string_view source,
                           std::string_view target_version) {
  static const std::regex kSemver(R"(\d+\.\d+\.\d+)");
  if (!std::regex_match(target_version.begin(), target_version.end(),
                        kSemver)) {
    throw Error(ErrorCode::kInvalidArgument,
                "target version must be major.minor.patch, got '" +
                    std::string(target_version) + "'");
  }
  const TokenStream ts = lex(std::string(source));
  const std::string replacement =
      "pragma solidity " + std::string(target_version) + ";";
  Rewriter rw(source);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!ts.is(i, TokenKind::kKeyword, "pragma")) continue;
    const auto what = ts.next_significant(i);
    if (!what || !ts.is(*what, TokenKind::kIdentifier, "solidity")) continue;
    std::size_t j = *what;
    while (j < ts.size() && !ts.is_punct(j, ";")) ++j;
    if (j == ts.size()) break;
    rw.replace(ts[i].span.begin, ts[j].span.end, replacement);
    i = j;
  }
  if (!rw.empty()) return rw.apply();

  for (const Token& t : ts.tokens()) {
    if (t.kind == TokenKind::kLineComment &&
        ts.text(t).find("SPDX-License-Identifier") != std::string_view::npos) {
      std::string out(source);
      const std::size_t nl = out.find('\n', t.span.end);
      if (nl == std::string::npos) {
        out.append("\n" + replacement + "\n");
      } else {
        out.insert(nl + 1, replacement + "\n");
      }
      return out;
    }
  }
  return replacement + "\n" + std::string(source);
}

std::string wrap_unchecked(std::string_view source,
                           const std::vector<std::string>& function_names) {
  const TokenStream ts = lex(std::string(source));
  Rewriter rw(source);
  std::set<std::string> seen;
  for (const std::string& name : function_names) {
    if (!seen.insert(name).second) continue;
    const FunctionInfo fn = find_unique_function(ts, name);
    const std::size_t open = *fn.body_open;
    const std::size_t close = *fn.body_close;
    const auto first = ts.next_significant(open);
    if (first && *first < close &&
        ts.is(*first, TokenKind::kKeyword, "unchecked")) {
      const auto brace = ts.next_significant(*first);
      if (brace && ts.is_punct(*brace, "{")) continue;
    }
    rw.insert(ts[open].span.end, " unchecked {");
    rw.insert(ts[close].span.begin, "} ");
  }
  return rw.apply();
}

std::string to_eip55(std::string_view address) {
  std::string_view hex = address;
  if (hex.size() >= 2 && hex[0] == '0' && (hex[1] == 'x' || hex[1] == 'X')) {
    hex.remove_prefix(2);
  }
  if (hex.size() != 40) {
    throw Error(ErrorCode::kNotAnAddress, std::string(address));
  }
  std::string lower;
  lower.reserve(40);
  for (char c : hex) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::kNotAnAddress, std::string(address));
    }
    lower.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  const Digest256 digest = keccak256(lower);
  std::string out = "0x";
  for (std::size_t i = 0; i < lower.size(); ++i) {
    const char c = lower[i];
    const bool alpha = c >= 'a' && c <= 'f';
    out.push_back(alpha && digest.nibble(i) >= 8
                      ? static_cast<char>(std::toupper(c))
                      : c);
  }
  return out;
}

Rewrite normalize_addresses(std::string_view source) {
  const TokenStream ts = lex(std::string(source));
  Rewriter rw(source);
  std::size_t count = 0;
  for (const Token& t : ts.tokens()) {
    if (t.kind != TokenKind::kHexAddressLiteral) continue;
    const std::string_view text = ts.text(t);
    std::string fixed = to_eip55(text);
    if (fixed != text) {
      rw.replace(t.span.begin, t.span.end, std::move(fixed));
      ++count;
    }
  }
  return Rewrite{rw.apply(), count};
}

Rewrite insert_payable_casts(std::string_view source) {
  const TokenStream ts = lex(std::string(source));
  Rewriter rw(source);
  std::size_t count = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!is_value_transfer_member(ts, i)) continue;
    const auto start = receiver_start(ts, i);
    if (!start) continue;
    const std::size_t last = *ts.prev_significant(i);
    const std::string_view receiver = std::string_view(ts.source()).substr(
        ts[*start].span.begin, ts[last].span.end - ts[*start].span.begin);
    if (receiver == "payable" || receiver == "super" ||
        is_payable_wrapped(ts, *start, last)) {
      continue;
    }
    rw.insert(ts[*start].span.begin, "payable(");
    rw.insert(ts[last].span.end, ")");
    ++count;
  }
  return Rewrite{rw.apply(), count};
}

std::string inject_decoy(std::string_view source, const DecoyLibrary& decoys,
                         const std::string& decoy_id,
                         const std::string& anchor) {
  const auto it = decoys.templates.find(decoy_id);
  if (it == decoys.templates.end()) {
    throw Error(ErrorCode::kUnknownTemplate, decoy_id);
  }
  const TokenStream ts = lex(std::string(source));
  std::optional<ContractInfo> target;
  for (ContractInfo& c : find_contracts(ts)) {
    if (c.name == anchor && c.kind != "interface") target = std::move(c);
  }
  if (!target) throw Error(ErrorCode::kContractNotFound, anchor);

  const TokenStream tpl = lex(it->second);
  const std::unordered_set<std::string> taken = identifier_set(ts);
  const std::unordered_set<std::string> tpl_names = identifier_set(tpl);
  std::map<std::string, std::string> renames;
  for (std::size_t i = 0; i < tpl.size(); ++i) {
    if (tpl[i].kind != TokenKind::kKeyword) continue;
    const std::string_view kw = tpl.text(i);
    if (kw != "function" && kw != "event" && kw != "modifier" &&
        kw != "error" && kw != "struct" && kw != "enum") {
      continue;
    }
    const auto name = tpl.next_significant(i);
    if (!name || tpl[*name].kind != TokenKind::kIdentifier) continue;
    const std::string declared(tpl.text(*name));
    if (!taken.count(declared) || renames.count(declared)) continue;
    for (int n = 2;; ++n) {
      std::string candidate = declared + "_v" + std::to_string(n);
      if (!taken.count(candidate) && !tpl_names.count(candidate)) {
        renames.emplace(declared, std::move(candidate));
        break;
      }
    }
  }
  std::string snippet;
  for (const Token& t : tpl.tokens()) {
    const std::string text(tpl.text(t));
    const auto r = renames.find(text);
    snippet += (t.kind == TokenKind::kIdentifier && r != renames.end())
                   ? r->second
                   : text;
  }
  while (!snippet.empty() &&
         (snippet.back() == '\n' || snippet.back() == ' ')) {
    snippet.pop_back();
  }
  std::string out(source);
  out.insert(ts[target->body_close].span.begin,
             "\n" + indent_lines(snippet, "    ", false) + "\n");
  return out;
}

std::string apply_rare_construct(std::string_view source,
                                 const std::string& function_name,
                                 std::string_view transfer_template) {
  const TokenStream ts = lex(std::string(source));
  const FunctionInfo fn = find_unique_function(ts, function_name);
  Rewriter rw(source);
  std::size_t sites = 0;
  for (std::size_t i = *fn.body_open + 1; i < *fn.body_close; ++i) {
    if (!ts.is_punct(i, ".")) continue;
    const auto member = ts.next_significant(i);
    if (!member || !(ts.is(*member, TokenKind::kIdentifier, "transfer") ||
                     ts.is(*member, TokenKind::kIdentifier, "send"))) {
      continue;
    }
    const auto open = ts.next_significant(*member);
    if (!open || !ts.is_punct(*open, "(")) continue;
    const auto close = ts.matching(*open);
    if (!close) continue;
    const auto semi = ts.next_significant(*close);
    if (!semi || !ts.is_punct(*semi, ";")) continue;
    const auto start = receiver_start(ts, i);
    if (!start) continue;
    const auto before = ts.prev_significant(*start);
    const bool statement_start =
        before && (ts.is_punct(*before, "{") || ts.is_punct(*before, "}") ||
                   ts.is_punct(*before, ";") || ts.is_punct(*before, ")") ||
                   ts.is(*before, TokenKind::kKeyword, "else"));
    if (!statement_start) continue;
    bool single_arg = *close > *open + 1;
    for (std::size_t j = *open + 1; j < *close; ++j) {
      if (ts.is_punct(j, "(") || ts.is_punct(j, "[") || ts.is_punct(j, "{")) {
        j = ts.matching(j).value_or(*close);
      } else if (ts.is_punct(j, ",")) {
        single_arg = false;
      }
    }
    if (!single_arg) continue;

    const std::string_view src(ts.source());
    const std::size_t last = *ts.prev_significant(i);
    const std::string to(src.substr(
        ts[*start].span.begin, ts[last].span.end - ts[*start].span.begin));
    const std::size_t vbegin = ts[*ts.next_significant(*open)].span.begin;
    const std::size_t vend = ts[*ts.prev_significant(*close)].span.end;
    const std::string value(src.substr(vbegin, vend - vbegin));

    std::string body = replace_all(std::string(transfer_template), "{{to}}", to);
    body = replace_all(std::move(body), "{{value}}", value);
    while (!body.empty() && (body.back() == '\n' || body.back() == ' ')) {
      body.pop_back();
    }
    rw.replace(ts[*start].span.begin, ts[*semi].span.end,
               indent_lines(body, line_indent(src, ts[*start].span.begin),
                            true));
    ++sites;
    i = *semi;
  }
  if (sites == 0) throw Error(ErrorCode::kNoTransferSite, function_name);
  return rw.apply();
}

std::string obfuscate_pattern(
    std::string_view source,
    const std::map<std::string, std::string>& rename_map) {
  const TokenStream ts = lex(std::string(source));
  const std::unordered_set<std::string> present = identifier_set(ts);
  std::set<std::string> targets;
  for (const auto& [from, to] : rename_map) {
    if (is_keyword(from)) throw Error(ErrorCode::kKeywordRename, from);
    if (is_keyword(to)) throw Error(ErrorCode::kKeywordRename, to);
    if (!is_identifier(to)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "'" + to + "' is not a valid identifier");
    }
    if (!present.count(from)) throw Error(ErrorCode::kIdentifierNotFound, from);
    if (present.count(to) || !targets.insert(to).second) {
      throw Error(ErrorCode::kCollisionDetected, to);
    }
  }
  Rewriter rw(source);
  for (const Token& t : ts.tokens()) {
    if (t.kind != TokenKind::kIdentifier) continue;
    const auto it = rename_map.find(std::string(ts.text(t)));
    if (it != rename_map.end()) rw.replace(t.span.begin, t.span.end, it->second);
  }
  return rw.apply();
}

}  // namespace rex::soltx
