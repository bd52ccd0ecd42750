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

#include "rex/soltx/structure.hpp"

namespace rex::soltx {

namespace {

bool is_contract_keyword(const TokenStream& ts, std::size_t i) {
  return ts.is(i, TokenKind::kKeyword, "contract") ||
         ts.is(i, TokenKind::kKeyword, "interface") ||
         ts.is(i, TokenKind::kKeyword, "library");
}

bool is_function_keyword(const TokenStream& ts, std::size_t i) {
  if (ts[i].kind != TokenKind::kKeyword) return false;
  const std::string_view t = ts.text(i);
  return t == "function" || t == "constructor" || t == "modifier" ||
         t == "fallback" || t == "receive";
}

// Parses the definition starting at keyword index `kw`. Returns the index to
// resume scanning from.
std::size_t read_function(const TokenStream& ts, std::size_t kw,
                          const std::string& contract, std::size_t limit,
                          std::vector<FunctionInfo>& out) {
  FunctionInfo fn;
  fn.keyword = std::string(ts.text(kw));
  fn.contract = contract;
  fn.keyword_index = kw;
  std::size_t i = kw + 1;
  if (fn.keyword == "function" || fn.keyword == "modifier") {
    const auto next = ts.next_significant(kw);
    if (next && ts[*next].kind == TokenKind::kIdentifier) {
      fn.name = std::string(ts.text(*next));
      i = *next + 1;
    }
  }
  for (; i < limit; ++i) {
    if (ts[i].is_trivia()) continue;
    if (ts.is_punct(i, "(") || ts.is_punct(i, "[")) {
      const auto close = ts.matching(i);
      if (!close) return limit;
      i = *close;
      continue;
    }
    if (ts.is_punct(i, ";") || ts.is_punct(i, "}")) {
      out.push_back(std::move(fn));
      return i;
    }
    if (ts.is_punct(i, "{")) {
      const auto close = ts.matching(i);
      if (!close) return limit;
      fn.body_open = i;
      fn.body_close = *close;
      out.push_back(std::move(fn));
      return *close;
    }
  }
  return limit;
}

}  // namespace

std::vector<ContractInfo> find_contracts(const TokenStream& ts) {
  std::vector<ContractInfo> out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!is_contract_keyword(ts, i)) continue;
    const auto name = ts.next_significant(i);
    if (!name || ts[*name].kind != TokenKind::kIdentifier) continue;
    ContractInfo info;
    info.kind = std::string(ts.text(i));
    info.name = std::string(ts.text(*name));
    info.keyword_index = i;
    bool in_bases = false;
    bool expect_base = false;
    std::size_t j = *name + 1;
    for (; j < ts.size(); ++j) {
      if (ts[j].is_trivia()) continue;
      if (ts.is_punct(j, "{")) break;
      if (ts.is(j, TokenKind::kKeyword, "is")) {
        in_bases = true;
        expect_base = true;
        continue;
      }
      if (!in_bases) continue;
      if (ts.is_punct(j, "(")) {
        const auto close = ts.matching(j);
        if (!close) break;
        j = *close;
        continue;
      }
      if (ts.is_punct(j, ",")) {
        expect_base = true;
        continue;
      }
      if (ts[j].kind == TokenKind::kIdentifier) {
        if (expect_base) {
          info.bases.emplace_back(ts.text(j));
          expect_base = false;
        } else if (!info.bases.empty()) {
          // Qualified base `Lib.Base`: keep the last component.
          const auto prev = ts.prev_significant(j);
          if (prev && ts.is_punct(*prev, ".")) info.bases.back() = ts.text(j);
        }
      }
    }
    if (j >= ts.size()) continue;
    const auto close = ts.matching(j);
    if (!close) continue;
    info.body_open = j;
    info.body_close = *close;
    i = j;  // nested contracts are not legal Solidity
    out.push_back(std::move(info));
  }
  return out;
}

std::vector<FunctionInfo> find_functions(const TokenStream& ts) {
  std::vector<FunctionInfo> out;
  const std::vector<ContractInfo> contracts = find_contracts(ts);
  std::size_t next_contract = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (next_contract < contracts.size() &&
        i == contracts[next_contract].keyword_index) {
      const ContractInfo& c = contracts[next_contract++];
      for (std::size_t j = c.body_open + 1; j < c.body_close; ++j) {
        if (ts.is_punct(j, "{")) {
          j = ts.matching(j).value_or(c.body_close);
          continue;
        }
        if (is_function_keyword(ts, j)) {
          j = read_function(ts, j, c.name, c.body_close, out);
        }
      }
      i = c.body_close;
      continue;
    }
    if (ts.is_punct(i, "{")) {
      if (const auto close = ts.matching(i)) i = *close;
      continue;
    }
    if (ts.is(i, TokenKind::kKeyword, "function")) {
      i = read_function(ts, i, "", ts.size(), out);
    }
  }
  return out;
}

FunctionInfo find_unique_function(const TokenStream& ts,
                                  const std::string& name) {
  std::optional<FunctionInfo> found;
  for (FunctionInfo& fn : find_functions(ts)) {
    if (fn.contract.empty() || fn.keyword != "function" || fn.name != name ||
        !fn.body_open) {
      continue;
    }
    if (found) throw Error(ErrorCode::kAmbiguousFunction, name);
    found = std::move(fn);
  }
  if (!found) {
    throw Error(ErrorCode::kFunctionNotFound, name);
  }
  return *found;
}

}  // namespace rex::soltx
