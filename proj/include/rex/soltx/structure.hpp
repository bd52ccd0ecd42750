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

// Shallow structural queries over a token stream: contract bodies and
// function definitions, located by brace matching rather than parsing.

#ifndef REX_SOLTX_STRUCTURE_HPP_
#define REX_SOLTX_STRUCTURE_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rex/soltx/lexer.hpp"

namespace rex::soltx {

struct ContractInfo {
  std::string name;
  std::string kind;  // contract, interface, library
  std::vector<std::string> bases;
  std::size_t keyword_index = 0;
  std::size_t body_open = 0;   // token index of `{`
  std::size_t body_close = 0;  // token index of matching `}`
};

struct FunctionInfo {
  // Empty for constructor/fallback/receive.
  std::string name;
  std::string keyword;  // function, constructor, modifier, fallback, receive
  std::string contract;  // enclosing contract, empty at file level
  std::size_t keyword_index = 0;
  // Token indices of the body braces; nullopt for bodiless declarations.
  std::optional<std::size_t> body_open;
  std::optional<std::size_t> body_close;
};

std::vector<ContractInfo> find_contracts(const TokenStream& ts);

// Functions, constructors, modifiers, fallback and receive definitions that
// appear directly inside a contract body, plus free functions at file level.
std::vector<FunctionInfo> find_functions(const TokenStream& ts);

// The unique function named `name` declared directly inside a contract.
// Throws kFunctionNotFound / kAmbiguousFunction.
FunctionInfo find_unique_function(const TokenStream& ts,
                                  const std::string& name);

}  // namespace rex::soltx

#endif  // REX_SOLTX_STRUCTURE_HPP_
