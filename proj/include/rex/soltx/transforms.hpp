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

// Token-level source transforms. Each one lexes its input, edits only the
// tokens it targets and leaves every other byte untouched. All are pure.

#ifndef REX_SOLTX_TRANSFORMS_HPP_
#define REX_SOLTX_TRANSFORMS_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rex::soltx {

inline constexpr std::string_view kDefaultSolcVersion = "0.8.26";

struct Rewrite {
  std::string source;
  std::size_t count = 0;
};

// Removes line and block comments (a block comment becomes one space) and
// collapses runs of blank lines into a single blank line.
std::string strip_comments(std::string_view source);

// Rewrites every `pragma solidity ...;` to `pragma solidity <target>;`, or
// inserts one after the SPDX line (or at the top) when there is none.
std::string migrate_pragma(std::string_view source,
                           std::string_view target_version);

// Wraps each named function body in `unchecked { ... }`. Bodies that already
// start with `unchecked {` are left alone.
std::string wrap_unchecked(std::string_view source,
                           const std::vector<std::string>& function_names);

// EIP-55 checksum form of a 40-hex-digit address; input may carry 0x.
std::string to_eip55(std::string_view address);

// Checksums every address literal outside comments and strings. `count` is
// the number of literals whose text changed.
Rewrite normalize_addresses(std::string_view source);

// Wraps the receiver of `.transfer(`, `.send(` and `.call{value:` in
// `payable(...)`. The receiver is the identifier / member / index / call
// chain directly left of the dot. `count` is the number of casts inserted.
Rewrite insert_payable_casts(std::string_view source);

// Decoy and rare-construct templates are data supplied by the asset pack.
struct DecoyLibrary {
  std::map<std::string, std::string> templates;  // id -> Solidity snippet
};

// Splices the decoy template `decoy_id` before the closing brace of contract
// `anchor`. Declared names that collide with the existing source get a
// `_v<N>` suffix (N = 2, 3, ...).
std::string inject_decoy(std::string_view source, const DecoyLibrary& decoys,
                         const std::string& decoy_id,
                         const std::string& anchor);

// Replaces each `E.transfer(V);` / `E.send(V);` statement in `function_name`
// with `transfer_template`, whose `{{to}}` and `{{value}}` placeholders
// receive E and V.
std::string apply_rare_construct(std::string_view source,
                                 const std::string& function_name,
                                 std::string_view transfer_template);

// Whole-token identifier renaming outside comments and strings.
std::string obfuscate_pattern(
    std::string_view source,
    const std::map<std::string, std::string>& rename_map);

}  // namespace rex::soltx

#endif  // REX_SOLTX_TRANSFORMS_HPP_
