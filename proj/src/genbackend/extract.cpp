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

#include <algorithm>
#include <cctype>
#include <optional>
#include <vector>

#include "rex/error.hpp"
#include "rex/genbackend.hpp"
#include "rex/soltx/lexer.hpp"

namespace rex::gen {

namespace {

enum class Role { kUnknown, kExploit, kTest };

struct Block {
  std::string lang;
  std::string body;  // header line removed when role is known
  Role role = Role::kUnknown;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// A fence is up to three spaces then three or more backticks or tildes.
struct Fence {
  char ch;
  std::size_t len;
  std::string info;
};

std::optional<Fence> parse_fence(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && i < 3 && line[i] == ' ') ++i;
  if (i >= line.size() || (line[i] != '`' && line[i] != '~')) return std::nullopt;
  const char ch = line[i];
  std::size_t n = 0;
  while (i + n < line.size() && line[i + n] == ch) ++n;
  if (n < 3) return std::nullopt;
  return Fence{ch, n, std::string(trim(line.substr(i + n)))};
}

bool closes(std::string_view line, const Fence& open) {
  const auto f = parse_fence(line);
  return f && f->ch == open.ch && f->len >= open.len && f->info.empty();
}

// `// FILE: name` (any case, any spacing) on the first non-blank line.
std::optional<std::string> file_header(std::string_view line) {
  std::string_view s = trim(line);
  if (s.substr(0, 2) != "//") return std::nullopt;
  s = trim(s.substr(2));
  if (lower(s.substr(0, 5)) != "file:") return std::nullopt;
  return std::string(trim(s.substr(5)));
}

std::vector<Block> scan_blocks(std::string_view raw) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    std::size_t nl = raw.find('\n', pos);
    if (nl == std::string_view::npos) nl = raw.size();
    std::string_view line = raw.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }

  std::vector<Block> blocks;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto open = parse_fence(lines[i]);
    if (!open) continue;
    Block b;
    const std::size_t space = open->info.find_first_of(" \t");
    b.lang = lower(open->info.substr(0, space));
    std::size_t j = i + 1;
    std::vector<std::string_view> body;
    for (; j < lines.size() && !closes(lines[j], *open); ++j) body.push_back(lines[j]);

    std::size_t first = 0;
    while (first < body.size() && trim(body[first]).empty()) ++first;
    if (first < body.size()) {
      if (auto name = file_header(body[first])) {
        const std::string n = lower(*name);
        if (n.size() >= 6 && n.compare(n.size() - 6, 6, ".t.sol") == 0) {
          b.role = Role::kTest;
        } else if (n.size() >= 4 && n.compare(n.size() - 4, 4, ".sol") == 0) {
          b.role = Role::kExploit;
        }
        if (b.role != Role::kUnknown) body.erase(body.begin(), body.begin() + first + 1);
      }
    }
    for (std::string_view l : body) {
      b.body.append(l);
      b.body.push_back('\n');
    }
    blocks.push_back(std::move(b));
    i = j;  // skip the closing fence (or end of input)
  }
  return blocks;
}

bool solidity_like(const Block& b) {
  return b.role != Role::kUnknown || b.lang.empty() || b.lang == "solidity" ||
         b.lang == "sol";
}

void check_lexes(const std::string& body, const char* which) {
  if (trim(body).empty()) {
    throw Error(ErrorCode::kUnlexableScript, std::string(which) + ": empty");
  }
  try {
    soltx::lex(body);
  } catch (const Error& e) {
    throw Error(ErrorCode::kUnlexableScript, std::string(which) + ": " + e.what());
  }
}

}  // namespace

ScriptPair extract_scripts(std::string_view raw) {
  std::vector<Block> blocks = scan_blocks(raw);
  blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                              [](const Block& b) { return !solidity_like(b); }),
               blocks.end());
  if (blocks.empty()) throw Error(ErrorCode::kNoCodeBlocks, "no Solidity code blocks");

  const Block* exploit = nullptr;
  const Block* test = nullptr;
  for (const Block& b : blocks) {
    if (b.role == Role::kExploit && !exploit) exploit = &b;
    if (b.role == Role::kTest && !test) test = &b;
  }
  // Unlabeled blocks fill whichever role is still open, exploit first.
  for (const Block& b : blocks) {
    if (b.role != Role::kUnknown) continue;
    if (!exploit) exploit = &b;
    else if (!test) test = &b;
  }
  if (!exploit || !test) {
    throw Error(ErrorCode::kOnlyOneScript,
                std::to_string(blocks.size()) + " usable code block(s)");
  }
  check_lexes(exploit->body, "exploit");
  check_lexes(test->body, "test");
  return {exploit->body, test->body};
}

std::string render_response(const ScriptPair& pair, std::string_view preamble) {
  const auto block = [](std::string_view name, const std::string& body) {
    std::string out = "```solidity\n// FILE: ";
    out += name;
    out += "\n";
    out += body;
    if (body.empty() || body.back() != '\n') out += "\n";
    out += "```\n";
    return out;
  };
  std::string out(preamble);
  if (!out.empty()) out += "\n\n";
  out += block("Exploit.sol", pair.exploit_source);
  out += "\n";
  out += block("Exploit.t.sol", pair.test_source);
  return out;
}

}  // namespace rex::gen
