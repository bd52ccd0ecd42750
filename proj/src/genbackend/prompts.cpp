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

#include <array>
#include <map>

#include "rex/error.hpp"
#include "rex/genbackend.hpp"
#include "util/files.hpp"

namespace rex::gen {

namespace {

constexpr std::string_view kSystem =
    "You are a smart-contract security researcher. You write Foundry "
    "proof-of-concept exploits that compile on the first try and demonstrate "
    "the vulnerability with a passing test.";

constexpr std::string_view kExploit = R"(The Solidity contract at the end of this message contains a {{vuln_class}} vulnerability.

First reason step by step: name the vulnerable function, the state an attacker needs, and the exact sequence of calls that exploits it. Only then write code.

Reply with exactly two fenced ```solidity code blocks. The first line of each block must be its file marker:

// FILE: Exploit.sol
  The attacker contract. Import the target with: import "../src/Target.sol";

// FILE: Exploit.t.sol
  A forge-std test that deploys the target, funds it if needed, runs the exploit and asserts the attack succeeded. Import: import "forge-std/Test.sol"; import "../src/Exploit.sol";

Rules:
- Keep those import paths intact; the project has no other dependencies.
- Use pragma solidity ^0.8.0 and name the test function testExploit.
- Do not copy or modify the target contract.

Target.sol:
```solidity
{{source}}
```
)";

constexpr std::string_view kRepair = R"(Your previous exploit for the {{vuln_class}} vulnerability in the contract below failed. The end of the build/test output was:

```text
{{error_excerpt}}
```

Previous Exploit.sol:
```solidity
{{prior_exploit}}```

Previous Exploit.t.sol:
```solidity
{{prior_test}}```

Reason step by step about what the output says went wrong, then reply with both corrected files in full, in the same format: two fenced ```solidity blocks whose first lines are // FILE: Exploit.sol and // FILE: Exploit.t.sol. Keep the imports "forge-std/Test.sol", "../src/Target.sol" and "../src/Exploit.sol".

Target.sol:
```solidity
{{source}}
```
)";

constexpr std::array<std::string_view, 5> kPlaceholders = {
    "source", "vuln_class", "error_excerpt", "prior_exploit", "prior_test"};

// Placeholder names in order of appearance. Throws on an unknown name.
std::vector<std::string> placeholders_in(std::string_view text, std::string_view which) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = text.find("{{", pos)) != std::string_view::npos) {
    const std::size_t close = text.find("}}", pos + 2);
    if (close == std::string_view::npos) break;
    const std::string name(text.substr(pos + 2, close - pos - 2));
    bool known = false;
    for (std::string_view k : kPlaceholders) known = known || k == name;
    if (!known) {
      throw Error(ErrorCode::kTemplateInvalid,
                  std::string(which) + ": unknown placeholder {{" + name + "}}");
    }
    names.push_back(name);
    pos = close + 2;
  }
  return names;
}

std::string substitute(std::string_view text,
                       const std::map<std::string, std::string_view>& values) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (true) {
    const std::size_t open = text.find("{{", pos);
    const std::size_t close =
        open == std::string_view::npos ? open : text.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(text.substr(pos));
      return out;
    }
    const std::string name(text.substr(open + 2, close - open - 2));
    out.append(text.substr(pos, open - pos));
    if (auto it = values.find(name); it != values.end()) {
      out.append(it->second);
    }
    pos = close + 2;
  }
}

void check_template(std::string_view text, std::string_view which, bool repair) {
  const auto names = placeholders_in(text, which);
  int sources = 0;
  bool excerpt = false;
  for (const std::string& n : names) {
    sources += n == "source";
    excerpt = excerpt || n == "error_excerpt";
    if (!repair && (n == "error_excerpt" || n == "prior_exploit" || n == "prior_test")) {
      throw Error(ErrorCode::kTemplateInvalid,
                  std::string(which) + ": {{" + n + "}} only exists in repair prompts");
    }
  }
  if (sources != 1) {
    throw Error(ErrorCode::kTemplateInvalid,
                std::string(which) + ": {{source}} must appear exactly once");
  }
  if (repair && !excerpt) {
    throw Error(ErrorCode::kTemplateInvalid,
                std::string(which) + ": {{error_excerpt}} is required");
  }
}

}  // namespace

std::string Prompt::render() const {
  return "[system]\n" + system_text + "\n\n[user]\n" + user_text;
}

PromptTemplates PromptTemplates::builtin() {
  return {std::string(kSystem), std::string(kExploit), std::string(kRepair)};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t = builtin();
  const auto maybe_read = [&](const char* name, std::string& slot) {
    std::error_code ec;
    if (std::filesystem::exists(dir / name, ec)) slot = util::read_file(dir / name);
  };
  maybe_read("system.txt", t.system);
  maybe_read("exploit.txt", t.exploit);
  maybe_read("repair.txt", t.repair);
  t.validate();
  return t;
}

void PromptTemplates::validate() const {
  if (!placeholders_in(system, "system.txt").empty()) {
    throw Error(ErrorCode::kTemplateInvalid, "system.txt: placeholders are not allowed");
  }
  check_template(exploit, "exploit.txt", false);
  check_template(repair, "repair.txt", true);
}

std::string error_excerpt(std::string_view log) {
  if (log.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return std::string(kNoOutputNote);
  }
  if (log.size() <= kErrorExcerptBytes) return std::string(log);
  std::size_t start = log.size() - kErrorExcerptBytes;
  while (start < log.size() &&
         (static_cast<unsigned char>(log[start]) & 0xC0) == 0x80) {
    ++start;
  }
  return std::string(log.substr(start));
}

Prompt build_exploit_prompt(const PromptTemplates& t, const std::string& case_id,
                            VulnClass vuln_class, std::string_view source) {
  Prompt p;
  p.case_id = case_id;
  p.attempt_no = 1;
  p.system_text = t.system;
  p.user_text = substitute(
      t.exploit, {{"source", source}, {"vuln_class", vuln_class_title(vuln_class)}});
  return p;
}

Prompt build_repair_prompt(const PromptTemplates& t, const std::string& case_id,
                           VulnClass vuln_class, std::string_view source,
                           const ScriptPair& prior, std::string_view error_log,
                           int prior_attempt_no) {
  const std::string excerpt = error_excerpt(error_log);
  Prompt p;
  p.case_id = case_id;
  p.attempt_no = prior_attempt_no + 1;
  p.system_text = t.system;
  p.user_text = substitute(t.repair, {{"source", source},
                                      {"vuln_class", vuln_class_title(vuln_class)},
                                      {"error_excerpt", excerpt},
                                      {"prior_exploit", prior.exploit_source},
                                      {"prior_test", prior.test_source}});
  return p;
}

}  // namespace rex::gen
