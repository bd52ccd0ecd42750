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

// A self-contained campaign on disk: embedded contracts, scripted model
// responses and the fake forge. Outcomes are chosen by marker comments the
// fake forge reads from the generated Exploit.sol.

#ifndef REX_TESTS_SUPPORT_SCENARIO_HPP_
#define REX_TESTS_SUPPORT_SCENARIO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "rex/genbackend.hpp"
#include "support/mini_corpus.hpp"
#include "support/temp_dir.hpp"

namespace rex::testing {

inline std::filesystem::path fake_forge_path() {
  return std::filesystem::path(REX_TEST_DATA_DIR) / "fake_forge.sh";
}

inline std::string corpus_source(std::string_view name) {
  for (const CorpusEntry& e : mini_corpus()) {
    if (e.name == name) return std::string(e.source);
  }
  return {};
}

// Fake-forge behaviour of one generated attempt.
struct Step {
  std::string build = "build_pass.txt 0";
  std::string test = "test_pass.txt 0";
  double sleep_s = 0;
  bool no_code = false;  // model answers in prose only
};

inline Step compile_error() { return {"build_error_2314_9582.txt 1", "test_pass.txt 0", 0, false}; }
inline Step failing_test() { return {"build_pass.txt 0", "test_fail_revert.txt 1", 0, false}; }
inline Step no_code() { return {"build_pass.txt 0", "test_pass.txt 0", 0, true}; }

// A model answer whose exploit carries the markers plus one unchecksummed
// address literal and one uncast transfer receiver for the Step-3 fixes.
inline std::string scripted_response(const Step& s) {
  if (s.no_code) return "I cannot help with writing this exploit.\n";
  std::string exploit =
      "// FAKE-FORGE-BUILD: " + s.build + "\n// FAKE-FORGE-TEST: " + s.test + "\n";
  if (s.sleep_s > 0) exploit += "// FAKE-FORGE-SLEEP: " + std::to_string(s.sleep_s) + "\n";
  exploit +=
      "pragma solidity 0.8.26;\n"
      "import \"../src/Target.sol\";\n"
      "contract Exploit {\n"
      "  address constant SINK = 0xde0b295669a9fd93d5f28d9ec85e40f4cb697bae;\n"
      "  function drain(address victim) external { victim.transfer(1); }\n"
      "}\n";
  const std::string test =
      "pragma solidity 0.8.26;\n"
      "import \"forge-std/Test.sol\";\n"
      "import \"../src/Exploit.sol\";\n"
      "contract ExploitTest is Test {\n"
      "  function testExploit() public { new Exploit(); }\n"
      "}\n";
  return gen::render_response({exploit, test}, "Step 1: find the bug. Step 2: exploit it.");
}

struct ScenarioCase {
  std::string case_id;
  std::string corpus_entry;
  std::string vuln_class;
  std::vector<std::string> preprocess;
  std::vector<Step> steps;  // one scripted response per attempt
};

// good-on-first, compile-fail-then-good and always-bad (4 bad answers).
inline std::vector<ScenarioCase> three_scenarios() {
  return {
      {"good-on-first", "reentrancy_bank", "Reentrancy", {}, {Step{}}},
      {"compile-fail-then-good",
       "overflow_token",
       "Arithmetic",
       {"migrate_pragma", "wrap_unchecked:add"},
       {compile_error(), Step{}}},
      {"always-bad",
       "access_control",
       "AccessControl",
       {"strip_comments"},
       {compile_error(), failing_test(), no_code(), compile_error()}},
  };
}

class Scenario {
 public:
  explicit Scenario(const std::vector<ScenarioCase>& cases,
                    nlohmann::json config = nlohmann::json::object()) {
    tmp_.write("forge-std/src/Test.sol", "// stub\n");
    nlohmann::json base = {{"backend", "scripted"},
                           {"fixtures_dir", "fixtures"},
                           {"workdir_root", "work"},
                           {"max_retries", 3},
                           {"parallelism", 1},
                           {"build_timeout_s", 20},
                           {"test_timeout_s", 20},
                           {"forge_bin", fake_forge_path().string()},
                           {"forge_std_dir", "forge-std"}};
    base.update(config);
    nlohmann::json entries = nlohmann::json::array();
    for (const ScenarioCase& c : cases) {
      tmp_.write("contracts/" + c.case_id + ".sol", corpus_source(c.corpus_entry));
      for (std::size_t i = 0; i < c.steps.size(); ++i) {
        tmp_.write("fixtures/" + c.case_id + "/attempt" + std::to_string(i + 1) + ".md",
                   scripted_response(c.steps[i]));
      }
      entries.push_back({{"case_id", c.case_id},
                         {"source", "contracts/" + c.case_id + ".sol"},
                         {"vuln_class", c.vuln_class},
                         {"preprocess", c.preprocess},
                         {"provenance", "mini corpus: " + c.corpus_entry}});
    }
    manifest_ = tmp_.write(
        "manifest.json",
        nlohmann::json{{"version", 1}, {"config", base}, {"cases", entries}}.dump(2));
  }

  const std::filesystem::path& root() const { return tmp_.path(); }
  const std::filesystem::path& manifest() const { return manifest_; }
  std::filesystem::path workdir() const { return tmp_ / "work"; }
  std::filesystem::path results() const { return workdir() / "results.jsonl"; }
  std::filesystem::path attempt_dir(const std::string& case_id, int n) const {
    return workdir() / case_id / ("attempt-" + std::to_string(n));
  }

 private:
  TempDir tmp_;
  std::filesystem::path manifest_;
};

}  // namespace rex::testing

#endif  // REX_TESTS_SUPPORT_SCENARIO_HPP_
