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

// Foundry project scaffolding, forge subprocess control, output parsing and
// outcome classification.

#ifndef REX_HARNESS_HPP_
#define REX_HARNESS_HPP_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rex/corpus.hpp"
#include "rex/error.hpp"
#include "rex/records.hpp"

namespace rex::harness {

// Both parsers are total. Unrecognized text sets parse_degraded instead of
// throwing.
BuildReport parse_build_output(std::string_view raw,
                               std::optional<int> exit_code = std::nullopt);
TestReport parse_test_output(std::string_view raw,
                             std::optional<int> exit_code = std::nullopt);

// Canonical revert reason, e.g. "panic: arithmetic overflow (0x11)" or
// "out of gas"; anything unrecognized is returned trimmed.
std::string normalize_failure_reason(std::string_view reason);

bool heuristic_matches(const HeuristicRule& rule, const TestRecord& test);

// FailedCompile > Success > SuccessByRevertHeuristic > FailedTest. The
// heuristic is consulted only for classes with a rule in `rules`, and only
// DoS, Reentrancy and Arithmetic can have one.
OutcomeClass classify_outcome(VulnClass vuln_class, const BuildReport& build,
                              const std::optional<TestReport>& test,
                              const HeuristicRules& rules = default_heuristic_rules());

std::string foundry_toml(std::string_view solc_version);

// Lays out src/Target.sol, src/Exploit.sol, test/Exploit.t.sol, foundry.toml
// and a lib/forge-std symlink under `project_dir`, which must not exist yet.
// Throws kAttemptDirExists, kTemplateMissing (no forge-std checkout) or kIo.
void scaffold_project(const std::filesystem::path& project_dir,
                      std::string_view target_source, const ScriptPair& scripts,
                      std::string_view solc_version,
                      const std::filesystem::path& forge_std_dir);

inline constexpr std::size_t kOutputCapBytes = 16u << 20;

struct ProcessResult {
  std::string output;  // stdout and stderr interleaved; tail kept past the cap
  int exit_code = -1;  // 128 + signal when killed by a signal
  bool timed_out = false;
  bool truncated = false;
  double duration_s = 0;
};

// Runs argv[0] (an absolute path) in its own process group with `cwd` as
// working directory. On timeout the whole group is killed and the result
// comes back with timed_out set. Throws kSpawnFailure.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& cwd, double timeout_s,
                          std::size_t output_cap = kOutputCapBytes);

// Thrown by run_build / run_tests when the time limit is hit. Carries the
// output captured before the kill.
class TimeoutError : public Error {
 public:
  TimeoutError(std::string detail, std::string partial_output, double duration_s)
      : Error(ErrorCode::kTimeout, std::move(detail)),
        partial_output_(std::move(partial_output)),
        duration_s_(duration_s) {}
  const std::string& partial_output() const { return partial_output_; }
  double duration_s() const { return duration_s_; }

 private:
  std::string partial_output_;
  double duration_s_;
};

// `configured` if set, else $REX_FORGE_BIN, else `forge` on PATH. Throws
// kForgeNotInstalled.
std::filesystem::path resolve_forge(const std::filesystem::path& configured = {});

// `forge build` / `forge test -vvvv` in `project_dir`. Throw TimeoutError or
// kSpawnFailure.
BuildReport run_build(const std::filesystem::path& forge,
                      const std::filesystem::path& project_dir, double timeout_s);
TestReport run_tests(const std::filesystem::path& forge,
                     const std::filesystem::path& project_dir, double timeout_s);

// Seam between the pipeline and the real forge binary.
class Toolchain {
 public:
  virtual ~Toolchain() = default;
  virtual BuildReport build(const std::filesystem::path& project_dir, double timeout_s) = 0;
  virtual TestReport test(const std::filesystem::path& project_dir, double timeout_s) = 0;
};

std::unique_ptr<Toolchain> make_forge_toolchain(std::filesystem::path forge);

}  // namespace rex::harness

#endif  // REX_HARNESS_HPP_
