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

// Value types shared across modules: the vulnerability taxonomy, generated
// script pairs, build/test reports, attempts and per-case results, plus their
// JSON forms (used verbatim in results.jsonl).

#ifndef REX_RECORDS_HPP_
#define REX_RECORDS_HPP_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace rex {

enum class VulnClass {
  kReentrancy,
  kAccessControl,
  kArithmetic,
  kBadRandomness,
  kFrontRunning,
  kDoS,
  kTimeManipulation,
  kUncheckedLowLevelCalls,
};

inline constexpr std::array<VulnClass, 8> kAllVulnClasses = {
    VulnClass::kReentrancy,       VulnClass::kAccessControl,
    VulnClass::kArithmetic,       VulnClass::kBadRandomness,
    VulnClass::kFrontRunning,     VulnClass::kDoS,
    VulnClass::kTimeManipulation, VulnClass::kUncheckedLowLevelCalls,
};

// Machine label, e.g. "UncheckedLowLevelCalls".
std::string_view vuln_class_id(VulnClass c);
// Table label, e.g. "Unchecked Low Level Calls".
std::string_view vuln_class_title(VulnClass c);
// Accepts the machine label or the table label, exactly. Throws
// kUnknownVulnClass.
VulnClass parse_vuln_class(std::string_view label);

struct ScriptPair {
  std::string exploit_source;
  std::string test_source;

  friend bool operator==(const ScriptPair&, const ScriptPair&) = default;
};

enum class Severity { kError, kWarning, kInfo };

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string code;  // solc error code, e.g. "2314"; may be empty
  std::string message;
  std::string file;
  int line = 0;
  int column = 0;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct BuildReport {
  bool success = false;
  std::vector<Diagnostic> diagnostics;
  std::string raw_output;  // not serialized; lives in build.log
  double duration_s = 0;
  bool parse_degraded = false;
  bool timed_out = false;
  std::optional<int> exit_code;

  std::size_t error_count() const;
};

enum class TestStatus { kPass, kFail };

struct TestRecord {
  std::string name;
  TestStatus status = TestStatus::kPass;
  std::optional<std::string> revert_reason;
  // Every revert/out-of-gas text seen for this test, including nested trace
  // frames.
  std::vector<std::string> failure_signals;
  // `Contract::function` frames whose return was a revert or out-of-gas.
  std::vector<std::string> reverted_calls;

  friend bool operator==(const TestRecord&, const TestRecord&) = default;
};

struct TestReport {
  bool ran = false;
  std::vector<TestRecord> tests;
  bool no_tests = false;  // forge said "No tests found"
  std::string raw_output;  // not serialized; lives in test.log
  double duration_s = 0;
  bool parse_degraded = false;
  bool timed_out = false;
  std::optional<int> exit_code;

  bool all_passed() const;
};

enum class OutcomeClass {
  kSuccess,
  kSuccessByRevertHeuristic,
  kFailedCompile,
  kFailedTest,
};

std::string_view outcome_name(OutcomeClass o);
OutcomeClass parse_outcome(std::string_view s);

struct OptimizationCounts {
  std::size_t addresses_fixed = 0;
  std::size_t payable_casts = 0;
};

struct Attempt {
  int attempt_no = 1;
  ScriptPair scripts;
  OptimizationCounts optimizations_applied;
  BuildReport build;
  std::optional<TestReport> test;
  OutcomeClass outcome = OutcomeClass::kFailedCompile;
  // Set when the model output could not be turned into two scripts.
  std::optional<std::string> extraction_error;
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

enum class CaseStatus {
  kSuccess,
  kSuccessByRevertHeuristic,
  kFailedCompile,
  kFailedTest,
  kRetryExhausted,
  kBackendError,
  kHarnessError,
};

std::string_view case_status_name(CaseStatus s);
CaseStatus parse_case_status(std::string_view s);
bool is_success(CaseStatus s);

struct CaseResult {
  std::string case_id;
  VulnClass vuln_class = VulnClass::kReentrancy;
  CaseStatus status = CaseStatus::kHarnessError;
  std::vector<Attempt> attempts;
  double wall_clock_s = 0;
  std::string started_at;   // ISO-8601 UTC
  std::string finished_at;  // ISO-8601 UTC
  std::optional<std::string> error;
};

nlohmann::json to_json(const Attempt& a);
nlohmann::json to_json(const CaseResult& r);
// Throws Error{kSerialization} on schema mismatch.
// Both throw kSerialization on malformed input.
Attempt attempt_from_json(const nlohmann::json& j);
CaseResult case_result_from_json(const nlohmann::json& j);

std::string iso8601_utc_now();

}  // namespace rex

#endif  // REX_RECORDS_HPP_
