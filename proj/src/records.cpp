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

#include "rex/records.hpp"

#include <chrono>
#include <ctime>

#include "rex/error.hpp"

namespace rex {

using nlohmann::json;

namespace {

struct ClassNames {
  VulnClass cls;
  std::string_view id;
  std::string_view title;
};

constexpr std::array<ClassNames, 8> kClassNames = {{
    {VulnClass::kReentrancy, "Reentrancy", "Reentrancy"},
    {VulnClass::kAccessControl, "AccessControl", "Access Control"},
    {VulnClass::kArithmetic, "Arithmetic", "Arithmetic"},
    {VulnClass::kBadRandomness, "BadRandomness", "Bad Randomness"},
    {VulnClass::kFrontRunning, "FrontRunning", "Front Running"},
    {VulnClass::kDoS, "DoS", "DoS"},
    {VulnClass::kTimeManipulation, "TimeManipulation", "Time Manipulation"},
    {VulnClass::kUncheckedLowLevelCalls, "UncheckedLowLevelCalls",
     "Unchecked Low Level Calls"},
}};

constexpr std::array<std::pair<CaseStatus, std::string_view>, 7> kStatusNames = {{
    {CaseStatus::kSuccess, "Success"},
    {CaseStatus::kSuccessByRevertHeuristic, "SuccessByRevertHeuristic"},
    {CaseStatus::kFailedCompile, "FailedCompile"},
    {CaseStatus::kFailedTest, "FailedTest"},
    {CaseStatus::kRetryExhausted, "RetryExhausted"},
    {CaseStatus::kBackendError, "BackendError"},
    {CaseStatus::kHarnessError, "HarnessError"},
}};

std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::kError: return "error";
    case Severity::kWarning: return "warning";
    case Severity::kInfo: return "info";
  }
  return "error";
}

Severity parse_severity(std::string_view s) {
  if (s == "error") return Severity::kError;
  if (s == "warning") return Severity::kWarning;
  if (s == "info") return Severity::kInfo;
  throw Error(ErrorCode::kSerialization, "unknown severity '" + std::string(s) + "'");
}

json diagnostics_json(const std::vector<Diagnostic>& diags) {
  json arr = json::array();
  for (const Diagnostic& d : diags) {
    arr.push_back({{"severity", severity_name(d.severity)},
                   {"code", d.code},
                   {"message", d.message},
                   {"file", d.file},
                   {"line", d.line},
                   {"column", d.column}});
  }
  return arr;
}

json build_json(const BuildReport& b) {
  json j = {{"success", b.success},
            {"diagnostics", diagnostics_json(b.diagnostics)},
            {"duration_s", b.duration_s},
            {"parse_degraded", b.parse_degraded},
            {"timed_out", b.timed_out}};
  j["exit_code"] = b.exit_code ? json(*b.exit_code) : json(nullptr);
  return j;
}

json test_json(const TestReport& t) {
  json tests = json::array();
  for (const TestRecord& r : t.tests) {
    json rec = {{"name", r.name},
                {"status", r.status == TestStatus::kPass ? "pass" : "fail"},
                {"failure_signals", r.failure_signals},
                {"reverted_calls", r.reverted_calls}};
    rec["revert_reason"] = r.revert_reason ? json(*r.revert_reason) : json(nullptr);
    tests.push_back(std::move(rec));
  }
  json j = {{"ran", t.ran},
            {"tests", std::move(tests)},
            {"no_tests", t.no_tests},
            {"duration_s", t.duration_s},
            {"parse_degraded", t.parse_degraded},
            {"timed_out", t.timed_out}};
  j["exit_code"] = t.exit_code ? json(*t.exit_code) : json(nullptr);
  return j;
}

std::optional<int> opt_int(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<int>();
}

BuildReport build_from_json(const json& j) {
  BuildReport b;
  b.success = j.at("success").get<bool>();
  for (const json& d : j.at("diagnostics")) {
    Diagnostic diag;
    diag.severity = parse_severity(d.at("severity").get<std::string>());
    diag.code = d.at("code").get<std::string>();
    diag.message = d.at("message").get<std::string>();
    diag.file = d.at("file").get<std::string>();
    diag.line = d.at("line").get<int>();
    diag.column = d.at("column").get<int>();
    b.diagnostics.push_back(std::move(diag));
  }
  b.duration_s = j.at("duration_s").get<double>();
  b.parse_degraded = j.at("parse_degraded").get<bool>();
  b.timed_out = j.at("timed_out").get<bool>();
  b.exit_code = opt_int(j.at("exit_code"));
  return b;
}

TestReport test_from_json(const json& j) {
  TestReport t;
  t.ran = j.at("ran").get<bool>();
  for (const json& r : j.at("tests")) {
    TestRecord rec;
    rec.name = r.at("name").get<std::string>();
    const std::string status = r.at("status").get<std::string>();
    if (status != "pass" && status != "fail") {
      throw Error(ErrorCode::kSerialization, "bad test status '" + status + "'");
    }
    rec.status = status == "pass" ? TestStatus::kPass : TestStatus::kFail;
    if (!r.at("revert_reason").is_null()) {
      rec.revert_reason = r.at("revert_reason").get<std::string>();
    }
    rec.failure_signals = r.at("failure_signals").get<std::vector<std::string>>();
    rec.reverted_calls = r.at("reverted_calls").get<std::vector<std::string>>();
    t.tests.push_back(std::move(rec));
  }
  t.no_tests = j.at("no_tests").get<bool>();
  t.duration_s = j.at("duration_s").get<double>();
  t.parse_degraded = j.at("parse_degraded").get<bool>();
  t.timed_out = j.at("timed_out").get<bool>();
  t.exit_code = opt_int(j.at("exit_code"));
  return t;
}

Attempt parse_attempt(const json& j) {
  Attempt a;
  a.attempt_no = j.at("attempt_no").get<int>();
  a.scripts.exploit_source = j.at("scripts").at("exploit").get<std::string>();
  a.scripts.test_source = j.at("scripts").at("test").get<std::string>();
  a.optimizations_applied.addresses_fixed =
      j.at("optimizations_applied").at("addresses_fixed").get<std::size_t>();
  a.optimizations_applied.payable_casts =
      j.at("optimizations_applied").at("payable_casts").get<std::size_t>();
  a.build = build_from_json(j.at("build"));
  if (!j.at("test").is_null()) a.test = test_from_json(j.at("test"));
  a.outcome = parse_outcome(j.at("outcome").get<std::string>());
  if (!j.at("extraction_error").is_null()) {
    a.extraction_error = j.at("extraction_error").get<std::string>();
  }
  a.prompt_tokens = j.value("prompt_tokens", 0);
  a.completion_tokens = j.value("completion_tokens", 0);
  return a;
}

}  // namespace

std::string_view vuln_class_id(VulnClass c) {
  for (const auto& n : kClassNames) {
    if (n.cls == c) return n.id;
  }
  return "?";
}

std::string_view vuln_class_title(VulnClass c) {
  for (const auto& n : kClassNames) {
    if (n.cls == c) return n.title;
  }
  return "?";
}

VulnClass parse_vuln_class(std::string_view label) {
  for (const auto& n : kClassNames) {
    if (n.id == label || n.title == label) return n.cls;
  }
  throw Error(ErrorCode::kUnknownVulnClass, std::string(label));
}

std::size_t BuildReport::error_count() const {
  std::size_t n = 0;
  for (const Diagnostic& d : diagnostics) n += d.severity == Severity::kError;
  return n;
}

bool TestReport::all_passed() const {
  if (!ran || tests.empty()) return false;
  for (const TestRecord& r : tests) {
    if (r.status != TestStatus::kPass) return false;
  }
  return true;
}

std::string_view outcome_name(OutcomeClass o) {
  switch (o) {
    case OutcomeClass::kSuccess: return "Success";
    case OutcomeClass::kSuccessByRevertHeuristic: return "SuccessByRevertHeuristic";
    case OutcomeClass::kFailedCompile: return "FailedCompile";
    case OutcomeClass::kFailedTest: return "FailedTest";
  }
  return "?";
}

OutcomeClass parse_outcome(std::string_view s) {
  for (OutcomeClass o :
       {OutcomeClass::kSuccess, OutcomeClass::kSuccessByRevertHeuristic,
        OutcomeClass::kFailedCompile, OutcomeClass::kFailedTest}) {
    if (outcome_name(o) == s) return o;
  }
  throw Error(ErrorCode::kSerialization, "unknown outcome '" + std::string(s) + "'");
}

std::string_view case_status_name(CaseStatus s) {
  for (const auto& [status, name] : kStatusNames) {
    if (status == s) return name;
  }
  return "?";
}

CaseStatus parse_case_status(std::string_view s) {
  for (const auto& [status, name] : kStatusNames) {
    if (name == s) return status;
  }
  throw Error(ErrorCode::kSerialization, "unknown status '" + std::string(s) + "'");
}

bool is_success(CaseStatus s) {
  return s == CaseStatus::kSuccess || s == CaseStatus::kSuccessByRevertHeuristic;
}

json to_json(const Attempt& a) {
  json j = {
      {"attempt_no", a.attempt_no},
      {"scripts",
       {{"exploit", a.scripts.exploit_source}, {"test", a.scripts.test_source}}},
      {"optimizations_applied",
       {{"addresses_fixed", a.optimizations_applied.addresses_fixed},
        {"payable_casts", a.optimizations_applied.payable_casts}}},
      {"build", build_json(a.build)},
      {"outcome", outcome_name(a.outcome)},
      {"prompt_tokens", a.prompt_tokens},
      {"completion_tokens", a.completion_tokens},
  };
  j["test"] = a.test ? test_json(*a.test) : json(nullptr);
  j["extraction_error"] =
      a.extraction_error ? json(*a.extraction_error) : json(nullptr);
  return j;
}

json to_json(const CaseResult& r) {
  json attempts = json::array();
  for (const Attempt& a : r.attempts) attempts.push_back(to_json(a));
  json j = {{"case_id", r.case_id},
            {"vuln_class", vuln_class_id(r.vuln_class)},
            {"status", case_status_name(r.status)},
            {"attempts", std::move(attempts)},
            {"wall_clock_s", r.wall_clock_s},
            {"started_at", r.started_at},
            {"finished_at", r.finished_at}};
  j["error"] = r.error ? json(*r.error) : json(nullptr);
  return j;
}

CaseResult case_result_from_json(const json& j) {
  try {
    CaseResult r;
    r.case_id = j.at("case_id").get<std::string>();
    r.vuln_class = parse_vuln_class(j.at("vuln_class").get<std::string>());
    r.status = parse_case_status(j.at("status").get<std::string>());
    for (const json& a : j.at("attempts")) r.attempts.push_back(parse_attempt(a));
    r.wall_clock_s = j.at("wall_clock_s").get<double>();
    r.started_at = j.at("started_at").get<std::string>();
    r.finished_at = j.at("finished_at").get<std::string>();
    if (j.contains("error") && !j.at("error").is_null()) {
      r.error = j.at("error").get<std::string>();
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSerialization, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kSerialization) throw;
    throw Error(ErrorCode::kSerialization, e.what());
  }
}

Attempt attempt_from_json(const json& j) {
  try {
    return parse_attempt(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSerialization, e.what());
  }
}

std::string iso8601_utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      now.time_since_epoch()) % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof(out), "%s.%03dZ", buf, static_cast<int>(ms.count()));
  return out;
}

}  // namespace rex
