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

#include "rex/harness.hpp"

#include <stdlib.h>

#include <chrono>
#include <random>

#include "gtest/gtest.h"
#include "json.hpp"
#include "support/temp_dir.hpp"

namespace rex::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::slurp;
using testing::TempDir;

const fs::path kData = REX_TEST_DATA_DIR;
const fs::path kFakeForge = kData / "fake_forge.sh";

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

std::string severity_name(Severity s) {
  return s == Severity::kError ? "error" : s == Severity::kWarning ? "warning" : "info";
}

json labels() { return json::parse(slurp(kData / "forge_output" / "labels.json")); }

// Sets an environment variable for the lifetime of the object.
class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) {
    if (const char* old = ::getenv(name)) old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (old_) ::setenv(name_, old_->c_str(), 1);
    else ::unsetenv(name_);
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

TEST(RecordedOutput, AtLeastTenHandLabeledFixtures) {
  const json l = labels();
  EXPECT_GE(l.size(), 10u);
  std::set<std::string> kinds;
  for (const auto& [name, label] : l.items()) kinds.insert(label.at("label").get<std::string>());
  for (const char* k : {"compile_error", "pass", "fail_revert", "fail_panic_0x11"}) {
    EXPECT_TRUE(kinds.count(k)) << k;
  }
}

TEST(RecordedOutput, ParsersMatchHandLabels) {
  const json all = labels();
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& [name, label] : all.items()) {
    SCOPED_TRACE(name);
    const std::string raw = slurp(kData / "forge_output" / name);
    ASSERT_FALSE(raw.empty());
    const int exit_code = label.at("exit_code");
    if (label.at("kind") == "build") {
      const BuildReport r = parse_build_output(raw, exit_code);
      EXPECT_EQ(r.success, label.at("success").get<bool>());
      EXPECT_EQ(r.parse_degraded, label.at("parse_degraded").get<bool>());
      const json& want = label.at("diagnostics");
      ASSERT_EQ(r.diagnostics.size(), want.size());
      for (std::size_t i = 0; i < want.size(); ++i) {
        const Diagnostic& d = r.diagnostics[i];
        EXPECT_EQ(severity_name(d.severity), want[i].at("severity"));
        EXPECT_EQ(d.code, want[i].at("code"));
        EXPECT_EQ(d.message, want[i].at("message"));
        EXPECT_EQ(d.file, want[i].at("file"));
        EXPECT_EQ(d.line, want[i].at("line"));
        EXPECT_EQ(d.column, want[i].at("column"));
      }
      EXPECT_EQ(r.raw_output, raw);
      continue;
    }
    const TestReport r = parse_test_output(raw, exit_code);
    EXPECT_TRUE(r.ran);
    EXPECT_EQ(r.parse_degraded, label.at("parse_degraded").get<bool>());
    EXPECT_EQ(r.no_tests, label.at("no_tests").get<bool>());
    const json& want = label.at("tests");
    ASSERT_EQ(r.tests.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      const TestRecord& t = r.tests[i];
      EXPECT_EQ(t.name, want[i].at("name"));
      EXPECT_EQ(t.status == TestStatus::kPass ? "pass" : "fail", want[i].at("status"));
      if (want[i].at("revert_reason").is_null()) {
        EXPECT_FALSE(t.revert_reason.has_value());
      } else {
        EXPECT_EQ(t.revert_reason.value_or("<none>"), want[i].at("revert_reason"));
      }
      EXPECT_EQ(t.failure_signals, want[i].at("failure_signals").get<std::vector<std::string>>());
      EXPECT_EQ(t.reverted_calls, want[i].at("reverted_calls").get<std::vector<std::string>>());
    }
    BuildReport ok;
    ok.success = true;
    for (const auto& [cls, outcome] : label.at("outcome").items()) {
      EXPECT_EQ(outcome_name(classify_outcome(parse_vuln_class(cls), ok, r)),
                outcome.get<std::string>())
          << cls;
    }
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
}

TEST(ParseBuild, EmptyInputIsDegradedFailure) {
  const BuildReport r = parse_build_output("");
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(r.diagnostics.empty());
  EXPECT_TRUE(r.parse_degraded);
}

TEST(ParseBuild, UnknownFormatFallsBackToExitCode) {
  const BuildReport ok = parse_build_output("solc 0.9 says hello\n", 0);
  EXPECT_TRUE(ok.success);
  EXPECT_TRUE(ok.parse_degraded);
  EXPECT_TRUE(ok.diagnostics.empty());
  const BuildReport bad = parse_build_output("solc 0.9 says hello\n", 1);
  EXPECT_FALSE(bad.success);
  EXPECT_TRUE(bad.parse_degraded);
}

TEST(ParseBuild, FailedTrailerWithoutDiagnosticsIsDegraded) {
  const BuildReport r = parse_build_output("Error: Compiler run failed:\nsomething odd\n", 1);
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(r.parse_degraded);
}

TEST(ParseBuild, SuccessMarkerWithNonzeroExitIsNotTrusted) {
  const BuildReport r = parse_build_output("Compiler run successful!\n", 1);
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(r.parse_degraded);
}

TEST(ParseTest, GarbageIsRanWithNoRecordsAndDegraded) {
  const TestReport r = parse_test_output("lorem ipsum\n\x01\x02\xff\n[PASS\n");
  EXPECT_TRUE(r.ran);
  EXPECT_TRUE(r.tests.empty());
  EXPECT_TRUE(r.parse_degraded);
  EXPECT_FALSE(r.all_passed());
}

TEST(ParseTest, NoTestsMarkerSatisfiesRanInvariant) {
  const TestReport r = parse_test_output(slurp(kData / "forge_output" / "test_no_tests.txt"));
  EXPECT_TRUE(r.ran);
  EXPECT_TRUE(r.tests.empty());
  EXPECT_TRUE(r.no_tests);
  EXPECT_FALSE(r.all_passed());
}

TEST(ParseTest, ParsersAreTotalOnMutatedInput) {
  std::vector<std::string> seeds;
  const json all = labels();
  for (const auto& [name, label] : all.items()) {
    seeds.push_back(slurp(kData / "forge_output" / name));
  }
  std::mt19937 rng(7);
  for (int i = 0; i < 400; ++i) {
    std::string s = seeds[i % seeds.size()];
    const int edits = 1 + static_cast<int>(rng() % 8);
    for (int e = 0; e < edits && !s.empty(); ++e) {
      const std::size_t pos = rng() % s.size();
      switch (rng() % 3) {
        case 0: s[pos] = static_cast<char>(rng() & 0xff); break;
        case 1: s.erase(pos, rng() % 40); break;
        default: s.insert(pos, s.substr(rng() % s.size(), rng() % 60)); break;
      }
    }
    EXPECT_NO_THROW(parse_build_output(s, 1));
    EXPECT_NO_THROW(parse_test_output(s, 1));
  }
}

TEST(ParseTest, MegabyteLinesAreHandled) {
  const std::string big(1 << 20, 'a');
  const TestReport t = parse_test_output("[FAIL: revert: " + big +
                                         "] testX() (gas: 1)\nTraces:\n  [1] A::b()\n"
                                         "    ├─ [2] V::withdraw()\n    │   └─ ← [Revert] " +
                                         big + "\n");
  ASSERT_EQ(t.tests.size(), 1u);
  EXPECT_EQ(t.tests[0].name, "testX");
  EXPECT_EQ(t.tests[0].reverted_calls, std::vector<std::string>{"V::withdraw"});
  const BuildReport b =
      parse_build_output("Error (1234): " + big + "\n  --> a.sol:99999999999999:1:\n", 1);
  ASSERT_EQ(b.diagnostics.size(), 1u);
  EXPECT_EQ(b.diagnostics[0].message.size(), big.size());
  EXPECT_EQ(b.diagnostics[0].line, 0);  // out of range, not an exception
}

TEST(NormalizeReason, CanonicalPanicAndGasForms) {
  EXPECT_EQ(normalize_failure_reason("panic: arithmetic underflow or overflow (0x11)"),
            "panic: arithmetic overflow (0x11)");
  EXPECT_EQ(normalize_failure_reason("Arithmetic over/underflow"),
            "panic: arithmetic overflow (0x11)");
  EXPECT_EQ(normalize_failure_reason("panic: assertion failed (0x01)"),
            "panic: assertion failed (0x01)");
  EXPECT_EQ(normalize_failure_reason("Panic(0x12)"), "panic: division or modulo by zero (0x12)");
  EXPECT_EQ(normalize_failure_reason("panic: array out-of-bounds access (0x32)"),
            "panic: array index out of bounds (0x32)");
  EXPECT_EQ(normalize_failure_reason("EvmError: OutOfGas"), "out of gas");
  EXPECT_EQ(normalize_failure_reason("  revert: nope  "), "revert: nope");
}

// Every (build, test, class) combination against the documented precedence.
TEST(Classify, ExhaustiveMatrixFollowsPrecedence) {
  TestRecord pass{"testA", TestStatus::kPass, std::nullopt, {}, {}};
  TestRecord overflow{"testB", TestStatus::kFail, "panic: arithmetic overflow (0x11)",
                      {"panic: arithmetic overflow (0x11)"}, {}};
  TestRecord gas{"testC", TestStatus::kFail, "EvmError: Revert", {"out of gas"}, {}};
  TestRecord withdraw{"testD", TestStatus::kFail, "revert: Transfer failed",
                      {"revert: Transfer failed"}, {"Target::withdraw"}};
  TestRecord plain{"testE", TestStatus::kFail, "revert: nope", {"revert: nope"}, {}};

  const auto report = [](std::vector<TestRecord> tests) {
    TestReport r;
    r.ran = true;
    r.tests = std::move(tests);
    return r;
  };
  const std::vector<std::pair<std::string, std::optional<TestReport>>> tests = {
      {"none", std::nullopt},
      {"all_pass", report({pass})},
      {"overflow", report({pass, overflow})},
      {"gas", report({gas})},
      {"withdraw", report({withdraw})},
      {"plain", report({plain})},
      {"no_tests", [] {
         TestReport r;
         r.ran = true;
         r.no_tests = true;
         return std::optional<TestReport>(r);
       }()},
  };

  for (bool built : {false, true}) {
    BuildReport b;
    b.success = built;
    for (const auto& [tname, t] : tests) {
      for (VulnClass c : kAllVulnClasses) {
        SCOPED_TRACE(tname + " " + std::string(vuln_class_id(c)) + (built ? " built" : ""));
        OutcomeClass want;
        if (!built) {
          want = OutcomeClass::kFailedCompile;
        } else if (tname == "all_pass") {
          want = OutcomeClass::kSuccess;
        } else if (tname == "overflow" && c == VulnClass::kArithmetic) {
          want = OutcomeClass::kSuccessByRevertHeuristic;
        } else if ((tname == "gas" || tname == "withdraw") &&
                   (c == VulnClass::kDoS || c == VulnClass::kReentrancy)) {
          want = OutcomeClass::kSuccessByRevertHeuristic;
        } else {
          want = OutcomeClass::kFailedTest;
        }
        const OutcomeClass got = classify_outcome(c, b, t);
        EXPECT_EQ(got, want);
        EXPECT_EQ(classify_outcome(c, b, t), got);  // pure
        if (got == OutcomeClass::kSuccessByRevertHeuristic) EXPECT_TRUE(heuristic_eligible(c));
      }
    }
  }
}

TEST(Classify, RulesAreConfigurableButLimitedToEligibleClasses) {
  TestRecord t{"testX", TestStatus::kFail, "revert: custom guard", {"revert: custom guard"}, {}};
  TestReport r;
  r.ran = true;
  r.tests = {t};
  BuildReport b;
  b.success = true;
  HeuristicRules rules;
  rules[VulnClass::kDoS].signal_patterns = {"CUSTOM GUARD"};
  rules[VulnClass::kAccessControl].signal_patterns = {"custom guard"};
  EXPECT_EQ(classify_outcome(VulnClass::kDoS, b, r, rules),
            OutcomeClass::kSuccessByRevertHeuristic);
  EXPECT_EQ(classify_outcome(VulnClass::kAccessControl, b, r, rules), OutcomeClass::kFailedTest);
  EXPECT_EQ(classify_outcome(VulnClass::kReentrancy, b, r, rules), OutcomeClass::kFailedTest);
  // Empty rules disable the heuristic entirely.
  EXPECT_EQ(classify_outcome(VulnClass::kDoS, b, r, {}), OutcomeClass::kFailedTest);
}

TEST(Classify, CheatcodeFramesDoNotCountAsVictimCalls) {
  HeuristicRule rule;
  rule.reverted_call_patterns = {"withdraw"};
  TestRecord t{"testX", TestStatus::kFail, "x", {}, {"VM::withdrawSomething"}};
  EXPECT_FALSE(heuristic_matches(rule, t));
  t.reverted_calls = {"Bank::withdrawAll"};
  EXPECT_TRUE(heuristic_matches(rule, t));
  t.status = TestStatus::kPass;
  EXPECT_FALSE(heuristic_matches(rule, t));
}

class Project : public ::testing::Test {
 protected:
  void SetUp() override {
    tmp_.write("forge-std/src/Test.sol", "// stub\n");
    forge_std_ = tmp_ / "forge-std";
  }

  fs::path scaffold(const std::string& name, const std::string& exploit_extra = "") {
    const ScriptPair scripts{"pragma solidity ^0.8.0;\n" + exploit_extra + "contract Exploit {}\n",
                             "pragma solidity ^0.8.0;\ncontract ExploitTest {}\n"};
    const fs::path dir = tmp_ / "work" / name;
    scaffold_project(dir, "contract Target {}\n", scripts, "0.8.26", forge_std_);
    return dir;
  }

  TempDir tmp_;
  fs::path forge_std_;
};

TEST_F(Project, LayoutIsFourFilesPlusLib) {
  const fs::path dir = scaffold("attempt-1");
  std::set<std::string> files;
  for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator();
       ++it) {
    if (it->is_symlink()) {
      it.disable_recursion_pending();
      files.insert(it->path().lexically_relative(dir).string() + "@");
    } else if (it->is_regular_file()) {
      files.insert(it->path().lexically_relative(dir).string());
    }
  }
  EXPECT_EQ(files, (std::set<std::string>{"foundry.toml", "src/Target.sol", "src/Exploit.sol",
                                          "test/Exploit.t.sol", "lib/forge-std@"}));
  EXPECT_EQ(slurp(dir / "src" / "Target.sol"), "contract Target {}\n");
  EXPECT_TRUE(fs::exists(dir / "lib" / "forge-std" / "src" / "Test.sol"));
}

TEST_F(Project, FoundryTomlPinsCompilerAndDisablesViaIr) {
  const std::string toml = slurp(scaffold("attempt-1") / "foundry.toml");
  EXPECT_NE(toml.find("solc_version = \"0.8.26\""), std::string::npos);
  EXPECT_NE(toml.find("via_ir = false"), std::string::npos);
  EXPECT_NE(toml.find("forge-std/=lib/forge-std/src/"), std::string::npos);
  EXPECT_NE(foundry_toml("0.7.6").find("solc_version = \"0.7.6\""), std::string::npos);
}

TEST_F(Project, AttemptDirsAreWriteOnce) {
  scaffold("attempt-1");
  EXPECT_EQ(code_of([&] { scaffold("attempt-1"); }), ErrorCode::kAttemptDirExists);
}

TEST_F(Project, MissingForgeStdIsTemplateMissing) {
  forge_std_ = tmp_ / "nowhere";
  EXPECT_EQ(code_of([&] { scaffold("attempt-1"); }), ErrorCode::kTemplateMissing);
  EXPECT_FALSE(fs::exists(tmp_ / "work" / "attempt-1"));
}

TEST_F(Project, FakeForgeBuildsKnownGoodAndKnownBad) {
  const fs::path good = scaffold("good");
  const BuildReport ok = run_build(kFakeForge, good, 30);
  EXPECT_TRUE(ok.success);
  EXPECT_EQ(ok.error_count(), 0u);
  EXPECT_EQ(ok.exit_code, 0);

  const fs::path bad = scaffold("bad", "// FAKE-FORGE-BUILD: build_error_2314_9582.txt 1\n");
  const BuildReport r = run_build(kFakeForge, bad, 30);
  EXPECT_FALSE(r.success);
  ASSERT_GE(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].file, "src/Exploit.sol");
  EXPECT_EQ(r.diagnostics[0].line, 14);
  EXPECT_EQ(r.exit_code, 1);
}

TEST_F(Project, FakeForgeTestsPassAndRevert) {
  const TestReport pass = run_tests(kFakeForge, scaffold("good"), 30);
  ASSERT_EQ(pass.tests.size(), 1u);
  EXPECT_EQ(pass.tests[0].name, "testExploit");
  EXPECT_EQ(pass.tests[0].status, TestStatus::kPass);

  const TestReport fail = run_tests(
      kFakeForge, scaffold("bad", "// FAKE-FORGE-TEST: test_fail_revert.txt 1\n"), 30);
  ASSERT_EQ(fail.tests.size(), 1u);
  EXPECT_EQ(fail.tests[0].status, TestStatus::kFail);
  EXPECT_EQ(fail.tests[0].revert_reason, "revert: Ownable: caller is not the owner");
}

TEST_F(Project, HungTestIsKilledAtTheTimeout) {
  const fs::path dir = scaffold("hang", "// FAKE-FORGE-SLEEP: 60\n");
  const auto t0 = std::chrono::steady_clock::now();
  try {
    run_tests(kFakeForge, dir, 5);
    FAIL() << "no timeout";
  } catch (const TimeoutError& e) {
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_EQ(e.code(), ErrorCode::kTimeout);
    EXPECT_NEAR(elapsed, 5.0, 1.0);
    EXPECT_NEAR(e.duration_s(), 5.0, 1.0);
    EXPECT_NE(e.partial_output().find("Compiling"), std::string::npos);
  }
}

TEST(Process, CapturesBothStreamsAndExitCode) {
  TempDir tmp;
  const ProcessResult r =
      run_process({"/bin/sh", "-c", "echo out; echo err >&2; pwd; exit 3"}, tmp.path(), 10);
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_FALSE(r.timed_out);
  EXPECT_NE(r.output.find("out\n"), std::string::npos);
  EXPECT_NE(r.output.find("err\n"), std::string::npos);
  EXPECT_NE(r.output.find(fs::canonical(tmp.path()).string()), std::string::npos);
}

TEST(Process, OutputCapKeepsTheTail) {
  TempDir tmp;
  const ProcessResult r = run_process(
      {"/bin/sh", "-c", "i=0; while [ $i -lt 2000 ]; do echo line$i; i=$((i+1)); done"},
      tmp.path(), 10, 1000);
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.output.size(), 1000u);
  EXPECT_NE(r.output.find("line1999\n"), std::string::npos);
}

TEST(Process, KillsTheWholeProcessGroup) {
  TempDir tmp;
  const auto t0 = std::chrono::steady_clock::now();
  const ProcessResult r =
      run_process({"/bin/sh", "-c", "sleep 30 & sleep 30; wait"}, tmp.path(), 0.5);
  EXPECT_TRUE(r.timed_out);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3.0);
}

TEST(Process, ExitedParentWithLingeringChildReturnsPromptly) {
  TempDir tmp;
  const auto t0 = std::chrono::steady_clock::now();
  const ProcessResult r = run_process({"/bin/sh", "-c", "sleep 30 & echo done"}, tmp.path(), 20);
  EXPECT_FALSE(r.timed_out);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("done"), std::string::npos);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3.0);
}

TEST(Process, MissingBinaryIsSpawnFailure) {
  TempDir tmp;
  EXPECT_EQ(code_of([&] { run_process({"/nonexistent/forge", "build"}, tmp.path(), 5); }),
            ErrorCode::kSpawnFailure);
  EXPECT_EQ(code_of([&] { run_process({"/bin/sh", "-c", "true"}, tmp / "missing", 5); }),
            ErrorCode::kSpawnFailure);
}

TEST(ResolveForge, PathWithoutForgeIsForgeNotInstalled) {
  TempDir tmp;
  fs::create_directories(tmp / "bin");
  ScopedEnv path("PATH", (tmp / "bin").string());
  ::unsetenv("REX_FORGE_BIN");
  EXPECT_EQ(code_of([] { resolve_forge(); }), ErrorCode::kForgeNotInstalled);
}

TEST(ResolveForge, PrefersConfiguredThenEnvThenPath) {
  TempDir tmp;
  const fs::path on_path = tmp.write("bin/forge", "#!/bin/sh\n");
  fs::permissions(on_path, fs::perms::owner_all);
  ScopedEnv path("PATH", (tmp / "bin").string());
  ::unsetenv("REX_FORGE_BIN");
  EXPECT_EQ(resolve_forge(), on_path);
  {
    ScopedEnv env("REX_FORGE_BIN", kFakeForge.string());
    EXPECT_EQ(resolve_forge(), kFakeForge);
    EXPECT_EQ(resolve_forge(on_path), on_path);
  }
  EXPECT_EQ(code_of([&] { resolve_forge(tmp / "bin" / "nope"); }),
            ErrorCode::kForgeNotInstalled);
}

}  // namespace
}  // namespace rex::harness
