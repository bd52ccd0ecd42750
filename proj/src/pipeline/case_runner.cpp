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

#include <chrono>
#include <optional>

#include "rex/error.hpp"
#include "rex/pipeline.hpp"
#include "rex/soltx/transforms.hpp"
#include "spdlog/spdlog.h"
#include "util/files.hpp"

namespace rex::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::kInit: return "Init";
    case Phase::kPreprocessed: return "Preprocessed";
    case Phase::kGenerated: return "Generated";
    case Phase::kOptimized: return "Optimized";
    case Phase::kBuilt: return "Built";
    case Phase::kTested: return "Tested";
    case Phase::kDone: return "Done";
  }
  return "?";
}

bool CaseState::legal(Phase from, Phase to) {
  switch (from) {
    case Phase::kInit:
      return to == Phase::kPreprocessed || to == Phase::kDone;
    case Phase::kPreprocessed:
      return to == Phase::kGenerated || to == Phase::kDone;
    case Phase::kGenerated:
      return to == Phase::kOptimized || to == Phase::kGenerated || to == Phase::kDone;
    case Phase::kOptimized:
      return to == Phase::kBuilt || to == Phase::kDone;
    case Phase::kBuilt:
      return to == Phase::kTested || to == Phase::kGenerated || to == Phase::kDone;
    case Phase::kTested:
      return to == Phase::kGenerated || to == Phase::kDone;
    case Phase::kDone:
      return false;
  }
  return false;
}

void CaseState::advance(Phase next) {
  if (!legal(phase_, next)) {
    throw Error(ErrorCode::kIllegalTransition,
                std::string(phase_name(phase_)) + " -> " + std::string(phase_name(next)));
  }
  phase_ = next;
  if (next == Phase::kGenerated) ++current_attempt_;
}

std::string preprocess(const ContractCase& c, const CampaignConfig& config) {
  std::string src = c.source_text;
  for (const Directive& d : c.preprocess) {
    switch (d.kind) {
      case Directive::Kind::kStripComments:
        src = soltx::strip_comments(src);
        break;
      case Directive::Kind::kMigratePragma:
        src = soltx::migrate_pragma(src, d.version.empty() ? config.solc_version : d.version);
        break;
      case Directive::Kind::kWrapUnchecked:
        src = soltx::wrap_unchecked(src, d.functions);
        break;
    }
  }
  return src;
}

namespace {

constexpr std::string_view kExtractFailPrefix = "could not extract scripts: ";

bool is_backend_error(ErrorCode code) {
  return code == ErrorCode::kTransport || code == ErrorCode::kRateLimited ||
         code == ErrorCode::kFixtureMissing || code == ErrorCode::kBackendRefused;
}

std::string describe(const Error& e) {
  return std::string(error_code_name(e.code())) + ": " + e.detail();
}

fs::path attempt_dir(const fs::path& case_dir, int n) {
  return case_dir / ("attempt-" + std::to_string(n));
}

// The feedback a repair prompt gets for a finished attempt. Timed-out builds
// give "", which error_excerpt turns into its no-output note.
std::string repair_log(const Attempt& a, const fs::path& dir) {
  if (a.extraction_error) return std::string(kExtractFailPrefix) + *a.extraction_error;
  if (!a.build.success) {
    if (a.build.timed_out || !fs::exists(dir / "build.log")) return "";
    return util::read_file(dir / "build.log");
  }
  if (!fs::exists(dir / "test.log")) return "";
  return util::read_file(dir / "test.log");
}

gen::Generation load_or_generate(gen::Backend& backend, const gen::Prompt& prompt,
                                 const fs::path& dir) {
  const fs::path response = dir / "response.md";
  const fs::path meta = dir / "response.json";
  if (fs::exists(response)) {
    gen::Generation g{util::read_file(response), 0, 0};
    if (fs::exists(meta)) {
      try {
        const json j = json::parse(util::read_file(meta));
        g.prompt_tokens = j.value("prompt_tokens", 0);
        g.completion_tokens = j.value("completion_tokens", 0);
      } catch (const json::exception& e) {
        spdlog::warn("{}: ignoring unreadable token counts: {}", meta.string(), e.what());
      }
    }
    spdlog::info("{} attempt {}: reusing saved response", prompt.case_id, prompt.attempt_no);
    return g;
  }
  gen::Generation g = backend.generate(prompt);
  util::write_file_atomic(response, g.text);
  util::write_file_atomic(meta, json{{"backend", backend.id()},
                                     {"prompt_tokens", g.prompt_tokens},
                                     {"completion_tokens", g.completion_tokens}}
                                    .dump(2) + "\n");
  return g;
}

class CaseRun {
 public:
  CaseRun(const ContractCase& c, const CampaignConfig& config, gen::Backend& backend,
          harness::Toolchain& toolchain, const gen::PromptTemplates& templates)
      : case_(c),
        config_(config),
        backend_(backend),
        toolchain_(toolchain),
        templates_(templates),
        case_dir_(config.workdir_root / c.case_id) {}

  CaseResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    result_.case_id = case_.case_id;
    result_.vuln_class = case_.vuln_class;
    result_.started_at = iso8601_utc_now();
    try {
      loop();
    } catch (const Error& e) {
      fail(is_backend_error(e.code()) ? CaseStatus::kBackendError : CaseStatus::kHarnessError,
           describe(e));
    } catch (const std::exception& e) {
      fail(CaseStatus::kHarnessError, e.what());
    }
    if (state_.phase() != Phase::kDone) state_.advance(Phase::kDone);
    result_.finished_at = iso8601_utc_now();
    result_.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    spdlog::info("{}: {} after {} attempt(s)", case_.case_id, case_status_name(result_.status),
                 result_.attempts.size());
    return std::move(result_);
  }

 private:
  void fail(CaseStatus status, std::string message) {
    spdlog::warn("{}: {}", case_.case_id, message);
    result_.status = status;
    result_.error = std::move(message);
  }

  void loop() {
    std::string target;
    try {
      target = preprocess(case_, config_);
    } catch (const Error& e) {
      throw Error(e.code(), "preprocess: " + e.detail());
    }
    state_.advance(Phase::kPreprocessed);
    fs::create_directories(case_dir_);
    util::write_file_atomic(case_dir_ / "Target.sol", target);

    const int max_attempts = config_.max_retries + 1;
    std::string prior_log;
    for (int n = 1; n <= max_attempts; ++n) {
      state_.advance(Phase::kGenerated);
      const fs::path dir = attempt_dir(case_dir_, n);
      Attempt a = fs::exists(dir / "attempt.json") ? reuse(dir) : attempt(n, target, prior_log);
      prior_log = repair_log(a, dir);
      const OutcomeClass outcome = a.outcome;
      result_.attempts.push_back(std::move(a));
      if (outcome == OutcomeClass::kSuccess) {
        result_.status = CaseStatus::kSuccess;
        return;
      }
      if (outcome == OutcomeClass::kSuccessByRevertHeuristic) {
        result_.status = CaseStatus::kSuccessByRevertHeuristic;
        return;
      }
    }
    // With no retries allowed the single attempt's outcome is the status.
    if (config_.max_retries > 0) {
      result_.status = CaseStatus::kRetryExhausted;
    } else {
      result_.status = result_.attempts.back().outcome == OutcomeClass::kFailedCompile
                           ? CaseStatus::kFailedCompile
                           : CaseStatus::kFailedTest;
    }
  }

  Attempt reuse(const fs::path& dir) {
    Attempt a;
    try {
      a = attempt_from_json(json::parse(util::read_file(dir / "attempt.json")));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kSerialization, (dir / "attempt.json").string() + ": " + e.what());
    }
    if (a.attempt_no != state_.current_attempt()) {
      throw Error(ErrorCode::kSerialization,
                  (dir / "attempt.json").string() + ": attempt_no " +
                      std::to_string(a.attempt_no) + " in attempt-" +
                      std::to_string(state_.current_attempt()));
    }
    spdlog::info("{} attempt {}: already complete ({})", case_.case_id, a.attempt_no,
                 outcome_name(a.outcome));
    return a;
  }

  Attempt attempt(int n, const std::string& target, const std::string& prior_log) {
    const fs::path dir = attempt_dir(case_dir_, n);
    fs::create_directories(dir);
    // A project left by an interrupted attempt is rebuilt from scratch.
    if (fs::exists(dir / "project")) fs::remove_all(dir / "project");

    const gen::Prompt prompt =
        n == 1 ? gen::build_exploit_prompt(templates_, case_.case_id, case_.vuln_class, target)
               : gen::build_repair_prompt(templates_, case_.case_id, case_.vuln_class, target,
                                          result_.attempts.back().scripts, prior_log, n - 1);
    util::write_file_atomic(dir / "prompt.txt", prompt.render());
    const gen::Generation g = load_or_generate(backend_, prompt, dir);

    Attempt a;
    a.attempt_no = n;
    a.prompt_tokens = g.prompt_tokens;
    a.completion_tokens = g.completion_tokens;
    try {
      a.scripts = gen::extract_scripts(g.text);
      util::write_file_atomic(dir / "Exploit.raw.sol", a.scripts.exploit_source);
      util::write_file_atomic(dir / "Exploit.t.raw.sol", a.scripts.test_source);
      if (config_.apply_optimizations) optimize(a);
    } catch (const Error& e) {
      // Unusable output still costs an attempt and feeds the repair prompt.
      a.extraction_error = describe(e);
      a.outcome = OutcomeClass::kFailedCompile;
      spdlog::info("{} attempt {}: {}{}", case_.case_id, n, kExtractFailPrefix,
                   *a.extraction_error);
      finish(dir, a);
      return a;
    }
    state_.advance(Phase::kOptimized);

    const fs::path project = dir / "project";
    harness::scaffold_project(project, target, a.scripts, config_.solc_version,
                              config_.forge_std_dir);
    try {
      a.build = toolchain_.build(project, config_.build_timeout_s);
    } catch (const harness::TimeoutError& e) {
      a.build = BuildReport{};
      a.build.timed_out = true;
      a.build.raw_output = e.partial_output();
      a.build.duration_s = e.duration_s();
    }
    util::write_file_atomic(dir / "build.log", a.build.raw_output);
    state_.advance(Phase::kBuilt);

    if (a.build.success) {
      try {
        a.test = toolchain_.test(project, config_.test_timeout_s);
      } catch (const harness::TimeoutError& e) {
        a.test = TestReport{};
        a.test->timed_out = true;
        a.test->raw_output = e.partial_output();
        a.test->duration_s = e.duration_s();
      }
      util::write_file_atomic(dir / "test.log", a.test->raw_output);
      state_.advance(Phase::kTested);
    }
    a.outcome = harness::classify_outcome(case_.vuln_class, a.build, a.test,
                                          config_.revert_heuristics);
    spdlog::info("{} attempt {}: {}", case_.case_id, n, outcome_name(a.outcome));
    finish(dir, a);
    return a;
  }

  // Step 3 fixes run on the generated scripts only, never on the target.
  static void optimize(Attempt& a) {
    for (std::string* s : {&a.scripts.exploit_source, &a.scripts.test_source}) {
      const soltx::Rewrite addr = soltx::normalize_addresses(*s);
      const soltx::Rewrite cast = soltx::insert_payable_casts(addr.source);
      a.optimizations_applied.addresses_fixed += addr.count;
      a.optimizations_applied.payable_casts += cast.count;
      *s = cast.source;
    }
  }

  static void finish(const fs::path& dir, const Attempt& a) {
    util::write_file_atomic(dir / "attempt.json", to_json(a).dump(2) + "\n");
  }

  const ContractCase& case_;
  const CampaignConfig& config_;
  gen::Backend& backend_;
  harness::Toolchain& toolchain_;
  const gen::PromptTemplates& templates_;
  const fs::path case_dir_;
  CaseState state_;
  CaseResult result_;
};

}  // namespace

CaseResult run_case(const ContractCase& c, const CampaignConfig& config,
                    gen::Backend& backend, harness::Toolchain& toolchain,
                    const gen::PromptTemplates& templates) {
  return CaseRun(c, config, backend, toolchain, templates).run();
}

}  // namespace rex::pipeline
