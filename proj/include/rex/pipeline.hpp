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

// Per-case generate/build/test loop and the campaign runner around it.
//
// On-disk layout under config.workdir_root:
//   campaign.json             manifest path and effective config
//   results.jsonl             one CaseResult per line, append-only
//   campaign.summary.json     per-status and per-class counts
//   <case>/Target.sol         preprocessed target
//   <case>/attempt-<n>/       prompt.txt, response.md, response.json,
//                             Exploit.raw.sol, Exploit.t.raw.sol,
//                             project/, build.log, test.log, attempt.json
// attempt.json is written last and marks the attempt complete.

#ifndef REX_PIPELINE_HPP_
#define REX_PIPELINE_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rex/analytics.hpp"
#include "rex/corpus.hpp"
#include "rex/genbackend.hpp"
#include "rex/harness.hpp"
#include "rex/records.hpp"

namespace rex::pipeline {

enum class Phase { kInit, kPreprocessed, kGenerated, kOptimized, kBuilt, kTested, kDone };

std::string_view phase_name(Phase p);

class CaseState {
 public:
  static bool legal(Phase from, Phase to);

  // Throws kIllegalTransition. Entering kGenerated starts a new attempt.
  void advance(Phase next);

  Phase phase() const { return phase_; }
  int current_attempt() const { return current_attempt_; }

 private:
  Phase phase_ = Phase::kInit;
  int current_attempt_ = 0;
};

// Applies the case's preprocess directives in order.
std::string preprocess(const ContractCase& c, const CampaignConfig& config);

// Never throws for per-case failures; they become BackendError or
// HarnessError in the result. Reuses completed attempt directories.
CaseResult run_case(const ContractCase& c, const CampaignConfig& config,
                    gen::Backend& backend, harness::Toolchain& toolchain,
                    const gen::PromptTemplates& templates);

struct CampaignOptions {
  // Config keys applied over the manifest's config; relative paths resolve
  // against the current directory.
  nlohmann::json overrides = nlohmann::json::object();
  // Defaults: gen::make_backend and a forge toolchain from resolve_forge.
  std::function<std::unique_ptr<gen::Backend>(const CampaignConfig&)> backend_factory;
  std::function<std::unique_ptr<harness::Toolchain>(const CampaignConfig&)> toolchain_factory;
  // Called after each stored result; returning false stops scheduling new
  // cases. In-flight cases still finish.
  std::function<bool(const CaseResult&)> after_case;
  std::ostream* tally = nullptr;  // progress line and final table
};

struct CampaignResult {
  std::filesystem::path workdir_root;
  std::size_t total_cases = 0;
  std::size_t pending_before = 0;
  std::size_t ran = 0;
  bool stopped = false;  // after_case asked to stop
  std::size_t max_in_flight = 0;
  // Latest result per case, manifest order; pending cases are absent.
  std::vector<CaseResult> results;
  analytics::SuccessTable table;

  std::map<CaseStatus, std::size_t> status_counts() const;
  // True when any stored result is a BackendError or HarnessError.
  bool had_errors() const;
  nlohmann::json summary_json() const;
};

// Throws on manifest, store or environment errors (kForgeNotInstalled when
// cases are pending and forge cannot be found).
CampaignResult run_campaign(const std::filesystem::path& manifest_path,
                            const CampaignOptions& options = {});

// Continues the campaign recorded in workdir_root/campaign.json. Overrides
// in `options` apply on top of the recorded config.
CampaignResult resume_campaign(const std::filesystem::path& workdir_root,
                               const CampaignOptions& options = {});

}  // namespace rex::pipeline

#endif  // REX_PIPELINE_HPP_
