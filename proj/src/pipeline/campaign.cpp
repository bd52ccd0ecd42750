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
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "rex/error.hpp"
#include "rex/pipeline.hpp"
#include "spdlog/spdlog.h"
#include "util/files.hpp"

namespace rex::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::map<CaseStatus, std::size_t> CampaignResult::status_counts() const {
  std::map<CaseStatus, std::size_t> out;
  for (const CaseResult& r : results) ++out[r.status];
  return out;
}

bool CampaignResult::had_errors() const {
  return std::any_of(results.begin(), results.end(), [](const CaseResult& r) {
    return r.status == CaseStatus::kBackendError || r.status == CaseStatus::kHarnessError;
  });
}

json CampaignResult::summary_json() const {
  json by_status = json::object();
  for (const auto& [status, n] : status_counts()) by_status[std::string(case_status_name(status))] = n;
  json by_class = json::object();
  for (const analytics::SuccessRow& row : table.rows) {
    json entry = {{"successes", row.successes}, {"total", row.total}};
    const auto rate = row.rate_pct();
    entry["rate_pct"] = rate ? json(*rate) : json(nullptr);
    by_class[std::string(vuln_class_id(row.vuln_class))] = std::move(entry);
  }
  const auto avg = table.average_pct();
  return {{"total_cases", total_cases},
          {"completed", results.size()},
          {"pending", total_cases - results.size()},
          {"ran", ran},
          {"stopped", stopped},
          {"max_in_flight", max_in_flight},
          {"had_errors", had_errors()},
          {"by_status", std::move(by_status)},
          {"by_class", std::move(by_class)},
          {"average_success_pct", avg ? json(*avg) : json(nullptr)}};
}

namespace {

constexpr std::string_view kCampaignFile = "campaign.json";
constexpr std::string_view kResultsFile = "results.jsonl";
constexpr std::string_view kSummaryFile = "campaign.summary.json";

class WorkerPool {
 public:
  WorkerPool(const std::vector<const ContractCase*>& pending, const CampaignConfig& config,
             gen::Backend& backend, harness::Toolchain& toolchain,
             const gen::PromptTemplates& templates, ResultStore& store,
             const CampaignOptions& options, std::map<std::string, CaseResult>& latest)
      : pending_(pending),
        config_(config),
        backend_(backend),
        toolchain_(toolchain),
        templates_(templates),
        store_(store),
        options_(options),
        latest_(latest) {}

  void run(CampaignResult& out) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(1, config_.parallelism)),
                              pending_.size());
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) threads.emplace_back([this] { work(); });
    for (std::thread& t : threads) t.join();
    if (failure_) std::rethrow_exception(failure_);
    out.ran = ran_;
    out.stopped = stopped_by_hook_;
    out.max_in_flight = max_in_flight_;
  }

 private:
  void work() {
    while (!stop_.load()) {
      const std::size_t i = next_.fetch_add(1);
      if (i >= pending_.size()) return;
      const std::size_t now = ++in_flight_;
      std::size_t seen = max_in_flight_.load();
      while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
      }
      CaseResult r = run_case(*pending_[i], config_, backend_, toolchain_, templates_);
      --in_flight_;

      std::lock_guard lock(mu_);
      if (failure_) return;
      try {
        store_.append(r);
      } catch (...) {
        failure_ = std::current_exception();
        stop_ = true;
        return;
      }
      ++ran_;
      const bool keep_going = !options_.after_case || options_.after_case(r);
      latest_[r.case_id] = std::move(r);
      if (!keep_going) {
        stopped_by_hook_ = true;
        stop_ = true;
      }
    }
  }

  const std::vector<const ContractCase*>& pending_;
  const CampaignConfig& config_;
  gen::Backend& backend_;
  harness::Toolchain& toolchain_;
  const gen::PromptTemplates& templates_;
  ResultStore& store_;
  const CampaignOptions& options_;
  std::map<std::string, CaseResult>& latest_;

  std::atomic<std::size_t> next_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
  std::atomic<bool> stop_{false};
  std::mutex mu_;  // guards the store, latest_, ran_ and failure_
  std::size_t ran_ = 0;
  bool stopped_by_hook_ = false;
  std::exception_ptr failure_;
};

void write_campaign_file(const Manifest& m) {
  const fs::path path = m.config.workdir_root / kCampaignFile;
  if (fs::exists(path)) {
    try {
      const json prior = json::parse(util::read_file(path));
      if (prior.value("manifest", "") != m.path.string()) {
        spdlog::warn("{} belonged to manifest {}; now {}", path.string(),
                     prior.value("manifest", "?"), m.path.string());
      }
    } catch (const json::exception&) {
      spdlog::warn("{}: replacing unreadable file", path.string());
    }
  }
  util::write_file_atomic(
      path, json{{"version", 1}, {"manifest", m.path.string()}, {"config", config_to_json(m.config)}}
                    .dump(2) + "\n");
}

std::unique_ptr<harness::Toolchain> default_toolchain(const CampaignConfig& config) {
  return harness::make_forge_toolchain(harness::resolve_forge(config.forge_bin));
}

CampaignResult execute(const Manifest& m, const CampaignOptions& options) {
  const CampaignConfig& config = m.config;
  fs::create_directories(config.workdir_root);
  write_campaign_file(m);

  const fs::path results_path = config.workdir_root / kResultsFile;
  std::map<std::string, CaseResult> latest;
  if (fs::exists(results_path)) {
    const Replay replay = replay_results(results_path);
    if (replay.dropped_torn_tail) {
      spdlog::warn("{}: dropped a torn final line; that case will run again",
                   results_path.string());
    }
    latest = replay.latest();
  }
  ResultStore store(results_path, ResultStore::Mode::kAppend);

  std::vector<const ContractCase*> pending;
  for (const ContractCase& c : m.cases) {
    if (!latest.count(c.case_id)) pending.push_back(&c);
  }
  spdlog::info("{} of {} cases pending", pending.size(), m.cases.size());
  if (options.tally) *options.tally << pending.size() << " pending\n" << std::flush;

  CampaignResult out;
  out.workdir_root = config.workdir_root;
  out.total_cases = m.cases.size();
  out.pending_before = pending.size();
  if (!pending.empty()) {
    const gen::PromptTemplates templates = config.prompt_dir.empty()
                                               ? gen::PromptTemplates::builtin()
                                               : gen::PromptTemplates::load(config.prompt_dir);
    std::unique_ptr<harness::Toolchain> toolchain =
        options.toolchain_factory ? options.toolchain_factory(config) : default_toolchain(config);
    std::unique_ptr<gen::Backend> backend =
        options.backend_factory ? options.backend_factory(config) : gen::make_backend(config);
    WorkerPool(pending, config, *backend, *toolchain, templates, store, options, latest)
        .run(out);
  }

  for (const ContractCase& c : m.cases) {
    auto it = latest.find(c.case_id);
    if (it != latest.end()) out.results.push_back(it->second);
  }
  const std::vector<VulnClass> classes(kAllVulnClasses.begin(), kAllVulnClasses.end());
  out.table = analytics::aggregate_success(out.results, classes);
  util::write_file_atomic(config.workdir_root / kSummaryFile,
                          out.summary_json().dump(2) + "\n");

  if (options.tally) {
    *options.tally << analytics::render_success_markdown({{config.model_name, out.table}})
                   << out.results.size() << "/" << out.total_cases << " cases complete";
    if (out.had_errors()) *options.tally << "; some cases ended in backend or harness errors";
    *options.tally << "\n" << std::flush;
  }
  return out;
}

}  // namespace

CampaignResult run_campaign(const fs::path& manifest_path, const CampaignOptions& options) {
  Manifest m = load_manifest(manifest_path);
  apply_config_json(m.config, options.overrides, fs::current_path());
  return execute(m, options);
}

CampaignResult resume_campaign(const fs::path& workdir_root, const CampaignOptions& options) {
  const fs::path path = workdir_root / kCampaignFile;
  json doc;
  try {
    doc = json::parse(util::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("manifest") || !doc.at("manifest").is_string() ||
      !doc.contains("config")) {
    throw Error(ErrorCode::kSchemaViolation, path.string() + ": expected manifest and config");
  }
  Manifest m = load_manifest(doc.at("manifest").get<std::string>());
  apply_config_json(m.config, doc.at("config"), fs::absolute(workdir_root));
  apply_config_json(m.config, options.overrides, fs::current_path());
  return execute(m, options);
}

}  // namespace rex::pipeline
