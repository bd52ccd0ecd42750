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

// Campaign manifest, configuration and the append-only result store.

#ifndef REX_CORPUS_HPP_
#define REX_CORPUS_HPP_

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rex/records.hpp"

namespace rex {

struct Directive {
  enum class Kind { kStripComments, kMigratePragma, kWrapUnchecked };
  Kind kind = Kind::kStripComments;
  // kMigratePragma: explicit target, empty means config.solc_version.
  std::string version;
  // kWrapUnchecked: function names, never empty.
  std::vector<std::string> functions;

  // Canonical manifest tag, e.g. "wrap_unchecked:add,sub".
  std::string tag() const;
};

// Throws Error{kSchemaViolation} for an unrecognized or malformed tag.
Directive parse_directive(const std::string& tag);

struct ContractCase {
  std::string case_id;
  std::filesystem::path source_path;  // absolute
  std::string source_text;
  VulnClass vuln_class = VulnClass::kReentrancy;
  std::vector<Directive> preprocess;
  std::string provenance;
};

// Failure patterns that let a failing test still count as an exploit. Only
// DoS, Reentrancy and Arithmetic may carry a rule.
struct HeuristicRule {
  // Substrings matched against a failing test's revert reason and signals.
  std::vector<std::string> signal_patterns;
  // Case-insensitive substrings matched against the function part of a
  // reverted `Contract::function` frame; cheatcode frames (VM::) never match.
  std::vector<std::string> reverted_call_patterns;
};
using HeuristicRules = std::map<VulnClass, HeuristicRule>;

HeuristicRules default_heuristic_rules();
bool heuristic_eligible(VulnClass c);

enum class BackendKind { kHttpChat, kScripted, kNull };
std::string_view backend_kind_name(BackendKind k);

struct CampaignConfig {
  BackendKind backend = BackendKind::kScripted;
  // Names the credential variable REX_API_KEY_<BACKEND_ID>; defaults to the
  // backend kind.
  std::string backend_id = "scripted";
  std::string model_name = "scripted";
  int max_retries = 4;
  int parallelism = 1;
  double build_timeout_s = 300;
  double test_timeout_s = 300;
  std::filesystem::path workdir_root = "work";
  bool apply_optimizations = true;
  std::string solc_version = "0.8.26";

  // scripted backend
  std::filesystem::path fixtures_dir = "fixtures";
  // http_chat backend
  std::string base_url;
  double temperature = 0.2;
  int max_tokens = 8192;
  double requests_per_minute = 0;  // 0 disables the limiter
  double http_timeout_s = 120;
  int http_retries = 3;

  std::filesystem::path prompt_dir;  // empty: built-in templates
  std::filesystem::path forge_bin;   // empty: REX_FORGE_BIN, then PATH
  std::filesystem::path forge_std_dir = "lib/forge-std";
  HeuristicRules revert_heuristics = default_heuristic_rules();
};

// Merges `j` into `config`. Relative paths resolve against `base_dir`.
// Unknown keys and out-of-range values raise kSchemaViolation.
void apply_config_json(CampaignConfig& config, const nlohmann::json& j,
                       const std::filesystem::path& base_dir);
nlohmann::json config_to_json(const CampaignConfig& config);

struct Manifest {
  std::filesystem::path path;  // absolute
  CampaignConfig config;
  std::vector<ContractCase> cases;
};

// Errors: kMissingFile, kSchemaViolation, kDuplicateCaseId,
// kUnknownVulnClass. Case order follows the file.
Manifest load_manifest(const std::filesystem::path& path);

// JSON Lines log of CaseResults. Appends from any thread are serialized and
// each record reaches the file in a single write(2).
class ResultStore {
 public:
  enum class Mode { kAppend, kReadOnly };

  // kAppend creates the file if needed and truncates a torn trailing line.
  ResultStore(std::filesystem::path path, Mode mode);
  ~ResultStore();
  ResultStore(const ResultStore&) = delete;
  ResultStore& operator=(const ResultStore&) = delete;

  // Throws kIo (read-only store, failed write) or kSerialization.
  void append(const CaseResult& result);

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  Mode mode_;
  int fd_ = -1;
  std::mutex mu_;
};

struct Replay {
  std::vector<CaseResult> results;  // file order, duplicates kept
  bool dropped_torn_tail = false;
  std::size_t skipped_lines = 0;

  // Latest result per case id.
  std::map<std::string, CaseResult> latest() const;
};

// A missing file replays as empty. An unparsable final line is torn and
// dropped; one unparsable interior line is skipped; more raise
// kCorruptStore.
Replay replay_results(const std::filesystem::path& path);

}  // namespace rex

#endif  // REX_CORPUS_HPP_
