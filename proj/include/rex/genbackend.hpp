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

// Prompt construction, text-generation backends and script extraction.

#ifndef REX_GENBACKEND_HPP_
#define REX_GENBACKEND_HPP_

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "rex/corpus.hpp"
#include "rex/records.hpp"

namespace rex::gen {

struct Prompt {
  std::string system_text;
  std::string user_text;
  int attempt_no = 1;
  std::string case_id;

  // Flat form persisted as prompt.txt.
  std::string render() const;
};

// Placeholders: {{source}} (exactly once), {{vuln_class}}, {{error_excerpt}},
// {{prior_exploit}}, {{prior_test}}. Substitution is single-pass, so text
// pulled in by a placeholder is never expanded again.
struct PromptTemplates {
  std::string system;
  std::string exploit;
  std::string repair;

  static PromptTemplates builtin();
  // Reads system.txt, exploit.txt and repair.txt from `dir`; an absent file
  // keeps the built-in text. Throws kTemplateInvalid.
  static PromptTemplates load(const std::filesystem::path& dir);

  void validate() const;
};

inline constexpr std::size_t kErrorExcerptBytes = 4000;
inline constexpr std::string_view kNoOutputNote =
    "no compiler output; process timed out";

// Trailing kErrorExcerptBytes of `log`, starting on a UTF-8 boundary.
// A blank log becomes kNoOutputNote.
std::string error_excerpt(std::string_view log);

Prompt build_exploit_prompt(const PromptTemplates& t, const std::string& case_id,
                            VulnClass vuln_class, std::string_view source);

// attempt_no is prior_attempt_no + 1.
Prompt build_repair_prompt(const PromptTemplates& t, const std::string& case_id,
                           VulnClass vuln_class, std::string_view source,
                           const ScriptPair& prior, std::string_view error_log,
                           int prior_attempt_no);

struct Generation {
  std::string text;
  int prompt_tokens = 0;
  int completion_tokens = 0;
};

// Implementations are safe to call from several workers at once.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendKind kind() const = 0;
  virtual const std::string& id() const = 0;
  // Throws kTransport, kRateLimited, kFixtureMissing or kBackendRefused.
  virtual Generation generate(const Prompt& prompt) = 0;
};

// Replays <fixtures_dir>/<case_id>/attempt<k>.md byte for byte.
std::unique_ptr<Backend> make_scripted_backend(std::filesystem::path fixtures_dir);
// Refuses every request.
std::unique_ptr<Backend> make_null_backend();

struct HttpChatOptions {
  std::string backend_id = "http_chat";
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string model;
  std::string api_key;
  double temperature = 0.2;
  int max_tokens = 8192;
  double timeout_s = 120;
  int retries = 3;  // extra tries after a transport error, 5xx or 429
  double requests_per_minute = 0;
  double backoff_s = 1.0;        // first retry delay, doubled per retry
  double max_retry_after_s = 60; // cap on a server-requested wait
};

// POSTs OpenAI-style chat completions to <base_url>/chat/completions.
std::unique_ptr<Backend> make_http_chat_backend(HttpChatOptions options);

// REX_API_KEY_<ID>, with ID upper-cased and non-alphanumerics mapped to '_'.
std::string api_key_env_var(std::string_view backend_id);

// Builds the backend named by `config`. http_chat takes its key from the
// environment only.
std::unique_ptr<Backend> make_backend(const CampaignConfig& config);

// Pulls the exploit and test scripts out of a model response. Blocks are
// routed by a `// FILE: <name>` first line (`.t.sol` is the test); without
// headers the first two Solidity blocks are taken in order. Each script
// ends with a newline. Throws kNoCodeBlocks, kOnlyOneScript or
// kUnlexableScript.
ScriptPair extract_scripts(std::string_view raw);

// Canonical two-block response for `pair`; extract_scripts inverts it.
std::string render_response(const ScriptPair& pair, std::string_view preamble = "");

}  // namespace rex::gen

#endif  // REX_GENBACKEND_HPP_
