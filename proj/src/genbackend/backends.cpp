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

#include <cctype>
#include <cstdlib>

#include "rex/error.hpp"
#include "rex/genbackend.hpp"
#include "util/files.hpp"

namespace rex::gen {

namespace {

class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

  BackendKind kind() const override { return BackendKind::kScripted; }
  const std::string& id() const override { return id_; }

  Generation generate(const Prompt& prompt) override {
    const auto path =
        dir_ / prompt.case_id / ("attempt" + std::to_string(prompt.attempt_no) + ".md");
    try {
      return {util::read_file(path), 0, 0};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingFile) throw;
      throw Error(ErrorCode::kFixtureMissing,
                  prompt.case_id + " attempt " + std::to_string(prompt.attempt_no));
    }
  }

 private:
  std::filesystem::path dir_;
  std::string id_ = "scripted";
};

class NullBackend final : public Backend {
 public:
  BackendKind kind() const override { return BackendKind::kNull; }
  const std::string& id() const override { return id_; }
  Generation generate(const Prompt& prompt) override {
    throw Error(ErrorCode::kBackendRefused, "null backend refuses " + prompt.case_id);
  }

 private:
  std::string id_ = "null";
};

}  // namespace

std::unique_ptr<Backend> make_scripted_backend(std::filesystem::path fixtures_dir) {
  return std::make_unique<ScriptedBackend>(std::move(fixtures_dir));
}

std::unique_ptr<Backend> make_null_backend() { return std::make_unique<NullBackend>(); }

std::string api_key_env_var(std::string_view backend_id) {
  std::string out = "REX_API_KEY_";
  for (char c : backend_id) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) ? static_cast<char>(std::toupper(u)) : '_');
  }
  return out;
}

std::unique_ptr<Backend> make_backend(const CampaignConfig& config) {
  switch (config.backend) {
    case BackendKind::kScripted:
      return make_scripted_backend(config.fixtures_dir);
    case BackendKind::kNull:
      return make_null_backend();
    case BackendKind::kHttpChat: {
      HttpChatOptions o;
      o.backend_id = config.backend_id;
      o.base_url = config.base_url;
      o.model = config.model_name;
      const std::string var = api_key_env_var(config.backend_id);
      if (const char* key = std::getenv(var.c_str())) o.api_key = key;
      o.temperature = config.temperature;
      o.max_tokens = config.max_tokens;
      o.timeout_s = config.http_timeout_s;
      o.retries = config.http_retries;
      o.requests_per_minute = config.requests_per_minute;
      return make_http_chat_backend(std::move(o));
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown backend kind");
}

}  // namespace rex::gen
