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

#include "rex/rex.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <new>
#include <string>

#include "json.hpp"
#include "rex/analytics.hpp"
#include "rex/corpus.hpp"
#include "rex/error.hpp"
#include "rex/pipeline.hpp"
#include "rex/selftest.hpp"
#include "rex/soltx/keccak.hpp"
#include "rex/soltx/transforms.hpp"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

struct rex_campaign {
  rex::pipeline::CampaignResult result;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

// Human logs never share stdout with machine-readable output.
const bool g_logger_ready = [] {
  spdlog::set_default_logger(spdlog::stderr_color_mt("rex"));
  return true;
}();

rex_status fail(rex_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
rex_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return REX_OK;
  } catch (const rex::Error& e) {
    return fail(static_cast<rex_status>(e.code()), e.what());
  } catch (const json::exception& e) {
    return fail(REX_E_INVALID_ARGUMENT, std::string("bad JSON: ") + e.what());
  } catch (const std::bad_alloc&) {
    return fail(REX_E_INTERNAL, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(REX_E_IO, e.what());
  } catch (const std::exception& e) {
    return fail(REX_E_INTERNAL, e.what());
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) {
    throw rex::Error(rex::ErrorCode::kInvalidArgument, std::string(name) + " is NULL");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_params(const char* params_json) {
  if (params_json == nullptr || *params_json == '\0') return json::object();
  json j = json::parse(params_json);
  if (!j.is_object()) {
    throw rex::Error(rex::ErrorCode::kInvalidArgument, "params must be a JSON object");
  }
  return j;
}

std::string param_string(const json& p, const char* key) {
  if (!p.contains(key) || !p.at(key).is_string()) {
    throw rex::Error(rex::ErrorCode::kInvalidArgument,
                     std::string("param '") + key + "' must be a string");
  }
  return p.at(key).get<std::string>();
}

rex::pipeline::CampaignOptions campaign_options(const rex_campaign_options* o) {
  rex::pipeline::CampaignOptions out;
  if (o == nullptr) return out;
  if (o->overrides_json != nullptr && *o->overrides_json != '\0') {
    out.overrides = json::parse(o->overrides_json);
    if (!out.overrides.is_object()) {
      throw rex::Error(rex::ErrorCode::kInvalidArgument, "overrides must be a JSON object");
    }
  }
  if (o->print_tally) out.tally = &std::cout;
  return out;
}

std::vector<rex::CaseResult> latest_results(const char* results_path) {
  const rex::Replay replay = rex::replay_results(results_path);
  std::vector<rex::CaseResult> out;
  for (auto& [id, r] : replay.latest()) out.push_back(r);
  return out;
}

}  // namespace

extern "C" {

const char* rex_version(void) { return REX_VERSION; }

const char* rex_status_name(rex_status status) {
  if (status == REX_OK) return "Ok";
  if (status == REX_E_INTERNAL) return "Internal";
  if (status < REX_E_INVALID_ARGUMENT || status > REX_E_ILLEGAL_TRANSITION) return "Unknown";
  // error_code_name returns views of string literals.
  return rex::error_code_name(static_cast<rex::ErrorCode>(status)).data();
}

const char* rex_last_error(void) { return g_last_error.c_str(); }

void rex_string_free(char* s) { std::free(s); }

rex_status rex_set_log_level(const char* level) {
  return guarded([&] {
    require(level, "level");
    const std::string name(level);
    for (const char* known : {"trace", "debug", "info", "warn", "error", "off"}) {
      if (name == known) {
        spdlog::set_level(spdlog::level::from_str(name));
        return;
      }
    }
    throw rex::Error(rex::ErrorCode::kInvalidArgument, "unknown log level '" + name + "'");
  });
}

rex_status rex_keccak256(const uint8_t* data, size_t len, uint8_t out[32]) {
  return guarded([&] {
    if (len > 0) require(data, "data");
    require(out, "out");
    const rex::soltx::Digest256 d =
        rex::soltx::keccak256(std::span<const std::uint8_t>(data, len));
    std::memcpy(out, d.bytes().data(), d.bytes().size());
  });
}

rex_status rex_to_eip55(const char* address, char** out) {
  return guarded([&] {
    require(address, "address");
    require(out, "out");
    *out = dup(rex::soltx::to_eip55(address));
  });
}

rex_status rex_transform(const char* op, const char* source, const char* params_json,
                         char** out_source, size_t* count) {
  return guarded([&] {
    require(op, "op");
    require(source, "source");
    require(out_source, "out_source");
    const json p = parse_params(params_json);
    const std::string name(op);
    const std::string_view src(source);
    std::string result;
    std::size_t n = 0;
    if (name == "strip_comments") {
      result = rex::soltx::strip_comments(src);
    } else if (name == "migrate_pragma") {
      const std::string version = p.contains("version")
                                      ? param_string(p, "version")
                                      : std::string(rex::soltx::kDefaultSolcVersion);
      result = rex::soltx::migrate_pragma(src, version);
    } else if (name == "wrap_unchecked") {
      if (!p.contains("functions") || !p.at("functions").is_array() ||
          p.at("functions").empty()) {
        throw rex::Error(rex::ErrorCode::kInvalidArgument,
                         "param 'functions' must be a non-empty array");
      }
      result = rex::soltx::wrap_unchecked(src, p.at("functions").get<std::vector<std::string>>());
    } else if (name == "eip55") {
      rex::soltx::Rewrite r = rex::soltx::normalize_addresses(src);
      result = std::move(r.source);
      n = r.count;
    } else if (name == "payable_casts") {
      rex::soltx::Rewrite r = rex::soltx::insert_payable_casts(src);
      result = std::move(r.source);
      n = r.count;
    } else if (name == "obfuscate") {
      if (!p.contains("rename") || !p.at("rename").is_object()) {
        throw rex::Error(rex::ErrorCode::kInvalidArgument, "param 'rename' must be an object");
      }
      result = rex::soltx::obfuscate_pattern(
          src, p.at("rename").get<std::map<std::string, std::string>>());
    } else if (name == "decoy") {
      rex::soltx::DecoyLibrary lib;
      lib.templates["decoy"] = param_string(p, "template");
      result = rex::soltx::inject_decoy(src, lib, "decoy", param_string(p, "anchor"));
    } else if (name == "rare_construct") {
      result = rex::soltx::apply_rare_construct(src, param_string(p, "function"),
                                                param_string(p, "template"));
    } else {
      throw rex::Error(rex::ErrorCode::kInvalidArgument, "unknown transform '" + name + "'");
    }
    *out_source = dup(result);
    if (count != nullptr) *count = n;
  });
}

rex_status rex_metrics_json(const char* source, char** out_json) {
  return guarded([&] {
    require(source, "source");
    require(out_json, "out_json");
    *out_json = dup(rex::analytics::to_json(rex::analytics::compute_metrics(source)).dump(2));
  });
}

rex_status rex_report_markdown(const char* results_path, const char* column_name,
                               char** out_markdown) {
  return guarded([&] {
    require(results_path, "results_path");
    require(column_name, "column_name");
    require(out_markdown, "out_markdown");
    const std::vector<rex::VulnClass> classes(rex::kAllVulnClasses.begin(),
                                              rex::kAllVulnClasses.end());
    const rex::analytics::SuccessTable t =
        rex::analytics::aggregate_success(latest_results(results_path), classes);
    *out_markdown = dup(rex::analytics::render_success_markdown({{column_name, t}}));
  });
}

rex_status rex_analyze(const char* results_path, const char* source_dir, int quantiles,
                       char** out_csv, char** out_markdown) {
  return guarded([&] {
    require(results_path, "results_path");
    require(source_dir, "source_dir");
    require(out_csv, "out_csv");
    require(out_markdown, "out_markdown");
    rex::analytics::AssociationOptions options;
    if (quantiles >= 2) options.quantiles = static_cast<std::size_t>(quantiles);
    const auto rows = rex::analytics::association_report(
        rex::analytics::load_case_features(latest_results(results_path), source_dir), options);
    std::string csv = rex::analytics::association_csv(rows);
    std::string md = rex::analytics::association_markdown(rows, options);
    *out_csv = dup(csv);
    try {
      *out_markdown = dup(md);
    } catch (...) {
      std::free(*out_csv);
      *out_csv = nullptr;
      throw;
    }
  });
}

rex_status rex_campaign_run(const char* manifest_path, const rex_campaign_options* options,
                            rex_campaign** out) {
  return guarded([&] {
    require(manifest_path, "manifest_path");
    require(out, "out");
    *out = new rex_campaign{
        rex::pipeline::run_campaign(manifest_path, campaign_options(options))};
  });
}

rex_status rex_campaign_resume(const char* workdir_root, const rex_campaign_options* options,
                               rex_campaign** out) {
  return guarded([&] {
    require(workdir_root, "workdir_root");
    require(out, "out");
    *out = new rex_campaign{
        rex::pipeline::resume_campaign(workdir_root, campaign_options(options))};
  });
}

void rex_campaign_free(rex_campaign* campaign) { delete campaign; }

size_t rex_campaign_total_cases(const rex_campaign* c) { return c ? c->result.total_cases : 0; }

size_t rex_campaign_completed_cases(const rex_campaign* c) {
  return c ? c->result.results.size() : 0;
}

size_t rex_campaign_ran_cases(const rex_campaign* c) { return c ? c->result.ran : 0; }

int rex_campaign_had_errors(const rex_campaign* c) { return c && c->result.had_errors(); }

rex_status rex_campaign_summary_json(const rex_campaign* campaign, char** out_json) {
  return guarded([&] {
    require(campaign, "campaign");
    require(out_json, "out_json");
    *out_json = dup(campaign->result.summary_json().dump(2));
  });
}

rex_status rex_selftest(char** report) {
  bool all = true;
  const rex_status status = guarded([&] {
    std::string text;
    for (const rex::SelftestCheck& c : rex::run_selftest()) {
      all = all && c.passed;
      text += (c.passed ? "PASS " : "FAIL ") + c.name;
      if (!c.passed) text += ": " + c.detail;
      text += "\n";
    }
    if (report != nullptr) *report = dup(text);
  });
  if (status != REX_OK) return status;
  return all ? REX_OK : fail(REX_E_INTERNAL, "self test failed");
}

}  // extern "C"
