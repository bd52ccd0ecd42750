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

// Command-line front end. Talks to the library only through rex/rex.h.
//
// Exit codes: 0 ok, 1 campaign finished with backend/harness errors (or a
// failed selftest), 2 usage, 3 environment (forge missing, cannot spawn),
// 4 data (bad input files, corrupt store, unlexable source).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rex/rex.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCampaignErrors = 1;
constexpr int kExitUsage = 2;
constexpr int kExitEnvironment = 3;
constexpr int kExitData = 4;

struct Owned {
  char* p = nullptr;
  ~Owned() { rex_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

// Failure of a library call, already reported on stderr.
struct Failed {
  int exit_code;
};

int exit_code_for(rex_status s) {
  switch (s) {
    case REX_OK:
      return kExitOk;
    case REX_E_FORGE_NOT_INSTALLED:
    case REX_E_SPAWN_FAILURE:
    case REX_E_TEMPLATE_MISSING:
      return kExitEnvironment;
    case REX_E_INVALID_ARGUMENT:
      return kExitUsage;
    default:
      return kExitData;
  }
}

void check(rex_status s) {
  if (s == REX_OK) return;
  std::cerr << "rex: " << rex_status_name(s) << ": " << rex_last_error() << "\n";
  throw Failed{exit_code_for(s)};
}

std::string read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "rex: cannot read " << path << "\n";
    throw Failed{kExitData};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!(out << text) || !out.flush()) {
    std::cerr << "rex: cannot write " << path << "\n";
    throw Failed{kExitData};
  }
}

// Flags shared by run and resume; unset flags leave the config alone.
struct CampaignFlags {
  std::string backend;
  std::string backend_id;
  std::string model;
  std::string base_url;
  std::string fixtures;
  std::string workdir;
  std::string forge;
  std::string forge_std;
  std::string prompts;
  std::optional<int> parallelism;
  std::optional<int> max_retries;
  std::optional<double> build_timeout;
  std::optional<double> test_timeout;
  std::optional<bool> optimize;
  std::string config_json;

  void add_to(CLI::App* app) {
    app->add_option("--backend", backend, "Generation backend")
        ->check(CLI::IsMember({"scripted", "http_chat", "null"}));
    app->add_option("--backend-id", backend_id,
                    "Backend name used for the REX_API_KEY_<ID> variable");
    app->add_option("--model", model, "Model name sent to the backend");
    app->add_option("--base-url", base_url, "Chat-completions endpoint base URL");
    app->add_option("--fixtures", fixtures, "Scripted-response directory");
    app->add_option("--forge", forge, "forge executable (else REX_FORGE_BIN, then PATH)");
    app->add_option("--forge-std", forge_std, "forge-std checkout used by scaffolded projects");
    app->add_option("--prompts", prompts, "Directory with prompt template overrides");
    app->add_option("--parallelism", parallelism, "Concurrent cases")->check(CLI::Range(1, 256));
    app->add_option("--max-retries", max_retries, "Repair rounds after the first attempt")
        ->check(CLI::Range(0, 100));
    app->add_option("--build-timeout", build_timeout, "Seconds per forge build")
        ->check(CLI::PositiveNumber);
    app->add_option("--test-timeout", test_timeout, "Seconds per forge test")
        ->check(CLI::PositiveNumber);
    app->add_flag("--optimize,!--no-optimize", optimize,
                  "Apply address checksum and payable-cast fixes to generated scripts");
    app->add_option("--config-json", config_json, "Extra config keys as a JSON object");
  }

  std::string overrides() const {
    json j = json::object();
    if (!config_json.empty()) {
      try {
        j = json::parse(config_json);
      } catch (const json::exception& e) {
        std::cerr << "rex: --config-json: " << e.what() << "\n";
        throw Failed{kExitUsage};
      }
      if (!j.is_object()) {
        std::cerr << "rex: --config-json must be a JSON object\n";
        throw Failed{kExitUsage};
      }
    }
    const auto set = [&j](const char* key, const std::string& v) {
      if (!v.empty()) j[key] = v;
    };
    set("backend", backend);
    set("backend_id", backend_id);
    set("model_name", model);
    set("base_url", base_url);
    set("fixtures_dir", fixtures);
    set("workdir_root", workdir);
    set("forge_bin", forge);
    set("forge_std_dir", forge_std);
    set("prompt_dir", prompts);
    if (parallelism) j["parallelism"] = *parallelism;
    if (max_retries) j["max_retries"] = *max_retries;
    if (build_timeout) j["build_timeout_s"] = *build_timeout;
    if (test_timeout) j["test_timeout_s"] = *test_timeout;
    if (optimize) j["apply_optimizations"] = *optimize;
    return j.dump();
  }
};

// `c` is taken by reference: it is only filled in once `s` has been computed.
int finish_campaign(rex_status s, rex_campaign*& c) {
  check(s);
  std::unique_ptr<rex_campaign, decltype(&rex_campaign_free)> owned(c, rex_campaign_free);
  return rex_campaign_had_errors(c) ? kExitCampaignErrors : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exploit generation campaigns, Solidity transforms and result analytics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rex_version()));
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "Log verbosity on stderr")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  std::string manifest;
  CampaignFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "Run every unfinished case of a manifest");
  run->add_option("--manifest", manifest, "Campaign manifest (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--workdir", run_flags.workdir, "Campaign directory (default from manifest)");
  run_flags.add_to(run);

  std::string resume_dir;
  CampaignFlags resume_flags;
  CLI::App* resume = app.add_subcommand("resume", "Continue an interrupted campaign");
  resume->add_option("--workdir", resume_dir, "Campaign directory holding campaign.json")
      ->required()
      ->check(CLI::ExistingDirectory);
  resume_flags.add_to(resume);

  std::string op, in_path, out_path = "-", version, template_path, anchor, function;
  std::vector<std::string> functions, renames;
  CLI::App* transform = app.add_subcommand("transform", "Apply one source transform to a file");
  transform->add_option("--op", op, "Transform")
      ->required()
      ->check(CLI::IsMember({"strip_comments", "migrate_pragma", "wrap_unchecked", "eip55",
                             "payable_casts", "obfuscate", "decoy", "rare_construct"}));
  transform->add_option("--in", in_path, "Input .sol file")->required()->check(CLI::ExistingFile);
  transform->add_option("--out", out_path, "Output file, - for stdout");
  transform->add_option("--solc", version, "migrate_pragma: target version");
  transform->add_option("--functions", functions, "wrap_unchecked: function names")
      ->delimiter(',');
  transform->add_option("--rename", renames, "obfuscate: old=new pairs")->delimiter(',');
  transform->add_option("--template", template_path, "decoy/rare_construct: snippet file")
      ->check(CLI::ExistingFile);
  transform->add_option("--anchor", anchor, "decoy: contract receiving the snippet");
  transform->add_option("--function", function, "rare_construct: function to rewrite");

  std::vector<std::string> metric_inputs;
  CLI::App* metrics = app.add_subcommand("metrics", "Structural metrics of .sol files as JSON");
  metrics->add_option("--in", metric_inputs, "Input .sol files")
      ->required()
      ->check(CLI::ExistingFile);

  std::string results, sources, analyze_out = ".", column = "model";
  int quantiles = 3;
  CLI::App* analyze =
      app.add_subcommand("analyze", "Write report.md and association.csv for a result log");
  analyze->add_option("--results", results, "results.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  analyze->add_option("--sources", sources,
                      "Directory with <case>/Target.sol or <case>.sol (usually the workdir)")
      ->required()
      ->check(CLI::ExistingDirectory);
  analyze->add_option("--out", analyze_out, "Output directory");
  analyze->add_option("--quantiles", quantiles, "Bins for numeric features")
      ->check(CLI::Range(2, 20));
  analyze->add_option("--model", column, "Column heading of the success table");

  std::string report_results, report_column = "model";
  CLI::App* report = app.add_subcommand("report", "Per-class success table as Markdown");
  report->add_option("--results", report_results, "results.jsonl")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--model", report_column, "Column heading");

  CLI::App* selftest =
      app.add_subcommand("selftest", "Check hashing and statistics against known answers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    check(rex_set_log_level(log_level.c_str()));

    if (*run) {
      const std::string overrides = run_flags.overrides();
      const rex_campaign_options o{overrides.c_str(), 1};
      rex_campaign* c = nullptr;
      return finish_campaign(rex_campaign_run(manifest.c_str(), &o, &c), c);
    }
    if (*resume) {
      const std::string overrides = resume_flags.overrides();
      const rex_campaign_options o{overrides.c_str(), 1};
      rex_campaign* c = nullptr;
      return finish_campaign(rex_campaign_resume(resume_dir.c_str(), &o, &c), c);
    }
    if (*transform) {
      json params = json::object();
      if (!version.empty()) params["version"] = version;
      if (!functions.empty()) params["functions"] = functions;
      if (!renames.empty()) {
        json map = json::object();
        for (const std::string& pair : renames) {
          const auto eq = pair.find('=');
          if (eq == std::string::npos || eq == 0 || eq + 1 == pair.size()) {
            std::cerr << "rex: --rename expects old=new, got '" << pair << "'\n";
            return kExitUsage;
          }
          map[pair.substr(0, eq)] = pair.substr(eq + 1);
        }
        params["rename"] = map;
      }
      if (!template_path.empty()) params["template"] = read_input(template_path);
      if (!anchor.empty()) params["anchor"] = anchor;
      if (!function.empty()) params["function"] = function;
      const std::string source = read_input(in_path);
      Owned out;
      std::size_t count = 0;
      check(rex_transform(op.c_str(), source.c_str(), params.dump().c_str(), &out.p, &count));
      write_output(out_path, out.str());
      if (op == "eip55" || op == "payable_casts") {
        std::cerr << "rex: " << op << ": " << count << " rewrite(s)\n";
      }
      return kExitOk;
    }
    if (*metrics) {
      json all = json::object();
      for (const std::string& path : metric_inputs) {
        Owned out;
        check(rex_metrics_json(read_input(path).c_str(), &out.p));
        all[path] = json::parse(out.str());
      }
      std::cout << (metric_inputs.size() == 1 ? all.begin().value() : all).dump(2) << "\n";
      return kExitOk;
    }
    if (*analyze) {
      Owned csv, assoc, table;
      check(rex_analyze(results.c_str(), sources.c_str(), quantiles, &csv.p, &assoc.p));
      check(rex_report_markdown(results.c_str(), column.c_str(), &table.p));
      std::error_code ec;
      fs::create_directories(analyze_out, ec);
      write_output((fs::path(analyze_out) / "association.csv").string(), csv.str());
      write_output((fs::path(analyze_out) / "report.md").string(),
                   "# Exploit success by vulnerability class\n\n" + table.str() +
                       "\n# Structural features and exploit success\n\n" + assoc.str());
      std::cout << csv.str();
      return kExitOk;
    }
    if (*report) {
      Owned md;
      check(rex_report_markdown(report_results.c_str(), report_column.c_str(), &md.p));
      std::cout << md.str();
      return kExitOk;
    }
    if (*selftest) {
      Owned text;
      const rex_status s = rex_selftest(&text.p);
      std::cout << text.str();
      if (s != REX_OK) {
        std::cerr << "rex: selftest: " << rex_last_error() << "\n";
        return kExitCampaignErrors;
      }
      std::cout << "all checks passed\n";
      return kExitOk;
    }
  } catch (const Failed& f) {
    return f.exit_code;
  }
  return kExitUsage;
}
