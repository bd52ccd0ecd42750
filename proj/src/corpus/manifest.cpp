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

#include <regex>
#include <set>

#include "rex/corpus.hpp"
#include "rex/error.hpp"
#include "rex/soltx/lexer.hpp"
#include "util/files.hpp"

namespace rex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& field, const std::string& reason) {
  throw Error(ErrorCode::kSchemaViolation, field + ": " + reason);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool is_semver(const std::string& v) {
  static const std::regex kSemver(R"(\d+\.\d+\.\d+)");
  return std::regex_match(v, kSemver);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) schema(where + "." + key, "missing");
  return obj.at(key);
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) schema(field, "expected a string");
  return v.get<std::string>();
}

double get_positive(const json& v, const std::string& field) {
  if (!v.is_number()) schema(field, "expected a number");
  const double d = v.get<double>();
  if (!(d > 0)) schema(field, "must be positive");
  return d;
}

int get_int(const json& v, const std::string& field, int min) {
  if (!v.is_number_integer()) schema(field, "expected an integer");
  const auto i = v.get<long long>();
  if (i < min || i > 1'000'000) {
    schema(field, "must be at least " + std::to_string(min));
  }
  return static_cast<int>(i);
}

fs::path get_path(const json& v, const std::string& field, const fs::path& base) {
  const std::string s = get_string(v, field);
  if (s.empty()) return {};
  fs::path p(s);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

HeuristicRules parse_heuristics(const json& j) {
  if (!j.is_object()) schema("config.revert_heuristics", "expected an object");
  HeuristicRules rules;
  for (const auto& [label, rule] : j.items()) {
    const std::string field = "config.revert_heuristics." + label;
    VulnClass cls;
    try {
      cls = parse_vuln_class(label);
    } catch (const Error&) {
      schema(field, "unknown vulnerability class");
    }
    if (!heuristic_eligible(cls)) {
      schema(field, "revert heuristic only applies to DoS, Reentrancy and Arithmetic");
    }
    if (!rule.is_object()) schema(field, "expected an object");
    HeuristicRule r;
    for (const auto& [key, list] : rule.items()) {
      std::vector<std::string>* dst = nullptr;
      if (key == "signals") dst = &r.signal_patterns;
      else if (key == "reverted_calls") dst = &r.reverted_call_patterns;
      else schema(field + "." + key, "unknown key");
      if (!list.is_array()) schema(field + "." + key, "expected an array");
      for (const json& p : list) {
        const std::string s = get_string(p, field + "." + key);
        if (s.empty()) schema(field + "." + key, "empty pattern");
        dst->push_back(s);
      }
    }
    rules[cls] = std::move(r);
  }
  return rules;
}

json heuristics_json(const HeuristicRules& rules) {
  json j = json::object();
  for (const auto& [cls, r] : rules) {
    j[std::string(vuln_class_id(cls))] = {{"signals", r.signal_patterns},
                                          {"reverted_calls", r.reverted_call_patterns}};
  }
  return j;
}

}  // namespace

std::string Directive::tag() const {
  switch (kind) {
    case Kind::kStripComments:
      return "strip_comments";
    case Kind::kMigratePragma:
      return version.empty() ? "migrate_pragma" : "migrate_pragma:" + version;
    case Kind::kWrapUnchecked: {
      std::string out = "wrap_unchecked:";
      for (std::size_t i = 0; i < functions.size(); ++i) {
        if (i) out += ",";
        out += functions[i];
      }
      return out;
    }
  }
  return {};
}

Directive parse_directive(const std::string& tag) {
  const std::size_t colon = tag.find(':');
  const std::string head = tag.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : tag.substr(colon + 1);
  Directive d;
  if (head == "strip_comments" && colon == std::string::npos) {
    d.kind = Directive::Kind::kStripComments;
    return d;
  }
  if (head == "migrate_pragma") {
    d.kind = Directive::Kind::kMigratePragma;
    if (colon != std::string::npos) {
      if (!is_semver(arg)) schema("preprocess", "'" + tag + "' needs major.minor.patch");
      d.version = arg;
    }
    return d;
  }
  if (head == "wrap_unchecked" && colon != std::string::npos) {
    d.kind = Directive::Kind::kWrapUnchecked;
    for (const std::string& raw : split(arg, ',')) {
      const std::string name = trim(raw);
      if (!soltx::is_identifier(name)) {
        schema("preprocess", "'" + tag + "' has a bad function name '" + name + "'");
      }
      d.functions.push_back(name);
    }
    return d;
  }
  schema("preprocess", "unrecognized directive '" + tag + "'");
}

HeuristicRules default_heuristic_rules() {
  HeuristicRules rules;
  rules[VulnClass::kArithmetic] = {{"(0x11)"}, {}};
  const HeuristicRule gas_or_withdraw{{"out of gas", "OutOfGas"}, {"withdraw"}};
  rules[VulnClass::kDoS] = gas_or_withdraw;
  rules[VulnClass::kReentrancy] = gas_or_withdraw;
  return rules;
}

bool heuristic_eligible(VulnClass c) {
  return c == VulnClass::kDoS || c == VulnClass::kReentrancy ||
         c == VulnClass::kArithmetic;
}

std::string_view backend_kind_name(BackendKind k) {
  switch (k) {
    case BackendKind::kHttpChat: return "http_chat";
    case BackendKind::kScripted: return "scripted";
    case BackendKind::kNull: return "null";
  }
  return "?";
}

void apply_config_json(CampaignConfig& c, const json& j, const fs::path& base) {
  if (!j.is_object()) schema("config", "expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string f = "config." + key;
    if (key == "backend") {
      const std::string kind = get_string(v, f);
      if (kind == "http_chat") c.backend = BackendKind::kHttpChat;
      else if (kind == "scripted") c.backend = BackendKind::kScripted;
      else if (kind == "null") c.backend = BackendKind::kNull;
      else schema(f, "expected http_chat, scripted or null");
    } else if (key == "backend_id") {
      c.backend_id = get_string(v, f);
      if (c.backend_id.empty()) schema(f, "must not be empty");
    } else if (key == "model_name") {
      c.model_name = get_string(v, f);
    } else if (key == "max_retries") {
      c.max_retries = get_int(v, f, 0);
    } else if (key == "parallelism") {
      c.parallelism = get_int(v, f, 1);
    } else if (key == "build_timeout_s") {
      c.build_timeout_s = get_positive(v, f);
    } else if (key == "test_timeout_s") {
      c.test_timeout_s = get_positive(v, f);
    } else if (key == "workdir_root") {
      c.workdir_root = get_path(v, f, base);
      if (c.workdir_root.empty()) schema(f, "must not be empty");
    } else if (key == "apply_optimizations") {
      if (!v.is_boolean()) schema(f, "expected a boolean");
      c.apply_optimizations = v.get<bool>();
    } else if (key == "solc_version") {
      c.solc_version = get_string(v, f);
      if (!is_semver(c.solc_version)) schema(f, "expected major.minor.patch");
    } else if (key == "fixtures_dir") {
      c.fixtures_dir = get_path(v, f, base);
    } else if (key == "base_url") {
      c.base_url = get_string(v, f);
    } else if (key == "temperature") {
      if (!v.is_number() || v.get<double>() < 0) schema(f, "expected a number >= 0");
      c.temperature = v.get<double>();
    } else if (key == "max_tokens") {
      c.max_tokens = get_int(v, f, 1);
    } else if (key == "requests_per_minute") {
      if (!v.is_number() || v.get<double>() < 0) schema(f, "expected a number >= 0");
      c.requests_per_minute = v.get<double>();
    } else if (key == "http_timeout_s") {
      c.http_timeout_s = get_positive(v, f);
    } else if (key == "http_retries") {
      c.http_retries = get_int(v, f, 0);
    } else if (key == "prompt_dir") {
      c.prompt_dir = get_path(v, f, base);
    } else if (key == "forge_bin") {
      c.forge_bin = get_path(v, f, base);
    } else if (key == "forge_std_dir") {
      c.forge_std_dir = get_path(v, f, base);
    } else if (key == "revert_heuristics") {
      c.revert_heuristics = parse_heuristics(v);
    } else {
      schema(f, "unknown key");
    }
  }
  if (j.contains("backend") && !j.contains("backend_id")) {
    c.backend_id = std::string(backend_kind_name(c.backend));
  }
}

json config_to_json(const CampaignConfig& c) {
  return {
      {"backend", backend_kind_name(c.backend)},
      {"backend_id", c.backend_id},
      {"model_name", c.model_name},
      {"max_retries", c.max_retries},
      {"parallelism", c.parallelism},
      {"build_timeout_s", c.build_timeout_s},
      {"test_timeout_s", c.test_timeout_s},
      {"workdir_root", c.workdir_root.string()},
      {"apply_optimizations", c.apply_optimizations},
      {"solc_version", c.solc_version},
      {"fixtures_dir", c.fixtures_dir.string()},
      {"base_url", c.base_url},
      {"temperature", c.temperature},
      {"max_tokens", c.max_tokens},
      {"requests_per_minute", c.requests_per_minute},
      {"http_timeout_s", c.http_timeout_s},
      {"http_retries", c.http_retries},
      {"prompt_dir", c.prompt_dir.string()},
      {"forge_bin", c.forge_bin.string()},
      {"forge_std_dir", c.forge_std_dir.string()},
      {"revert_heuristics", heuristics_json(c.revert_heuristics)},
  };
}

Manifest load_manifest(const fs::path& path) {
  Manifest m;
  m.path = fs::absolute(path).lexically_normal();
  const fs::path base = m.path.parent_path();
  const std::string text = util::read_file(m.path);

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema("manifest", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema("manifest", "expected an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "version" && key != "config" && key != "cases") schema(key, "unknown key");
  }
  const json& version = require(doc, "version", "manifest");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    schema("version", "only version 1 is supported");
  }

  // Relative defaults resolve against the manifest directory too.
  m.config.workdir_root = base / m.config.workdir_root;
  m.config.fixtures_dir = base / m.config.fixtures_dir;
  m.config.forge_std_dir = base / m.config.forge_std_dir;
  if (doc.contains("config")) apply_config_json(m.config, doc.at("config"), base);

  const json& cases = require(doc, "cases", "manifest");
  if (!cases.is_array()) schema("cases", "expected an array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const json& c = cases[i];
    const std::string where = "cases[" + std::to_string(i) + "]";
    if (!c.is_object()) schema(where, "expected an object");
    for (const auto& [key, _] : c.items()) {
      if (key != "case_id" && key != "source" && key != "vuln_class" &&
          key != "preprocess" && key != "provenance") {
        schema(where + "." + key, "unknown key");
      }
    }
    ContractCase cc;
    cc.case_id = get_string(require(c, "case_id", where), where + ".case_id");
    if (cc.case_id.empty() || cc.case_id.find_first_of("/\\") != std::string::npos ||
        cc.case_id == "." || cc.case_id == "..") {
      schema(where + ".case_id", "must be a non-empty file-name-safe string");
    }
    if (!seen.insert(cc.case_id).second) {
      throw Error(ErrorCode::kDuplicateCaseId, cc.case_id);
    }
    cc.vuln_class = parse_vuln_class(
        get_string(require(c, "vuln_class", where), where + ".vuln_class"));

    const std::string rel = get_string(require(c, "source", where), where + ".source");
    if (rel.empty()) schema(where + ".source", "must not be empty");
    cc.source_path = get_path(c.at("source"), where + ".source", base);
    cc.source_text = util::read_file(cc.source_path);
    if (cc.source_text.empty()) schema(where + ".source", "source file is empty");
    try {
      soltx::lex(cc.source_text);
    } catch (const Error& e) {
      schema(where + ".source", std::string("does not lex: ") + e.what());
    }

    if (c.contains("preprocess")) {
      const json& pre = c.at("preprocess");
      if (!pre.is_array()) schema(where + ".preprocess", "expected an array");
      for (const json& tag : pre) {
        cc.preprocess.push_back(parse_directive(get_string(tag, where + ".preprocess")));
      }
    }
    if (c.contains("provenance")) {
      cc.provenance = get_string(c.at("provenance"), where + ".provenance");
    }
    m.cases.push_back(std::move(cc));
  }
  return m;
}

}  // namespace rex
