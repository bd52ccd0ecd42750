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

#include "rex/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "rex/error.hpp"
#include "rex/soltx/lexer.hpp"
#include "rex/soltx/structure.hpp"
#include "rex/soltx/transforms.hpp"
#include "spdlog/spdlog.h"
#include "util/files.hpp"

namespace rex::analytics {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::size_t count_nonblank_lines(std::string_view text) {
  std::size_t n = 0;
  bool content = false;
  for (char c : text) {
    if (c == '\n') {
      n += content;
      content = false;
    } else if (c != ' ' && c != '\t' && c != '\r' && c != '\f' && c != '\v') {
      content = true;
    }
  }
  return n + content;
}

bool is_branch(const soltx::TokenStream& ts, std::size_t i) {
  const soltx::Token& t = ts[i];
  if (t.kind == soltx::TokenKind::kKeyword) {
    const std::string_view w = ts.text(i);
    return w == "if" || w == "for" || w == "while" || w == "do" || w == "catch";
  }
  if (t.kind == soltx::TokenKind::kPunct) {
    const std::string_view p = ts.text(i);
    return p == "?" || p == "&&" || p == "||";
  }
  return false;
}

// State mutability `payable` after the parameter list, so `address payable`
// parameters do not count.
bool header_is_payable(const soltx::TokenStream& ts, const soltx::FunctionInfo& f) {
  std::size_t i = f.keyword_index + 1;
  while (i < ts.size() && !ts.is_punct(i, "(")) ++i;
  const auto close = i < ts.size() ? ts.matching(i) : std::nullopt;
  if (!close) return false;
  for (std::size_t j = *close + 1; j < ts.size(); ++j) {
    if (f.body_open && j >= *f.body_open) break;
    if (ts.is_punct(j, ";") || ts.is_punct(j, "{")) break;
    if (ts.is_punct(j, "(")) {
      const auto m = ts.matching(j);
      if (!m) break;
      j = *m;
      continue;
    }
    if (ts.is(j, soltx::TokenKind::kKeyword, "payable")) return true;
  }
  return false;
}

}  // namespace

StructuralMetrics compute_metrics(std::string_view source) {
  const soltx::TokenStream ts = soltx::lex(std::string(source));
  StructuralMetrics m;
  m.nsloc = count_nonblank_lines(soltx::strip_comments(source));

  // Constructors, modifiers, fallback and receive count as functions here.
  for (const soltx::FunctionInfo& f : soltx::find_functions(ts)) {
    if (f.body_open && f.body_close) {
      std::size_t score = 1;
      int depth = 0;
      int max_depth = 0;
      for (std::size_t i = *f.body_open + 1; i < *f.body_close; ++i) {
        if (is_branch(ts, i)) ++score;
        if (ts.is_punct(i, "{")) max_depth = std::max(max_depth, ++depth);
        else if (ts.is_punct(i, "}")) --depth;
      }
      m.complexity_score += score + static_cast<std::size_t>(max_depth);
    }
    if (f.keyword != "modifier" && header_is_payable(ts, f)) m.has_payable_func = true;
  }

  static const std::set<std::string_view> kCallMembers = {"call", "delegatecall",
                                                          "staticcall", "send", "transfer"};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i].is_trivia()) continue;
    if (ts.is(i, soltx::TokenKind::kKeyword, "assembly")) m.has_inline_assembly = true;
    if (!ts.is_punct(i, ".")) continue;
    const auto next = ts.next_significant(i);
    if (next && (ts[*next].kind == soltx::TokenKind::kIdentifier ||
                 ts[*next].kind == soltx::TokenKind::kKeyword) &&
        kCallMembers.count(ts.text(*next))) {
      ++m.external_calls;
    }
  }

  const std::vector<soltx::ContractInfo> contracts = soltx::find_contracts(ts);
  std::map<std::string, const soltx::ContractInfo*> by_name;
  for (const auto& c : contracts) by_name.emplace(c.name, &c);
  std::map<std::string, int> memo;
  std::set<std::string> visiting;
  std::function<int(const std::string&)> depth_of = [&](const std::string& name) -> int {
    if (auto it = memo.find(name); it != memo.end()) return it->second;
    const auto it = by_name.find(name);
    if (it == by_name.end() || !visiting.insert(name).second) return 0;  // external or cyclic
    int best = 0;
    for (const std::string& base : it->second->bases) best = std::max(best, depth_of(base));
    visiting.erase(name);
    return memo[name] = best + 1;
  };
  for (const auto& c : contracts) m.inheritance_depth = std::max(m.inheritance_depth, depth_of(c.name));
  return m;
}

nlohmann::json to_json(const StructuralMetrics& m) {
  return {{"nsloc", m.nsloc},
          {"complexity_score", m.complexity_score},
          {"external_calls", m.external_calls},
          {"inheritance_depth", m.inheritance_depth},
          {"has_inline_assembly", m.has_inline_assembly},
          {"has_payable_func", m.has_payable_func}};
}

Binning quantile_bins(const std::vector<double>& values, std::size_t q) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "quantile_bins: no values");
  if (q < 2) throw Error(ErrorCode::kInvalidArgument, "quantile_bins: q must be >= 2");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  // Tie groups in ascending order with the raw bin of their lowest rank.
  std::vector<std::size_t> group_of(n);
  std::vector<std::size_t> raw;
  for (std::size_t r = 0; r < n; ++r) {
    if (r == 0 || values[order[r]] != values[order[r - 1]]) raw.push_back(r * q / n);
    group_of[order[r]] = raw.size() - 1;
  }
  const std::size_t groups = raw.size();
  const std::size_t target = std::min(q, groups);

  // Non-decreasing, gap-free and ending on target-1: every bin non-empty.
  std::vector<std::size_t> fin(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    if (g == 0) {
      fin[g] = 0;
      continue;
    }
    const std::size_t must = target > groups - g ? target - (groups - g) : 0;
    const std::size_t want = std::max({fin[g - 1], raw[g], must});
    fin[g] = std::min({want, fin[g - 1] + 1, target - 1});
  }

  Binning b;
  b.bin.resize(n);
  for (std::size_t i = 0; i < n; ++i) b.bin[i] = fin[group_of[i]];
  b.bin_count = target;
  b.degenerate = groups == 1;
  b.collapsed = groups < q;
  if (b.degenerate) {
    spdlog::warn("quantile_bins: all {} values are equal; using a single bin", n);
  } else if (b.collapsed) {
    spdlog::warn("quantile_bins: {} distinct values for {} bins; using {}", groups, q, target);
  }
  return b;
}

Binning manual_bins(const std::vector<double>& values, const std::vector<double>& upper_edges) {
  for (std::size_t i = 1; i < upper_edges.size(); ++i) {
    if (!(upper_edges[i - 1] < upper_edges[i])) {
      throw Error(ErrorCode::kInvalidArgument, "manual_bins: edges must increase");
    }
  }
  Binning b;
  std::set<std::size_t> used;
  for (double v : values) {
    const std::size_t k = static_cast<std::size_t>(
        std::lower_bound(upper_edges.begin(), upper_edges.end(), v) - upper_edges.begin());
    b.bin.push_back(k);
    used.insert(k);
  }
  b.bin_count = used.size();
  b.degenerate = used.size() <= 1;
  b.collapsed = used.size() < upper_edges.size() + 1;
  return b;
}

std::uint64_t ContingencyTable::n() const {
  std::uint64_t n = 0;
  for (const auto& row : cells) n = std::accumulate(row.begin(), row.end(), n);
  return n;
}

double chi_squared(const ContingencyTable& table) {
  const std::size_t r = table.cells.size();
  const std::size_t c = r ? table.cells[0].size() : 0;
  if (r < 2 || c < 2) {
    throw Error(ErrorCode::kDegenerateTable, "need at least 2x2, got " + std::to_string(r) +
                                                 "x" + std::to_string(c));
  }
  std::vector<double> row_total(r, 0), col_total(c, 0);
  for (std::size_t i = 0; i < r; ++i) {
    if (table.cells[i].size() != c) {
      throw Error(ErrorCode::kDegenerateTable, "row " + std::to_string(i) + " is ragged");
    }
    for (std::size_t j = 0; j < c; ++j) {
      row_total[i] += static_cast<double>(table.cells[i][j]);
      col_total[j] += static_cast<double>(table.cells[i][j]);
    }
  }
  const double n = std::accumulate(row_total.begin(), row_total.end(), 0.0);
  if (n == 0) throw Error(ErrorCode::kDegenerateTable, "table is empty");
  for (std::size_t i = 0; i < r; ++i) {
    if (row_total[i] == 0) throw Error(ErrorCode::kZeroMarginal, "row " + std::to_string(i));
  }
  for (std::size_t j = 0; j < c; ++j) {
    if (col_total[j] == 0) throw Error(ErrorCode::kZeroMarginal, "column " + std::to_string(j));
  }
  double chi2 = 0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double expected = row_total[i] * col_total[j] / n;
      const double d = static_cast<double>(table.cells[i][j]) - expected;
      chi2 += d * d / expected;
    }
  }
  return chi2;
}

AssociationResult cramers_v(const ContingencyTable& table) {
  AssociationResult a;
  a.chi2 = chi_squared(table);
  a.n = table.n();
  a.k = std::min(table.cells.size(), table.cells[0].size());
  a.v = std::sqrt(a.chi2 / (static_cast<double>(a.n) * static_cast<double>(a.k - 1)));
  return a;
}

ContingencyTable cross_tabulate(const std::vector<std::string>& categories,
                                const std::vector<bool>& outcome) {
  if (categories.size() != outcome.size()) {
    throw Error(ErrorCode::kInvalidArgument, "cross_tabulate: length mismatch");
  }
  ContingencyTable t;
  t.col_labels = {"success", "failure"};
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < categories.size(); ++i) {
    auto [it, fresh] = row_of.emplace(categories[i], t.row_labels.size());
    if (fresh) {
      t.row_labels.push_back(categories[i]);
      t.cells.push_back({0, 0});
    }
    ++t.cells[it->second][outcome[i] ? 0 : 1];
  }
  return t;
}

std::optional<double> SuccessRow::rate_pct() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(successes) / static_cast<double>(total);
}

std::string SuccessRow::cell() const {
  const auto rate = rate_pct();
  return std::to_string(successes) + "/" + std::to_string(total) + " (" +
         (rate ? fixed(*rate, 1) + "%" : std::string("n/a")) + ")";
}

std::optional<double> SuccessTable::average_pct() const {
  double sum = 0;
  std::size_t k = 0;
  for (const SuccessRow& r : rows) {
    if (const auto rate = r.rate_pct()) {
      sum += *rate;
      ++k;
    }
  }
  if (k == 0) return std::nullopt;
  return sum / static_cast<double>(k);
}

std::string SuccessTable::average_cell() const {
  const auto avg = average_pct();
  return avg ? fixed(*avg, 1) + "%" : "n/a";
}

SuccessTable aggregate_success(const std::vector<CaseResult>& results,
                               const std::vector<VulnClass>& classes) {
  SuccessTable t;
  for (VulnClass c : classes) t.rows.push_back({c, 0, 0});
  for (const CaseResult& r : results) {
    for (SuccessRow& row : t.rows) {
      if (row.vuln_class != r.vuln_class) continue;
      ++row.total;
      row.successes += is_success(r.status);
    }
  }
  return t;
}

SuccessTable success_table(
    const std::vector<std::pair<VulnClass, std::pair<std::size_t, std::size_t>>>& counts) {
  SuccessTable t;
  for (const auto& [c, st] : counts) {
    if (st.first > st.second) {
      throw Error(ErrorCode::kInvalidArgument, "more successes than cases for " +
                                                   std::string(vuln_class_id(c)));
    }
    t.rows.push_back({c, st.first, st.second});
  }
  return t;
}

std::string render_success_markdown(
    const std::vector<std::pair<std::string, SuccessTable>>& columns) {
  if (columns.empty()) return "";
  const std::vector<SuccessRow>& first = columns.front().second.rows;
  for (const auto& [name, table] : columns) {
    bool same = table.rows.size() == first.size();
    for (std::size_t i = 0; same && i < first.size(); ++i) {
      same = table.rows[i].vuln_class == first[i].vuln_class;
    }
    if (!same) throw Error(ErrorCode::kInvalidArgument, "column " + name + " lists other classes");
  }
  std::string out = "| Vulnerability Type |";
  std::string rule = "|---|";
  for (const auto& [name, table] : columns) {
    out += " " + name + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (std::size_t i = 0; i < first.size(); ++i) {
    out += "| " + std::string(vuln_class_title(first[i].vuln_class)) + " |";
    for (const auto& [name, table] : columns) out += " " + table.rows[i].cell() + " |";
    out += "\n";
  }
  out += "| Average Success Rate |";
  for (const auto& [name, table] : columns) out += " " + table.average_cell() + " |";
  return out + "\n";
}

std::vector<FeatureAssociation> association_report(const std::vector<CaseFeatures>& cases,
                                                   const AssociationOptions& options) {
  std::vector<bool> outcome;
  for (const auto& c : cases) outcome.push_back(c.exploited);
  const bool outcome_varies =
      std::find(outcome.begin(), outcome.end(), !outcome.empty() && !outcome[0]) !=
      outcome.end();

  const auto numeric = [&](auto field) {
    std::vector<double> v;
    for (const auto& c : cases) v.push_back(static_cast<double>(field(c.metrics)));
    return v;
  };
  const auto labels_of = [](const Binning& b) {
    std::vector<std::string> out;
    for (std::size_t x : b.bin) out.push_back(Binning::label(x));
    return out;
  };

  std::vector<std::pair<std::string, std::vector<std::string>>> features;
  std::vector<std::string> notes(6);
  if (!cases.empty()) {
    const Binning nsloc =
        quantile_bins(numeric([](const auto& m) { return m.nsloc; }), options.quantiles);
    const Binning score = quantile_bins(
        numeric([](const auto& m) { return m.complexity_score; }), options.quantiles);
    const Binning calls = manual_bins(numeric([](const auto& m) { return m.external_calls; }),
                                      options.external_call_edges);
    if (nsloc.collapsed) notes[0] = "fewer distinct values than bins";
    if (score.collapsed) notes[1] = "fewer distinct values than bins";
    features.push_back({"nSLOC (Quantile-Binned)", labels_of(nsloc)});
    features.push_back({"Complexity Score (Quantile-Binned)", labels_of(score)});
    features.push_back({"ExternalCallsCount (Manually Binned)", labels_of(calls)});
    std::vector<std::string> inh, asmb, pay;
    for (const auto& c : cases) {
      inh.push_back(std::to_string(c.metrics.inheritance_depth));
      asmb.push_back(c.metrics.has_inline_assembly ? "true" : "false");
      pay.push_back(c.metrics.has_payable_func ? "true" : "false");
    }
    features.push_back({"InheritanceDepth", inh});
    features.push_back({"HasInlineAssembly", asmb});
    features.push_back({"PayableFunc", pay});
  } else {
    for (const char* f : {"nSLOC (Quantile-Binned)", "Complexity Score (Quantile-Binned)",
                          "ExternalCallsCount (Manually Binned)", "InheritanceDepth",
                          "HasInlineAssembly", "PayableFunc"}) {
      features.push_back({f, {}});
    }
  }

  std::vector<FeatureAssociation> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    FeatureAssociation row;
    row.feature = features[i].first;
    const ContingencyTable t = cross_tabulate(features[i].second, outcome);
    row.categories = t.row_labels.size();
    if (cases.size() < 2) {
      row.note = "fewer than 2 cases";
    } else if (row.categories < 2) {
      row.note = "no variation";
    } else if (!outcome_varies) {
      row.note = "outcome has no variation";
    } else {
      row.result = cramers_v(t);
      row.note = notes[i];
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string association_csv(const std::vector<FeatureAssociation>& rows) {
  // Feature names never contain commas or quotes.
  std::string out = "feature,cramers_v,chi2,n,k,categories,note\n";
  for (const auto& r : rows) {
    out += r.feature + ",";
    if (r.result) {
      out += fixed(r.result->v, 3) + "," + fixed(r.result->chi2, 6) + "," +
             std::to_string(r.result->n) + "," + std::to_string(r.result->k);
    } else {
      out += "N/A,,,";
    }
    out += "," + std::to_string(r.categories) + "," + r.note + "\n";
  }
  return out;
}

std::string association_markdown(const std::vector<FeatureAssociation>& rows,
                                 const AssociationOptions& options) {
  std::string out = "| Feature | Cramér's V |\n|---|---|\n";
  for (const auto& r : rows) {
    out += "| " + r.feature + " | " + (r.result ? fixed(r.result->v, 3) : "N/A") + " |\n";
  }
  std::string edges;
  for (double e : options.external_call_edges) edges += (edges.empty() ? "" : ", ") + fixed(e, 0);
  out += "\nnSLOC and Complexity Score use " + std::to_string(options.quantiles) +
         " rank-quantile bins; ExternalCallsCount uses fixed upper edges {" + edges +
         "} with an open top bin. The discretization is a project choice and shifts V.\n";
  return out;
}

std::vector<CaseFeatures> load_case_features(const std::vector<CaseResult>& results,
                                             const std::filesystem::path& source_dir) {
  std::vector<CaseFeatures> out;
  out.reserve(results.size());
  for (const CaseResult& r : results) {
    std::filesystem::path path = source_dir / r.case_id / "Target.sol";
    if (!std::filesystem::exists(path)) path = source_dir / (r.case_id + ".sol");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorCode::kMissingFile,
                  "no source for case " + r.case_id + " under " + source_dir.string());
    }
    out.push_back({r.case_id, compute_metrics(util::read_file(path)), is_success(r.status)});
  }
  return out;
}

}  // namespace rex::analytics
