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

// Source metrics, discretization, chi-squared / Cramér's V association and
// per-class success tables.

#ifndef REX_ANALYTICS_HPP_
#define REX_ANALYTICS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rex/records.hpp"

namespace rex::analytics {

struct StructuralMetrics {
  std::size_t nsloc = 0;
  // Sum over function-like bodies of 1 + branch tokens (if, for, while, do,
  // ?, &&, ||, catch) + deepest block nesting below the body braces.
  std::size_t complexity_score = 0;
  // Member accesses .call .delegatecall .staticcall .send .transfer.
  std::size_t external_calls = 0;
  int inheritance_depth = 1;  // longest in-file `is` chain, counting itself
  bool has_inline_assembly = false;
  bool has_payable_func = false;

  friend bool operator==(const StructuralMetrics&, const StructuralMetrics&) = default;
};

// Throws the lexer's errors.
StructuralMetrics compute_metrics(std::string_view source);
nlohmann::json to_json(const StructuralMetrics& m);

struct Binning {
  std::vector<std::size_t> bin;  // 0-based bin per input value
  std::size_t bin_count = 0;     // bins actually used, all non-empty
  bool degenerate = false;       // every value equal
  bool collapsed = false;        // fewer distinct values than requested bins

  static std::string label(std::size_t b) { return "q" + std::to_string(b + 1); }
};

// Rank quantiles: a value of sorted rank r goes to floor(r*q/n), ties take
// the bin of their lowest rank, then bins are shifted just enough that none
// is empty. Throws kInvalidArgument for empty input or q < 2.
Binning quantile_bins(const std::vector<double>& values, std::size_t q = 3);

// Fixed-edge bins: value v lands in the first bin whose upper edge is >= v;
// the last bin is open-ended. `upper_edges` must be increasing.
Binning manual_bins(const std::vector<double>& values, const std::vector<double>& upper_edges);

struct ContingencyTable {
  std::vector<std::vector<std::uint64_t>> cells;  // rows x cols
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  std::uint64_t n() const;
};

struct AssociationResult {
  double chi2 = 0;
  std::uint64_t n = 0;
  std::size_t k = 0;  // min(rows, cols)
  double v = 0;
};

// Pearson statistic. Throws kDegenerateTable (ragged, fewer than 2 rows or
// columns, n == 0) or kZeroMarginal naming the empty row or column.
double chi_squared(const ContingencyTable& table);
AssociationResult cramers_v(const ContingencyTable& table);

// Two-way table of category labels against a binary outcome. Rows are the
// distinct labels in first-seen order; columns are {success, failure}.
ContingencyTable cross_tabulate(const std::vector<std::string>& categories,
                                const std::vector<bool>& outcome);

struct SuccessRow {
  VulnClass vuln_class;
  std::size_t successes = 0;
  std::size_t total = 0;

  std::optional<double> rate_pct() const;
  std::string cell() const;  // "18/30 (60.0%)", or "0/0 (n/a)" when empty
};

struct SuccessTable {
  std::vector<SuccessRow> rows;
  // Unweighted mean of per-class rates over classes with total > 0.
  std::optional<double> average_pct() const;
  std::string average_cell() const;  // "67.3%" or "n/a"
};

// Success = Success or SuccessByRevertHeuristic. One row per entry of
// `classes`, in that order; results of other classes are ignored.
SuccessTable aggregate_success(const std::vector<CaseResult>& results,
                               const std::vector<VulnClass>& classes);
// Same, from (successes, total) per class.
SuccessTable success_table(const std::vector<std::pair<VulnClass, std::pair<std::size_t, std::size_t>>>& counts);

// Markdown with one column per (name, table); all tables must list the same
// classes in the same order.
std::string render_success_markdown(
    const std::vector<std::pair<std::string, SuccessTable>>& columns);

struct CaseFeatures {
  std::string case_id;
  StructuralMetrics metrics;
  bool exploited = false;
};

// Metrics of each result's target, read from <source_dir>/<case_id>/Target.sol
// or else <source_dir>/<case_id>.sol. Throws kMissingFile naming the case.
std::vector<CaseFeatures> load_case_features(const std::vector<CaseResult>& results,
                                             const std::filesystem::path& source_dir);

struct FeatureAssociation {
  std::string feature;  // e.g. "nSLOC (Quantile-Binned)"
  std::optional<AssociationResult> result;  // nullopt renders as N/A
  std::size_t categories = 0;
  std::string note;  // why the row is N/A, or binning caveats
};

struct AssociationOptions {
  std::size_t quantiles = 3;
  // Upper edges for ExternalCallsCount: {0}, {1,2}, {3,...}.
  std::vector<double> external_call_edges = {0, 2};
};

// One row per feature: nSLOC, Complexity Score, ExternalCallsCount,
// InheritanceDepth, HasInlineAssembly, PayableFunc. A feature with a single
// category, or an outcome with no variation, yields N/A. Fewer than two
// cases makes every row N/A.
std::vector<FeatureAssociation> association_report(const std::vector<CaseFeatures>& cases,
                                                   const AssociationOptions& options = {});

std::string association_csv(const std::vector<FeatureAssociation>& rows);
std::string association_markdown(const std::vector<FeatureAssociation>& rows,
                                 const AssociationOptions& options = {});

}  // namespace rex::analytics

#endif  // REX_ANALYTICS_HPP_
