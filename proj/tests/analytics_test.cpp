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

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "rex/error.hpp"
#include "support/mini_corpus.hpp"
#include "support/table1.hpp"
#include "support/temp_dir.hpp"

namespace rex::analytics {
namespace {

using testing::slurp;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

ContingencyTable table(std::vector<std::vector<std::uint64_t>> cells) {
  ContingencyTable t;
  t.cells = std::move(cells);
  return t;
}

// Hand-counted: 20 lines, 2 comment lines, 1 blank.
TEST(Metrics, TwentyLineFixture) {
  const StructuralMetrics m =
      compute_metrics(slurp(std::string(REX_TEST_DATA_DIR) + "/metrics/twenty_lines.sol"));
  EXPECT_EQ(m.nsloc, 17u);
  // deposit 1; withdraw 1 + depth 1 from `{value: amount}`; sweep 1 + if + &&.
  EXPECT_EQ(m.complexity_score, 6u);
  EXPECT_EQ(m.external_calls, 2u);  // .call and .transfer
  EXPECT_EQ(m.inheritance_depth, 1);
  EXPECT_FALSE(m.has_inline_assembly);
  EXPECT_TRUE(m.has_payable_func);
}

TEST(Metrics, SingleCallSite) {
  const StructuralMetrics m = compute_metrics(
      "contract P {\n"
      "  // to.call{value: v}(\"\") in a comment\n"
      "  string s = \"x.call(y)\";\n"
      "  function pay(address to, uint v) external {\n"
      "    (bool ok, ) = to.call{value: v}(\"\");\n"
      "    require(ok);\n"
      "  }\n"
      "}\n");
  EXPECT_EQ(m.external_calls, 1u);
}

TEST(Metrics, InheritanceChainWithinFile) {
  EXPECT_EQ(compute_metrics("contract A {}\ncontract B is A {}\n").inheritance_depth, 2);
  EXPECT_EQ(compute_metrics("contract A {}\n").inheritance_depth, 1);
  EXPECT_EQ(compute_metrics("contract A {}\ncontract B is A {}\ncontract C is B, A {}\n")
                .inheritance_depth,
            3);
  // Bases outside the file do not count.
  EXPECT_EQ(compute_metrics("import \"./O.sol\";\ncontract B is Ownable {}\n").inheritance_depth,
            1);
  EXPECT_EQ(compute_metrics("contract A is B {}\ncontract B is A {}\n").inheritance_depth, 2);
}

TEST(Metrics, PayableMeansStateMutability) {
  EXPECT_FALSE(compute_metrics("contract C { function f(address payable to) external { to; } }")
                   .has_payable_func);
  EXPECT_TRUE(compute_metrics("contract C { function f() external payable {} }").has_payable_func);
  EXPECT_TRUE(compute_metrics("contract C { receive() external payable {} }").has_payable_func);
  EXPECT_TRUE(compute_metrics("contract C { constructor() payable {} }").has_payable_func);
  EXPECT_FALSE(compute_metrics("contract C { address payable owner; }").has_payable_func);
}

TEST(Metrics, InlineAssemblyIgnoresCommentsAndStrings) {
  EXPECT_TRUE(compute_metrics("contract C { function f() external { assembly { let x := 1 } } }")
                  .has_inline_assembly);
  EXPECT_FALSE(
      compute_metrics("contract C { // assembly\n string s = \"assembly\"; }").has_inline_assembly);
}

TEST(Metrics, BranchTokensAndNesting) {
  const StructuralMetrics m = compute_metrics(
      "contract C {\n"
      "  function f(uint x) external pure returns (uint) {\n"
      "    for (uint i; i < x; i++) { if (i > 2 || i == 1) { while (x > 0) { x--; } } }\n"
      "    do { x++; } while (x < 3);\n"
      "    return x > 1 ? x : 0;\n"
      "  }\n"
      "  modifier m() { _; }\n"
      "}\n");
  // f: 1 + for if || while do while ? = 8, depth 3; m: 1.
  EXPECT_EQ(m.complexity_score, 1u + 7u + 3u + 1u);
}

TEST(Metrics, MonotoneUnderFunctionAddition) {
  for (const auto& entry : testing::mini_corpus()) {
    SCOPED_TRACE(std::string(entry.name));
    const std::string src(entry.source);
    const StructuralMetrics before = compute_metrics(src);
    const StructuralMetrics after = compute_metrics(
        src + "\nfunction extraHelper(uint256 x) pure returns (uint256) {\n  return x;\n}\n");
    EXPECT_GT(after.nsloc, before.nsloc);
    EXPECT_GT(after.complexity_score, before.complexity_score);
  }
}

TEST(Metrics, PropagatesLexerErrors) {
  EXPECT_EQ(code_of([] { compute_metrics("contract C { /* open"); }),
            ErrorCode::kUnterminatedComment);
}

TEST(QuantileBins, RankTerciles) {
  const Binning b = quantile_bins({1, 2, 3, 4, 5, 6, 7, 8, 9}, 3);
  EXPECT_EQ(b.bin, (std::vector<std::size_t>{0, 0, 0, 1, 1, 1, 2, 2, 2}));
  EXPECT_EQ(b.bin_count, 3u);
  EXPECT_FALSE(b.degenerate);
  EXPECT_EQ(Binning::label(0), "q1");
  // Input order does not matter.
  EXPECT_EQ(quantile_bins({9, 1, 5, 3, 7, 2, 8, 4, 6}, 3).bin,
            (std::vector<std::size_t>{2, 0, 1, 0, 2, 0, 2, 1, 1}));
}

TEST(QuantileBins, TiesShareTheLowerBin) {
  const Binning b = quantile_bins({1, 1, 1, 2, 3, 4}, 2);
  EXPECT_EQ(b.bin, (std::vector<std::size_t>{0, 0, 0, 1, 1, 1}));
}

TEST(QuantileBins, AllEqualIsDegenerate) {
  const Binning b = quantile_bins({5, 5, 5, 5}, 3);
  EXPECT_TRUE(b.degenerate);
  EXPECT_EQ(b.bin_count, 1u);
  EXPECT_EQ(b.bin, (std::vector<std::size_t>{0, 0, 0, 0}));
}

TEST(QuantileBins, NoEmptyBinsWhenInputsPermit) {
  // Raw ranks would leave q2 empty; the shift fills it.
  EXPECT_EQ(quantile_bins({1, 1, 1, 1, 2, 3}, 3).bin,
            (std::vector<std::size_t>{0, 0, 0, 0, 1, 2}));
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(1 + rng() % 25);
    for (double& x : v) x = static_cast<double>(rng() % 6);
    const std::size_t q = 2 + rng() % 4;
    const Binning b = quantile_bins(v, q);
    std::set<double> distinct(v.begin(), v.end());
    EXPECT_EQ(b.bin_count, std::min(q, distinct.size()));
    std::vector<int> seen(b.bin_count, 0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      ASSERT_LT(b.bin[i], b.bin_count);
      ++seen[b.bin[i]];
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[i] < v[j]) EXPECT_LE(b.bin[i], b.bin[j]);
        if (v[i] == v[j]) EXPECT_EQ(b.bin[i], b.bin[j]);
      }
    }
    for (int s : seen) EXPECT_GT(s, 0);
  }
}

TEST(QuantileBins, RejectsBadArguments) {
  EXPECT_EQ(code_of([] { quantile_bins({}, 3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { quantile_bins({1, 2}, 1); }), ErrorCode::kInvalidArgument);
}

TEST(ManualBins, UpperEdgesWithOpenTop) {
  const Binning b = manual_bins({0, 1, 2, 3, 10}, {0, 2});
  EXPECT_EQ(b.bin, (std::vector<std::size_t>{0, 1, 1, 2, 2}));
  EXPECT_EQ(b.bin_count, 3u);
  EXPECT_TRUE(manual_bins({1, 2}, {0, 2}).degenerate);
}

TEST(ChiSquared, HandComputedTables) {
  EXPECT_NEAR(chi_squared(table({{5, 5}, {5, 5}})), 0.0, 1e-9);
  EXPECT_NEAR(chi_squared(table({{10, 0}, {0, 10}})), 20.0, 1e-9);
  EXPECT_NEAR(chi_squared(table({{4, 1}, {1, 4}})), 3.6, 1e-9);
}

TEST(CramersV, HandComputedTables) {
  EXPECT_NEAR(cramers_v(table({{5, 5}, {5, 5}})).v, 0.0, 1e-9);
  EXPECT_NEAR(cramers_v(table({{10, 0}, {0, 10}})).v, 1.0, 1e-9);
  const AssociationResult a = cramers_v(table({{4, 1}, {1, 4}}));
  EXPECT_NEAR(a.v, 0.6, 1e-9);
  EXPECT_EQ(a.n, 10u);
  EXPECT_EQ(a.k, 2u);
  EXPECT_NEAR(a.v, std::sqrt(a.chi2 / (a.n * (a.k - 1))), 0);
}

// Frozen from scipy.stats.chi2_contingency(correction=False) and
// scipy.stats.contingency.association(method="cramer").
TEST(CramersV, MatchesReferenceOnLargerTables) {
  struct Case {
    std::vector<std::vector<std::uint64_t>> cells;
    double chi2;
    double v;
  };
  const std::vector<Case> cases = {
      {{{12, 5, 9}, {3, 14, 7}}, 9.848916160593793, 0.4438224005296216},
      {{{20, 4}, {6, 11}, {2, 9}}, 16.381037263390205, 0.5612663782669407},
      {{{7, 1, 3, 2}, {2, 8, 1, 5}, {4, 3, 9, 1}}, 19.83225468441815, 0.4642929955321287},
      {{{30, 1}, {1, 30}}, 54.25806451612903, 0.9354838709677419},
  };
  for (const Case& c : cases) {
    const AssociationResult a = cramers_v(table(c.cells));
    EXPECT_NEAR(a.chi2, c.chi2, 1e-9);
    EXPECT_NEAR(a.v, c.v, 1e-12);
  }
}

TEST(ChiSquared, MatchesClosedFormOnRandomTwoByTwo) {
  std::mt19937 rng(11);
  for (int i = 0; i < 50; ++i) {
    const double a = 1 + rng() % 40, b = 1 + rng() % 40, c = 1 + rng() % 40, d = 1 + rng() % 40;
    const double n = a + b + c + d;
    const double closed =
        n * (a * d - b * c) * (a * d - b * c) / ((a + b) * (c + d) * (a + c) * (b + d));
    const auto u = [](double x) { return static_cast<std::uint64_t>(x); };
    EXPECT_NEAR(chi_squared(table({{u(a), u(b)}, {u(c), u(d)}})), closed, 1e-9);
  }
}

TEST(CramersV, BoundedAndPermutationInvariant) {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    const std::size_t r = 2 + rng() % 3, c = 2 + rng() % 3;
    std::vector<std::vector<std::uint64_t>> cells(r, std::vector<std::uint64_t>(c));
    for (auto& row : cells) {
      for (auto& x : row) x = 1 + rng() % 20;
    }
    const double v = cramers_v(table(cells)).v;
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 + 1e-12);
    auto swapped = cells;
    std::swap(swapped[0], swapped[r - 1]);
    for (auto& row : swapped) std::swap(row[0], row[c - 1]);
    EXPECT_NEAR(cramers_v(table(swapped)).v, v, 1e-12);
  }
}

TEST(ChiSquared, RejectsDegenerateTables) {
  EXPECT_EQ(code_of([] { chi_squared(table({{1, 2}, {0, 0}})); }), ErrorCode::kZeroMarginal);
  EXPECT_EQ(code_of([] { chi_squared(table({{1, 0}, {2, 0}})); }), ErrorCode::kZeroMarginal);
  EXPECT_EQ(code_of([] { chi_squared(table({{1, 2}})); }), ErrorCode::kDegenerateTable);
  EXPECT_EQ(code_of([] { chi_squared(table({{1, 2}, {3}})); }), ErrorCode::kDegenerateTable);
  EXPECT_EQ(code_of([] { chi_squared(table({{0, 0}, {0, 0}})); }), ErrorCode::kDegenerateTable);
}

TEST(SuccessTable, ReproducesPublishedAverages) {
  for (const auto& col : testing::table1()) {
    SCOPED_TRACE(col.model);
    const std::vector<VulnClass> classes(kAllVulnClasses.begin(), kAllVulnClasses.end());
    const SuccessTable t = aggregate_success(testing::synthesize_results(col), classes);
    ASSERT_EQ(t.rows.size(), 8u);
    double sum = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      EXPECT_EQ(static_cast<int>(t.rows[i].successes), col.cells[i].first);
      EXPECT_EQ(static_cast<int>(t.rows[i].total), col.cells[i].second);
      EXPECT_NEAR(*t.rows[i].rate_pct(), col.printed_rates_pct[i], 0.05);
      sum += *t.rows[i].rate_pct();
    }
    EXPECT_NEAR(*t.average_pct(), col.printed_average_pct, 0.05);
    EXPECT_DOUBLE_EQ(*t.average_pct(), sum / 8);
    char want[16];
    std::snprintf(want, sizeof(want), "%.1f%%", col.printed_average_pct);
    EXPECT_EQ(t.average_cell(), want);
  }
}

TEST(SuccessTable, CellFormat) {
  EXPECT_EQ((SuccessRow{VulnClass::kReentrancy, 18, 30}).cell(), "18/30 (60.0%)");
  EXPECT_EQ((SuccessRow{VulnClass::kDoS, 6, 6}).cell(), "6/6 (100.0%)");
  EXPECT_EQ((SuccessRow{VulnClass::kDoS, 0, 0}).cell(), "0/0 (n/a)");
}

TEST(SuccessTable, EmptyResults) {
  const std::vector<VulnClass> classes(kAllVulnClasses.begin(), kAllVulnClasses.end());
  const SuccessTable t = aggregate_success({}, classes);
  for (const auto& r : t.rows) EXPECT_EQ(r.cell(), "0/0 (n/a)");
  EXPECT_FALSE(t.average_pct());
  EXPECT_EQ(t.average_cell(), "n/a");
}

TEST(SuccessTable, AverageSkipsEmptyClasses) {
  const SuccessTable t = success_table({{VulnClass::kReentrancy, {1, 2}},
                                        {VulnClass::kDoS, {0, 0}},
                                        {VulnClass::kArithmetic, {1, 1}}});
  EXPECT_DOUBLE_EQ(*t.average_pct(), 75.0);
  EXPECT_EQ(code_of([] { success_table({{VulnClass::kDoS, {2, 1}}}); }),
            ErrorCode::kInvalidArgument);
}

TEST(SuccessTable, MarkdownHasOneColumnPerModel) {
  std::vector<std::pair<std::string, SuccessTable>> cols;
  const std::vector<VulnClass> classes(kAllVulnClasses.begin(), kAllVulnClasses.end());
  for (const auto& col : testing::table1()) {
    cols.push_back({col.model, aggregate_success(testing::synthesize_results(col), classes)});
  }
  const std::string md = render_success_markdown(cols);
  EXPECT_NE(md.find("| Vulnerability Type | Gemini 2.5 Pro | GPT-4.1 |"), std::string::npos);
  EXPECT_NE(md.find("| Reentrancy | 18/30 (60.0%) | 18/30 (60.0%) | 19/30 (63.3%) | "
                    "10/30 (33.3%) | 6/30 (20.0%) |"),
            std::string::npos);
  EXPECT_NE(md.find("| Unchecked Low Level Calls | 17/30 (56.7%) |"), std::string::npos);
  EXPECT_NE(md.find("| Average Success Rate | 67.3% | 58.1% | 63.3% | 48.3% | 28.8% |"),
            std::string::npos);
}

CaseFeatures features(int nsloc, int score, int calls, int depth, bool payable, bool win) {
  CaseFeatures f;
  f.metrics.nsloc = nsloc;
  f.metrics.complexity_score = score;
  f.metrics.external_calls = calls;
  f.metrics.inheritance_depth = depth;
  f.metrics.has_payable_func = payable;
  f.exploited = win;
  return f;
}

TEST(Association, ConstantFeaturesAreNA) {
  std::vector<CaseFeatures> cases;
  for (int i = 0; i < 10; ++i) cases.push_back(features(100 + i, 50 + i, i % 3, 1, false, i % 2));
  const auto rows = association_report(cases);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[3].feature, "InheritanceDepth");
  EXPECT_FALSE(rows[3].result);
  EXPECT_FALSE(rows[4].result);  // no inline assembly anywhere
  EXPECT_FALSE(rows[5].result);  // no payable functions anywhere
  EXPECT_TRUE(rows[0].result);
  const std::string md = association_markdown(rows);
  EXPECT_NE(md.find("| InheritanceDepth | N/A |"), std::string::npos);
  EXPECT_NE(association_csv(rows).find("InheritanceDepth,N/A,"), std::string::npos);
}

TEST(Association, FeatureEqualToOutcomeIsPerfect) {
  std::vector<CaseFeatures> cases;
  for (int i = 0; i < 12; ++i) cases.push_back(features(100, 50, 0, 1, i % 3 == 0, i % 3 == 0));
  const auto rows = association_report(cases);
  ASSERT_TRUE(rows[5].result);
  EXPECT_NEAR(rows[5].result->v, 1.0, 1e-12);
}

TEST(Association, MatchesDirectCramersVOnSyntheticSet) {
  // 30 cases: nSLOC terciles of 10 with 8/5/2 successes.
  std::vector<CaseFeatures> cases;
  for (int i = 0; i < 30; ++i) {
    const int tercile = i / 10;
    const int wins = tercile == 0 ? 8 : tercile == 1 ? 5 : 2;
    cases.push_back(features(100 + i, 7, i % 4, 1 + (i % 2), i % 5 == 0, i % 10 < wins));
  }
  const auto rows = association_report(cases);
  ASSERT_TRUE(rows[0].result);
  const AssociationResult direct = cramers_v(table({{8, 2}, {5, 5}, {2, 8}}));
  EXPECT_NEAR(rows[0].result->v, direct.v, 1e-12);
  EXPECT_NEAR(rows[0].result->chi2, direct.chi2, 1e-9);
  EXPECT_FALSE(rows[1].result);  // complexity constant
}

TEST(Association, OutcomeWithoutVariationIsNA) {
  std::vector<CaseFeatures> cases;
  for (int i = 0; i < 6; ++i) cases.push_back(features(100 + i, 50 + i, i, 1 + i % 2, i % 2, true));
  for (const auto& row : association_report(cases)) EXPECT_FALSE(row.result) << row.feature;
  for (const auto& row : association_report({})) EXPECT_FALSE(row.result) << row.feature;
}

}  // namespace
}  // namespace rex::analytics
