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

#include "rex/selftest.hpp"

#include <cmath>
#include <cstdio>

#include "rex/analytics.hpp"
#include "rex/soltx/keccak.hpp"
#include "rex/soltx/transforms.hpp"

namespace rex {

namespace {

void expect_equal(std::vector<SelftestCheck>& out, std::string name, const std::string& want,
                  const std::string& got) {
  SelftestCheck c{std::move(name), want == got, ""};
  if (!c.passed) c.detail = "expected " + want + ", got " + got;
  out.push_back(std::move(c));
}

void expect_near(std::vector<SelftestCheck>& out, std::string name, double want, double got,
                 double tol) {
  SelftestCheck c{std::move(name), std::fabs(want - got) <= tol, ""};
  if (!c.passed) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "expected %.12g, got %.12g", want, got);
    c.detail = buf;
  }
  out.push_back(std::move(c));
}

analytics::ContingencyTable table(std::vector<std::vector<std::uint64_t>> cells) {
  analytics::ContingencyTable t;
  t.cells = std::move(cells);
  return t;
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
  std::vector<SelftestCheck> out;
  using soltx::keccak256;
  expect_equal(out, "keccak256(\"\")",
               "c5d2460186f7233c927e7db2dcc703c0e500b653ca82273b7bfad8045d85a470",
               keccak256("").to_hex());
  expect_equal(out, "keccak256(\"abc\")",
               "4e03657aea45a94fc7d47ba826c8d667c0d1e6e33a64a036ec44f58fa12d6c45",
               keccak256("abc").to_hex());

  const std::pair<const char*, const char*> eip55[] = {
      {"0x5aaeb6053f3e94c9b9a09f33669435e7ef1beaed", "0x5aAeb6053F3E94C9b9A09f33669435E7Ef1BeAed"},
      {"0xfb6916095ca1df60bb79ce92ce3ea74c37c5d359", "0xfB6916095ca1df60bB79Ce92cE3Ea74c37c5d359"},
      {"0xdbf03b407c01e7cd3cbea99509d93f8dddc8c6fb", "0xdbF03B407c01E7cD3CBea99509d93f8DDDC8C6FB"},
      {"0xd1220a0cf47c7b9be7a2e6ba89f429762e7b9adb", "0xD1220A0cf47c7B9Be7A2E6BA89F429762e7b9aDb"},
  };
  for (const auto& [in, want] : eip55) {
    expect_equal(out, std::string("eip55 ") + want, want, soltx::to_eip55(in));
    expect_equal(out, std::string("eip55 idempotent ") + want, want, soltx::to_eip55(want));
  }

  expect_near(out, "cramers_v [[5,5],[5,5]]", 0.0,
              analytics::cramers_v(table({{5, 5}, {5, 5}})).v, 1e-9);
  expect_near(out, "cramers_v [[10,0],[0,10]]", 1.0,
              analytics::cramers_v(table({{10, 0}, {0, 10}})).v, 1e-9);
  expect_near(out, "cramers_v [[4,1],[1,4]]", 0.6,
              analytics::cramers_v(table({{4, 1}, {1, 4}})).v, 1e-9);
  // Pearson chi-squared without continuity correction, frozen from SciPy.
  expect_near(out, "chi_squared [[12,5,9],[3,14,7]]", 9.848916160593793,
              analytics::chi_squared(table({{12, 5, 9}, {3, 14, 7}})), 1e-9);
  expect_near(out, "cramers_v [[20,4],[6,11],[2,9]]", 0.5612663782669407,
              analytics::cramers_v(table({{20, 4}, {6, 11}, {2, 9}})).v, 1e-12);
  return out;
}

}  // namespace rex
