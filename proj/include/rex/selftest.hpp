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

// Known-answer checks of the hashing and statistics kernels, cheap enough to
// run before every campaign.

#ifndef REX_SELFTEST_HPP_
#define REX_SELFTEST_HPP_

#include <string>
#include <vector>

namespace rex {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;  // expected vs actual on failure
};

std::vector<SelftestCheck> run_selftest();

}  // namespace rex

#endif  // REX_SELFTEST_HPP_
