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

#ifndef REX_SRC_SOLTX_REWRITER_HPP_
#define REX_SRC_SOLTX_REWRITER_HPP_

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rex::soltx {

// Collects byte-range replacements against an immutable source and applies
// them in one pass. Edits must not overlap; insertions at the same offset
// keep their submission order.
class Rewriter {
 public:
  explicit Rewriter(std::string_view source) : source_(source) {}

  void replace(std::size_t begin, std::size_t end, std::string text) {
    edits_.push_back(Edit{begin, end, std::move(text), edits_.size()});
  }
  void insert(std::size_t at, std::string text) {
    replace(at, at, std::move(text));
  }
  bool empty() const { return edits_.empty(); }

  std::string apply() const {
    std::vector<Edit> sorted = edits_;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Edit& a, const Edit& b) {
                       if (a.begin != b.begin) return a.begin < b.begin;
                       // pure insertions go before a replacement at the
                       // same offset
                       if ((a.begin == a.end) != (b.begin == b.end)) {
                         return a.begin == a.end;
                       }
                       return a.order < b.order;
                     });
    std::string out;
    out.reserve(source_.size());
    std::size_t pos = 0;
    for (const Edit& e : sorted) {
      out.append(source_.substr(pos, e.begin - pos));
      out.append(e.text);
      pos = e.end;
    }
    out.append(source_.substr(pos));
    return out;
  }

 private:
  struct Edit {
    std::size_t begin;
    std::size_t end;
    std::string text;
    std::size_t order;
  };

  std::string_view source_;
  std::vector<Edit> edits_;
};

}  // namespace rex::soltx

#endif  // REX_SRC_SOLTX_REWRITER_HPP_
