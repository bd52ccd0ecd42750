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

#ifndef REX_ERROR_HPP_
#define REX_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rex {

// Every failure the core can report. The C API maps these one-to-one onto
// rex_status values, so the order here is part of the ABI.
enum class ErrorCode {
  kInvalidArgument = 1,
  // corpus
  kMissingFile,
  kSchemaViolation,
  kDuplicateCaseId,
  kUnknownVulnClass,
  kIo,
  kSerialization,
  kCorruptStore,
  // soltx
  kUnterminatedComment,
  kUnterminatedString,
  kFunctionNotFound,
  kAmbiguousFunction,
  kNotAnAddress,
  kUnknownTemplate,
  kContractNotFound,
  kNoTransferSite,
  kCollisionDetected,
  kKeywordRename,
  kIdentifierNotFound,
  // genbackend
  kTransport,
  kRateLimited,
  kFixtureMissing,
  kBackendRefused,
  kNoCodeBlocks,
  kOnlyOneScript,
  kUnlexableScript,
  kTemplateInvalid,
  // harness
  kTemplateMissing,
  kForgeNotInstalled,
  kTimeout,
  kSpawnFailure,
  kAttemptDirExists,
  // analytics
  kZeroMarginal,
  kDegenerateTable,
  // pipeline
  kIllegalTransition,
};

std::string_view error_code_name(ErrorCode code);

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string detail);
  Error(ErrorCode code, std::string detail, Span span);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::optional<Span>& span() const noexcept { return span_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<Span> span_;
};

}  // namespace rex

#endif  // REX_ERROR_HPP_
