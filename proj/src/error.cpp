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

#include "rex/error.hpp"

#include <utility>

namespace rex {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kDuplicateCaseId: return "DuplicateCaseId";
    case ErrorCode::kUnknownVulnClass: return "UnknownVulnClass";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kSerialization: return "SerializationError";
    case ErrorCode::kCorruptStore: return "CorruptStore";
    case ErrorCode::kUnterminatedComment: return "UnterminatedComment";
    case ErrorCode::kUnterminatedString: return "UnterminatedString";
    case ErrorCode::kFunctionNotFound: return "FunctionNotFound";
    case ErrorCode::kAmbiguousFunction: return "AmbiguousFunction";
    case ErrorCode::kNotAnAddress: return "NotAnAddress";
    case ErrorCode::kUnknownTemplate: return "UnknownTemplate";
    case ErrorCode::kContractNotFound: return "ContractNotFound";
    case ErrorCode::kNoTransferSite: return "NoTransferSite";
    case ErrorCode::kCollisionDetected: return "CollisionDetected";
    case ErrorCode::kKeywordRename: return "KeywordRename";
    case ErrorCode::kIdentifierNotFound: return "IdentifierNotFound";
    case ErrorCode::kTransport: return "TransportError";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kFixtureMissing: return "FixtureMissing";
    case ErrorCode::kBackendRefused: return "BackendRefused";
    case ErrorCode::kNoCodeBlocks: return "NoCodeBlocks";
    case ErrorCode::kOnlyOneScript: return "OnlyOneScript";
    case ErrorCode::kUnlexableScript: return "UnlexableScript";
    case ErrorCode::kTemplateInvalid: return "TemplateInvalid";
    case ErrorCode::kTemplateMissing: return "TemplateMissing";
    case ErrorCode::kForgeNotInstalled: return "ForgeNotInstalled";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kSpawnFailure: return "SpawnFailure";
    case ErrorCode::kAttemptDirExists: return "AttemptDirExists";
    case ErrorCode::kZeroMarginal: return "ZeroMarginal";
    case ErrorCode::kDegenerateTable: return "DegenerateTable";
    case ErrorCode::kIllegalTransition: return "IllegalTransition";
  }
  return "Unknown";
}

namespace {

std::string format_what(ErrorCode code, const std::string& detail) {
  std::string out(error_code_name(code));
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string detail)
    : std::runtime_error(format_what(code, detail)),
      code_(code),
      detail_(std::move(detail)) {}

Error::Error(ErrorCode code, std::string detail, Span span)
    : std::runtime_error(format_what(code, detail) + " at bytes [" +
                         std::to_string(span.begin) + ", " +
                         std::to_string(span.end) + ")"),
      code_(code),
      detail_(std::move(detail)),
      span_(span) {}

}  // namespace rex
