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

#ifndef REX_UTIL_FILES_HPP_
#define REX_UTIL_FILES_HPP_

#include <filesystem>
#include <string>
#include <string_view>

namespace rex::util {

// Throws Error{kMissingFile} when absent, kIo on read failure.
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file, fsyncs and renames over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace rex::util

#endif  // REX_UTIL_FILES_HPP_
