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

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "rex/corpus.hpp"
#include "rex/error.hpp"
#include "spdlog/spdlog.h"
#include "util/files.hpp"

namespace rex {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string errno_text(const fs::path& p) {
  return p.string() + ": " + std::strerror(errno);
}

// Cuts a partial final record left by a crash mid-append so the next append
// starts on a fresh line.
void truncate_torn_tail(int fd, const fs::path& path) {
  struct stat st {};
  if (::fstat(fd, &st) != 0 || st.st_size == 0) return;
  char last = '\n';
  if (::pread(fd, &last, 1, st.st_size - 1) != 1 || last == '\n') return;

  off_t keep = 0;
  char buf[4096];
  off_t pos = st.st_size;
  while (pos > 0 && keep == 0) {
    const off_t chunk = std::min<off_t>(pos, sizeof(buf));
    pos -= chunk;
    if (::pread(fd, buf, chunk, pos) != chunk) break;
    for (off_t i = chunk - 1; i >= 0; --i) {
      if (buf[i] == '\n') {
        keep = pos + i + 1;
        break;
      }
    }
  }
  spdlog::warn("{}: dropping torn trailing record ({} bytes)", path.string(),
               st.st_size - keep);
  if (::ftruncate(fd, keep) != 0) throw Error(ErrorCode::kIo, errno_text(path));
}

}  // namespace

ResultStore::ResultStore(fs::path path, Mode mode) : path_(std::move(path)), mode_(mode) {
  if (mode_ == Mode::kReadOnly) {
    fd_ = ::open(path_.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd_ < 0) throw Error(ErrorCode::kIo, errno_text(path_));
    return;
  }
  std::error_code ec;
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path(), ec);
  fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::kIo, errno_text(path_));
  try {
    truncate_torn_tail(fd_, path_);
  } catch (...) {
    ::close(fd_);
    throw;
  }
}

ResultStore::~ResultStore() {
  if (fd_ >= 0) ::close(fd_);
}

void ResultStore::append(const CaseResult& result) {
  if (mode_ == Mode::kReadOnly) {
    throw Error(ErrorCode::kIo, path_.string() + ": store is read-only");
  }
  std::string line;
  try {
    line = to_json(result).dump();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSerialization, e.what());
  }
  line.push_back('\n');

  std::lock_guard lock(mu_);
  const ssize_t n = ::write(fd_, line.data(), line.size());
  if (n < 0) throw Error(ErrorCode::kIo, errno_text(path_));
  if (static_cast<std::size_t>(n) != line.size()) {
    throw Error(ErrorCode::kIo, path_.string() + ": short write");
  }
  ::fdatasync(fd_);
}

std::map<std::string, CaseResult> Replay::latest() const {
  std::map<std::string, CaseResult> out;
  for (const CaseResult& r : results) out.insert_or_assign(r.case_id, r);
  return out;
}

Replay replay_results(const fs::path& path) {
  Replay replay;
  std::error_code ec;
  if (!fs::exists(path, ec)) return replay;
  const std::string text = util::read_file(path);

  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::size_t end = nl == std::string::npos ? text.size() : nl;
    lines.emplace_back(text.data() + start, end - start);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();

  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      replay.results.push_back(case_result_from_json(json::parse(lines[i])));
    } catch (const std::exception&) {
      bad.push_back(i);
    }
  }
  if (!bad.empty() && bad.back() + 1 == lines.size()) {
    replay.dropped_torn_tail = true;
    bad.pop_back();
    spdlog::warn("{}: dropping torn final line {}", path.string(), lines.size());
  }
  if (bad.size() > 1) {
    throw Error(ErrorCode::kCorruptStore,
                path.string() + ": " + std::to_string(bad.size()) +
                    " unparsable interior lines");
  }
  if (bad.size() == 1) {
    replay.skipped_lines = 1;
    spdlog::warn("{}: skipping unparsable line {}", path.string(), bad.front() + 1);
  }
  return replay;
}

}  // namespace rex
