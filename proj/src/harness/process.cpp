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
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "rex/harness.hpp"
#include "spdlog/spdlog.h"

namespace rex::harness {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Fd {
  int fd = -1;
  ~Fd() { reset(); }
  void reset() {
    if (fd >= 0) ::close(fd);
    fd = -1;
  }
};

// Keeps the last `cap` bytes seen.
void append_capped(std::string& out, const char* data, std::size_t n, std::size_t cap,
                   bool& truncated) {
  out.append(data, n);
  if (out.size() > cap) {
    out.erase(0, out.size() - cap);
    truncated = true;
  }
}

std::string describe(const std::vector<std::string>& argv) {
  std::string s;
  for (const auto& a : argv) s += (s.empty() ? "" : " ") + a;
  return s;
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, const fs::path& cwd,
                          double timeout_s, std::size_t output_cap) {
  if (argv.empty()) throw Error(ErrorCode::kInvalidArgument, "empty argv");

  Fd out_r, out_w, err_r, err_w;
  int p[2];
  if (::pipe2(p, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kSpawnFailure, std::string("pipe: ") + std::strerror(errno));
  }
  out_r.fd = p[0];
  out_w.fd = p[1];
  // Carries errno from a failed chdir/exec; closes silently on success.
  if (::pipe2(p, O_CLOEXEC) != 0) {
    throw Error(ErrorCode::kSpawnFailure, std::string("pipe: ") + std::strerror(errno));
  }
  err_r.fd = p[0];
  err_w.fd = p[1];

  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);
  const std::string dir = cwd.string();

  const auto t0 = Clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) {
    throw Error(ErrorCode::kSpawnFailure, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::dup2(out_w.fd, STDOUT_FILENO);
    ::dup2(out_w.fd, STDERR_FILENO);
    int err = 0;
    if (::chdir(dir.c_str()) != 0) {
      err = errno;
    } else {
      ::execv(cargv[0], cargv.data());
      err = errno;
    }
    [[maybe_unused]] auto n = ::write(err_w.fd, &err, sizeof(err));
    ::_exit(127);
  }
  ::setpgid(pid, pid);  // also done in the child; whichever runs first wins
  out_w.reset();
  err_w.reset();

  int child_errno = 0;
  if (::read(err_r.fd, &child_errno, sizeof(child_errno)) == sizeof(child_errno)) {
    int status;
    ::waitpid(pid, &status, 0);
    throw Error(ErrorCode::kSpawnFailure,
                describe(argv) + ": " + std::strerror(child_errno));
  }

  ProcessResult result;
  const auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                                 std::chrono::duration<double>(timeout_s));
  char buf[65536];
  int status = 0;
  bool reaped = false;
  bool eof = false;
  while (!eof) {
    const auto now = Clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      break;
    }
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    pollfd pfd{out_r.fd, POLLIN, 0};
    // Wake periodically so an exited child whose grandchildren hold the pipe
    // open does not stall us until the deadline.
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left + 1, 100)));
    if (rc < 0 && errno != EINTR) break;
    if (rc > 0) {
      const ssize_t n = ::read(out_r.fd, buf, sizeof(buf));
      if (n > 0) {
        append_capped(result.output, buf, static_cast<std::size_t>(n), output_cap,
                      result.truncated);
      } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
        eof = true;
      }
    }
    if (!reaped && ::waitpid(pid, &status, WNOHANG) == pid) {
      reaped = true;
      // Give remaining buffered output a moment, then stop waiting on
      // stragglers that inherited the pipe.
      const auto drain_until = Clock::now() + std::chrono::milliseconds(200);
      while (Clock::now() < drain_until) {
        pollfd d{out_r.fd, POLLIN, 0};
        if (::poll(&d, 1, 50) <= 0) break;
        const ssize_t n = ::read(out_r.fd, buf, sizeof(buf));
        if (n <= 0) break;
        append_capped(result.output, buf, static_cast<std::size_t>(n), output_cap,
                      result.truncated);
      }
      break;
    }
  }

  // Output closed but the child may still be running.
  while (!reaped && !result.timed_out) {
    if (::waitpid(pid, &status, WNOHANG) == pid) {
      reaped = true;
    } else if (Clock::now() >= deadline) {
      result.timed_out = true;
    } else {
      ::usleep(10000);
    }
  }
  ::kill(-pid, SIGKILL);
  if (!reaped) ::waitpid(pid, &status, 0);
  result.duration_s = since(t0);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  else if (WIFSIGNALED(status)) result.exit_code = 128 + WTERMSIG(status);
  if (result.truncated) {
    spdlog::warn("{}: output truncated to the last {} bytes", describe(argv), output_cap);
  }
  return result;
}

fs::path resolve_forge(const fs::path& configured) {
  const auto usable = [](const fs::path& p) {
    return !p.empty() && ::access(p.c_str(), X_OK) == 0 && !fs::is_directory(p);
  };
  if (!configured.empty()) {
    if (usable(configured)) return fs::absolute(configured);
    throw Error(ErrorCode::kForgeNotInstalled, configured.string() + " is not executable");
  }
  if (const char* env = std::getenv("REX_FORGE_BIN"); env && *env) {
    if (usable(env)) return fs::absolute(env);
    throw Error(ErrorCode::kForgeNotInstalled, std::string("REX_FORGE_BIN=") + env +
                                                   " is not executable");
  }
  if (const char* path = std::getenv("PATH")) {
    std::stringstream ss(path);
    std::string dir;
    while (std::getline(ss, dir, ':')) {
      if (dir.empty()) continue;
      const fs::path candidate = fs::path(dir) / "forge";
      if (usable(candidate)) return fs::absolute(candidate);
    }
  }
  throw Error(ErrorCode::kForgeNotInstalled, "forge not found on PATH");
}

BuildReport run_build(const fs::path& forge, const fs::path& project_dir,
                      double timeout_s) {
  ProcessResult r = run_process({forge.string(), "build"}, project_dir, timeout_s);
  if (r.timed_out) {
    throw TimeoutError("forge build exceeded " + std::to_string(timeout_s) + "s",
                       std::move(r.output), r.duration_s);
  }
  BuildReport report = parse_build_output(r.output, r.exit_code);
  report.duration_s = r.duration_s;
  return report;
}

TestReport run_tests(const fs::path& forge, const fs::path& project_dir, double timeout_s) {
  ProcessResult r = run_process({forge.string(), "test", "-vvvv"}, project_dir, timeout_s);
  if (r.timed_out) {
    throw TimeoutError("forge test exceeded " + std::to_string(timeout_s) + "s",
                       std::move(r.output), r.duration_s);
  }
  TestReport report = parse_test_output(r.output, r.exit_code);
  report.duration_s = r.duration_s;
  return report;
}

namespace {

class ForgeToolchain final : public Toolchain {
 public:
  explicit ForgeToolchain(fs::path forge) : forge_(std::move(forge)) {}
  BuildReport build(const fs::path& project_dir, double timeout_s) override {
    return run_build(forge_, project_dir, timeout_s);
  }
  TestReport test(const fs::path& project_dir, double timeout_s) override {
    return run_tests(forge_, project_dir, timeout_s);
  }

 private:
  fs::path forge_;
};

}  // namespace

std::unique_ptr<Toolchain> make_forge_toolchain(fs::path forge) {
  return std::make_unique<ForgeToolchain>(std::move(forge));
}

}  // namespace rex::harness
