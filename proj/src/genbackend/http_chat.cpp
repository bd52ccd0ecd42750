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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <regex>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "rex/error.hpp"
#include "rex/genbackend.hpp"
#include "spdlog/spdlog.h"

namespace rex::gen {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

std::chrono::duration<double> seconds(double s) {
  return std::chrono::duration<double>(std::max(0.0, s));
}

// Spaces request starts at least 60/rpm seconds apart across all callers.
class RateLimiter {
 public:
  explicit RateLimiter(double rpm)
      : interval_(rpm > 0 ? std::chrono::duration_cast<Clock::duration>(
                                seconds(60.0 / rpm))
                          : Clock::duration::zero()) {}

  void acquire() {
    if (interval_ == Clock::duration::zero()) return;
    Clock::time_point slot;
    {
      std::lock_guard lock(mu_);
      const auto now = Clock::now();
      slot = std::max(now, next_);
      next_ = slot + interval_;
    }
    std::this_thread::sleep_until(slot);
  }

 private:
  Clock::duration interval_;
  std::mutex mu_;
  Clock::time_point next_{};
};

class HttpChatBackend final : public Backend {
 public:
  explicit HttpChatBackend(HttpChatOptions o)
      : opts_(std::move(o)), limiter_(opts_.requests_per_minute) {
    static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(opts_.base_url, m, kUrl)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "http_chat base_url must be http(s)://host[/path], got '" +
                      opts_.base_url + "'");
    }
    host_ = m[1].str();
    path_ = m[2].str();
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
    if (opts_.model.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "http_chat needs a model name");
    }
    if (opts_.api_key.empty()) {
      throw Error(ErrorCode::kBackendRefused,
                  api_key_env_var(opts_.backend_id) + " is not set");
    }
  }

  BackendKind kind() const override { return BackendKind::kHttpChat; }
  const std::string& id() const override { return opts_.backend_id; }

  Generation generate(const Prompt& prompt) override {
    const json body = {
        {"model", opts_.model},
        {"temperature", opts_.temperature},
        {"max_tokens", opts_.max_tokens},
        {"messages",
         {{{"role", "system"}, {"content", prompt.system_text}},
          {{"role", "user"}, {"content", prompt.user_text}}}},
    };
    const std::string payload = body.dump();
    const httplib::Headers headers = {{"Authorization", "Bearer " + opts_.api_key}};

    double backoff = opts_.backoff_s;
    for (int attempt = 0;; ++attempt) {
      const bool last = attempt >= opts_.retries;
      limiter_.acquire();

      httplib::Client client(host_);
      const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
          seconds(opts_.timeout_s));
      client.set_connection_timeout(timeout);
      client.set_read_timeout(timeout);
      client.set_write_timeout(timeout);
      auto res = client.Post(path_, headers, payload, "application/json");

      if (!res) {
        const std::string why = httplib::to_string(res.error());
        if (last) throw Error(ErrorCode::kTransport, host_ + path_ + ": " + why);
        spdlog::warn("{}: {} (retry {}/{})", opts_.backend_id, why, attempt + 1,
                     opts_.retries);
      } else if (res->status == 429) {
        const double wait = retry_after(*res, backoff);
        if (last) {
          throw Error(ErrorCode::kRateLimited, "retry_after=" + format_seconds(wait));
        }
        spdlog::warn("{}: rate limited, waiting {}s", opts_.backend_id,
                     format_seconds(wait));
        std::this_thread::sleep_for(seconds(wait));
        continue;
      } else if (res->status == 401 || res->status == 403) {
        throw Error(ErrorCode::kBackendRefused,
                    "HTTP " + std::to_string(res->status) + ": " + snippet(res->body));
      } else if (res->status >= 500) {
        if (last) {
          throw Error(ErrorCode::kTransport,
                      "HTTP " + std::to_string(res->status) + ": " + snippet(res->body));
        }
        spdlog::warn("{}: HTTP {} (retry {}/{})", opts_.backend_id, res->status,
                     attempt + 1, opts_.retries);
      } else if (res->status != 200) {
        throw Error(ErrorCode::kBackendRefused,
                    "HTTP " + std::to_string(res->status) + ": " + snippet(res->body));
      } else {
        return parse_completion(res->body);
      }
      std::this_thread::sleep_for(seconds(backoff));
      backoff *= 2;
    }
  }

 private:
  double retry_after(const httplib::Response& res, double fallback) const {
    double wait = fallback;
    if (res.has_header("Retry-After")) {
      try {
        wait = std::stod(res.get_header_value("Retry-After"));
      } catch (const std::exception&) {
        // An HTTP-date is not worth parsing; keep the backoff.
      }
    }
    return std::clamp(wait, 0.0, opts_.max_retry_after_s);
  }

  static std::string format_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", s);
    return buf;
  }

  static std::string snippet(const std::string& body) {
    return body.size() <= 200 ? body : body.substr(0, 200) + "...";
  }

  static Generation parse_completion(const std::string& body) {
    try {
      const json j = json::parse(body);
      Generation g;
      g.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (j.contains("usage") && j["usage"].is_object()) {
        g.prompt_tokens = j["usage"].value("prompt_tokens", 0);
        g.completion_tokens = j["usage"].value("completion_tokens", 0);
      }
      return g;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kTransport, std::string("malformed completion: ") + e.what());
    }
  }

  HttpChatOptions opts_;
  RateLimiter limiter_;
  std::string host_;
  std::string path_;
};

}  // namespace

std::unique_ptr<Backend> make_http_chat_backend(HttpChatOptions options) {
  return std::make_unique<HttpChatBackend>(std::move(options));
}

}  // namespace rex::gen
