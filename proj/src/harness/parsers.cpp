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
#include <cctype>
#include <charconv>

#include "rex/harness.hpp"

// Forge output lines can run to megabytes (calldata, long revert data), and
// std::regex recurses per character, so every matcher here is a hand-written
// linear scan.

namespace rex::harness {

namespace {

using Sv = std::string_view;
constexpr Sv kArrow = "\xe2\x86\x90";  // U+2190, the trace return marker

bool space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
  return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
}
bool digit(char c) { return c >= '0' && c <= '9'; }

Sv trim(Sv s) {
  while (!s.empty() && space(s.front())) s.remove_prefix(1);
  while (!s.empty() && space(s.back())) s.remove_suffix(1);
  return s;
}

std::size_t skip_ws(Sv s, std::size_t p) {
  while (p < s.size() && space(s[p])) ++p;
  return p;
}

std::size_t skip_ident(Sv s, std::size_t p) {
  if (p >= s.size() || !ident_start(s[p])) return p;
  while (p < s.size() && ident_char(s[p])) ++p;
  return p;
}

std::size_t skip_digits(Sv s, std::size_t p) {
  while (p < s.size() && digit(s[p])) ++p;
  return p;
}

bool starts_with(Sv s, Sv prefix) { return s.substr(0, prefix.size()) == prefix; }

std::string lower(Sv s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool contains_ci(Sv hay, Sv needle) {
  return lower(hay).find(lower(needle)) != std::string::npos;
}

// Out-of-range numbers become 0 rather than throwing.
int to_int(Sv digits) {
  int v = 0;
  std::from_chars(digits.data(), digits.data() + digits.size(), v);
  return v;
}

// Drops ANSI escape sequences and splits on \n, trimming a trailing \r.
std::vector<std::string> clean_lines(Sv raw) {
  std::string text;
  text.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\x1b' && i + 1 < raw.size() && raw[i + 1] == '[') {
      i += 2;
      while (i < raw.size() && !(raw[i] >= '@' && raw[i] <= '~')) ++i;
      continue;
    }
    text.push_back(raw[i]);
  }
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

// Display column of byte offset `pos` (counts UTF-8 lead bytes).
std::size_t column(Sv line, std::size_t pos) {
  std::size_t col = 0;
  for (std::size_t i = 0; i < pos && i < line.size(); ++i) {
    col += (static_cast<unsigned char>(line[i]) & 0xC0) != 0x80;
  }
  return col;
}

// `Error (2314): msg`, `Warning (2072): msg`, `Info (1234): msg`.
std::optional<Diagnostic> match_coded(Sv line) {
  std::size_t p = skip_ws(line, 0);
  const std::size_t w = skip_ident(line, p);
  const Sv word = line.substr(p, w - p);
  Diagnostic d;
  if (word == "Error") d.severity = Severity::kError;
  else if (word == "Warning") d.severity = Severity::kWarning;
  else if (word == "Info") d.severity = Severity::kInfo;
  else return std::nullopt;
  p = skip_ws(line, w);
  if (p >= line.size() || line[p] != '(') return std::nullopt;
  const std::size_t digits_end = skip_digits(line, p + 1);
  if (digits_end == p + 1 || digits_end >= line.size() || line[digits_end] != ')') {
    return std::nullopt;
  }
  d.code = std::string(line.substr(p + 1, digits_end - p - 1));
  p = skip_ws(line, digits_end + 1);
  if (p >= line.size() || line[p] != ':') return std::nullopt;
  d.message = std::string(trim(line.substr(p + 1)));
  return d;
}

// Older solc: `TypeError: msg`, `ParserError: msg`, `Warning: msg`.
std::optional<Diagnostic> match_bare(Sv line) {
  const std::size_t p = skip_ws(line, 0);
  if (p >= line.size() || !std::isupper(static_cast<unsigned char>(line[p]))) {
    return std::nullopt;
  }
  std::size_t w = p;
  while (w < line.size() && std::isalpha(static_cast<unsigned char>(line[w]))) ++w;
  const Sv word = line.substr(p, w - p);
  const bool warning = word == "Warning";
  const bool error = word.size() > 5 && word.substr(word.size() - 5) == "Error";
  if (!warning && !error) return std::nullopt;
  const std::size_t colon = skip_ws(line, w);
  if (colon >= line.size() || line[colon] != ':') return std::nullopt;
  Diagnostic d;
  d.severity = warning ? Severity::kWarning : Severity::kError;
  const Sv msg = trim(line.substr(colon + 1));
  d.message = warning ? std::string(msg) : std::string(word) + ": " + std::string(msg);
  return d;
}

// `--> file:line:col:`
bool match_location(Sv line, Diagnostic& d) {
  Sv s = trim(line);
  if (!starts_with(s, "-->")) return false;
  s = trim(s.substr(3));
  if (!s.empty() && s.back() == ':') s.remove_suffix(1);
  const std::size_t c2 = s.rfind(':');
  if (c2 == Sv::npos || c2 == 0) return false;
  const std::size_t c1 = s.rfind(':', c2 - 1);
  if (c1 == Sv::npos || c1 == 0) return false;
  const Sv line_no = s.substr(c1 + 1, c2 - c1 - 1);
  const Sv col_no = s.substr(c2 + 1);
  if (line_no.empty() || col_no.empty() || skip_digits(line_no, 0) != line_no.size() ||
      skip_digits(col_no, 0) != col_no.size()) {
    return false;
  }
  d.file = std::string(s.substr(0, c1));
  d.line = to_int(line_no);
  d.column = to_int(col_no);
  return true;
}

struct ResultLine {
  bool pass = false;
  std::string annotation;  // text between "[PASS"/"[FAIL" and the closing ']'
  std::string name;
};

// Does `rest` (the text after a candidate closing ']') look like
// ` name(args) (gas: N)`? Sets `name` on success.
bool result_tail(Sv rest, std::string& name) {
  if (rest.empty() || !space(rest[0])) return false;
  std::size_t p = skip_ws(rest, 0);
  const std::size_t e = skip_ident(rest, p);
  if (e == p || e >= rest.size() || rest[e] != '(') return false;
  const std::size_t close = rest.find_first_of("()", e + 1);
  if (close == Sv::npos || rest[close] != ')') return false;
  const Sv tail = trim(rest.substr(close + 1));
  if (!tail.empty() && !(tail.front() == '(' && tail.back() == ')')) return false;
  name = std::string(rest.substr(p, e - p));
  return true;
}

// `[PASS] name() (gas: N)` or `[FAIL<annotation>] name(args) (...)`. The
// annotation may itself contain brackets, so take the rightmost ']' whose
// tail parses.
std::optional<ResultLine> match_result(Sv line) {
  const Sv s = trim(line);
  ResultLine r;
  if (starts_with(s, "[PASS")) r.pass = true;
  else if (!starts_with(s, "[FAIL")) return std::nullopt;
  for (std::size_t q = s.rfind(']'); q != Sv::npos && q >= 5; q = s.rfind(']', q - 1)) {
    if (result_tail(s.substr(q + 1), r.name)) {
      r.annotation = std::string(s.substr(5, q - 5));
      return r;
    }
    if (q == 5) break;
  }
  return std::nullopt;
}

struct CallLine {
  std::size_t offset;
  std::string name;  // Contract::function
};

// First `[gas] Contract::function` on a trace line.
std::optional<CallLine> match_call(Sv line) {
  for (std::size_t b = line.find('['); b != Sv::npos; b = line.find('[', b + 1)) {
    const std::size_t d = skip_digits(line, b + 1);
    if (d == b + 1 || d >= line.size() || line[d] != ']') continue;
    const std::size_t c0 = skip_ws(line, d + 1);
    if (c0 == d + 1) continue;
    const std::size_t c1 = skip_ident(line, c0);
    if (c1 == c0 || line.substr(c1, 2) != "::") continue;
    const std::size_t f1 = skip_ident(line, c1 + 2);
    if (f1 == c1 + 2) continue;
    return CallLine{b, std::string(line.substr(c0, f1 - c0))};
  }
  return std::nullopt;
}

}  // namespace

BuildReport parse_build_output(std::string_view raw, std::optional<int> exit_code) {
  BuildReport report;
  report.raw_output = std::string(raw);
  report.exit_code = exit_code;
  if (trim(raw).empty()) {
    report.success = false;
    report.parse_degraded = true;
    return report;
  }

  const std::vector<std::string> lines = clean_lines(raw);
  bool failed_trailer = false;
  bool success_marker = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.find("Compiler run failed") != std::string::npos) {
      failed_trailer = true;
      continue;
    }
    if (line.find("Compiler run successful") != std::string::npos ||
        line.find("No files changed, compilation skipped") != std::string::npos ||
        line.find("Nothing to compile") != std::string::npos) {
      success_marker = true;
      continue;
    }

    std::optional<Diagnostic> d = match_coded(line);
    if (!d) d = match_bare(line);
    if (!d) continue;
    // The location arrow follows within a couple of lines.
    for (std::size_t j = i + 1; j < lines.size() && j <= i + 3; ++j) {
      if (match_location(lines[j], *d)) break;
      if (!trim(lines[j]).empty() && lines[j].find('|') == std::string::npos) break;
    }
    report.diagnostics.push_back(std::move(*d));
  }

  const bool has_errors = report.error_count() > 0;
  if (has_errors || failed_trailer) {
    report.success = false;
    report.parse_degraded = !has_errors;
  } else if (success_marker) {
    report.success = !exit_code || *exit_code == 0;
    report.parse_degraded = !report.success;
  } else {
    report.success = exit_code && *exit_code == 0;
    report.parse_degraded = true;
  }
  return report;
}

std::string normalize_failure_reason(std::string_view reason) {
  const std::string r(trim(reason));
  const std::string lr = lower(r);
  std::string code;
  if (const std::size_t panic = lr.find("panic"); panic != std::string::npos) {
    // Rightmost "(0x<hex>)" after the word.
    for (std::size_t p = lr.rfind("(0x"); p != std::string::npos && p > panic;
         p = p == 0 ? std::string::npos : lr.rfind("(0x", p - 1)) {
      std::size_t e = p + 3;
      while (e < lr.size() && std::isxdigit(static_cast<unsigned char>(lr[e]))) ++e;
      if (e > p + 3 && e < lr.size() && lr[e] == ')') {
        code = lr.substr(p + 3, e - p - 3);
        break;
      }
    }
    while (code.size() > 1 && code.front() == '0') code.erase(0, 1);
    if (code.size() == 1) code = "0" + code;
  }
  // Pre-1.0 forge spelled some panics out.
  if (code.empty() && contains_ci(r, "Arithmetic over/underflow")) code = "11";
  if (code.empty() && contains_ci(r, "Division or modulo by 0")) code = "12";
  if (code.empty() && contains_ci(r, "Assertion violated")) code = "01";
  if (!code.empty()) {
    static const std::vector<std::pair<std::string, std::string>> kPanics = {
        {"01", "assertion failed"},
        {"11", "arithmetic overflow"},
        {"12", "division or modulo by zero"},
        {"21", "invalid enum conversion"},
        {"22", "invalid storage byte array"},
        {"31", "pop on empty array"},
        {"32", "array index out of bounds"},
        {"41", "out of memory"},
        {"51", "zero-initialized function call"},
    };
    for (const auto& [c, text] : kPanics) {
      if (c == code) return "panic: " + text + " (0x" + c + ")";
    }
    return "panic: code 0x" + code + " (0x" + code + ")";
  }
  if (contains_ci(r, "OutOfGas") || contains_ci(r, "out of gas")) return "out of gas";
  return r;
}

TestReport parse_test_output(std::string_view raw, std::optional<int> exit_code) {
  TestReport report;
  report.ran = true;
  report.raw_output = std::string(raw);
  report.exit_code = exit_code;

  struct Frame {
    std::size_t col;
    std::string name;
    bool root;
  };
  std::vector<Frame> stack;
  bool in_traces = false;
  bool summary = false;

  const auto add_signal = [](TestRecord& t, std::string s) {
    if (s.empty()) return;
    if (std::find(t.failure_signals.begin(), t.failure_signals.end(), s) ==
        t.failure_signals.end()) {
      t.failure_signals.push_back(std::move(s));
    }
  };

  for (const std::string& line : clean_lines(raw)) {
    if (line.find("No tests found") != std::string::npos ||
        line.find("No tests to run") != std::string::npos) {
      report.no_tests = true;
      continue;
    }
    if (starts_with(line, "Failing tests:")) {
      summary = true;  // the trailer repeats [FAIL] lines already seen
      in_traces = false;
      continue;
    }
    if (summary) continue;
    if (std::optional<ResultLine> m = match_result(line)) {
      TestRecord t;
      t.name = std::move(m->name);
      t.status = m->pass ? TestStatus::kPass : TestStatus::kFail;
      if (t.status == TestStatus::kFail) {
        // "[FAIL: r]", "[FAIL. Reason: r]" or a bare "[FAIL]".
        Sv reason = m->annotation;
        if (starts_with(reason, ". Reason:")) reason.remove_prefix(9);
        else if (starts_with(reason, ":")) reason.remove_prefix(1);
        if (auto cut = reason.find("; counterexample:"); cut != Sv::npos) {
          reason = reason.substr(0, cut);
        }
        reason = trim(reason);
        if (!reason.empty()) {
          t.revert_reason = normalize_failure_reason(reason);
          add_signal(t, *t.revert_reason);
        }
      }
      report.tests.push_back(std::move(t));
      stack.clear();
      in_traces = false;
      continue;
    }
    if (starts_with(line, "Traces:")) {
      in_traces = true;
      stack.clear();
      continue;
    }
    if (!in_traces || report.tests.empty()) continue;
    if (trim(line).empty()) continue;
    if (starts_with(line, "Suite result") || starts_with(line, "Test result") ||
        starts_with(line, "Ran ") || starts_with(line, "Logs:")) {
      in_traces = false;
      continue;
    }

    TestRecord& current = report.tests.back();
    if (std::optional<CallLine> call = match_call(line)) {
      const std::size_t col = column(line, call->offset);
      while (!stack.empty() && stack.back().col >= col) stack.pop_back();
      stack.push_back({col, std::move(call->name), stack.empty()});
      continue;
    }
    const std::size_t arrow = line.find(kArrow);
    if (arrow == std::string::npos) continue;
    const std::size_t col = column(line, arrow);
    while (!stack.empty() && stack.back().col >= col) stack.pop_back();
    if (stack.empty()) continue;
    const Frame frame = stack.back();
    stack.pop_back();

    // "← [Status] detail", or in older traces "← detail".
    Sv rest = trim(Sv(line).substr(arrow + kArrow.size()));
    std::string status;
    if (!rest.empty() && rest.front() == '[') {
      const std::size_t close = skip_ident(rest, 1);
      if (close > 1 && close < rest.size() && rest[close] == ']') {
        status = std::string(rest.substr(1, close - 1));
        rest = trim(rest.substr(close + 1));
      }
    }
    std::string detail(rest);
    if (status.empty()) {
      const bool quoted =
          detail.size() >= 2 && detail.front() == '"' && detail.back() == '"';
      if (quoted) detail = detail.substr(1, detail.size() - 2);
      if (contains_ci(detail, "OutOfGas")) status = "OutOfGas";
      else if (quoted || contains_ci(detail, "EvmError")) status = "Revert";
      else continue;
    }
    if (status == "Stop" || status == "Return" || status == "SelfDestruct") continue;

    add_signal(current, normalize_failure_reason(status == "OutOfGas" ? "OutOfGas"
                                                 : detail.empty()     ? status
                                                                      : detail));
    if (!frame.root &&
        std::find(current.reverted_calls.begin(), current.reverted_calls.end(),
                  frame.name) == current.reverted_calls.end()) {
      current.reverted_calls.push_back(frame.name);
    }
  }

  report.parse_degraded = report.tests.empty() && !report.no_tests;
  return report;
}

bool heuristic_matches(const HeuristicRule& rule, const TestRecord& test) {
  if (test.status != TestStatus::kFail) return false;
  for (const std::string& p : rule.signal_patterns) {
    if (test.revert_reason && contains_ci(*test.revert_reason, p)) return true;
    for (const std::string& s : test.failure_signals) {
      if (contains_ci(s, p)) return true;
    }
  }
  for (const std::string& p : rule.reverted_call_patterns) {
    for (const std::string& call : test.reverted_calls) {
      const std::size_t sep = call.find("::");
      const std::string contract = call.substr(0, sep);
      if (lower(contract) == "vm") continue;
      const std::string fn = sep == std::string::npos ? call : call.substr(sep + 2);
      if (contains_ci(fn, p)) return true;
    }
  }
  return false;
}

OutcomeClass classify_outcome(VulnClass vuln_class, const BuildReport& build,
                              const std::optional<TestReport>& test,
                              const HeuristicRules& rules) {
  if (!build.success) return OutcomeClass::kFailedCompile;
  if (!test) return OutcomeClass::kFailedTest;
  if (test->all_passed()) return OutcomeClass::kSuccess;
  if (heuristic_eligible(vuln_class)) {
    if (auto it = rules.find(vuln_class); it != rules.end()) {
      for (const TestRecord& t : test->tests) {
        if (heuristic_matches(it->second, t)) return OutcomeClass::kSuccessByRevertHeuristic;
      }
    }
  }
  return OutcomeClass::kFailedTest;
}

}  // namespace rex::harness
