/* Copyright 2026 The rex Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Stable C interface to librex.
 *
 * Every function returns a rex_status. On failure the calling thread's
 * rex_last_error() describes it until the next call on that thread. Strings
 * handed out through `char**` parameters are owned by the caller and must be
 * released with rex_string_free. Handles are opaque and released with their
 * matching *_free function; passing NULL to a free function is a no-op. */

#ifndef REX_REX_H_
#define REX_REX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(REX_BUILDING_LIBRARY)
#define REX_API __attribute__((visibility("default")))
#else
#define REX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values are stable across releases. */
typedef enum rex_status {
  REX_OK = 0,
  REX_E_INVALID_ARGUMENT = 1,
  REX_E_MISSING_FILE = 2,
  REX_E_SCHEMA_VIOLATION = 3,
  REX_E_DUPLICATE_CASE_ID = 4,
  REX_E_UNKNOWN_VULN_CLASS = 5,
  REX_E_IO = 6,
  REX_E_SERIALIZATION = 7,
  REX_E_CORRUPT_STORE = 8,
  REX_E_UNTERMINATED_COMMENT = 9,
  REX_E_UNTERMINATED_STRING = 10,
  REX_E_FUNCTION_NOT_FOUND = 11,
  REX_E_AMBIGUOUS_FUNCTION = 12,
  REX_E_NOT_AN_ADDRESS = 13,
  REX_E_UNKNOWN_TEMPLATE = 14,
  REX_E_CONTRACT_NOT_FOUND = 15,
  REX_E_NO_TRANSFER_SITE = 16,
  REX_E_COLLISION_DETECTED = 17,
  REX_E_KEYWORD_RENAME = 18,
  REX_E_IDENTIFIER_NOT_FOUND = 19,
  REX_E_TRANSPORT = 20,
  REX_E_RATE_LIMITED = 21,
  REX_E_FIXTURE_MISSING = 22,
  REX_E_BACKEND_REFUSED = 23,
  REX_E_NO_CODE_BLOCKS = 24,
  REX_E_ONLY_ONE_SCRIPT = 25,
  REX_E_UNLEXABLE_SCRIPT = 26,
  REX_E_TEMPLATE_INVALID = 27,
  REX_E_TEMPLATE_MISSING = 28,
  REX_E_FORGE_NOT_INSTALLED = 29,
  REX_E_TIMEOUT = 30,
  REX_E_SPAWN_FAILURE = 31,
  REX_E_ATTEMPT_DIR_EXISTS = 32,
  REX_E_ZERO_MARGINAL = 33,
  REX_E_DEGENERATE_TABLE = 34,
  REX_E_ILLEGAL_TRANSITION = 35,
  REX_E_INTERNAL = 100
} rex_status;

/* Library */

REX_API const char* rex_version(void);
/* Symbolic name such as "ForgeNotInstalled"; "Ok" for REX_OK. */
REX_API const char* rex_status_name(rex_status status);
/* Message for the last failure on this thread; "" after a success. */
REX_API const char* rex_last_error(void);
REX_API void rex_string_free(char* s);
/* "trace", "debug", "info", "warn", "error" or "off". Logs go to stderr. */
REX_API rex_status rex_set_log_level(const char* level);

/* Hashing */

REX_API rex_status rex_keccak256(const uint8_t* data, size_t len, uint8_t out[32]);
/* Checksummed 0x-prefixed form of a 40-hex-digit address. */
REX_API rex_status rex_to_eip55(const char* address, char** out);

/* Source transforms.
 *
 * `op` is one of:
 *   strip_comments
 *   migrate_pragma   params {"version": "0.8.26"} (optional)
 *   wrap_unchecked   params {"functions": ["f", ...]}
 *   eip55            checksums every address literal
 *   payable_casts
 *   obfuscate        params {"rename": {"old": "new", ...}}
 *   decoy            params {"template": "<snippet>", "anchor": "Contract"}
 *   rare_construct   params {"function": "f", "template": "<snippet>"}
 * `params_json` may be NULL when the op takes none. `count` (may be NULL)
 * receives the number of rewrites for eip55 and payable_casts, else 0. */
REX_API rex_status rex_transform(const char* op, const char* source, const char* params_json,
                                 char** out_source, size_t* count);

/* Analytics */

/* StructuralMetrics of one source as a JSON object. */
REX_API rex_status rex_metrics_json(const char* source, char** out_json);

/* Per-class success table over a results.jsonl, rendered as Markdown with
 * one column headed `column_name`. */
REX_API rex_status rex_report_markdown(const char* results_path, const char* column_name,
                                       char** out_markdown);

/* Association analysis of structural features against exploit success.
 * Each result's source is read from <source_dir>/<case_id>/Target.sol or,
 * failing that, <source_dir>/<case_id>.sol. `quantiles` < 2 selects the
 * default. Outputs the CSV and a Markdown rendering. */
REX_API rex_status rex_analyze(const char* results_path, const char* source_dir, int quantiles,
                               char** out_csv, char** out_markdown);

/* Campaigns */

typedef struct rex_campaign rex_campaign;

typedef struct rex_campaign_options {
  /* JSON object of config keys applied over the recorded config; NULL for
   * none. Relative paths resolve against the current directory. */
  const char* overrides_json;
  /* Nonzero prints progress and the final per-class table to stdout. */
  int print_tally;
} rex_campaign_options;

/* Run every unfinished case of a manifest. Per-case failures are recorded in
 * the result log and do not fail the call. */
REX_API rex_status rex_campaign_run(const char* manifest_path, const rex_campaign_options* options,
                                    rex_campaign** out);
/* Continue the campaign recorded in workdir_root. */
REX_API rex_status rex_campaign_resume(const char* workdir_root,
                                       const rex_campaign_options* options, rex_campaign** out);
REX_API void rex_campaign_free(rex_campaign* campaign);

REX_API size_t rex_campaign_total_cases(const rex_campaign* campaign);
REX_API size_t rex_campaign_completed_cases(const rex_campaign* campaign);
REX_API size_t rex_campaign_ran_cases(const rex_campaign* campaign);
/* Nonzero when a stored result is a backend or harness error. */
REX_API int rex_campaign_had_errors(const rex_campaign* campaign);
/* Contents of campaign.summary.json. */
REX_API rex_status rex_campaign_summary_json(const rex_campaign* campaign, char** out_json);

/* Self test */

/* Runs the known-answer checks. Returns REX_OK when all pass; `report` (may
 * be NULL) receives one "PASS name" or "FAIL name: detail" line per check. */
REX_API rex_status rex_selftest(char** report);

#ifdef __cplusplus
}
#endif

#endif /* REX_REX_H_ */
