// Copyright 2026 The nlapi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/*
 * nlapi: natural-language API routing, dataset generation and evaluation.
 *
 * Conventions:
 *   - Every fallible call returns nlapi_status. On failure a message is
 *     available from nlapi_last_error() on the calling thread.
 *   - Strings returned through char** out-parameters are heap allocated and
 *     must be released with nlapi_string_free().
 *   - Handles are opaque and released with their matching *_free function.
 *   - Paths may be NULL or "" where documented to select built-in defaults.
 */
#ifndef NLAPI_NLAPI_H_
#define NLAPI_NLAPI_H_

#include <stddef.h>
#include <stdint.h>

#if defined(NLAPI_BUILDING)
#define NLAPI_EXPORT __attribute__((visibility("default")))
#else
#define NLAPI_EXPORT
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlapi_status {
  NLAPI_OK = 0,
  NLAPI_ERR_INVALID_ARGUMENT = 1,
  NLAPI_ERR_MALFORMED_DOCUMENT = 2,
  NLAPI_ERR_DUPLICATE_NAME = 3,
  NLAPI_ERR_MISSING_RESERVED_LABEL = 4,
  NLAPI_ERR_INVALID_REGISTRY = 5,
  NLAPI_ERR_EMPTY_QUERY = 6,
  NLAPI_ERR_QUERY_TOO_LONG = 7,
  NLAPI_ERR_CLASSIFICATION_UNAVAILABLE = 8,
  NLAPI_ERR_BACKEND_UNAVAILABLE = 9,
  NLAPI_ERR_GENERATION_DEGRADED = 10,
  NLAPI_ERR_ASSEMBLY = 11,
  NLAPI_ERR_DUPLICATE_DECISION = 12,
  NLAPI_ERR_CONFLICT = 13,
  NLAPI_ERR_IO = 14,
  NLAPI_ERR_INTERNAL = 15
} nlapi_status;

NLAPI_EXPORT const char* nlapi_version(void);
NLAPI_EXPORT const char* nlapi_status_name(nlapi_status status);
/* Message of the last failure on this thread; "" if none. */
NLAPI_EXPORT const char* nlapi_last_error(void);
NLAPI_EXPORT void nlapi_string_free(char* s);
/* trace, debug, info, warn, error, off */
NLAPI_EXPORT nlapi_status nlapi_set_log_level(const char* level);

/* ---- registry ---------------------------------------------------------- */

typedef struct nlapi_registry nlapi_registry;

/* path NULL or "" loads the built-in hierarchy. */
NLAPI_EXPORT nlapi_status nlapi_registry_load(const char* path, nlapi_registry** out);
NLAPI_EXPORT nlapi_status nlapi_registry_from_json(const char* json, nlapi_registry** out);
NLAPI_EXPORT nlapi_status nlapi_registry_to_json(const nlapi_registry* registry, char** out_json);
NLAPI_EXPORT nlapi_status nlapi_registry_digest(const nlapi_registry* registry, char** out_text);
NLAPI_EXPORT int64_t nlapi_registry_version(const nlapi_registry* registry);
NLAPI_EXPORT void nlapi_registry_free(nlapi_registry* registry);

/* ---- gateway ----------------------------------------------------------- */

typedef struct nlapi_gateway nlapi_gateway;
typedef struct nlapi_server nlapi_server;

/* config_path NULL or "" uses defaults: built-in registry, one mock backend. */
NLAPI_EXPORT nlapi_status nlapi_gateway_open(const char* config_path, nlapi_gateway** out);
/* Relative paths inside config_json resolve against base_dir (may be NULL). */
NLAPI_EXPORT nlapi_status nlapi_gateway_open_json(const char* config_json, const char* base_dir,
                                                  nlapi_gateway** out);
NLAPI_EXPORT void nlapi_gateway_free(nlapi_gateway* gateway);

/*
 * Runs one query through the pipeline. out_http_status receives the status the
 * HTTP endpoint would answer with; out_json receives the response body (a
 * QueryResponse, or {"error": {...}} for non-200 outcomes). The return value
 * mirrors the failure kind and is NLAPI_OK for every 200 outcome.
 */
NLAPI_EXPORT nlapi_status nlapi_gateway_query(nlapi_gateway* gateway, const char* text, const char* session_id,
                                              int* out_http_status, char** out_json);
/* before may be NULL. */
NLAPI_EXPORT nlapi_status nlapi_gateway_history(nlapi_gateway* gateway, const char* session_id, int limit,
                                                const int64_t* before, char** out_json);
NLAPI_EXPORT nlapi_status nlapi_gateway_health(nlapi_gateway* gateway, char** out_json);
/* {"policy": "...", "backends": [BackendSpec, ...]} */
NLAPI_EXPORT nlapi_status nlapi_gateway_set_pool(nlapi_gateway* gateway, const char* pool_json);
NLAPI_EXPORT uint64_t nlapi_gateway_classifier_invocations(const nlapi_gateway* gateway);

/*
 * host NULL and port < 0 take the address from the gateway config; port 0
 * picks a free port. The server keeps the gateway alive.
 */
NLAPI_EXPORT nlapi_status nlapi_server_create(nlapi_gateway* gateway, const char* host, int port,
                                              nlapi_server** out);
NLAPI_EXPORT int nlapi_server_port(const nlapi_server* server);
/* Serves on a background thread. */
NLAPI_EXPORT nlapi_status nlapi_server_start(nlapi_server* server);
NLAPI_EXPORT void nlapi_server_stop(nlapi_server* server);
NLAPI_EXPORT void nlapi_server_free(nlapi_server* server);

/* ---- datagen ----------------------------------------------------------- */

typedef struct nlapi_generate_options {
  const char* registry_path; /* NULL: built-in */
  const char* backend_id;    /* "template" or an id from config_path */
  const char* plan_path;     /* NULL: default per-module allocation */
  const char* config_path;   /* backend specs; needed for non-template ids */
  const char* out_path;
  uint64_t seed;
  int batch_size;    /* 0: 100 */
  int allow_partial; /* keep degraded batches with at least half the queries */
} nlapi_generate_options;

/* Writes the dataset; out_summary_json (may be NULL) receives its stats. */
NLAPI_EXPORT nlapi_status nlapi_datagen_generate(const nlapi_generate_options* options, char** out_summary_json);
NLAPI_EXPORT nlapi_status nlapi_datagen_stats(const char* registry_path, const char* dataset_path, char** out_json);

typedef struct nlapi_review nlapi_review;

/* Resumes from the decision journal next to the dataset if one exists. */
NLAPI_EXPORT nlapi_status nlapi_review_open(const char* dataset_path, const char* registry_path,
                                            nlapi_review** out);
/* Index of the next unreviewed record, or -1 when none remain. */
NLAPI_EXPORT int64_t nlapi_review_next(const nlapi_review* review);
NLAPI_EXPORT nlapi_status nlapi_review_record(const nlapi_review* review, int64_t index, char** out_json);
NLAPI_EXPORT nlapi_status nlapi_review_decide(nlapi_review* review, int64_t index, int accept, const char* reason);
/* {"session": ReviewStats, "dataset": ReviewStats, "resumed": n, "remaining": n} */
NLAPI_EXPORT nlapi_status nlapi_review_stats(const nlapi_review* review, char** out_json);
/* Writes the dataset and removes the journal. */
NLAPI_EXPORT nlapi_status nlapi_review_save(nlapi_review* review);
NLAPI_EXPORT void nlapi_review_free(nlapi_review* review);

/*
 * Applies a scripted decision list [{"index": n, "decision": "accept"|"reject",
 * "reason": "..."}] in one session and saves the dataset.
 */
NLAPI_EXPORT nlapi_status nlapi_review_apply(const char* dataset_path, const char* registry_path,
                                             const char* decisions_json, char** out_stats_json);

/* ---- evaluation -------------------------------------------------------- */

typedef struct nlapi_eval_options {
  const char* dataset_path;
  const char* registry_path; /* NULL: built-in */
  const char* backend_id;    /* "mock" or an id from config_path */
  const char* config_path;
  const char* out_path; /* JSON lines, appended and resumed */
  int workers;          /* 0: 4 */
  const char* records;  /* "accepted" (default), "not_rejected" or "all" */
} nlapi_eval_options;

NLAPI_EXPORT nlapi_status nlapi_eval_run(const nlapi_eval_options* options, char** out_summary_json);
/* format: "table" or "json" */
NLAPI_EXPORT nlapi_status nlapi_eval_score(const char* const* prediction_paths, size_t count,
                                           const char* registry_path, const char* format, char** out_text);
/* out_pool_config_json may be NULL. */
NLAPI_EXPORT nlapi_status nlapi_eval_select(const char* const* prediction_paths, size_t count,
                                            const char* registry_path, const char* config_path,
                                            char** out_backend_id, char** out_pool_config_json);

#ifdef __cplusplus
}
#endif

#endif /* NLAPI_NLAPI_H_ */
