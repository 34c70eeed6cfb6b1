/*
 * Copyright (C) 2026 The gangsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface to the gangsim simulator.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a gs_status; on
 * failure gs_last_error() describes the problem for the calling thread.
 * Strings returned through char** out-parameters are heap allocated and must
 * be released with gs_string_free().
 */

#ifndef GANGSIM_GANGSIM_H
#define GANGSIM_GANGSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define GS_API __declspec(dllexport)
#else
#  define GS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gs_status {
  GS_OK = 0,
  GS_ERR_INVALID_ARGUMENT = 1,
  GS_ERR_PARSE = 2,      /* malformed scenario or trace document */
  GS_ERR_VALIDATION = 3, /* scenario violates a model invariant */
  GS_ERR_IO = 4,
  GS_ERR_INTERNAL = 5
} gs_status;

typedef enum gs_format {
  GS_FORMAT_SEGMENTS_CSV = 0,
  GS_FORMAT_TRACE_JSON = 1,
  GS_FORMAT_REPORT_TEXT = 2,
  GS_FORMAT_REPORT_JSON = 3
} gs_format;

typedef struct gs_scenario gs_scenario;
typedef struct gs_trace gs_trace;

typedef struct gs_job_record {
  const char* task_id; /* valid while the trace lives */
  uint32_t job_index;
  int64_t release_us;
  int64_t deadline_us;
  int64_t finish_us; /* -1 when unfinished at the horizon */
  int deadline_met;
} gs_job_record;

GS_API const char* gs_version(void);
GS_API const char* gs_last_error(void);
GS_API const char* gs_status_name(gs_status status);
GS_API void gs_string_free(char* s);

/* Scenarios */
GS_API gs_status gs_scenario_load_file(const char* path, gs_scenario** out);
GS_API gs_status gs_scenario_load_json(const char* text, gs_scenario** out);
/* name: table1, table1-interference, dnn-tx2, dnn-pi3. dnn_cores <= 0 picks
 * the default (2). */
GS_API gs_status gs_scenario_from_preset(const char* name, int dnn_cores,
                                         gs_scenario** out);
GS_API gs_scenario* gs_scenario_clone(const gs_scenario* scenario);
GS_API void gs_scenario_free(gs_scenario* scenario);

/* policy: co-schedule, co-schedule-ideal, rt-gang */
GS_API gs_status gs_scenario_set_policy(gs_scenario* scenario, const char* policy);
GS_API gs_status gs_scenario_set_horizon(gs_scenario* scenario, int64_t horizon_us);
GS_API gs_status gs_scenario_set_slowdown(gs_scenario* scenario, const char* victim,
                                          const char* interferer, int64_t num,
                                          int64_t den);
GS_API gs_status gs_scenario_set_context_switch_cost(gs_scenario* scenario,
                                                     int64_t num, int64_t den);
/* Named context-switch costs: linux-1thread, rtgang-1thread .. rtgang-4thread */
GS_API gs_status gs_context_switch_preset(const char* name, int64_t* num, int64_t* den);

/* Writes one violation per line to *violations (empty string when valid). */
GS_API gs_status gs_scenario_validate(const gs_scenario* scenario, char** violations,
                                      size_t* count);
GS_API gs_status gs_scenario_to_json(const gs_scenario* scenario, char** out);

/* Validates, binds virtual gangs and simulates. */
GS_API gs_status gs_simulate(const gs_scenario* scenario, gs_trace** out);
GS_API gs_status gs_trace_load_json(const char* text, gs_trace** out);
GS_API void gs_trace_free(gs_trace* trace);

GS_API gs_status gs_trace_export(const gs_trace* trace, gs_format format, char** out);
GS_API gs_status gs_trace_slack(const gs_trace* trace, int64_t* slack_us);
GS_API size_t gs_trace_job_count(const gs_trace* trace);
GS_API gs_status gs_trace_job(const gs_trace* trace, size_t index, gs_job_record* out);

/* Runs every policy (plus the "solo" pseudo-policy when listed) and renders
 * response-time distributions. Either output pointer may be NULL. */
GS_API gs_status gs_compare(const gs_scenario* scenario, const char* const* policies,
                            size_t policy_count, char** text, char** json);

#ifdef __cplusplus
}
#endif

#endif /* GANGSIM_GANGSIM_H */
