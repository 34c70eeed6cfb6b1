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

#include "gangsim/gangsim.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "gangsim/analysis.hpp"
#include "gangsim/engine.hpp"
#include "gangsim/export.hpp"
#include "gangsim/scenario_io.hpp"

struct gs_scenario {
  gangsim::Scenario value;
};

struct gs_trace {
  gangsim::Trace value;
};

namespace {

thread_local std::string g_last_error;

gs_status fail(gs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

// Maps exceptions from the C++ core onto status codes.
template <typename F>
gs_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const gangsim::FormatError& e) {
    return fail(GS_ERR_PARSE, e.what());
  } catch (const gangsim::ScenarioError& e) {
    return fail(GS_ERR_VALIDATION, e.what());
  } catch (const gangsim::SimulationError& e) {
    return fail(GS_ERR_VALIDATION, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(GS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GS_ERR_INTERNAL, e.what());
  }
}

std::string violations_text(const std::vector<gangsim::Violation>& vs) {
  std::string out;
  for (const auto& v : vs) out += gangsim::to_string(v) + "\n";
  return out;
}

}  // namespace

extern "C" {

const char* gs_version(void) { return "1.0.0"; }

const char* gs_last_error(void) { return g_last_error.c_str(); }

const char* gs_status_name(gs_status status) {
  switch (status) {
    case GS_OK:
      return "ok";
    case GS_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case GS_ERR_PARSE:
      return "parse error";
    case GS_ERR_VALIDATION:
      return "validation error";
    case GS_ERR_IO:
      return "i/o error";
    case GS_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown";
}

void gs_string_free(char* s) { std::free(s); }

gs_status gs_scenario_load_json(const char* text, gs_scenario** out) {
  if (!text || !out) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new gs_scenario{gangsim::parse_scenario(text)};
    return GS_OK;
  });
}

gs_status gs_scenario_load_file(const char* path, gs_scenario** out) {
  if (!path || !out) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail(GS_ERR_IO, std::string("cannot read ") + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return gs_scenario_load_json(buf.str().c_str(), out);
}

gs_status gs_scenario_from_preset(const char* name, int dnn_cores, gs_scenario** out) {
  if (!name || !out) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    gangsim::PresetOptions opts;
    if (dnn_cores > 0) opts.dnn_cores = dnn_cores;
    *out = new gs_scenario{gangsim::preset(name, opts)};
    return GS_OK;
  });
}

gs_scenario* gs_scenario_clone(const gs_scenario* scenario) {
  if (!scenario) return nullptr;
  return new (std::nothrow) gs_scenario{scenario->value};
}

void gs_scenario_free(gs_scenario* scenario) { delete scenario; }

gs_status gs_scenario_set_policy(gs_scenario* scenario, const char* policy) {
  if (!scenario || !policy) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  auto p = gangsim::parse_policy(policy);
  if (!p) return fail(GS_ERR_INVALID_ARGUMENT, std::string("unknown policy ") + policy);
  scenario->value.policy = *p;
  return GS_OK;
}

gs_status gs_scenario_set_horizon(gs_scenario* scenario, int64_t horizon_us) {
  if (!scenario) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  if (horizon_us <= 0) return fail(GS_ERR_INVALID_ARGUMENT, "horizon must be > 0");
  scenario->value.horizon = horizon_us;
  return GS_OK;
}

gs_status gs_scenario_set_slowdown(gs_scenario* scenario, const char* victim,
                                   const char* interferer, int64_t num, int64_t den) {
  if (!scenario || !victim || !interferer)
    return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  if (den <= 0) return fail(GS_ERR_INVALID_ARGUMENT, "denominator must be > 0");
  scenario->value.interference.set(victim, interferer, gangsim::Rational(num, den));
  return GS_OK;
}

gs_status gs_scenario_set_context_switch_cost(gs_scenario* scenario, int64_t num,
                                              int64_t den) {
  if (!scenario) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  if (den <= 0 || num < 0) return fail(GS_ERR_INVALID_ARGUMENT, "cost must be >= 0");
  scenario->value.platform.context_switch_cost = gangsim::Rational(num, den);
  return GS_OK;
}

gs_status gs_context_switch_preset(const char* name, int64_t* num, int64_t* den) {
  if (!name || !num || !den) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  auto cost = gangsim::context_switch_preset(name);
  if (!cost)
    return fail(GS_ERR_INVALID_ARGUMENT, std::string("unknown context-switch preset ") + name);
  *num = cost->numerator();
  *den = cost->denominator();
  return GS_OK;
}

gs_status gs_scenario_validate(const gs_scenario* scenario, char** violations,
                               size_t* count) {
  if (!scenario) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto vs = gangsim::validate(scenario->value);
    if (count) *count = vs.size();
    if (violations) *violations = dup(violations_text(vs));
    return GS_OK;
  });
}

gs_status gs_scenario_to_json(const gs_scenario* scenario, char** out) {
  if (!scenario || !out) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(gangsim::dump_scenario(scenario->value));
    return GS_OK;
  });
}

gs_status gs_simulate(const gs_scenario* scenario, gs_trace** out) {
  if (!scenario || !out) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto vs = gangsim::validate(scenario->value);
    if (!vs.empty()) return fail(GS_ERR_VALIDATION, violations_text(vs));
    auto bound = gangsim::bind_virtual_gangs(scenario->value);
    *out = new gs_trace{gangsim::simulate(bound)};
    return GS_OK;
  });
}

gs_status gs_trace_load_json(const char* text, gs_trace** out) {
  if (!text || !out) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new gs_trace{gangsim::trace_from_json(text)};
    return GS_OK;
  });
}

void gs_trace_free(gs_trace* trace) { delete trace; }

gs_status gs_trace_export(const gs_trace* trace, gs_format format, char** out) {
  if (!trace || !out) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    switch (format) {
      case GS_FORMAT_SEGMENTS_CSV:
        *out = dup(gangsim::segments_csv(trace->value));
        return GS_OK;
      case GS_FORMAT_TRACE_JSON:
        *out = dup(gangsim::trace_json(trace->value));
        return GS_OK;
      case GS_FORMAT_REPORT_TEXT:
        *out = dup(gangsim::report_text(gangsim::analyze(trace->value)));
        return GS_OK;
      case GS_FORMAT_REPORT_JSON:
        *out = dup(gangsim::report_json(gangsim::analyze(trace->value)));
        return GS_OK;
    }
    return fail(GS_ERR_INVALID_ARGUMENT, "unknown format");
  });
}

gs_status gs_trace_slack(const gs_trace* trace, int64_t* slack_us) {
  if (!trace || !slack_us) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  *slack_us = gangsim::trace_metrics(trace->value).slack;
  return GS_OK;
}

size_t gs_trace_job_count(const gs_trace* trace) {
  return trace ? trace->value.jobs.size() : 0;
}

gs_status gs_trace_job(const gs_trace* trace, size_t index, gs_job_record* out) {
  if (!trace || !out) return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  if (index >= trace->value.jobs.size())
    return fail(GS_ERR_INVALID_ARGUMENT, "job index out of range");
  const auto& j = trace->value.jobs[index];
  out->task_id = j.task_id.c_str();
  out->job_index = j.job_index;
  out->release_us = j.release;
  out->deadline_us = j.deadline;
  out->finish_us = j.finish.value_or(-1);
  out->deadline_met = j.deadline_met(trace->value.scenario.horizon) ? 1 : 0;
  return GS_OK;
}

gs_status gs_compare(const gs_scenario* scenario, const char* const* policies,
                     size_t policy_count, char** text, char** json) {
  if (!scenario || (!policies && policy_count))
    return fail(GS_ERR_INVALID_ARGUMENT, "null argument");
  if (policy_count < 2) return fail(GS_ERR_INVALID_ARGUMENT, "compare needs >= 2 policies");
  return guarded([&] {
    std::vector<std::string> names(policies, policies + policy_count);
    for (const auto& n : names)
      if (n != gangsim::kSoloPolicy && !gangsim::parse_policy(n))
        return fail(GS_ERR_INVALID_ARGUMENT, "unknown policy " + n);
    // Validate once against the gang policy, whose checks are the strictest.
    auto probe = scenario->value;
    probe.policy = gangsim::Policy::RtGang;
    auto vs = gangsim::validate(probe);
    if (!vs.empty()) return fail(GS_ERR_VALIDATION, violations_text(vs));
    auto c = gangsim::compare(scenario->value, names);
    if (text) *text = dup(gangsim::comparison_text(c));
    if (json) *json = dup(gangsim::comparison_json(c));
    return GS_OK;
  });
}

}  // extern "C"
