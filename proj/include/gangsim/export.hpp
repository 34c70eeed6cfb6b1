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

// Output formats: segment CSV, trace-event JSON, analysis reports and
// policy comparisons.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gangsim/analysis.hpp"
#include "gangsim/engine.hpp"

namespace gangsim {

// core,occupant,kind,start_us,end_us,progress_rate_num,progress_rate_den
std::string segments_csv(const Trace& trace);

// Trace-event JSON: one complete ("X") event per segment, pid = core.
// Job records and the scenario ride along under the "gangsim" key so the
// file can be re-imported.
nlohmann::json trace_to_json(const Trace& trace);
std::string trace_json(const Trace& trace);
Trace trace_from_json(const std::string& text);  // throws FormatError

std::string report_text(const AnalysisReport& report);
nlohmann::json report_to_json(const AnalysisReport& report);
std::string report_json(const AnalysisReport& report);

struct Distribution {
  std::size_t count = 0;
  Micros min = 0;
  Micros max = 0;
  Micros p50 = 0;
  Micros p90 = 0;
  Micros p99 = 0;
  Rational mean{0};
};

// Nearest-rank percentiles.
Distribution distribution(std::vector<Micros> samples);

inline constexpr const char* kSoloPolicy = "solo";

struct Comparison {
  std::vector<std::string> labels;
  std::vector<AnalysisReport> reports;
};

// Runs the scenario under each named policy. "solo" simulates every gang on
// its own (no other gangs, no best-effort work, no interference). Runs are
// independent and execute concurrently.
Comparison compare(const Scenario& scenario, const std::vector<std::string>& policies);

std::string comparison_text(const Comparison& comparison);
nlohmann::json comparison_to_json(const Comparison& comparison);
std::string comparison_json(const Comparison& comparison);

}  // namespace gangsim
