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

// Schedulability analysis for the one-gang-at-a-time policy.
//
// Because only one gang occupies the platform at a time, the system behaves
// like a uniprocessor running one task per gang. A gang's cost is the largest
// compute among its threads (the lock is held until the last thread finishes),
// and the usual fixed-priority response-time recurrence applies:
//
//   R = C_i + sum_{j in hp(i)} ceil(R / P_j) * C_j
//
// iterated from R = C_i until it is stable or exceeds the deadline P_i.
// Virtual gang members that share a period and offset form one gang. Members
// with different periods are analysed as separate tasks that also interfere
// with each other at equal priority, which is conservative.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gangsim/engine.hpp"
#include "gangsim/taskmodel.hpp"
#include "gangsim/time.hpp"

namespace gangsim {

struct RtaResult {
  std::string task_id;
  Priority priority = 0;
  Micros cost = 0;  // gang cost used in the recurrence
  Micros period = 0;
  std::optional<Micros> wcrt;  // nullopt: unschedulable

  bool schedulable() const { return wcrt.has_value(); }
};

// Per-dispatch context-switch cost folded into each gang's cost as
// 2 * ceil(cost) (own dispatch plus one resume per preemption it causes).
std::vector<RtaResult> rta_gang(const std::vector<RtGangTask>& tasks,
                                Rational context_switch_cost = Rational(0));

struct TaskReport {
  std::string id;
  Priority priority = 0;
  Micros period = 0;
  std::size_t jobs_released = 0;
  std::size_t jobs_finished = 0;
  std::size_t deadline_misses = 0;
  std::vector<Micros> responses;  // finished jobs, release order
  std::optional<Micros> simulated_wcrt;
  std::optional<Micros> rta_wcrt;
  bool rta_schedulable = false;

  bool deadline_met() const { return deadline_misses == 0; }
};

struct AnalysisReport {
  std::string policy;
  std::uint64_t fingerprint = 0;
  int core_count = 0;
  Micros horizon = 0;
  std::vector<TaskReport> tasks;  // scenario order
  Micros slack = 0;               // sum over cores of (horizon - rt time)
  Micros rt_busy = 0;
  Micros be_run = 0;
  Micros be_throttled = 0;
  Micros idle = 0;
  Rational rt_utilization{0};  // rt_busy / (cores * horizon)
  Rational be_utilization{0};
  Rational rt_demand{0};  // sum of max compute / period over gangs
};

// Trace-only metrics; RTA fields are left empty.
AnalysisReport trace_metrics(const Trace& trace);

// trace_metrics plus RTA on the trace's scenario.
AnalysisReport analyze(const Trace& trace);

// Least common multiple of the periods, or nullopt above kHyperperiodCap.
inline constexpr Micros kHyperperiodCap = 1'000'000'000;
std::optional<Micros> hyperperiod(const std::vector<RtGangTask>& tasks);

struct GeneratorParams {
  std::uint64_t seed = 0;
  int n_gangs = 1;
  Rational total_utilization{1, 2};
  int core_count = 4;
  Micros period_min = 10000;
  Micros period_max = 100000;
  Micros period_granularity = 10000;
};

// Random implicit-deadline gangs with rate-monotonic priorities. Per-gang
// utilizations come from uniform simplex sampling; computes are integer
// microseconds chosen so that sum(max compute / period) equals the target
// exactly whenever target * hyperperiod is integral. Periods are redrawn
// while their hyperperiod exceeds kHyperperiodCap. Throws
// std::invalid_argument for infeasible parameters.
std::vector<RtGangTask> generate_taskset(const GeneratorParams& params);

}  // namespace gangsim
