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

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gangsim/ganglock.hpp"
#include "gangsim/regulator.hpp"
#include "gangsim/taskmodel.hpp"
#include "gangsim/time.hpp"

namespace gangsim {

inline constexpr const char* kIdleOccupant = "IDLE";

enum class SegmentKind { RtRun, BeRun, BeThrottled, Idle };

const char* kind_name(SegmentKind k);
std::optional<SegmentKind> parse_kind(const std::string& name);

// One stretch of constant occupancy on a core. Real-time segments with a
// progress rate of 0 are context-switch time.
struct Segment {
  CoreIndex core = 0;
  std::string occupant = kIdleOccupant;
  SegmentKind kind = SegmentKind::Idle;
  Micros start = 0;
  Micros end = 0;
  Rational progress_rate{0};
  std::int64_t thread_job = -1;  // index into Trace::thread_jobs, rt only

  Micros duration() const { return end - start; }
  bool operator==(const Segment&) const = default;
};

// One thread of one job instance.
struct ThreadJobRecord {
  std::string task_id;
  std::uint32_t job_index = 0;  // k-th release of the task
  std::uint32_t thread = 0;
  CoreIndex core = 0;
  Micros release = 0;
  Micros deadline = 0;
  Micros compute = 0;
  std::optional<Micros> finish;
  int dispatches = 0;

  bool operator==(const ThreadJobRecord&) const = default;
};

// A job completes when its last thread does.
struct JobRecord {
  std::string task_id;
  std::uint32_t job_index = 0;
  Micros release = 0;
  Micros deadline = 0;
  std::optional<Micros> finish;

  std::optional<Micros> response() const {
    if (!finish) return std::nullopt;
    return *finish - release;
  }
  // A job still running at the horizon counts as met until its deadline passes.
  bool deadline_met(Micros horizon) const {
    if (finish) return *finish <= deadline;
    return deadline > horizon;
  }
  bool operator==(const JobRecord&) const = default;
};

struct Trace {
  std::uint64_t fingerprint = 0;
  Scenario scenario;  // bound copy that produced the trace
  std::vector<Segment> segments;  // ordered by (core, start)
  std::vector<ThreadJobRecord> thread_jobs;
  std::vector<JobRecord> jobs;  // ordered by (release, task id)

  bool operator==(const Trace&) const = default;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs the scenario over [0, horizon). The scenario must validate and have
// its virtual gangs bound; throws SimulationError otherwise.
Trace simulate(const Scenario& scenario);

// 1 / max slowdown over the co-runners; 1 when running alone.
Rational progress_rate(const std::string& task,
                       const std::vector<std::string>& co_runners,
                       const InterferenceModel& model);

struct GangSelection {
  GangLockState lock;
  std::vector<std::optional<ThreadRef>> occupancy;  // per core
  std::vector<SelectionOutcome> outcomes;           // every pick, in order
  std::vector<CoreIndex> pick_order;
};

// One selection instant under the gang policy: pick_next on every core in
// ascending order, then again on any core a pick asked to reschedule.
// `previous` is what each core ran before the instant.
GangSelection rt_gang_select(GangLockState lock,
                             const std::vector<std::optional<ThreadRef>>& previous,
                             const std::vector<std::optional<ThreadRef>>& candidates);

// Best-effort occupancy of cores left without a real-time thread. With
// `regulators` null the cores are unregulated.
std::vector<SegmentKind> best_effort_fill(
    const std::vector<bool>& rt_busy,
    const std::vector<const BestEffortTask*>& be_on_core,
    const std::vector<CoreBudgetState>* regulators);

// Structural checks: per-core tiling of [0, horizon) and exact progress
// conservation of finished thread jobs. Returns the problems found.
std::vector<std::string> check_trace(const Trace& trace);

}  // namespace gangsim
