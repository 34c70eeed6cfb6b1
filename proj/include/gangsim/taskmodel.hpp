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
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gangsim/time.hpp"

namespace gangsim {

// Core masks are 64-bit, which bounds the platform size.
inline constexpr int kMaxCores = 64;

using CoreIndex = int;
using Priority = int;  // larger value = higher priority

struct Platform {
  int core_count = 1;
  Micros regulation_period = 1000;
  Rational context_switch_cost{0};  // µs, may be fractional

  bool operator==(const Platform&) const = default;
};

// A periodic parallel real-time task. Each thread is pinned to one core and
// has its own solo-measured compute time. Deadline equals period.
struct RtGangTask {
  std::string id;
  Priority priority = 0;
  Micros period = 0;
  std::vector<Micros> per_thread_compute;
  std::vector<CoreIndex> core_assignment;
  // Best-effort memory transactions allowed per regulation period on each
  // best-effort core while this gang leads. 0 forbids co-scheduling.
  std::int64_t bandwidth_threshold = 0;
  Micros release_offset = 0;

  Micros deadline() const { return period; }
  std::size_t thread_count() const { return per_thread_compute.size(); }
  Micros max_compute() const;

  bool operator==(const RtGangTask&) const = default;
};

struct VirtualGangSpec {
  std::vector<std::string> member_ids;
  Priority shared_priority = 0;
  std::int64_t bandwidth_threshold = 0;

  bool operator==(const VirtualGangSpec&) const = default;
};

// Always-ready background workload; no priority, always below every gang.
struct BestEffortTask {
  std::string id;
  std::vector<CoreIndex> core_assignment;
  std::int64_t memory_demand_rate = 0;  // transactions per regulation period

  bool operator==(const BestEffortTask&) const = default;
};

// Pairwise slowdown factors (victim, interferer) -> factor >= 1.
class InterferenceModel {
 public:
  using Key = std::pair<std::string, std::string>;

  void set(const std::string& victim, const std::string& interferer,
           Rational factor);
  Rational slowdown(const std::string& victim,
                    const std::string& interferer) const;
  const std::map<Key, Rational>& entries() const { return slowdown_; }
  bool empty() const { return slowdown_.empty(); }

  bool operator==(const InterferenceModel&) const = default;

 private:
  std::map<Key, Rational> slowdown_;
};

enum class Policy { CoSchedule, CoScheduleWithInterference, RtGang };

const char* policy_name(Policy p);
std::optional<Policy> parse_policy(const std::string& name);

struct Scenario {
  Platform platform;
  std::vector<RtGangTask> rt_tasks;
  std::vector<VirtualGangSpec> virtual_gangs;
  std::vector<BestEffortTask> be_tasks;
  InterferenceModel interference;
  Policy policy = Policy::RtGang;
  Micros horizon = 0;
  std::uint64_t seed = 0;

  const RtGangTask* find_rt(const std::string& id) const;
  const BestEffortTask* find_be(const std::string& id) const;

  bool operator==(const Scenario&) const = default;
};

struct Violation {
  std::string entity;  // offending id(s), comma separated
  std::string message;

  bool operator==(const Violation&) const = default;
};

std::string to_string(const Violation& v);

// Returns every structural invariant violation; empty means valid.
// Virtual gang members are checked against their gang's shared priority, so a
// scenario may be validated before bind_virtual_gangs.
std::vector<Violation> validate(const Scenario& scenario);

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stamps each virtual gang's shared priority and threshold onto its members.
// Throws ScenarioError on unknown members or a task claimed by two gangs.
Scenario bind_virtual_gangs(const Scenario& scenario);

// True when every virtual gang member already carries the gang's values.
bool virtual_gangs_bound(const Scenario& scenario);

}  // namespace gangsim
