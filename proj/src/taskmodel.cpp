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

#include "gangsim/taskmodel.hpp"

#include <algorithm>
#include <set>

namespace gangsim {

Micros RtGangTask::max_compute() const {
  Micros m = 0;
  for (auto c : per_thread_compute) m = std::max(m, c);
  return m;
}

void InterferenceModel::set(const std::string& victim,
                            const std::string& interferer, Rational factor) {
  slowdown_[{victim, interferer}] = factor;
}

Rational InterferenceModel::slowdown(const std::string& victim,
                                     const std::string& interferer) const {
  if (victim == interferer) return Rational(1);
  auto it = slowdown_.find({victim, interferer});
  return it == slowdown_.end() ? Rational(1) : it->second;
}

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::CoSchedule:
      return "co-schedule-ideal";
    case Policy::CoScheduleWithInterference:
      return "co-schedule";
    case Policy::RtGang:
      return "rt-gang";
  }
  return "?";
}

std::optional<Policy> parse_policy(const std::string& name) {
  if (name == "co-schedule-ideal") return Policy::CoSchedule;
  if (name == "co-schedule" || name == "co-schedule-interference")
    return Policy::CoScheduleWithInterference;
  if (name == "rt-gang") return Policy::RtGang;
  return std::nullopt;
}

const RtGangTask* Scenario::find_rt(const std::string& id) const {
  for (const auto& t : rt_tasks)
    if (t.id == id) return &t;
  return nullptr;
}

const BestEffortTask* Scenario::find_be(const std::string& id) const {
  for (const auto& t : be_tasks)
    if (t.id == id) return &t;
  return nullptr;
}

std::string to_string(const Violation& v) {
  return v.entity + ": " + v.message;
}

namespace {

class Checker {
 public:
  explicit Checker(const Scenario& s) : s_(s) {}

  std::vector<Violation> run() {
    platform();
    rt_tasks();
    virtual_gangs();
    priorities();
    be_tasks();
    interference();
    if (s_.horizon <= 0) add("scenario", "horizon must be > 0");
    return std::move(out_);
  }

 private:
  void add(std::string entity, std::string message) {
    out_.push_back({std::move(entity), std::move(message)});
  }

  bool core_ok(CoreIndex c) const {
    return c >= 0 && c < s_.platform.core_count;
  }

  void platform() {
    const auto& p = s_.platform;
    if (p.core_count < 1) add("platform", "core_count must be >= 1");
    if (p.core_count > kMaxCores)
      add("platform", "core_count must be <= " + std::to_string(kMaxCores));
    if (p.regulation_period <= 0)
      add("platform", "regulation_period must be > 0");
    if (p.context_switch_cost < 0)
      add("platform", "context_switch_cost must be >= 0");
  }

  void rt_tasks() {
    std::set<std::string> seen;
    for (const auto& t : s_.rt_tasks) {
      if (t.id.empty()) add("rt_task", "id must not be empty");
      if (!seen.insert(t.id).second) add(t.id, "duplicate task id");
      if (t.period <= 0) add(t.id, "period must be > 0");
      if (t.per_thread_compute.empty()) add(t.id, "needs at least one thread");
      if (t.per_thread_compute.size() != t.core_assignment.size())
        add(t.id, "per_thread_compute and core_assignment differ in length");
      for (auto c : t.per_thread_compute) {
        if (c <= 0) add(t.id, "compute time must be > 0");
        else if (t.period > 0 && c > t.period)
          add(t.id, "compute time exceeds period");
      }
      std::set<CoreIndex> cores;
      for (auto c : t.core_assignment) {
        if (!core_ok(c))
          add(t.id, "core index " + std::to_string(c) + " out of range");
        if (!cores.insert(c).second)
          add(t.id, "core index " + std::to_string(c) + " assigned twice");
      }
      if (t.bandwidth_threshold < 0)
        add(t.id, "bandwidth_threshold must be >= 0");
      if (t.release_offset < 0) add(t.id, "release_offset must be >= 0");
    }
  }

  void virtual_gangs() {
    std::map<std::string, std::size_t> owner;
    for (std::size_t g = 0; g < s_.virtual_gangs.size(); ++g) {
      const auto& vg = s_.virtual_gangs[g];
      std::string name = "virtual_gang[" + std::to_string(g) + "]";
      if (vg.member_ids.empty()) add(name, "has no members");
      if (vg.bandwidth_threshold < 0)
        add(name, "bandwidth_threshold must be >= 0");
      for (const auto& m : vg.member_ids) {
        if (!s_.find_rt(m)) add(m, "virtual gang member is not a real-time task");
        auto [it, inserted] = owner.emplace(m, g);
        if (!inserted) add(m, "claimed by more than one virtual gang");
      }
    }
  }

  void priorities() {
    if (s_.policy != Policy::RtGang) return;
    // gang label -> priority; a virtual gang is one gang.
    std::map<Priority, std::vector<std::string>> by_prio;
    std::set<std::string> in_virtual;
    for (std::size_t g = 0; g < s_.virtual_gangs.size(); ++g) {
      const auto& vg = s_.virtual_gangs[g];
      std::string label;
      for (const auto& m : vg.member_ids) {
        in_virtual.insert(m);
        label += (label.empty() ? "" : "+") + m;
      }
      by_prio[vg.shared_priority].push_back(label);
    }
    for (const auto& t : s_.rt_tasks)
      if (!in_virtual.count(t.id)) by_prio[t.priority].push_back(t.id);
    for (const auto& [prio, gangs] : by_prio) {
      if (gangs.size() < 2) continue;
      std::string ids;
      for (const auto& g : gangs) ids += (ids.empty() ? "" : ",") + g;
      add(ids, "distinct gangs share priority " + std::to_string(prio));
    }
  }

  void be_tasks() {
    std::set<std::string> seen;
    std::map<CoreIndex, std::string> core_owner;
    for (const auto& b : s_.be_tasks) {
      if (b.id.empty()) add("be_task", "id must not be empty");
      if (!seen.insert(b.id).second || s_.find_rt(b.id))
        add(b.id, "duplicate task id");
      if (b.core_assignment.empty()) add(b.id, "needs at least one core");
      if (b.memory_demand_rate < 0)
        add(b.id, "memory_demand_rate must be >= 0");
      std::set<CoreIndex> cores;
      for (auto c : b.core_assignment) {
        if (!core_ok(c))
          add(b.id, "core index " + std::to_string(c) + " out of range");
        if (!cores.insert(c).second)
          add(b.id, "core index " + std::to_string(c) + " assigned twice");
        auto [it, inserted] = core_owner.emplace(c, b.id);
        if (!inserted && it->second != b.id)
          add(it->second + "," + b.id,
              "more than one best-effort task on core " + std::to_string(c));
      }
    }
  }

  void interference() {
    for (const auto& [key, factor] : s_.interference.entries()) {
      const auto& [victim, interferer] = key;
      std::string ids = victim + "," + interferer;
      if (!s_.find_rt(victim) && !s_.find_be(victim))
        add(victim, "interference victim is not a known task");
      if (!s_.find_rt(interferer) && !s_.find_be(interferer))
        add(interferer, "interference source is not a known task");
      if (factor < 1) add(ids, "slowdown factor must be >= 1");
      if (victim == interferer && factor != Rational(1))
        add(ids, "self-interference factor must be 1");
    }
  }

  const Scenario& s_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const Scenario& scenario) {
  return Checker(scenario).run();
}

Scenario bind_virtual_gangs(const Scenario& scenario) {
  Scenario bound = scenario;
  std::set<std::string> claimed;
  for (const auto& vg : scenario.virtual_gangs) {
    for (const auto& m : vg.member_ids) {
      if (!claimed.insert(m).second)
        throw ScenarioError("task " + m + " is claimed by two virtual gangs");
      auto it = std::find_if(bound.rt_tasks.begin(), bound.rt_tasks.end(),
                             [&](const RtGangTask& t) { return t.id == m; });
      if (it == bound.rt_tasks.end())
        throw ScenarioError("virtual gang member " + m + " is unknown");
      it->priority = vg.shared_priority;
      it->bandwidth_threshold = vg.bandwidth_threshold;
    }
  }
  return bound;
}

bool virtual_gangs_bound(const Scenario& scenario) {
  for (const auto& vg : scenario.virtual_gangs) {
    for (const auto& m : vg.member_ids) {
      const auto* t = scenario.find_rt(m);
      if (!t || t->priority != vg.shared_priority ||
          t->bandwidth_threshold != vg.bandwidth_threshold)
        return false;
    }
  }
  return true;
}

}  // namespace gangsim
