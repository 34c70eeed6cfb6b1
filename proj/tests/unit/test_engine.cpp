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

#include <gtest/gtest.h>

#include <algorithm>
#include <tuple>

#include "gangsim/analysis.hpp"
#include "gangsim/engine.hpp"
#include "gangsim/scenario_io.hpp"
#include "random_scenarios.hpp"

namespace gangsim {
namespace {

// (occupant, kind, start, end) after merging neighbours that differ only by
// a regulation-period split.
using Span = std::tuple<std::string, SegmentKind, Micros, Micros>;

std::vector<Span> spans(const Trace& t, CoreIndex core) {
  std::vector<Span> out;
  for (const auto& s : t.segments) {
    if (s.core != core) continue;
    if (!out.empty() && std::get<0>(out.back()) == s.occupant &&
        std::get<1>(out.back()) == s.kind && std::get<3>(out.back()) == s.start) {
      std::get<3>(out.back()) = s.end;
      continue;
    }
    out.emplace_back(s.occupant, s.kind, s.start, s.end);
  }
  return out;
}

std::optional<Micros> finish_of(const Trace& t, const std::string& id,
                                std::uint32_t job = 0) {
  for (const auto& j : t.jobs)
    if (j.task_id == id && j.job_index == job) return j.finish;
  return std::nullopt;
}

RtGangTask gang(std::string id, Priority prio, Micros period, std::vector<Micros> compute,
                std::vector<CoreIndex> cores, Micros offset = 0) {
  RtGangTask t;
  t.id = std::move(id);
  t.priority = prio;
  t.period = period;
  t.per_thread_compute = std::move(compute);
  t.core_assignment = std::move(cores);
  t.release_offset = offset;
  return t;
}

constexpr auto Rt = SegmentKind::RtRun;
constexpr auto Be = SegmentKind::BeRun;
constexpr auto Thr = SegmentKind::BeThrottled;
constexpr auto Idle = SegmentKind::Idle;

TEST(Simulate, CoScheduleTableOne) {
  auto s = preset("table1");
  s.policy = Policy::CoSchedule;
  auto t = simulate(s);
  for (CoreIndex c : {0, 1})
    EXPECT_EQ(spans(t, c), (std::vector<Span>{{"tau1", Rt, 0, 2000}, {"tau3", Be, 2000, 10000}}));
  for (CoreIndex c : {2, 3})
    EXPECT_EQ(spans(t, c), (std::vector<Span>{{"tau2", Rt, 0, 4000}, {"tau3", Be, 4000, 10000}}));
  EXPECT_EQ(finish_of(t, "tau1"), 2000);
  EXPECT_EQ(finish_of(t, "tau2"), 4000);
  EXPECT_EQ(trace_metrics(t).slack, 28000);
  EXPECT_TRUE(check_trace(t).empty());
}

TEST(Simulate, RtGangTableOne) {
  auto t = simulate(preset("table1"));
  for (CoreIndex c : {0, 1})
    EXPECT_EQ(spans(t, c), (std::vector<Span>{{"tau1", Rt, 0, 2000}, {"tau3", Be, 2000, 10000}}));
  for (CoreIndex c : {2, 3})
    EXPECT_EQ(spans(t, c), (std::vector<Span>{{"tau3", Be, 0, 2000},
                                              {"tau2", Rt, 2000, 6000},
                                              {"tau3", Be, 6000, 10000}}));
  EXPECT_EQ(finish_of(t, "tau1"), 2000);
  EXPECT_EQ(finish_of(t, "tau2"), 6000);
  EXPECT_EQ(trace_metrics(t).slack, 28000);
}

TEST(Simulate, CoScheduleWithInterferenceTableOne) {
  auto t = simulate(preset("table1-interference"));
  EXPECT_EQ(finish_of(t, "tau1"), 5600);
  EXPECT_EQ(finish_of(t, "tau2"), 4000);
  EXPECT_EQ(trace_metrics(t).slack, 20800);
  // 4 ms at rate 1/10 is 0.4 ms of progress, 20% of tau1's work.
  Rational progress{0};
  for (const auto& seg : t.segments)
    if (seg.core == 0 && seg.occupant == "tau1" && seg.end <= 4000)
      progress += seg.progress_rate * seg.duration();
  EXPECT_EQ(progress, Rational(400));
  EXPECT_TRUE(check_trace(t).empty());
}

TEST(Simulate, ZeroThresholdForbidsCoScheduling) {
  auto s = preset("table1");
  for (auto& t : s.rt_tasks) t.bandwidth_threshold = 0;
  auto t = simulate(s);
  EXPECT_EQ(spans(t, 2), (std::vector<Span>{{"tau3", Thr, 0, 2000},
                                            {"tau2", Rt, 2000, 6000},
                                            {"tau3", Be, 6000, 10000}}));
  EXPECT_EQ(spans(t, 0), (std::vector<Span>{{"tau1", Rt, 0, 2000},
                                            {"tau3", Thr, 2000, 6000},
                                            {"tau3", Be, 6000, 10000}}));
}

TEST(Simulate, ThrottledByLeaderThreshold) {
  auto s = preset("table1");
  s.be_tasks[0].memory_demand_rate = 1000;  // twice tau1's threshold
  auto t = simulate(s);
  // Each 1 ms period while tau1 leads: 500 µs of run, then throttled.
  EXPECT_EQ(spans(t, 2)[0], (Span{"tau3", Be, 0, 500}));
  EXPECT_EQ(spans(t, 2)[1], (Span{"tau3", Thr, 500, 1000}));
  EXPECT_EQ(spans(t, 2)[2], (Span{"tau3", Be, 1000, 1500}));
  EXPECT_EQ(finish_of(t, "tau2"), 6000);
}

TEST(Simulate, PreemptionEvictsWholeGang) {
  // A single-thread gang arrives while a three-thread gang runs.
  Scenario s;
  s.platform.core_count = 4;
  s.horizon = 10000;
  s.rt_tasks.push_back(gang("t2", 2, 10000, {5000, 5000, 5000}, {0, 1, 2}));
  s.rt_tasks.push_back(gang("t3", 3, 10000, {2000}, {3}, 1000));
  auto t = simulate(s);
  for (CoreIndex c : {0, 1, 2})
    EXPECT_EQ(spans(t, c), (std::vector<Span>{{"t2", Rt, 0, 1000},
                                              {kIdleOccupant, Idle, 1000, 3000},
                                              {"t2", Rt, 3000, 7000},
                                              {kIdleOccupant, Idle, 7000, 10000}}));
  EXPECT_EQ(finish_of(t, "t3"), 3000);
  EXPECT_EQ(finish_of(t, "t2"), 7000);
}

TEST(Simulate, LockHeldUntilLastThreadCompletes) {
  Scenario s;
  s.platform.core_count = 2;
  s.horizon = 10000;
  s.rt_tasks.push_back(gang("t1", 9, 10000, {1000, 3000}, {0, 1}));
  s.rt_tasks.push_back(gang("t4", 5, 10000, {500}, {0}));
  auto t = simulate(s);
  EXPECT_EQ(spans(t, 0), (std::vector<Span>{{"t1", Rt, 0, 1000},
                                            {kIdleOccupant, Idle, 1000, 3000},
                                            {"t4", Rt, 3000, 3500},
                                            {kIdleOccupant, Idle, 3500, 10000}}));
}

TEST(Simulate, NoRealTimeWorkLeavesBestEffortUnregulated) {
  Scenario s;
  s.platform.core_count = 2;
  s.horizon = 5000;
  BestEffortTask be;
  be.id = "hog";
  be.core_assignment = {0, 1};
  be.memory_demand_rate = 100000;
  s.be_tasks.push_back(be);
  auto t = simulate(s);
  for (CoreIndex c : {0, 1})
    EXPECT_EQ(spans(t, c), (std::vector<Span>{{"hog", Be, 0, 5000}}));
  EXPECT_EQ(trace_metrics(t).slack, 10000);
}

TEST(Simulate, VirtualGangRunsTogether) {
  Scenario s;
  s.platform.core_count = 3;
  s.horizon = 10000;
  s.rt_tasks.push_back(gang("a", 1, 10000, {1000}, {0}));
  s.rt_tasks.push_back(gang("b", 2, 10000, {2000}, {1}));
  s.rt_tasks.push_back(gang("hi", 3, 10000, {500}, {2}));
  s.virtual_gangs.push_back({{"a", "b"}, 5, 0});
  auto t = simulate(bind_virtual_gangs(s));
  EXPECT_EQ(finish_of(t, "a"), 1000);
  EXPECT_EQ(finish_of(t, "b"), 2000);
  EXPECT_EQ(finish_of(t, "hi"), 2500);
}

TEST(Simulate, RejectsBadInput) {
  auto s = preset("table1");
  s.horizon = 0;
  EXPECT_THROW(simulate(s), SimulationError);
  Scenario v;
  v.platform.core_count = 1;
  v.horizon = 100;
  v.rt_tasks.push_back(gang("a", 1, 100, {10}, {0}));
  v.virtual_gangs.push_back({{"a"}, 4, 0});
  EXPECT_THROW(simulate(v), SimulationError);
  EXPECT_NO_THROW(simulate(bind_virtual_gangs(v)));
}

TEST(Simulate, ContextSwitchCostIsNonProgressTime) {
  auto s = preset("table1");
  s.platform.context_switch_cost = Rational(719, 100);
  auto t = simulate(s);
  EXPECT_EQ(finish_of(t, "tau1"), 2007);
  EXPECT_EQ(finish_of(t, "tau2"), 6014);
  EXPECT_TRUE(check_trace(t).empty());
}

TEST(Simulate, FractionalRatesFinishExactly) {
  auto s = preset("table1-interference");
  s.interference.set("tau1", "tau2", Rational(3));
  s.interference.set("tau2", "tau1", Rational(7, 3));
  auto t = simulate(s);
  EXPECT_TRUE(check_trace(t).empty());
  for (const auto& seg : t.segments) EXPECT_LT(seg.start, seg.end);
}

TEST(ProgressRate, Examples) {
  InterferenceModel m;
  m.set("tau1", "tau2", Rational(10));
  m.set("tau2", "tau1", Rational(1));
  EXPECT_EQ(progress_rate("tau1", {"tau2"}, m), Rational(1, 10));
  EXPECT_EQ(progress_rate("tau1", {}, m), Rational(1));
  EXPECT_EQ(progress_rate("tau2", {"tau1"}, m), Rational(1));
  m.set("tau1", "be", Rational(20));
  EXPECT_EQ(progress_rate("tau1", {"tau2", "be"}, m), Rational(1, 20));
}

TEST(RtGangSelect, HigherGangTakesEveryCore) {
  const int n = 4;
  std::vector<std::optional<ThreadRef>> prev(n), cand(n);
  GangLockState lock(n);
  for (CoreIndex c : {0, 1, 2}) cand[c] = ThreadRef{2, static_cast<std::uint32_t>(c)};
  auto first = rt_gang_select(lock, prev, cand);
  EXPECT_EQ(first.lock.leader, 2);
  cand[3] = ThreadRef{3, 10};
  auto second = rt_gang_select(first.lock, first.occupancy, cand);
  EXPECT_EQ(second.lock.leader, 3);
  for (CoreIndex c : {0, 1, 2}) EXPECT_FALSE(second.occupancy[c]);
  EXPECT_EQ(second.occupancy[3], (ThreadRef{3, 10}));
  EXPECT_EQ(second.lock.blocked_cores, CoreMask{0b0111});
}

TEST(RtGangSelect, EmptyInstant) {
  std::vector<std::optional<ThreadRef>> none(3);
  auto sel = rt_gang_select(GangLockState(3), none, none);
  EXPECT_FALSE(sel.lock.held);
  for (const auto& o : sel.occupancy) EXPECT_FALSE(o);
  EXPECT_EQ(sel.pick_order, (std::vector<CoreIndex>{0, 1, 2}));
}

TEST(BestEffortFill, Examples) {
  BestEffortTask be;
  be.id = "be";
  be.core_assignment = {1, 2};
  std::vector<const BestEffortTask*> on_core{nullptr, &be, &be};
  std::vector<CoreBudgetState> regs(3);
  regs[2].throttled = true;
  auto kinds = best_effort_fill({false, false, true}, on_core, &regs);
  EXPECT_EQ(kinds, (std::vector<SegmentKind>{Idle, Be, Rt}));
  kinds = best_effort_fill({false, false, false}, on_core, &regs);
  EXPECT_EQ(kinds, (std::vector<SegmentKind>{Idle, Be, Thr}));
  kinds = best_effort_fill({false, false, false}, on_core, nullptr);
  EXPECT_EQ(kinds, (std::vector<SegmentKind>{Idle, Be, Be}));
}

TEST(SegmentKind, Names) {
  for (auto k : {Rt, Be, Thr, Idle}) EXPECT_EQ(parse_kind(kind_name(k)), k);
  EXPECT_STREQ(kind_name(Thr), "be_throttled");
  EXPECT_FALSE(parse_kind("running"));
}

// Under RtGang, a released higher-priority job never waits while a
// lower-priority gang occupies a core (without context-switch cost).
void expect_priority_compliance(const Trace& t) {
  std::map<std::string, Priority> prio;
  for (const auto& task : t.scenario.rt_tasks) prio[task.id] = task.priority;
  for (const auto& job : t.jobs) {
    const Micros end = job.finish.value_or(t.scenario.horizon);
    const Priority q = prio.at(job.task_id);
    for (const auto& seg : t.segments) {
      if (seg.kind != Rt || prio.at(seg.occupant) >= q) continue;
      EXPECT_FALSE(seg.start < end && job.release < seg.end)
          << job.task_id << "#" << job.job_index << " waits while " << seg.occupant
          << " runs at " << seg.start;
    }
  }
}

TEST(SimulateProperty, RandomScenarios) {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    auto s = testing::random_scenario(seed);
    auto t = simulate(s);
    ASSERT_TRUE(check_trace(t).empty()) << "seed " << seed << ": " << check_trace(t)[0];
    EXPECT_EQ(testing::mixed_gang_instants(t), 0u) << "seed " << seed;
    expect_priority_compliance(t);
    auto m = trace_metrics(t);
    EXPECT_EQ(m.slack + m.rt_busy, s.platform.core_count * s.horizon);
    EXPECT_EQ(m.rt_busy + m.be_run + m.be_throttled + m.idle,
              s.platform.core_count * s.horizon);
    for (auto p : {Policy::CoSchedule, Policy::CoScheduleWithInterference}) {
      auto c = s;
      c.policy = p;
      auto ct = simulate(c);
      ASSERT_TRUE(check_trace(ct).empty()) << "seed " << seed;
    }
  }
}

TEST(SimulateProperty, BaselineWithUnitSlowdownMatchesCoSchedule) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = testing::random_scenario(seed);
    s.interference = InterferenceModel{};
    for (const auto& a : s.rt_tasks)
      for (const auto& b : s.rt_tasks)
        if (a.id != b.id) s.interference.set(a.id, b.id, Rational(1));
    auto plain = s;
    plain.policy = Policy::CoSchedule;
    auto with = s;
    with.policy = Policy::CoScheduleWithInterference;
    auto a = simulate(plain);
    auto b = simulate(with);
    EXPECT_EQ(a.segments, b.segments) << "seed " << seed;
    EXPECT_EQ(a.jobs, b.jobs) << "seed " << seed;
    EXPECT_EQ(a.thread_jobs, b.thread_jobs) << "seed " << seed;
  }
}

TEST(SimulateProperty, Deterministic) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto s = testing::random_scenario(seed);
    EXPECT_EQ(simulate(s), simulate(s));
  }
}

TEST(CheckTrace, DetectsGapsAndLostProgress) {
  auto t = simulate(preset("table1"));
  auto broken = t;
  broken.segments[1].start += 1;
  EXPECT_FALSE(check_trace(broken).empty());
  broken = t;
  for (auto& seg : broken.segments)
    if (seg.occupant == "tau1") {
      seg.progress_rate = Rational(1, 2);
      break;
    }
  EXPECT_FALSE(check_trace(broken).empty());
}

}  // namespace
}  // namespace gangsim
