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

#include <random>

#include "gangsim/ganglock.hpp"

namespace gangsim {
namespace {

CoreMask mask(std::initializer_list<CoreIndex> cores) {
  CoreMask m = 0;
  for (auto c : cores) m |= core_bit(c);
  return m;
}

void expect_valid(const GangLockState& s) {
  auto problem = check_invariants(s);
  EXPECT_FALSE(problem) << *problem;
}

TEST(Acquire, EmptyStateTakesLeadership) {
  ThreadRef tau1{2, 0};
  auto s = acquire(GangLockState(4), 0, tau1);
  EXPECT_TRUE(s.held);
  EXPECT_EQ(s.locked_cores, mask({0}));
  EXPECT_EQ(s.leader, 2);
  EXPECT_EQ(s.gthreads[0], tau1);
  expect_valid(s);
}

TEST(Acquire, SingleCore) {
  auto s = acquire(GangLockState(1), 0, {1, 0});
  EXPECT_EQ(s.locked_cores, mask({0}));
  EXPECT_EQ(s.blocked_cores, 0u);
  expect_valid(s);
}

TEST(Acquire, OnlyItsBit) {
  auto s = acquire(GangLockState(4), 3, {1, 0});
  EXPECT_EQ(s.locked_cores, mask({3}));
  expect_valid(s);
}

TEST(Acquire, WhileHeldIsAContractViolation) {
  auto s = acquire(GangLockState(2), 0, {1, 0});
  EXPECT_THROW(acquire(s, 1, {1, 1}), std::logic_error);
}

GangLockState two_core_gang() {
  auto s = acquire(GangLockState(4), 0, {5, 0});
  auto j = pick_next(s, 1, std::nullopt, ThreadRef{5, 1});
  return j.state;
}

TEST(TryRelease, PartialRelease) {
  auto s = two_core_gang();
  auto r = try_release(s, 0, {5, 0});
  EXPECT_EQ(r.state.locked_cores, mask({1}));
  EXPECT_FALSE(r.released);
  EXPECT_EQ(r.cores_to_reschedule, 0u);
  EXPECT_TRUE(r.state.held);
  expect_valid(r.state);
}

TEST(TryRelease, LastCoreHandsBackBlockedCores) {
  auto s = acquire(GangLockState(4), 1, {5, 0});
  s.blocked_cores = mask({2, 3});
  auto r = try_release(s, 1, {5, 0});
  EXPECT_FALSE(r.state.held);
  EXPECT_TRUE(r.released);
  EXPECT_EQ(r.cores_to_reschedule, mask({2, 3}));
  EXPECT_EQ(r.state.blocked_cores, 0u);
  EXPECT_FALSE(r.state.leader);
  expect_valid(r.state);
}

TEST(TryRelease, UntrackedThreadIsANoOp) {
  auto s = two_core_gang();
  auto r = try_release(s, 0, {5, 99});
  EXPECT_EQ(r.state, s);
  EXPECT_FALSE(r.released);
  EXPECT_EQ(r.cores_to_reschedule, 0u);
}

TEST(GangPreempt, EvictsAllLockedCores) {
  auto s = two_core_gang();
  s = pick_next(s, 2, std::nullopt, ThreadRef{5, 2}).state;
  auto r = gang_preempt(s);
  EXPECT_EQ(r.cores_to_reschedule, mask({0, 1, 2}));
  EXPECT_EQ(r.state.locked_cores, 0u);
  for (const auto& g : r.state.gthreads) EXPECT_FALSE(g);
}

TEST(GangPreempt, Singleton) {
  auto s = acquire(GangLockState(4), 2, {5, 0});
  EXPECT_EQ(gang_preempt(s).cores_to_reschedule, mask({2}));
}

TEST(GangPreempt, ThenAcquireInstallsNewLeader) {
  auto s = two_core_gang();
  auto r = gang_preempt(s);
  auto t = acquire(r.state, 3, {9, 7});
  EXPECT_EQ(t.leader, 9);
  EXPECT_EQ(t.locked_cores, mask({3}));
  expect_valid(t);
}

TEST(PickNext, HigherPriorityPreempts) {
  // tau2 (prio 5) holds cores 0 and 1; tau4 (prio 9) arrives on core 2.
  auto s = two_core_gang();
  auto r = pick_next(s, 2, std::nullopt, ThreadRef{9, 4});
  EXPECT_EQ(r.outcome.decision, Decision::PreemptAndAcquire);
  EXPECT_EQ(r.outcome.cores_to_reschedule, mask({0, 1}));
  EXPECT_EQ(r.scheduled, (ThreadRef{9, 4}));
  EXPECT_EQ(r.state.leader, 9);
  EXPECT_EQ(r.state.locked_cores, mask({2}));
  expect_valid(r.state);
}

TEST(PickNext, LowerPriorityIsBlocked) {
  auto s = acquire(GangLockState(4), 0, {9, 0});
  auto r = pick_next(s, 1, std::nullopt, ThreadRef{5, 4});
  EXPECT_EQ(r.outcome.decision, Decision::Blocked);
  EXPECT_FALSE(r.scheduled);
  EXPECT_EQ(r.state.blocked_cores, mask({1}));
  EXPECT_EQ(r.outcome.cores_to_reschedule, 0u);
  expect_valid(r.state);
}

TEST(PickNext, SameGangJoins) {
  auto s = acquire(GangLockState(4), 0, {2, 0});
  auto r = pick_next(s, 1, std::nullopt, ThreadRef{2, 1});
  EXPECT_EQ(r.outcome.decision, Decision::JoinGang);
  EXPECT_EQ(r.state.locked_cores, mask({0, 1}));
  EXPECT_EQ(r.scheduled, (ThreadRef{2, 1}));
  expect_valid(r.state);
}

TEST(PickNext, FreeLockRunsNext) {
  auto r = pick_next(GangLockState(2), 1, std::nullopt, ThreadRef{3, 0});
  EXPECT_EQ(r.outcome.decision, Decision::RunNext);
  EXPECT_EQ(r.state.locked_cores, mask({1}));
}

TEST(PickNext, LastThreadLeavingReschedulesBlockedCores) {
  auto s = acquire(GangLockState(4), 0, {9, 0});
  s = pick_next(s, 1, std::nullopt, ThreadRef{5, 4}).state;
  s = pick_next(s, 2, std::nullopt, ThreadRef{5, 5}).state;
  ASSERT_EQ(s.blocked_cores, mask({1, 2}));
  auto r = pick_next(s, 0, ThreadRef{9, 0}, std::nullopt);
  EXPECT_EQ(r.outcome.decision, Decision::ReleaseOnly);
  EXPECT_EQ(r.outcome.cores_to_reschedule, mask({1, 2}));
  EXPECT_FALSE(r.state.held);
  expect_valid(r.state);
}

TEST(PickNext, BlockedBitClearedWhenCoreRepicks) {
  auto s = acquire(GangLockState(2), 0, {9, 0});
  s = pick_next(s, 1, std::nullopt, ThreadRef{5, 4}).state;
  ASSERT_EQ(s.blocked_cores, mask({1}));
  auto r = pick_next(s, 1, std::nullopt, std::nullopt);
  EXPECT_EQ(r.state.blocked_cores, 0u);
  expect_valid(r.state);
}

TEST(DecisionName, AllNamed) {
  EXPECT_STREQ(decision_name(Decision::PreemptAndAcquire), "PreemptAndAcquire");
  EXPECT_STREQ(decision_name(Decision::Blocked), "Blocked");
}

// Random pick_next / try_release sequences over a model of per-core
// occupancy. Checks the lock invariants after every transition, plus
// liveness of blocked cores and equal-priority non-preemption.
TEST(GangLockProperty, RandomSequences) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    std::mt19937_64 rng(seed);
    const int cores = std::uniform_int_distribution<int>(1, 8)(rng);
    GangLockState s(cores);
    std::vector<std::optional<ThreadRef>> running(cores);
    std::uint32_t next_id = 0;
    for (int step = 0; step < 200; ++step) {
      const CoreIndex c = std::uniform_int_distribution<int>(0, cores - 1)(rng);
      const int action = std::uniform_int_distribution<int>(0, 3)(rng);
      if (action == 0 && s.held) {
        const CoreMask blocked = s.blocked_cores;
        auto r = try_release(s, c, running[c].value_or(ThreadRef{-1, 999999}));
        if (r.released) {
          EXPECT_EQ(r.cores_to_reschedule, blocked);
        } else {
          EXPECT_EQ(r.cores_to_reschedule, 0u);
        }
        if (running[c] && !(r.state.locked_cores & core_bit(c))) running[c].reset();
        s = r.state;
      } else {
        std::optional<ThreadRef> cand;
        if (action != 3)
          cand = ThreadRef{std::uniform_int_distribution<int>(1, 4)(rng), next_id++};
        const auto leader = s.leader;
        const CoreMask locked = s.locked_cores;
        auto r = pick_next(s, c, running[c], cand);
        if (cand && leader && s.locked_cores != 0 && cand->priority == *leader)
          EXPECT_NE(r.outcome.decision, Decision::PreemptAndAcquire);
        if (r.outcome.decision == Decision::PreemptAndAcquire) {
          EXPECT_EQ(r.outcome.cores_to_reschedule & locked & ~core_bit(c),
                    locked & ~core_bit(c));
          for (CoreIndex o = 0; o < cores; ++o)
            if (o != c) running[o].reset();
        }
        if (r.outcome.decision == Decision::Blocked ||
            r.outcome.decision == Decision::ReleaseOnly)
          EXPECT_NE(r.outcome.decision == Decision::Blocked, !cand);
        running[c] = r.scheduled;
        s = r.state;
      }
      auto problem = check_invariants(s);
      ASSERT_FALSE(problem) << "seed " << seed << " step " << step << ": " << *problem;
      for (CoreIndex o = 0; o < cores; ++o)
        if (s.gthreads[o]) EXPECT_EQ(s.gthreads[o]->priority, *s.leader);
    }
  }
}

}  // namespace
}  // namespace gangsim
