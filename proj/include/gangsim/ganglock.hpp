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

// Gang scheduling lock.
//
// A single global lock decides which real-time gang may occupy the platform.
// The first thread that picks on a free lock becomes the leader; other
// threads of the same priority join it on their cores; a higher-priority
// thread preempts every locked core and takes over; anything lower is
// blocked and its core falls through to best-effort work. Each transition
// below is a pure function applied atomically, standing in for the spinlock
// that serializes the kernel's pick path.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gangsim/taskmodel.hpp"

namespace gangsim {

using CoreMask = std::uint64_t;

constexpr CoreMask core_bit(CoreIndex c) { return CoreMask{1} << c; }

// A runnable real-time thread as seen by the lock. Gang identity is the
// priority value; `id` distinguishes threads.
struct ThreadRef {
  Priority priority = 0;
  std::uint32_t id = 0;

  bool operator==(const ThreadRef&) const = default;
};

struct GangLockState {
  bool held = false;
  CoreMask locked_cores = 0;
  CoreMask blocked_cores = 0;
  std::optional<Priority> leader;
  std::vector<std::optional<ThreadRef>> gthreads;  // one slot per core

  GangLockState() = default;
  explicit GangLockState(int core_count) : gthreads(core_count) {}

  bool operator==(const GangLockState&) const = default;
};

// Returns a description of the first broken invariant, if any.
std::optional<std::string> check_invariants(const GangLockState& state);

// Marks the lock held by `thread`'s gang on `core`. Requires no locked cores;
// throws std::logic_error otherwise.
GangLockState acquire(GangLockState state, CoreIndex core, ThreadRef thread);

struct ReleaseResult {
  GangLockState state;
  bool released = false;
  CoreMask cores_to_reschedule = 0;
};

// Drops `departing` from whichever locked core tracks it. When the last
// locked core clears, the lock is freed and the blocked cores are handed back.
ReleaseResult try_release(GangLockState state, CoreIndex core,
                          ThreadRef departing);

struct PreemptResult {
  GangLockState state;
  CoreMask cores_to_reschedule = 0;
};

// Evicts every tracked thread. held/leader stay for the caller's acquire.
PreemptResult gang_preempt(GangLockState state);

enum class Decision { RunNext, JoinGang, PreemptAndAcquire, Blocked, ReleaseOnly };

const char* decision_name(Decision d);

struct SelectionOutcome {
  Decision decision = Decision::ReleaseOnly;
  CoreMask cores_to_reschedule = 0;
};

struct PickResult {
  GangLockState state;
  std::optional<ThreadRef> scheduled;
  SelectionOutcome outcome;
};

// Real-time selection on `core`. `departing` is the thread going out of
// schedule (the core's previous occupant); `candidate` is the highest-priority
// ready real-time thread pinned to the core.
PickResult pick_next(GangLockState state, CoreIndex core,
                     std::optional<ThreadRef> departing,
                     std::optional<ThreadRef> candidate);

}  // namespace gangsim
