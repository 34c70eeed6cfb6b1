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

#include "gangsim/ganglock.hpp"

#include <stdexcept>

namespace gangsim {

std::optional<std::string> check_invariants(const GangLockState& s) {
  if (s.locked_cores & s.blocked_cores)
    return "locked and blocked cores overlap";
  const bool any_locked = s.locked_cores != 0;
  if (s.held != any_locked) return "held flag disagrees with locked cores";
  if (s.leader.has_value() != s.held) return "leader disagrees with held flag";
  for (std::size_t c = 0; c < s.gthreads.size(); ++c) {
    const bool bit = (s.locked_cores & core_bit(static_cast<CoreIndex>(c))) != 0;
    if (s.gthreads[c].has_value() != bit)
      return "gthreads slot " + std::to_string(c) + " disagrees with locked bit";
    if (s.gthreads[c] && s.gthreads[c]->priority != *s.leader)
      return "core " + std::to_string(c) + " tracks a thread outside the leader gang";
  }
  if (s.gthreads.size() < 64 &&
      ((s.locked_cores | s.blocked_cores) >> s.gthreads.size()) != 0)
    return "mask bit beyond core count";
  return std::nullopt;
}

GangLockState acquire(GangLockState s, CoreIndex core, ThreadRef thread) {
  if (s.locked_cores != 0)
    throw std::logic_error("acquire on a gang lock that still has locked cores");
  s.held = true;
  s.locked_cores |= core_bit(core);
  s.gthreads.at(core) = thread;
  s.leader = thread.priority;
  return s;
}

ReleaseResult try_release(GangLockState s, CoreIndex /*core*/,
                          ThreadRef departing) {
  ReleaseResult r;
  for (std::size_t c = 0; c < s.gthreads.size(); ++c) {
    const auto bit = core_bit(static_cast<CoreIndex>(c));
    if (!(s.locked_cores & bit) || s.gthreads[c] != departing) continue;
    s.locked_cores &= ~bit;
    s.gthreads[c].reset();
    if (s.locked_cores == 0) {
      s.held = false;
      s.leader.reset();
      r.released = true;
      r.cores_to_reschedule = s.blocked_cores;
      s.blocked_cores = 0;
    }
  }
  r.state = std::move(s);
  return r;
}

PreemptResult gang_preempt(GangLockState s) {
  PreemptResult r;
  for (auto& slot : s.gthreads) slot.reset();
  r.cores_to_reschedule = s.locked_cores;
  s.locked_cores = 0;
  r.state = std::move(s);
  return r;
}

const char* decision_name(Decision d) {
  switch (d) {
    case Decision::RunNext:
      return "RunNext";
    case Decision::JoinGang:
      return "JoinGang";
    case Decision::PreemptAndAcquire:
      return "PreemptAndAcquire";
    case Decision::Blocked:
      return "Blocked";
    case Decision::ReleaseOnly:
      return "ReleaseOnly";
  }
  return "?";
}

PickResult pick_next(GangLockState s, CoreIndex core,
                     std::optional<ThreadRef> departing,
                     std::optional<ThreadRef> candidate) {
  PickResult r;
  const auto bit = core_bit(core);
  // A blocked core is re-evaluated from scratch on every pick.
  s.blocked_cores &= ~bit;

  if (s.held && departing) {
    auto rel = try_release(std::move(s), core, *departing);
    s = std::move(rel.state);
    r.outcome.cores_to_reschedule |= rel.cores_to_reschedule;
  }

  if (!candidate) {
    r.outcome.decision = Decision::ReleaseOnly;
  } else if (!s.held) {
    s = acquire(std::move(s), core, *candidate);
    r.scheduled = candidate;
    r.outcome.decision = Decision::RunNext;
  } else if (candidate->priority == *s.leader) {
    s.locked_cores |= bit;
    s.gthreads.at(core) = candidate;
    r.scheduled = candidate;
    r.outcome.decision = Decision::JoinGang;
  } else if (candidate->priority > *s.leader) {
    auto pre = gang_preempt(std::move(s));
    s = acquire(std::move(pre.state), core, *candidate);
    r.outcome.cores_to_reschedule |= pre.cores_to_reschedule;
    r.scheduled = candidate;
    r.outcome.decision = Decision::PreemptAndAcquire;
  } else {
    s.blocked_cores |= bit;
    r.outcome.decision = Decision::Blocked;
  }
  r.state = std::move(s);
  return r;
}

}  // namespace gangsim
