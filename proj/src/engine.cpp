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

#include "gangsim/engine.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

#include "gangsim/scenario_io.hpp"

namespace gangsim {

const char* kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::RtRun:
      return "rt_run";
    case SegmentKind::BeRun:
      return "be_run";
    case SegmentKind::BeThrottled:
      return "be_throttled";
    case SegmentKind::Idle:
      return "idle";
  }
  return "?";
}

std::optional<SegmentKind> parse_kind(const std::string& name) {
  for (auto k : {SegmentKind::RtRun, SegmentKind::BeRun,
                 SegmentKind::BeThrottled, SegmentKind::Idle})
    if (name == kind_name(k)) return k;
  return std::nullopt;
}

Rational progress_rate(const std::string& task,
                       const std::vector<std::string>& co_runners,
                       const InterferenceModel& model) {
  Rational worst(1);
  for (const auto& other : co_runners)
    worst = std::max(worst, model.slowdown(task, other));
  return Rational(1) / worst;
}

GangSelection rt_gang_select(
    GangLockState lock, const std::vector<std::optional<ThreadRef>>& previous,
    const std::vector<std::optional<ThreadRef>>& candidates) {
  const int n = static_cast<int>(candidates.size());
  GangSelection sel;
  sel.occupancy = previous;

  std::deque<CoreIndex> work;
  std::vector<bool> queued(n, true);
  for (CoreIndex c = 0; c < n; ++c) work.push_back(c);

  // Each reschedule follows a release or a strictly higher-priority takeover,
  // so the worklist drains quickly; the cap only guards against a bug.
  const std::size_t cap = static_cast<std::size_t>(n) * (n + 2) * 8 + 64;
  while (!work.empty()) {
    if (sel.pick_order.size() > cap)
      throw std::logic_error("gang selection did not converge");
    CoreIndex c = work.front();
    work.pop_front();
    queued[c] = false;

    auto res = pick_next(std::move(lock), c, sel.occupancy[c], candidates[c]);
    lock = std::move(res.state);
    if (auto bad = check_invariants(lock))
      throw std::logic_error("gang lock invariant broken: " + *bad);
    sel.occupancy[c] = res.scheduled;
    sel.outcomes.push_back(res.outcome);
    sel.pick_order.push_back(c);
    for (CoreIndex r = 0; r < n; ++r) {
      if ((res.outcome.cores_to_reschedule & core_bit(r)) && !queued[r]) {
        queued[r] = true;
        work.push_back(r);
      }
    }
  }
  sel.lock = std::move(lock);
  return sel;
}

std::vector<SegmentKind> best_effort_fill(
    const std::vector<bool>& rt_busy,
    const std::vector<const BestEffortTask*>& be_on_core,
    const std::vector<CoreBudgetState>* regulators) {
  std::vector<SegmentKind> out(rt_busy.size(), SegmentKind::Idle);
  for (std::size_t c = 0; c < rt_busy.size(); ++c) {
    if (rt_busy[c]) {
      out[c] = SegmentKind::RtRun;
    } else if (be_on_core[c]) {
      const bool throttled = regulators && (*regulators)[c].throttled;
      out[c] = throttled ? SegmentKind::BeThrottled : SegmentKind::BeRun;
    }
  }
  return out;
}

namespace {

struct LiveJob {
  std::size_t task = 0;
  Priority priority = 0;
  Rational remaining;
  Micros pending_overhead = 0;
};

class Simulator {
 public:
  explicit Simulator(const Scenario& s)
      : s_(s),
        cores_(s.platform.core_count),
        period_(s.platform.regulation_period),
        ready_(cores_),
        occupant_(cores_),
        be_on_core_(cores_, nullptr),
        regulators_(cores_),
        open_(cores_),
        lock_(cores_) {
    for (const auto& be : s_.be_tasks)
      for (auto c : be.core_assignment) be_on_core_[c] = &be;
    // Releases within one instant are processed in ascending task id order.
    task_order_.resize(s_.rt_tasks.size());
    std::iota(task_order_.begin(), task_order_.end(), 0);
    std::sort(task_order_.begin(), task_order_.end(), [&](auto a, auto b) {
      return s_.rt_tasks[a].id < s_.rt_tasks[b].id;
    });
    next_release_.resize(s_.rt_tasks.size());
    job_count_.assign(s_.rt_tasks.size(), 0);
    for (std::size_t i = 0; i < s_.rt_tasks.size(); ++i)
      next_release_[i] = s_.rt_tasks[i].release_offset;
    for (const auto& t : s_.rt_tasks)
      threshold_of_.emplace(t.priority, t.bandwidth_threshold);
  }

  Trace run() {
    Micros now = 0;
    while (now < s_.horizon) {
      release(now);
      auto previous = occupant_;
      select();
      charge_dispatches(previous);
      regulate(now);
      auto kinds = fill();
      auto rates = rates_for(kinds);
      Micros next = next_event(now, kinds, rates);
      advance(now, next, kinds, rates);
      now = next;
    }
    flush();
    return finish();
  }

 private:
  // Ready-queue order: priority, then release, then task id, then thread.
  bool before(std::size_t a, std::size_t b) const {
    const auto& ja = live_[a];
    const auto& jb = live_[b];
    if (ja.priority != jb.priority) return ja.priority > jb.priority;
    const auto& ra = records_[a];
    const auto& rb = records_[b];
    if (ra.release != rb.release) return ra.release < rb.release;
    if (ra.task_id != rb.task_id) return ra.task_id < rb.task_id;
    return ra.thread < rb.thread;
  }

  std::optional<std::size_t> best_ready(CoreIndex c) const {
    std::optional<std::size_t> best;
    for (auto j : ready_[c])
      if (!best || before(j, *best)) best = j;
    return best;
  }

  ThreadRef ref(std::size_t j) const {
    return {live_[j].priority, static_cast<std::uint32_t>(j)};
  }

  void release(Micros now) {
    for (auto i : task_order_) {
      const auto& t = s_.rt_tasks[i];
      if (next_release_[i] != now) continue;
      for (std::size_t th = 0; th < t.thread_count(); ++th) {
        ThreadJobRecord rec;
        rec.task_id = t.id;
        rec.job_index = job_count_[i];
        rec.thread = static_cast<std::uint32_t>(th);
        rec.core = t.core_assignment[th];
        rec.release = now;
        rec.deadline = now + t.deadline();
        rec.compute = t.per_thread_compute[th];
        ready_[rec.core].push_back(records_.size());
        live_.push_back({i, t.priority, Rational(rec.compute), 0});
        records_.push_back(std::move(rec));
      }
      ++job_count_[i];
      next_release_[i] += t.period;
    }
  }

  void select() {
    std::vector<std::optional<ThreadRef>> candidates(cores_);
    for (CoreIndex c = 0; c < cores_; ++c)
      if (auto b = best_ready(c)) candidates[c] = ref(*b);

    if (s_.policy != Policy::RtGang) {
      for (CoreIndex c = 0; c < cores_; ++c)
        occupant_[c] = candidates[c] ? std::optional<std::size_t>(candidates[c]->id)
                                     : std::nullopt;
      return;
    }
    std::vector<std::optional<ThreadRef>> previous(cores_);
    for (CoreIndex c = 0; c < cores_; ++c)
      if (occupant_[c]) previous[c] = ref(*occupant_[c]);
    auto sel = rt_gang_select(std::move(lock_), previous, candidates);
    lock_ = std::move(sel.lock);
    for (CoreIndex c = 0; c < cores_; ++c)
      occupant_[c] = sel.occupancy[c]
                         ? std::optional<std::size_t>(sel.occupancy[c]->id)
                         : std::nullopt;
  }

  // A job's k-th dispatch costs round(k*c) - round((k-1)*c) microseconds.
  void charge_dispatches(const std::vector<std::optional<std::size_t>>& previous) {
    const auto& cost = s_.platform.context_switch_cost;
    for (CoreIndex c = 0; c < cores_; ++c) {
      if (!occupant_[c] || occupant_[c] == previous[c]) continue;
      auto j = *occupant_[c];
      int k = ++records_[j].dispatches;
      if (cost == Rational(0)) continue;
      live_[j].pending_overhead +=
          round_micros(cost * k) - round_micros(cost * (k - 1));
    }
  }

  void regulate(Micros now) {
    if (s_.policy != Policy::RtGang) return;
    std::optional<std::int64_t> threshold;
    if (lock_.leader) threshold = threshold_of_.at(*lock_.leader);
    if (now % period_ == 0) {
      for (CoreIndex c = 0; c < cores_; ++c)
        regulators_[c] = begin_period(regulators_[c], now, threshold);
    } else if (lock_.leader && lock_.leader != last_leader_) {
      for (CoreIndex c = 0; c < cores_; ++c)
        regulators_[c] = tighten(regulators_[c], *threshold, demand(c), period_);
    }
    last_leader_ = lock_.leader;
  }

  std::int64_t demand(CoreIndex c) const {
    return be_on_core_[c] ? be_on_core_[c]->memory_demand_rate : 0;
  }

  std::vector<SegmentKind> fill() const {
    std::vector<bool> busy(cores_);
    for (CoreIndex c = 0; c < cores_; ++c) busy[c] = occupant_[c].has_value();
    return best_effort_fill(
        busy, be_on_core_, s_.policy == Policy::RtGang ? &regulators_ : nullptr);
  }

  std::vector<Rational> rates_for(const std::vector<SegmentKind>& kinds) const {
    std::vector<Rational> rates(cores_, Rational(0));
    for (CoreIndex c = 0; c < cores_; ++c) {
      if (kinds[c] != SegmentKind::RtRun) continue;
      const auto j = *occupant_[c];
      if (live_[j].pending_overhead > 0) continue;
      if (s_.policy != Policy::CoScheduleWithInterference) {
        rates[c] = 1;
        continue;
      }
      std::vector<std::string> co;
      for (CoreIndex o = 0; o < cores_; ++o) {
        if (o == c) continue;
        if (kinds[o] == SegmentKind::RtRun)
          co.push_back(records_[*occupant_[o]].task_id);
        else if (kinds[o] == SegmentKind::BeRun)
          co.push_back(be_on_core_[o]->id);
      }
      rates[c] = progress_rate(records_[j].task_id, co, s_.interference);
    }
    return rates;
  }

  Micros next_event(Micros now, const std::vector<SegmentKind>& kinds,
                    const std::vector<Rational>& rates) const {
    Micros next = std::min(s_.horizon, (now / period_ + 1) * period_);
    for (auto r : next_release_) next = std::min(next, r);
    for (CoreIndex c = 0; c < cores_; ++c) {
      if (kinds[c] == SegmentKind::RtRun) {
        const auto& job = live_[*occupant_[c]];
        if (job.pending_overhead > 0)
          next = std::min(next, now + job.pending_overhead);
        else
          next = std::min(next, now + ceil_micros(job.remaining / rates[c]));
      } else if (kinds[c] == SegmentKind::BeRun && s_.policy == Policy::RtGang) {
        auto left = time_to_exhaustion(regulators_[c], demand(c), period_);
        if (left) next = std::min(next, now + *left);
      }
    }
    if (next <= now) throw std::logic_error("simulation clock did not advance");
    return next;
  }

  void advance(Micros now, Micros next, const std::vector<SegmentKind>& kinds,
               const std::vector<Rational>& rates) {
    const Micros dt = next - now;
    for (CoreIndex c = 0; c < cores_; ++c) {
      switch (kinds[c]) {
        case SegmentKind::RtRun: {
          const auto j = *occupant_[c];
          auto& job = live_[j];
          const auto& id = records_[j].task_id;
          if (job.pending_overhead > 0) {
            job.pending_overhead -= dt;
            emit(c, id, kinds[c], now, next, Rational(0), j);
            break;
          }
          Rational done = rates[c] * dt;
          if (done < job.remaining) {
            job.remaining -= done;
            emit(c, id, kinds[c], now, next, rates[c], j);
            break;
          }
          // Finishes inside the last microsecond; that microsecond carries
          // only the leftover progress.
          Rational before_last = rates[c] * (dt - 1);
          Rational last = job.remaining - before_last;
          if (last != rates[c] && dt > 1) {
            emit(c, id, kinds[c], now, next - 1, rates[c], j);
            emit(c, id, kinds[c], next - 1, next, last, j);
          } else if (dt == 1) {
            emit(c, id, kinds[c], now, next, last, j);
          } else {
            emit(c, id, kinds[c], now, next, rates[c], j);
          }
          job.remaining = 0;
          records_[j].finish = next;
          auto& q = ready_[c];
          q.erase(std::find(q.begin(), q.end(), j));
          break;
        }
        case SegmentKind::BeRun: {
          const auto* be = be_on_core_[c];
          if (s_.policy == Policy::RtGang) {
            auto r = gangsim::advance(regulators_[c], *be, dt, period_);
            if (r.executed != dt)
              throw std::logic_error("best-effort run crossed its throttle point");
            regulators_[c] = r.state;
          }
          emit(c, be->id, kinds[c], now, next, Rational(0), -1);
          break;
        }
        case SegmentKind::BeThrottled:
          emit(c, be_on_core_[c]->id, kinds[c], now, next, Rational(0), -1);
          break;
        case SegmentKind::Idle:
          emit(c, kIdleOccupant, kinds[c], now, next, Rational(0), -1);
          break;
      }
    }
  }

  void emit(CoreIndex c, const std::string& occupant, SegmentKind kind,
            Micros start, Micros end, Rational rate, std::int64_t job) {
    auto& open = open_[c];
    if (open && open->end == start && open->end % period_ != 0 &&
        open->occupant == occupant && open->kind == kind &&
        open->progress_rate == rate && open->thread_job == job) {
      open->end = end;
      return;
    }
    if (open) per_core_.push_back(*open);
    open = Segment{c, occupant, kind, start, end, rate, job};
  }

  void flush() {
    for (auto& open : open_)
      if (open) per_core_.push_back(*open);
  }

  Trace finish() {
    Trace t;
    t.fingerprint = scenario_fingerprint(s_);
    t.scenario = s_;
    t.segments = std::move(per_core_);
    std::stable_sort(t.segments.begin(), t.segments.end(),
                     [](const Segment& a, const Segment& b) {
                       if (a.core != b.core) return a.core < b.core;
                       return a.start < b.start;
                     });
    t.thread_jobs = records_;

    std::map<std::pair<std::string, std::uint32_t>, JobRecord> jobs;
    std::map<std::pair<std::string, std::uint32_t>, bool> complete;
    for (const auto& r : records_) {
      auto key = std::make_pair(r.task_id, r.job_index);
      auto [it, inserted] = jobs.try_emplace(key);
      auto& job = it->second;
      if (inserted) {
        job.task_id = r.task_id;
        job.job_index = r.job_index;
        job.release = r.release;
        job.deadline = r.deadline;
        complete[key] = true;
      }
      if (!r.finish) complete[key] = false;
      else if (!job.finish || *r.finish > *job.finish) job.finish = r.finish;
    }
    for (auto& [key, job] : jobs) {
      if (!complete[key]) job.finish.reset();
      t.jobs.push_back(job);
    }
    std::stable_sort(t.jobs.begin(), t.jobs.end(),
                     [](const JobRecord& a, const JobRecord& b) {
                       if (a.release != b.release) return a.release < b.release;
                       return a.task_id < b.task_id;
                     });
    return t;
  }

  const Scenario& s_;
  const int cores_;
  const Micros period_;

  std::vector<std::size_t> task_order_;
  std::vector<Micros> next_release_;
  std::vector<std::uint32_t> job_count_;
  std::map<Priority, std::int64_t> threshold_of_;

  std::vector<ThreadJobRecord> records_;
  std::vector<LiveJob> live_;
  std::vector<std::vector<std::size_t>> ready_;
  std::vector<std::optional<std::size_t>> occupant_;
  std::vector<const BestEffortTask*> be_on_core_;
  std::vector<CoreBudgetState> regulators_;
  std::vector<std::optional<Segment>> open_;
  std::vector<Segment> per_core_;

  GangLockState lock_;
  std::optional<Priority> last_leader_;
};

}  // namespace

Trace simulate(const Scenario& scenario) {
  if (scenario.horizon <= 0) throw SimulationError("horizon must be > 0");
  if (!virtual_gangs_bound(scenario))
    throw SimulationError("virtual gangs are not bound");
  auto problems = validate(scenario);
  if (!problems.empty())
    throw SimulationError("invalid scenario: " + to_string(problems.front()));
  return Simulator(scenario).run();
}

std::vector<std::string> check_trace(const Trace& trace) {
  std::vector<std::string> out;
  const auto& s = trace.scenario;
  std::vector<Micros> cursor(s.platform.core_count, 0);
  std::vector<Rational> progress(trace.thread_jobs.size(), Rational(0));
  for (const auto& seg : trace.segments) {
    if (seg.core < 0 || seg.core >= s.platform.core_count) {
      out.push_back("segment on unknown core " + std::to_string(seg.core));
      continue;
    }
    if (seg.start >= seg.end)
      out.push_back("empty segment on core " + std::to_string(seg.core));
    if (seg.start != cursor[seg.core])
      out.push_back("gap or overlap on core " + std::to_string(seg.core) +
                    " at " + std::to_string(seg.start));
    cursor[seg.core] = seg.end;
    if (seg.kind == SegmentKind::RtRun && seg.thread_job >= 0 &&
        static_cast<std::size_t>(seg.thread_job) < progress.size())
      progress[seg.thread_job] += seg.progress_rate * seg.duration();
  }
  for (std::size_t c = 0; c < cursor.size(); ++c)
    if (cursor[c] != s.horizon)
      out.push_back("core " + std::to_string(c) + " does not reach the horizon");
  for (std::size_t j = 0; j < trace.thread_jobs.size(); ++j) {
    const auto& r = trace.thread_jobs[j];
    if (r.finish && progress[j] != Rational(r.compute))
      out.push_back("job " + r.task_id + "#" + std::to_string(r.job_index) +
                    "." + std::to_string(r.thread) + " progress " +
                    to_string(progress[j]) + " != compute " +
                    std::to_string(r.compute));
    if (!r.finish && progress[j] >= Rational(r.compute))
      out.push_back("job " + r.task_id + " completed work but has no finish");
  }
  return out;
}

}  // namespace gangsim
