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

#include "gangsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace gangsim {

namespace {

struct Unit {
  Priority priority = 0;
  Micros period = 0;
  Micros cost = 0;
  std::vector<std::size_t> members;
};

std::vector<Unit> analysis_units(const std::vector<RtGangTask>& tasks,
                                 Micros overhead) {
  std::map<Priority, std::vector<std::size_t>> by_prio;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    by_prio[tasks[i].priority].push_back(i);

  std::vector<Unit> units;
  for (const auto& [prio, members] : by_prio) {
    const auto& first = tasks[members.front()];
    bool aligned = std::all_of(members.begin(), members.end(), [&](auto i) {
      return tasks[i].period == first.period &&
             tasks[i].release_offset == first.release_offset;
    });
    if (aligned) {
      Unit u{prio, first.period, 0, members};
      for (auto i : members) u.cost = std::max(u.cost, tasks[i].max_compute());
      u.cost += overhead;
      units.push_back(std::move(u));
    } else {
      for (auto i : members)
        units.push_back({prio, tasks[i].period, tasks[i].max_compute() + overhead, {i}});
    }
  }
  return units;
}

}  // namespace

std::vector<RtaResult> rta_gang(const std::vector<RtGangTask>& tasks,
                                Rational context_switch_cost) {
  const Micros overhead = 2 * ceil_micros(context_switch_cost);
  auto units = analysis_units(tasks, overhead);

  std::vector<RtaResult> out(tasks.size());
  for (std::size_t u = 0; u < units.size(); ++u) {
    const auto& me = units[u];
    std::optional<Micros> wcrt;
    if (me.cost <= me.period) {
      Micros r = me.cost;
      while (true) {
        Micros next = me.cost;
        for (std::size_t v = 0; v < units.size(); ++v) {
          if (v == u || units[v].priority < me.priority) continue;
          next += (r + units[v].period - 1) / units[v].period * units[v].cost;
        }
        if (next > me.period) break;
        if (next == r) {
          wcrt = r;
          break;
        }
        r = next;
      }
    }
    for (auto i : me.members) {
      out[i] = {tasks[i].id, me.priority, me.cost, me.period, wcrt};
    }
  }
  return out;
}

AnalysisReport trace_metrics(const Trace& trace) {
  const auto& s = trace.scenario;
  AnalysisReport rep;
  rep.policy = policy_name(s.policy);
  rep.fingerprint = trace.fingerprint;
  rep.core_count = s.platform.core_count;
  rep.horizon = s.horizon;

  for (const auto& seg : trace.segments) {
    switch (seg.kind) {
      case SegmentKind::RtRun:
        rep.rt_busy += seg.duration();
        break;
      case SegmentKind::BeRun:
        rep.be_run += seg.duration();
        break;
      case SegmentKind::BeThrottled:
        rep.be_throttled += seg.duration();
        break;
      case SegmentKind::Idle:
        rep.idle += seg.duration();
        break;
    }
  }
  const Micros capacity = static_cast<Micros>(rep.core_count) * rep.horizon;
  rep.slack = capacity - rep.rt_busy;
  if (capacity > 0) {
    rep.rt_utilization = Rational(rep.rt_busy, capacity);
    rep.be_utilization = Rational(rep.be_run, capacity);
  }

  std::map<std::string, std::size_t> index;
  for (const auto& t : s.rt_tasks) {
    index[t.id] = rep.tasks.size();
    TaskReport tr;
    tr.id = t.id;
    tr.priority = t.priority;
    tr.period = t.period;
    rep.tasks.push_back(std::move(tr));
    rep.rt_demand += Rational(t.max_compute(), t.period);
  }
  std::vector<const JobRecord*> ordered;
  for (const auto& j : trace.jobs) ordered.push_back(&j);
  std::stable_sort(ordered.begin(), ordered.end(), [](auto a, auto b) {
    return a->release < b->release;
  });
  for (const auto* j : ordered) {
    auto it = index.find(j->task_id);
    if (it == index.end()) continue;
    auto& tr = rep.tasks[it->second];
    ++tr.jobs_released;
    if (!j->deadline_met(rep.horizon)) ++tr.deadline_misses;
    if (auto r = j->response()) {
      ++tr.jobs_finished;
      tr.responses.push_back(*r);
      tr.simulated_wcrt = std::max(tr.simulated_wcrt.value_or(0), *r);
    }
  }
  return rep;
}

AnalysisReport analyze(const Trace& trace) {
  auto rep = trace_metrics(trace);
  auto rta = rta_gang(trace.scenario.rt_tasks,
                      trace.scenario.platform.context_switch_cost);
  for (std::size_t i = 0; i < rta.size(); ++i) {
    rep.tasks[i].rta_wcrt = rta[i].wcrt;
    rep.tasks[i].rta_schedulable = rta[i].schedulable();
  }
  return rep;
}

std::optional<Micros> hyperperiod(const std::vector<RtGangTask>& tasks) {
  Micros h = 1;
  for (const auto& t : tasks) {
    if (t.period <= 0) return std::nullopt;
    h = h / std::gcd(h, t.period) * t.period;  // no overflow below the cap
    if (h > kHyperperiodCap) return std::nullopt;
  }
  return h;
}

namespace {

// Uniform sample of n non-negative shares summing to `total`.
std::vector<double> uunifast(std::mt19937_64& rng, int n, double total) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> u(n);
  double rest = total;
  for (int i = 0; i < n - 1; ++i) {
    double next = rest * std::pow(unit(rng), 1.0 / (n - i - 1));
    u[i] = rest - next;
    rest = next;
  }
  u[n - 1] = rest;
  return u;
}

// Non-negative counts with sum(count[i] * coin[i]) == target, or nullopt.
std::optional<std::vector<Micros>> make_change(const std::vector<Micros>& coins,
                                               Micros target) {
  std::vector<int> via(static_cast<std::size_t>(target) + 1, -1);
  via[0] = static_cast<int>(coins.size());
  for (Micros x = 1; x <= target; ++x) {
    for (std::size_t c = 0; c < coins.size(); ++c) {
      if (coins[c] <= x && via[x - coins[c]] >= 0) {
        via[x] = static_cast<int>(c);
        break;
      }
    }
  }
  if (via[target] < 0) return std::nullopt;
  std::vector<Micros> count(coins.size(), 0);
  for (Micros x = target; x > 0; x -= coins[via[x]]) ++count[via[x]];
  return count;
}

}  // namespace

std::vector<RtGangTask> generate_taskset(const GeneratorParams& p) {
  if (p.n_gangs < 1) throw std::invalid_argument("n_gangs must be >= 1");
  if (p.core_count < 1 || p.core_count > kMaxCores)
    throw std::invalid_argument("core_count out of range");
  if (p.total_utilization <= 0 || p.total_utilization > p.n_gangs)
    throw std::invalid_argument("total_utilization out of range");
  if (p.period_granularity <= 0 || p.period_min <= 0 || p.period_max < p.period_min)
    throw std::invalid_argument("bad period range");
  const Micros lo = (p.period_min + p.period_granularity - 1) / p.period_granularity;
  const Micros hi = p.period_max / p.period_granularity;
  if (lo > hi) throw std::invalid_argument("period range holds no multiple of granularity");

  std::mt19937_64 rng(p.seed);
  std::uniform_int_distribution<Micros> pick_period(lo, hi);
  std::uniform_int_distribution<int> pick_threads(1, p.core_count);

  const int n = p.n_gangs;
  std::vector<RtGangTask> tasks(n);
  std::optional<Micros> h;
  for (int attempt = 0; attempt < 1000 && !h; ++attempt) {
    for (int i = 0; i < n; ++i) {
      tasks[i].id = "g" + std::to_string(i);
      tasks[i].period = pick_period(rng) * p.period_granularity;
    }
    h = hyperperiod(tasks);
  }
  if (!h) throw std::invalid_argument("no period draw keeps the hyperperiod under the cap");

  auto shares = uunifast(rng, n, to_double(p.total_utilization));
  // Work per hyperperiod: sum(C_i * H / P_i) must equal U * H.
  const Micros work = floor_micros(p.total_utilization * *h);
  std::vector<Micros> jobs(n), compute(n);
  Micros used = 0;
  for (int i = 0; i < n; ++i) {
    jobs[i] = *h / tasks[i].period;
    compute[i] = std::clamp<Micros>(
        static_cast<Micros>(std::floor(shares[i] * tasks[i].period)), 1,
        tasks[i].period);
    used += compute[i] * jobs[i];
  }
  // Give back work until the remainder is representable; gcd(jobs) == 1 so
  // this terminates once the remainder is large enough.
  std::optional<std::vector<Micros>> extra;
  for (int round = 0; round < 64 * n; ++round) {
    Micros rest = work - used;
    if (rest >= 0 && (extra = make_change(jobs, rest))) break;
    int victim = -1;
    for (int i = 0; i < n; ++i)
      if (compute[i] > 1 && (victim < 0 || compute[i] * jobs[i] > compute[victim] * jobs[victim]))
        victim = i;
    if (victim < 0) break;
    --compute[victim];
    used -= jobs[victim];
  }
  if (!extra) throw std::invalid_argument("cannot meet the utilization target");
  for (int i = 0; i < n; ++i) {
    compute[i] += (*extra)[i];
    if (compute[i] > tasks[i].period)
      throw std::invalid_argument("gang utilization exceeds 1");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return tasks[a].period < tasks[b].period;
  });
  for (int rank = 0; rank < n; ++rank) tasks[order[rank]].priority = n - rank;

  std::vector<CoreIndex> cores(p.core_count);
  for (int i = 0; i < n; ++i) {
    auto& t = tasks[i];
    const int threads = pick_threads(rng);
    std::iota(cores.begin(), cores.end(), 0);
    std::shuffle(cores.begin(), cores.end(), rng);
    t.core_assignment.assign(cores.begin(), cores.begin() + threads);
    std::sort(t.core_assignment.begin(), t.core_assignment.end());
    std::uniform_int_distribution<Micros> other(std::max<Micros>(1, compute[i] / 2),
                                                compute[i]);
    t.per_thread_compute.assign(threads, compute[i]);
    for (int th = 1; th < threads; ++th) t.per_thread_compute[th] = other(rng);
    std::shuffle(t.per_thread_compute.begin(), t.per_thread_compute.end(), rng);
  }
  return tasks;
}

}  // namespace gangsim
