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

#include "gangsim/export.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <future>
#include <map>
#include <sstream>

#include "gangsim/scenario_io.hpp"

namespace gangsim {

using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string millis(Micros us) {
  char buf[48];
  const char* sign = us < 0 ? "-" : "";
  Micros a = us < 0 ? -us : us;
  std::snprintf(buf, sizeof buf, "%s%" PRId64 ".%03" PRId64, sign, a / 1000, a % 1000);
  return buf;
}

std::string decimal(const Rational& r, int places = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", places, to_double(r));
  return buf;
}

json optional_micros(const std::optional<Micros>& v) {
  return v ? json(*v) : json(nullptr);
}

std::optional<Micros> micros_or_null(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<Micros>();
}

}  // namespace

std::string segments_csv(const Trace& trace) {
  std::string out = "core,occupant,kind,start_us,end_us,progress_rate_num,progress_rate_den\n";
  for (const auto& s : trace.segments) {
    out += std::to_string(s.core) + ',' + s.occupant + ',' + kind_name(s.kind) + ',' +
           std::to_string(s.start) + ',' + std::to_string(s.end) + ',' +
           std::to_string(s.progress_rate.numerator()) + ',' +
           std::to_string(s.progress_rate.denominator()) + '\n';
  }
  return out;
}

json trace_to_json(const Trace& trace) {
  json events = json::array();
  for (int c = 0; c < trace.scenario.platform.core_count; ++c) {
    events.push_back({{"ph", "M"}, {"name", "process_name"}, {"pid", c}, {"tid", 0},
                      {"args", {{"name", "core " + std::to_string(c)}}}});
  }
  for (const auto& s : trace.segments) {
    events.push_back({{"ph", "X"},
                      {"name", s.occupant},
                      {"cat", kind_name(s.kind)},
                      {"pid", s.core},
                      {"tid", 0},
                      {"ts", s.start},
                      {"dur", s.duration()},
                      {"args",
                       {{"rate_num", s.progress_rate.numerator()},
                        {"rate_den", s.progress_rate.denominator()},
                        {"thread_job", s.thread_job}}}});
  }

  json thread_jobs = json::array();
  for (const auto& r : trace.thread_jobs) {
    thread_jobs.push_back({{"task", r.task_id},
                           {"job", r.job_index},
                           {"thread", r.thread},
                           {"core", r.core},
                           {"release_us", r.release},
                           {"deadline_us", r.deadline},
                           {"compute_us", r.compute},
                           {"finish_us", optional_micros(r.finish)},
                           {"dispatches", r.dispatches}});
  }
  json jobs = json::array();
  for (const auto& j : trace.jobs) {
    jobs.push_back({{"task", j.task_id},
                    {"job", j.job_index},
                    {"release_us", j.release},
                    {"deadline_us", j.deadline},
                    {"finish_us", optional_micros(j.finish)}});
  }
  json doc;
  doc["traceEvents"] = std::move(events);
  doc["displayTimeUnit"] = "ms";
  doc["gangsim"] = {{"format_version", kScenarioFormatVersion},
                    {"fingerprint", hex64(trace.fingerprint)},
                    {"scenario", scenario_to_json(trace.scenario)},
                    {"thread_jobs", std::move(thread_jobs)},
                    {"jobs", std::move(jobs)}};
  return doc;
}

std::string trace_json(const Trace& trace) { return trace_to_json(trace).dump() + "\n"; }

Trace trace_from_json(const std::string& text) {
  try {
    auto doc = json::parse(text);
    const auto& meta = doc.at("gangsim");
    if (meta.at("format_version").get<int>() != kScenarioFormatVersion)
      throw FormatError("unsupported trace format_version");
    Trace t;
    t.fingerprint = std::stoull(meta.at("fingerprint").get<std::string>(), nullptr, 16);
    t.scenario = scenario_from_json(meta.at("scenario"));
    for (const auto& e : doc.at("traceEvents")) {
      if (e.at("ph") != "X") continue;
      Segment s;
      s.core = e.at("pid").get<CoreIndex>();
      s.occupant = e.at("name").get<std::string>();
      auto kind = parse_kind(e.at("cat").get<std::string>());
      if (!kind) throw FormatError("unknown segment kind");
      s.kind = *kind;
      s.start = e.at("ts").get<Micros>();
      s.end = s.start + e.at("dur").get<Micros>();
      const auto& args = e.at("args");
      s.progress_rate = Rational(args.at("rate_num").get<std::int64_t>(),
                                 args.at("rate_den").get<std::int64_t>());
      s.thread_job = args.at("thread_job").get<std::int64_t>();
      t.segments.push_back(std::move(s));
    }
    std::stable_sort(t.segments.begin(), t.segments.end(), [](const auto& a, const auto& b) {
      if (a.core != b.core) return a.core < b.core;
      return a.start < b.start;
    });
    for (const auto& r : meta.at("thread_jobs")) {
      ThreadJobRecord rec;
      rec.task_id = r.at("task").get<std::string>();
      rec.job_index = r.at("job").get<std::uint32_t>();
      rec.thread = r.at("thread").get<std::uint32_t>();
      rec.core = r.at("core").get<CoreIndex>();
      rec.release = r.at("release_us").get<Micros>();
      rec.deadline = r.at("deadline_us").get<Micros>();
      rec.compute = r.at("compute_us").get<Micros>();
      rec.finish = micros_or_null(r.at("finish_us"));
      rec.dispatches = r.at("dispatches").get<int>();
      t.thread_jobs.push_back(std::move(rec));
    }
    for (const auto& r : meta.at("jobs")) {
      JobRecord j;
      j.task_id = r.at("task").get<std::string>();
      j.job_index = r.at("job").get<std::uint32_t>();
      j.release = r.at("release_us").get<Micros>();
      j.deadline = r.at("deadline_us").get<Micros>();
      j.finish = micros_or_null(r.at("finish_us"));
      t.jobs.push_back(std::move(j));
    }
    return t;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed trace JSON: ") + e.what());
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("malformed trace JSON: ") + e.what());
  }
}

std::string report_text(const AnalysisReport& r) {
  std::ostringstream os;
  os << "policy: " << r.policy << "\n";
  os << "scenario: " << hex64(r.fingerprint) << "\n";
  os << "cores: " << r.core_count << "  horizon: " << r.horizon << " us ("
     << millis(r.horizon) << " ms)\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %5s %10s %6s %6s %13s %13s %8s\n", "task", "prio",
                "period_us", "jobs", "done", "sim_wcrt_us", "rta_wcrt_us", "deadline");
  os << line;
  for (const auto& t : r.tasks) {
    std::string sim = t.simulated_wcrt ? std::to_string(*t.simulated_wcrt) : "-";
    std::string rta = t.rta_wcrt ? std::to_string(*t.rta_wcrt)
                                 : (t.rta_schedulable ? "-" : "UNSCHED");
    std::snprintf(line, sizeof line, "%-12s %5d %10" PRId64 " %6zu %6zu %13s %13s %8s\n",
                  t.id.c_str(), t.priority, t.period, t.jobs_released, t.jobs_finished,
                  sim.c_str(), rta.c_str(), t.deadline_met() ? "met" : "MISSED");
    os << line;
  }
  os << "\n";
  for (const auto& t : r.tasks) {
    if (t.simulated_wcrt)
      os << "wcrt " << t.id << " = " << millis(*t.simulated_wcrt) << " ms\n";
  }
  os << "slack: " << r.slack << " us (" << millis(r.slack) << " ms)\n";
  os << "rt busy: " << r.rt_busy << " us  be run: " << r.be_run
     << " us  be throttled: " << r.be_throttled << " us  idle: " << r.idle << " us\n";
  os << "utilization: rt " << decimal(r.rt_utilization) << "  be "
     << decimal(r.be_utilization) << "  rt demand " << decimal(r.rt_demand) << "\n";
  return os.str();
}

json report_to_json(const AnalysisReport& r) {
  json tasks = json::array();
  for (const auto& t : r.tasks) {
    tasks.push_back({{"id", t.id},
                     {"priority", t.priority},
                     {"period_us", t.period},
                     {"jobs_released", t.jobs_released},
                     {"jobs_finished", t.jobs_finished},
                     {"deadline_misses", t.deadline_misses},
                     {"responses_us", t.responses},
                     {"simulated_wcrt_us", optional_micros(t.simulated_wcrt)},
                     {"rta_wcrt_us", optional_micros(t.rta_wcrt)},
                     {"rta_schedulable", t.rta_schedulable}});
  }
  return {{"policy", r.policy},
          {"fingerprint", hex64(r.fingerprint)},
          {"core_count", r.core_count},
          {"horizon_us", r.horizon},
          {"tasks", std::move(tasks)},
          {"slack_us", r.slack},
          {"rt_busy_us", r.rt_busy},
          {"be_run_us", r.be_run},
          {"be_throttled_us", r.be_throttled},
          {"idle_us", r.idle},
          {"rt_utilization", rational_to_json(r.rt_utilization)},
          {"be_utilization", rational_to_json(r.be_utilization)},
          {"rt_demand", rational_to_json(r.rt_demand)}};
}

std::string report_json(const AnalysisReport& r) { return report_to_json(r).dump(2) + "\n"; }

Distribution distribution(std::vector<Micros> samples) {
  Distribution d;
  d.count = samples.size();
  if (samples.empty()) return d;
  std::sort(samples.begin(), samples.end());
  auto rank = [&](int pct) {
    std::size_t k = (pct * samples.size() + 99) / 100;  // ceil(p/100 * n)
    return samples[std::max<std::size_t>(k, 1) - 1];
  };
  d.min = samples.front();
  d.max = samples.back();
  d.p50 = rank(50);
  d.p90 = rank(90);
  d.p99 = rank(99);
  Micros sum = 0;
  for (auto s : samples) sum += s;
  d.mean = Rational(sum, static_cast<std::int64_t>(samples.size()));
  return d;
}

namespace {

AnalysisReport run_solo(const Scenario& bound) {
  std::map<Priority, std::vector<std::string>> gangs;
  for (const auto& t : bound.rt_tasks) gangs[t.priority].push_back(t.id);

  AnalysisReport merged;
  merged.policy = kSoloPolicy;
  merged.fingerprint = scenario_fingerprint(bound);
  merged.core_count = bound.platform.core_count;
  merged.horizon = bound.horizon;
  std::map<std::string, TaskReport> per_task;
  for (const auto& [prio, ids] : gangs) {
    Scenario solo = bound;
    solo.policy = Policy::CoSchedule;
    solo.be_tasks.clear();
    solo.interference = {};
    solo.rt_tasks.clear();
    solo.virtual_gangs.clear();
    for (const auto& t : bound.rt_tasks)
      if (t.priority == prio) solo.rt_tasks.push_back(t);
    auto rep = analyze(simulate(solo));
    merged.rt_busy += rep.rt_busy;
    for (auto& t : rep.tasks) per_task[t.id] = std::move(t);
  }
  for (const auto& t : bound.rt_tasks) merged.tasks.push_back(per_task[t.id]);
  const Micros capacity = static_cast<Micros>(merged.core_count) * merged.horizon;
  merged.slack = capacity - merged.rt_busy;
  merged.idle = merged.slack;
  if (capacity > 0) merged.rt_utilization = Rational(merged.rt_busy, capacity);
  for (const auto& t : bound.rt_tasks)
    merged.rt_demand += Rational(t.max_compute(), t.period);
  return merged;
}

}  // namespace

Comparison compare(const Scenario& scenario, const std::vector<std::string>& policies) {
  const Scenario bound = bind_virtual_gangs(scenario);
  std::vector<std::future<AnalysisReport>> runs;
  for (const auto& name : policies) {
    if (name == kSoloPolicy) {
      runs.push_back(std::async(std::launch::async, [&bound] { return run_solo(bound); }));
      continue;
    }
    auto policy = parse_policy(name);
    if (!policy) throw std::invalid_argument("unknown policy '" + name + "'");
    Scenario s = bound;
    s.policy = *policy;
    runs.push_back(std::async(std::launch::async,
                              [s = std::move(s)] { return analyze(simulate(s)); }));
  }
  Comparison c;
  c.labels = policies;
  for (auto& f : runs) c.reports.push_back(f.get());
  return c;
}

std::string comparison_text(const Comparison& c) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-12s %-26s %6s %10s %10s %12s %10s %10s %10s\n", "task",
                "policy", "jobs", "min_us", "p50_us", "mean_us", "p90_us", "p99_us", "max_us");
  os << line;
  if (c.reports.empty()) return os.str();
  for (std::size_t t = 0; t < c.reports.front().tasks.size(); ++t) {
    for (std::size_t p = 0; p < c.reports.size(); ++p) {
      const auto& task = c.reports[p].tasks[t];
      auto d = distribution(task.responses);
      if (d.count == 0) {
        std::snprintf(line, sizeof line, "%-12s %-26s %6d %10s %10s %12s %10s %10s %10s\n",
                      task.id.c_str(), c.labels[p].c_str(), 0, "-", "-", "-", "-", "-", "-");
        os << line;
        continue;
      }
      std::snprintf(line, sizeof line,
                    "%-12s %-26s %6zu %10" PRId64 " %10" PRId64 " %12s %10" PRId64
                    " %10" PRId64 " %10" PRId64 "\n",
                    task.id.c_str(), c.labels[p].c_str(), d.count, d.min, d.p50,
                    decimal(d.mean, 1).c_str(), d.p90, d.p99, d.max);
      os << line;
    }
  }
  os << "\n";
  for (std::size_t p = 0; p < c.reports.size(); ++p) {
    const auto& r = c.reports[p];
    os << "slack " << c.labels[p] << ": " << r.slack << " us  (be run " << r.be_run
       << " us, be throttled " << r.be_throttled << " us)\n";
  }
  return os.str();
}

json comparison_to_json(const Comparison& c) {
  json runs = json::array();
  for (std::size_t p = 0; p < c.reports.size(); ++p) {
    const auto& r = c.reports[p];
    json tasks = json::array();
    for (const auto& t : r.tasks) {
      auto d = distribution(t.responses);
      tasks.push_back({{"id", t.id},
                       {"count", d.count},
                       {"min_us", d.min},
                       {"p50_us", d.p50},
                       {"mean_us", rational_to_json(d.mean)},
                       {"p90_us", d.p90},
                       {"p99_us", d.p99},
                       {"max_us", d.max},
                       {"deadline_misses", t.deadline_misses},
                       {"rta_wcrt_us", optional_micros(t.rta_wcrt)},
                       {"responses_us", t.responses}});
    }
    runs.push_back({{"policy", c.labels[p]},
                    {"slack_us", r.slack},
                    {"be_run_us", r.be_run},
                    {"be_throttled_us", r.be_throttled},
                    {"tasks", std::move(tasks)}});
  }
  return {{"runs", std::move(runs)}};
}

std::string comparison_json(const Comparison& c) { return comparison_to_json(c).dump(2) + "\n"; }

}  // namespace gangsim
