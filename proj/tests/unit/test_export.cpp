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

#include <sstream>

#include "gangsim/export.hpp"
#include "gangsim/scenario_io.hpp"
#include "random_scenarios.hpp"

namespace gangsim {
namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(SegmentsCsv, IntegerColumns) {
  auto t = simulate(preset("table1-interference"));
  auto rows = lines(segments_csv(t));
  ASSERT_EQ(rows.size(), t.segments.size() + 1);
  EXPECT_EQ(rows[0], "core,occupant,kind,start_us,end_us,progress_rate_num,progress_rate_den");
  EXPECT_EQ(rows[1], "0,tau1,rt_run,0,1000,1,10");
  for (std::size_t i = 1; i < rows.size(); ++i)
    EXPECT_EQ(rows[i].find('.'), std::string::npos) << rows[i];
}

TEST(TraceJson, EventStructure) {
  auto t = simulate(preset("table1"));
  auto doc = trace_to_json(t);
  const auto& events = doc.at("traceEvents");
  ASSERT_EQ(events.size(), t.segments.size() + 4);
  EXPECT_EQ(events[0].at("ph"), "M");
  const auto& first = events[4];
  EXPECT_EQ(first.at("ph"), "X");
  EXPECT_EQ(first.at("pid"), t.segments[0].core);
  EXPECT_EQ(first.at("ts"), t.segments[0].start);
  EXPECT_EQ(first.at("dur"), t.segments[0].duration());
  EXPECT_EQ(first.at("cat"), "rt_run");
}

TEST(TraceJson, ReimportReproducesMetrics) {
  for (const auto& name : preset_names()) {
    auto t = simulate(preset(name));
    auto back = trace_from_json(trace_json(t));
    EXPECT_EQ(back, t) << name;
    EXPECT_EQ(report_json(analyze(back)), report_json(analyze(t))) << name;
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto t = simulate(testing::random_scenario(seed));
    EXPECT_EQ(trace_from_json(trace_json(t)), t) << seed;
  }
}

TEST(TraceJson, RejectsGarbage) {
  EXPECT_THROW(trace_from_json("[]"), FormatError);
  EXPECT_THROW(trace_from_json("{\"traceEvents\": []}"), FormatError);
  EXPECT_THROW(trace_from_json("nope"), FormatError);
}

TEST(Report, TextShowsTableOneResults) {
  auto text = report_text(analyze(simulate(preset("table1"))));
  EXPECT_NE(text.find("wcrt tau1 = 2.000 ms"), std::string::npos) << text;
  EXPECT_NE(text.find("wcrt tau2 = 6.000 ms"), std::string::npos) << text;
  EXPECT_NE(text.find("slack: 28000 us (28.000 ms)"), std::string::npos) << text;
}

TEST(Report, JsonFields) {
  auto j = report_to_json(analyze(simulate(preset("table1-interference"))));
  EXPECT_EQ(j.at("slack_us"), 20800);
  EXPECT_EQ(j.at("tasks")[0].at("simulated_wcrt_us"), 5600);
  EXPECT_EQ(j.at("policy"), "co-schedule");
}

TEST(Distribution, NearestRank) {
  auto d = distribution({5, 1, 4, 2, 3, 6, 7, 8, 9, 10});
  EXPECT_EQ(d.count, 10u);
  EXPECT_EQ(d.min, 1);
  EXPECT_EQ(d.max, 10);
  EXPECT_EQ(d.p50, 5);
  EXPECT_EQ(d.p90, 9);
  EXPECT_EQ(d.p99, 10);
  EXPECT_EQ(d.mean, Rational(11, 2));
  EXPECT_EQ(distribution({}).count, 0u);
  EXPECT_EQ(distribution({7}).p50, 7);
}

TEST(Compare, SoloMatchesRtGangForTopGang) {
  auto c = compare(preset("table1"), {"solo", "co-schedule", "rt-gang"});
  ASSERT_EQ(c.labels, (std::vector<std::string>{"solo", "co-schedule", "rt-gang"}));
  EXPECT_EQ(c.reports[0].tasks[0].responses, c.reports[2].tasks[0].responses);
  EXPECT_EQ(c.reports[0].tasks[1].simulated_wcrt, 4000);
  EXPECT_EQ(c.reports[2].tasks[1].simulated_wcrt, 6000);
  auto j = comparison_to_json(c);
  EXPECT_EQ(j.at("runs").size(), 3u);
  EXPECT_EQ(j.at("runs")[2].at("tasks")[1].at("max_us"), 6000);
  auto text = comparison_text(c);
  EXPECT_NE(text.find("rt-gang"), std::string::npos);
  EXPECT_NE(text.find("slack"), std::string::npos);
}

TEST(Compare, BaselineWithUnitSlowdownMatchesIdeal) {
  auto s = preset("table1-interference");
  s.interference = {};
  s.interference.set("tau1", "tau2", Rational(1));
  auto c = compare(s, {"co-schedule", "co-schedule-ideal"});
  EXPECT_EQ(report_to_json(c.reports[0]).at("tasks"), report_to_json(c.reports[1]).at("tasks"));
  EXPECT_EQ(c.reports[0].slack, c.reports[1].slack);
}

TEST(Compare, RejectsUnknownPolicy) {
  EXPECT_THROW(compare(preset("table1"), {"solo", "edf"}), std::invalid_argument);
}

}  // namespace
}  // namespace gangsim
