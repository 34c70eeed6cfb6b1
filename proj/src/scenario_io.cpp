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

#include "gangsim/scenario_io.hpp"

#include <numeric>
#include <set>

namespace gangsim {

using nlohmann::json;

json rational_to_json(const Rational& r) {
  if (r.denominator() == 1) return r.numerator();
  return json{{"num", r.numerator()}, {"den", r.denominator()}};
}

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number_float()) return rational_from_decimal(j.get<double>());
  if (j.is_object() && j.contains("num") && j.contains("den")) {
    auto den = j.at("den").get<std::int64_t>();
    if (den == 0) throw FormatError("rational with zero denominator");
    return Rational(j.at("num").get<std::int64_t>(), den);
  }
  throw FormatError("expected a number or {num, den}");
}

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["format_version"] = kScenarioFormatVersion;
  doc["policy"] = policy_name(s.policy);
  doc["horizon_us"] = s.horizon;
  doc["seed"] = s.seed;
  doc["platform"] = {
      {"core_count", s.platform.core_count},
      {"regulation_period_us", s.platform.regulation_period},
      {"context_switch_cost_us", rational_to_json(s.platform.context_switch_cost)}};

  doc["rt_tasks"] = json::array();
  for (const auto& t : s.rt_tasks) {
    doc["rt_tasks"].push_back({{"id", t.id},
                               {"priority", t.priority},
                               {"period_us", t.period},
                               {"compute_us", t.per_thread_compute},
                               {"cores", t.core_assignment},
                               {"bandwidth_threshold", t.bandwidth_threshold},
                               {"release_offset_us", t.release_offset}});
  }
  doc["virtual_gangs"] = json::array();
  for (const auto& vg : s.virtual_gangs) {
    doc["virtual_gangs"].push_back({{"members", vg.member_ids},
                                    {"priority", vg.shared_priority},
                                    {"bandwidth_threshold", vg.bandwidth_threshold}});
  }
  doc["be_tasks"] = json::array();
  for (const auto& b : s.be_tasks) {
    doc["be_tasks"].push_back({{"id", b.id},
                               {"cores", b.core_assignment},
                               {"memory_demand_rate", b.memory_demand_rate}});
  }
  doc["interference"] = json::array();
  for (const auto& [key, factor] : s.interference.entries()) {
    doc["interference"].push_back({{"victim", key.first},
                                   {"interferer", key.second},
                                   {"factor", rational_to_json(factor)}});
  }
  return doc;
}

namespace {

void only_keys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + " must be an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) throw FormatError("unknown key '" + k + "' in " + where);
}

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key))
    throw FormatError("missing '" + std::string(key) + "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw FormatError("bad type for '" + std::string(key) + "' in " + where);
  }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return field<T>(obj, key, where);
}

const json& array_or_empty(const json& doc, const char* key) {
  static const json empty = json::array();
  if (!doc.contains(key)) return empty;
  const auto& a = doc.at(key);
  if (!a.is_array()) throw FormatError(std::string(key) + " must be an array");
  return a;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  only_keys(doc,
            {"format_version", "policy", "horizon_us", "seed", "platform",
             "rt_tasks", "virtual_gangs", "be_tasks", "interference"},
            "scenario");
  auto version = field<int>(doc, "format_version", "scenario");
  if (version != kScenarioFormatVersion)
    throw FormatError("unsupported format_version " + std::to_string(version));

  Scenario s;
  auto policy = field_or<std::string>(doc, "policy", "rt-gang", "scenario");
  auto parsed = parse_policy(policy);
  if (!parsed) throw FormatError("unknown policy '" + policy + "'");
  s.policy = *parsed;
  s.horizon = field<Micros>(doc, "horizon_us", "scenario");
  s.seed = field_or<std::uint64_t>(doc, "seed", 0, "scenario");

  const auto& p = doc.contains("platform") ? doc.at("platform") : json::object();
  only_keys(p, {"core_count", "regulation_period_us", "context_switch_cost_us"},
            "platform");
  s.platform.core_count = field<int>(p, "core_count", "platform");
  s.platform.regulation_period =
      field_or<Micros>(p, "regulation_period_us", 1000, "platform");
  if (p.contains("context_switch_cost_us"))
    s.platform.context_switch_cost = rational_from_json(p.at("context_switch_cost_us"));

  for (const auto& t : array_or_empty(doc, "rt_tasks")) {
    only_keys(t,
              {"id", "priority", "period_us", "compute_us", "cores",
               "bandwidth_threshold", "release_offset_us"},
              "rt task");
    RtGangTask task;
    task.id = field<std::string>(t, "id", "rt task");
    const std::string where = "rt task " + task.id;
    task.priority = field<Priority>(t, "priority", where);
    task.period = field<Micros>(t, "period_us", where);
    task.per_thread_compute = field<std::vector<Micros>>(t, "compute_us", where);
    task.core_assignment = field<std::vector<CoreIndex>>(t, "cores", where);
    task.bandwidth_threshold =
        field_or<std::int64_t>(t, "bandwidth_threshold", 0, where);
    task.release_offset = field_or<Micros>(t, "release_offset_us", 0, where);
    s.rt_tasks.push_back(std::move(task));
  }
  for (const auto& g : array_or_empty(doc, "virtual_gangs")) {
    only_keys(g, {"members", "priority", "bandwidth_threshold"}, "virtual gang");
    VirtualGangSpec vg;
    vg.member_ids = field<std::vector<std::string>>(g, "members", "virtual gang");
    vg.shared_priority = field<Priority>(g, "priority", "virtual gang");
    vg.bandwidth_threshold =
        field_or<std::int64_t>(g, "bandwidth_threshold", 0, "virtual gang");
    s.virtual_gangs.push_back(std::move(vg));
  }
  for (const auto& b : array_or_empty(doc, "be_tasks")) {
    only_keys(b, {"id", "cores", "memory_demand_rate"}, "be task");
    BestEffortTask be;
    be.id = field<std::string>(b, "id", "be task");
    be.core_assignment = field<std::vector<CoreIndex>>(b, "cores", "be task " + be.id);
    be.memory_demand_rate =
        field_or<std::int64_t>(b, "memory_demand_rate", 0, "be task " + be.id);
    s.be_tasks.push_back(std::move(be));
  }
  for (const auto& e : array_or_empty(doc, "interference")) {
    only_keys(e, {"victim", "interferer", "factor"}, "interference entry");
    if (!e.contains("factor")) throw FormatError("missing 'factor' in interference entry");
    s.interference.set(field<std::string>(e, "victim", "interference entry"),
                       field<std::string>(e, "interferer", "interference entry"),
                       rational_from_json(e.at("factor")));
  }
  return s;
}

std::string dump_scenario(const Scenario& scenario) {
  return scenario_to_json(scenario).dump(2) + "\n";
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
  try {
    return scenario_from_json(doc);
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
}

std::uint64_t scenario_fingerprint(const Scenario& scenario) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : scenario_to_json(scenario).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> preset_names() {
  return {"table1", "table1-interference", "dnn-tx2", "dnn-pi3"};
}

namespace {

Scenario table1() {
  Scenario s;
  s.platform.core_count = 4;
  s.policy = Policy::RtGang;
  s.horizon = 10 * kMicrosPerMilli;
  s.rt_tasks = {
      {"tau1", 2, 10000, {2000, 2000}, {0, 1}, 500, 0},
      {"tau2", 1, 10000, {4000, 4000}, {2, 3}, 500, 0},
  };
  s.be_tasks = {{"tau3", {0, 1, 2, 3}, 200}};
  return s;
}

Micros lcm_period(const Scenario& s) {
  Micros h = 1;
  for (const auto& t : s.rt_tasks) h = std::lcm(h, t.period);
  return h;
}

struct DnnRow {
  Micros compute;
  Micros period;
};

Scenario dnn(Micros bww_compute, const DnnRow& row, int cores) {
  Scenario s;
  s.platform.core_count = 4;
  s.policy = Policy::RtGang;
  RtGangTask dnn_task{"dnn", 2, row.period, {}, {}, 100, 0};
  for (int c = 0; c < cores; ++c) {
    dnn_task.per_thread_compute.push_back(row.compute);
    dnn_task.core_assignment.push_back(c);
  }
  s.rt_tasks = {dnn_task,
                {"bww", 1, 100000, std::vector<Micros>(4, bww_compute), {0, 1, 2, 3}, 100, 0}};
  s.be_tasks = {{"cutcp", {0, 1}, 10}, {"lbm", {2, 3}, 1000}};
  s.interference.set("dnn", "bww", Rational(1033, 100));
  s.interference.set("bww", "dnn", Rational(105, 100));
  s.interference.set("dnn", "lbm", Rational(1033, 100));
  s.horizon = lcm_period(s);
  return s;
}

}  // namespace

Scenario preset(const std::string& name, const PresetOptions& options) {
  if (name == "table1") return table1();
  if (name == "table1-interference") {
    auto s = table1();
    s.policy = Policy::CoScheduleWithInterference;
    s.interference.set("tau1", "tau2", Rational(10));
    s.interference.set("tau2", "tau1", Rational(1));
    return s;
  }
  if (name == "dnn-tx2" || name == "dnn-pi3") {
    if (options.dnn_cores < 2 || options.dnn_cores > 4)
      throw std::invalid_argument("dnn presets support 2, 3 or 4 DNN cores");
    const bool tx2 = name == "dnn-tx2";
    static const DnnRow kTx2[] = {{10700, 24000}, {8800, 19000}, {7600, 17000}};
    static const DnnRow kPi3[] = {{34000, 78000}, {27900, 65000}, {24810, 56000}};
    const auto& row = (tx2 ? kTx2 : kPi3)[options.dnn_cores - 2];
    return dnn(tx2 ? 40000 : 47000, row, options.dnn_cores);
  }
  throw std::invalid_argument("unknown preset '" + name + "'");
}

const std::vector<ContextSwitchPreset>& context_switch_presets() {
  static const std::vector<ContextSwitchPreset> kPresets = {
      {"linux-1thread", Rational(681, 100)},
      {"rtgang-1thread", Rational(719, 100)},
      {"rtgang-2thread", Rational(737, 100)},
      {"rtgang-3thread", Rational(755, 100)},
      {"rtgang-4thread", Rational(772, 100)},
  };
  return kPresets;
}

std::optional<Rational> context_switch_preset(const std::string& name) {
  for (const auto& p : context_switch_presets())
    if (name == p.name) return p.cost;
  return std::nullopt;
}

}  // namespace gangsim
