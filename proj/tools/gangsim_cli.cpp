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

// gangsim command-line front end. Talks to the simulator only through the C
// interface in gangsim.h.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "gangsim/gangsim.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;

constexpr const char* kOutDirEnv = "GANGSIM_OUT_DIR";

struct ScenarioDeleter {
  void operator()(gs_scenario* s) const { gs_scenario_free(s); }
};
struct TraceDeleter {
  void operator()(gs_trace* t) const { gs_trace_free(t); }
};
using ScenarioPtr = std::unique_ptr<gs_scenario, ScenarioDeleter>;
using TracePtr = std::unique_ptr<gs_trace, TraceDeleter>;

// Takes ownership of a string returned by the C API.
std::string take(char* s) {
  std::string out = s ? s : "";
  gs_string_free(s);
  return out;
}

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void raise(int code, std::string message) {
  throw CliError{code, std::move(message)};
}

int exit_code_for(gs_status st) {
  switch (st) {
    case GS_OK:
      return kExitOk;
    case GS_ERR_IO:
    case GS_ERR_INTERNAL:
      return kExitIo;
    default:
      return kExitInvalid;
  }
}

void check(gs_status st) {
  if (st != GS_OK) raise(exit_code_for(st), gs_last_error());
}

// "10", "10.33" or "31/3" as a reduced fraction.
std::pair<std::int64_t, std::int64_t> parse_fraction(const std::string& text) {
  auto bad = [&]() -> std::pair<std::int64_t, std::int64_t> {
    raise(kExitInvalid, "not a number: '" + text + "'");
  };
  try {
    std::size_t used = 0;
    if (auto slash = text.find('/'); slash != std::string::npos) {
      std::int64_t num = std::stoll(text.substr(0, slash), &used);
      if (used != slash) return bad();
      std::string d = text.substr(slash + 1);
      std::int64_t den = std::stoll(d, &used);
      if (used != d.size() || den <= 0) return bad();
      return {num, den};
    }
    std::int64_t whole = 0, frac = 0, den = 1;
    auto dot = text.find('.');
    std::string head = text.substr(0, dot);
    if (!head.empty()) {
      whole = std::stoll(head, &used);
      if (used != head.size()) return bad();
    }
    if (dot != std::string::npos) {
      std::string tail = text.substr(dot + 1);
      if (tail.empty() || tail.size() > 9 ||
          tail.find_first_not_of("0123456789") != std::string::npos)
        return bad();
      frac = std::stoll(tail);
      for (std::size_t i = 0; i < tail.size(); ++i) den *= 10;
    } else if (head.empty()) {
      return bad();
    }
    return {whole * den + (text[0] == '-' ? -frac : frac), den};
  } catch (const std::logic_error&) {
    return bad();
  }
}

struct SourceOptions {
  std::string preset;
  std::string scenario_path;
  int dnn_cores = 0;
  std::string policy;
  std::vector<std::string> slowdowns;  // victim,interferer=factor
  std::string cs_cost;
  std::int64_t horizon = 0;
};

void add_source_options(CLI::App* cmd, SourceOptions& o) {
  auto* preset = cmd->add_option("--preset", o.preset, "Built-in scenario")
                     ->check(CLI::IsMember({"table1", "table1-interference", "dnn-tx2",
                                            "dnn-pi3"}));
  auto* file = cmd->add_option("--scenario", o.scenario_path, "Scenario JSON file");
  preset->excludes(file);
  file->excludes(preset);
  cmd->add_option("--dnn-cores", o.dnn_cores, "DNN thread count for dnn presets (2-4)")
      ->check(CLI::Range(2, 4));
  cmd->add_option("--slowdown", o.slowdowns,
                  "Interference factor, victim,interferer=factor (repeatable)");
  cmd->add_option("--cs-cost", o.cs_cost,
                  "Context-switch cost in µs, or a named preset such as rtgang-1thread");
  cmd->add_option("--horizon", o.horizon, "Simulation horizon in µs")
      ->check(CLI::PositiveNumber);
}

ScenarioPtr load(const SourceOptions& o) {
  gs_scenario* raw = nullptr;
  if (!o.preset.empty()) {
    check(gs_scenario_from_preset(o.preset.c_str(), o.dnn_cores, &raw));
  } else if (!o.scenario_path.empty()) {
    check(gs_scenario_load_file(o.scenario_path.c_str(), &raw));
  } else {
    raise(kExitInvalid, "one of --preset or --scenario is required");
  }
  ScenarioPtr s(raw);

  if (!o.policy.empty()) check(gs_scenario_set_policy(s.get(), o.policy.c_str()));
  if (o.horizon > 0) check(gs_scenario_set_horizon(s.get(), o.horizon));
  for (const auto& spec : o.slowdowns) {
    auto comma = spec.find(',');
    auto eq = spec.find('=');
    if (comma == std::string::npos || eq == std::string::npos || eq < comma)
      raise(kExitInvalid, "--slowdown expects victim,interferer=factor, got '" + spec + "'");
    auto [num, den] = parse_fraction(spec.substr(eq + 1));
    check(gs_scenario_set_slowdown(s.get(), spec.substr(0, comma).c_str(),
                                   spec.substr(comma + 1, eq - comma - 1).c_str(), num,
                                   den));
  }
  if (!o.cs_cost.empty()) {
    std::int64_t num = 0, den = 1;
    if (gs_context_switch_preset(o.cs_cost.c_str(), &num, &den) != GS_OK)
      std::tie(num, den) = parse_fraction(o.cs_cost);
    check(gs_scenario_set_context_switch_cost(s.get(), num, den));
  }
  return s;
}

void require_valid(const gs_scenario* s) {
  char* text = nullptr;
  std::size_t count = 0;
  check(gs_scenario_validate(s, &text, &count));
  std::string violations = take(text);
  if (count > 0) raise(kExitInvalid, "scenario is invalid:\n" + violations);
}

std::string default_out_dir() {
  const char* env = std::getenv(kOutDirEnv);
  return env && *env ? env : ".";
}

// Writes every artifact after all computation is done, so a failed run
// leaves the output directory untouched.
void write_all(const fs::path& dir,
               const std::vector<std::pair<std::string, std::string>>& files) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) raise(kExitIo, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& [name, body] : files) {
    fs::path path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    out.close();
    if (!out) raise(kExitIo, "cannot write " + path.string());
  }
}

const std::map<std::string, std::pair<gs_format, std::string>>& formats() {
  static const std::map<std::string, std::pair<gs_format, std::string>> table = {
      {"segments-csv", {GS_FORMAT_SEGMENTS_CSV, "segments.csv"}},
      {"trace-json", {GS_FORMAT_TRACE_JSON, "trace.json"}},
      {"report-text", {GS_FORMAT_REPORT_TEXT, "report.txt"}},
      {"report-json", {GS_FORMAT_REPORT_JSON, "report.json"}},
  };
  return table;
}

int cmd_run(const SourceOptions& src, const std::vector<std::string>& wanted,
            const std::string& out_dir, bool quiet) {
  auto scenario = load(src);
  require_valid(scenario.get());
  gs_trace* raw = nullptr;
  check(gs_simulate(scenario.get(), &raw));
  TracePtr trace(raw);

  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& name : wanted) {
    const auto& [fmt, file] = formats().at(name);
    char* text = nullptr;
    check(gs_trace_export(trace.get(), fmt, &text));
    files.emplace_back(file, take(text));
  }
  write_all(out_dir, files);

  if (!quiet) {
    char* report = nullptr;
    check(gs_trace_export(trace.get(), GS_FORMAT_REPORT_TEXT, &report));
    std::cout << take(report);
  }
  return kExitOk;
}

int cmd_compare(const SourceOptions& src, const std::vector<std::string>& policies,
                const std::string& out_dir, bool quiet) {
  auto scenario = load(src);
  std::vector<const char*> names;
  for (const auto& p : policies) names.push_back(p.c_str());
  char* text = nullptr;
  char* json = nullptr;
  check(gs_compare(scenario.get(), names.data(), names.size(), &text, &json));
  std::string t = take(text);
  std::string j = take(json);
  write_all(out_dir, {{"compare.txt", t}, {"compare.json", j}});
  if (!quiet) std::cout << t;
  return kExitOk;
}

int cmd_scenario(const SourceOptions& src, const std::string& out_file) {
  auto scenario = load(src);
  char* json = nullptr;
  check(gs_scenario_to_json(scenario.get(), &json));
  std::string text = take(json);
  if (out_file.empty() || out_file == "-") {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) raise(kExitIo, "cannot write " + out_file);
  return kExitOk;
}

int cmd_validate(const SourceOptions& src) {
  auto scenario = load(src);
  require_valid(scenario.get());
  std::cout << "ok\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gangsim: one-gang-at-a-time real-time scheduling simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gs_version());

  SourceOptions run_src, cmp_src, scn_src, val_src;
  std::vector<std::string> run_formats;
  std::vector<std::string> cmp_policies;
  std::string run_out = default_out_dir();
  std::string cmp_out = default_out_dir();
  std::string scn_out;
  bool quiet = false;

  std::vector<std::string> format_names;
  for (const auto& [name, _] : formats()) format_names.push_back(name);

  auto* run = app.add_subcommand("run", "Simulate a scenario and export artifacts");
  add_source_options(run, run_src);
  run->add_option("--policy", run_src.policy, "co-schedule, co-schedule-ideal or rt-gang");
  run->add_option("--out", run_out, std::string("Output directory (default $") +
                                        kOutDirEnv + " or .)");
  run->add_option("--format", run_formats, "Artifacts to write")
      ->delimiter(',')
      ->check(CLI::IsMember(format_names));
  run->add_flag("-q,--quiet", quiet, "Do not print the report");

  auto* cmp = app.add_subcommand("compare", "Run one scenario under several policies");
  add_source_options(cmp, cmp_src);
  cmp->add_option("--policies", cmp_policies,
                  "Policies to compare, e.g. solo,co-schedule,rt-gang")
      ->delimiter(',')
      ->required();
  cmp->add_option("--out", cmp_out, std::string("Output directory (default $") +
                                        kOutDirEnv + " or .)");
  cmp->add_flag("-q,--quiet", quiet, "Do not print the comparison");

  auto* scn = app.add_subcommand("scenario", "Print a scenario as JSON");
  add_source_options(scn, scn_src);
  scn->add_option("--policy", scn_src.policy, "Policy to store in the scenario");
  scn->add_option("-o,--output", scn_out, "Output file (default stdout)");

  auto* val = app.add_subcommand("validate", "Check a scenario for invariant violations");
  add_source_options(val, val_src);
  val->add_option("--policy", val_src.policy, "Policy to validate against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) {
      if (run_formats.empty()) run_formats = {"report-text"};
      return cmd_run(run_src, run_formats, run_out, quiet);
    }
    if (*cmp) {
      if (cmp_policies.size() < 2) raise(kExitInvalid, "compare needs at least two policies");
      return cmd_compare(cmp_src, cmp_policies, cmp_out, quiet);
    }
    if (*scn) return cmd_scenario(scn_src, scn_out);
    if (*val) return cmd_validate(val_src);
  } catch (const CliError& e) {
    std::cerr << "gangsim: " << e.message;
    if (e.message.empty() || e.message.back() != '\n') std::cerr << '\n';
    return e.code;
  }
  return kExitOk;
}
