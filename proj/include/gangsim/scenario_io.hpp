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

// Scenario files (JSON, format_version 1) and built-in presets.
// See docs/scenario-format.md for the schema.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gangsim/taskmodel.hpp"

namespace gangsim {

inline constexpr int kScenarioFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc);

std::string dump_scenario(const Scenario& scenario);
Scenario parse_scenario(const std::string& text);

// FNV-1a over the canonical JSON text.
std::uint64_t scenario_fingerprint(const Scenario& scenario);

// Rationals are written as a number when integral, otherwise as
// {"num": n, "den": d}. Readers also accept decimal numbers.
nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

struct PresetOptions {
  int dnn_cores = 2;  // 2, 3 or 4 for the dnn presets
};

std::vector<std::string> preset_names();

// Throws std::invalid_argument for unknown names or options.
Scenario preset(const std::string& name, const PresetOptions& options = {});

// Context-switch costs measured for Linux and the gang scheduler, in µs.
struct ContextSwitchPreset {
  const char* name;
  Rational cost;
};

const std::vector<ContextSwitchPreset>& context_switch_presets();
std::optional<Rational> context_switch_preset(const std::string& name);

}  // namespace gangsim
