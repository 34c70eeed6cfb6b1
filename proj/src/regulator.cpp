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

#include "gangsim/regulator.hpp"

#include <algorithm>

namespace gangsim {

std::optional<Micros> time_to_exhaustion(const CoreBudgetState& s,
                                         std::int64_t demand_rate,
                                         Micros period) {
  if (s.budget && *s.budget == 0) return Micros{0};
  if (!s.budget || demand_rate == 0) return std::nullopt;
  Rational left = Rational(*s.budget) - s.consumed;
  if (left <= 0) return Micros{0};
  return floor_micros(left * Rational(period, demand_rate));
}

CoreBudgetState begin_period(CoreBudgetState s, Micros now,
                             std::optional<std::int64_t> budget) {
  s.period_start = now;
  s.budget = budget;
  s.consumed = 0;
  s.throttled = budget && *budget == 0;
  return s;
}

CoreBudgetState tighten(CoreBudgetState s, std::int64_t threshold,
                        std::int64_t demand_rate, Micros period) {
  if (!s.budget || threshold < *s.budget) s.budget = threshold;
  auto left = time_to_exhaustion(s, demand_rate, period);
  if (left && *left == 0) s.throttled = true;
  return s;
}

AdvanceResult advance(CoreBudgetState s, const BestEffortTask& be_task,
                      Micros dt, Micros period) {
  AdvanceResult r;
  if (s.throttled) {
    r.state = s;
    return r;
  }
  const auto rate = be_task.memory_demand_rate;
  auto allowed = time_to_exhaustion(s, rate, period);
  r.executed = allowed ? std::min(dt, *allowed) : dt;
  s.consumed += Rational(rate) * Rational(r.executed, period);
  auto left = time_to_exhaustion(s, rate, period);
  if (left && *left == 0) s.throttled = true;
  r.state = s;
  return r;
}

}  // namespace gangsim
