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

#pragma once

#include <cstdint>
#include <optional>

#include "gangsim/taskmodel.hpp"
#include "gangsim/time.hpp"

namespace gangsim {

// Per-core memory bandwidth budget for one regulation period. Consumption is
// fluid: a best-effort task with demand rate r consumes r * dt / period
// transactions while it runs for dt.
struct CoreBudgetState {
  Micros period_start = 0;
  std::optional<std::int64_t> budget;  // nullopt: unregulated
  Rational consumed{0};
  bool throttled = false;

  bool operator==(const CoreBudgetState&) const = default;
};

// Opens a new regulation period. A zero budget throttles the core outright.
CoreBudgetState begin_period(CoreBudgetState state, Micros now,
                             std::optional<std::int64_t> budget);

// Mid-period switch to a gang with a lower threshold: the budget drops to
// min(budget, threshold) immediately, keeping what was already consumed.
// Raising the budget waits for begin_period.
CoreBudgetState tighten(CoreBudgetState state, std::int64_t threshold,
                        std::int64_t demand_rate, Micros period);

struct AdvanceResult {
  CoreBudgetState state;
  Micros executed = 0;
};

// Runs `be_task` for up to dt (not crossing a period boundary). Execution
// stops at the last whole microsecond that keeps consumption within budget,
// at which point the core is throttled until the next period.
AdvanceResult advance(CoreBudgetState state, const BestEffortTask& be_task,
                      Micros dt, Micros period);

// Microseconds the task can still run this period; nullopt if unbounded.
std::optional<Micros> time_to_exhaustion(const CoreBudgetState& state,
                                         std::int64_t demand_rate,
                                         Micros period);

}  // namespace gangsim
