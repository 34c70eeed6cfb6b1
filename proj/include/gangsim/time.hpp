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
#include <string>

#include <boost/rational.hpp>

namespace gangsim {

// All timestamps and durations are integer microseconds.
using Micros = std::int64_t;

using Rational = boost::rational<std::int64_t>;

inline constexpr Micros kMicrosPerMilli = 1000;

Micros floor_micros(const Rational& r);
Micros ceil_micros(const Rational& r);
// Round half away from zero (inputs here are non-negative, so half up).
Micros round_micros(const Rational& r);

// Exact decimal conversion at 1e-6 resolution; used for factors and costs
// that arrive as floating point text (10.33, 7.19, ...).
Rational rational_from_decimal(double value);
double to_double(const Rational& r);

// "num/den", or just "num" when den == 1.
std::string to_string(const Rational& r);

}  // namespace gangsim
