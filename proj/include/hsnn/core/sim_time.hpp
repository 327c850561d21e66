/*
 * Copyright 2026 The hsnn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace hsnn {

/// Virtual time in integer picoseconds.
struct SimTime {
    std::uint64_t ps = 0;

    static constexpr SimTime from_ps(std::uint64_t v) { return SimTime{v}; }
    static constexpr SimTime from_ns(std::uint64_t v) { return SimTime{v * 1000}; }
    static constexpr SimTime max() { return SimTime{std::numeric_limits<std::uint64_t>::max()}; }

    constexpr double ns() const { return static_cast<double>(ps) / 1e3; }
    constexpr double seconds() const { return static_cast<double>(ps) * 1e-12; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime{ps + o.ps}; }
    constexpr SimTime operator-(SimTime o) const { return SimTime{ps - o.ps}; }
    constexpr SimTime& operator+=(SimTime o) {
        ps += o.ps;
        return *this;
    }
};

inline constexpr SimTime operator""_ps(unsigned long long v) { return SimTime{v}; }

std::string to_string(SimTime t);

}  // namespace hsnn
