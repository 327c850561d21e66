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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "hsnn/hw/tech.hpp"

namespace hsnn::ppa {

/// Activity is tagged by the SNN layer whose phase was running.
using EventKind = std::int32_t;

struct LedgerUnit {
    hw::UnitKind kind = hw::UnitKind::InputUnit;
    /// Instances this row stands for when charging area and leakage (PE units
    /// are charged per neuron slot).
    std::uint32_t multiplier = 1;
    std::map<EventKind, std::uint64_t> counts;

    std::uint64_t firings() const;
    bool operator==(const LedgerUnit&) const = default;
};

/// Switching activity per unit. Units must be registered before activity is
/// recorded against them.
class ActivityLedger {
public:
    /// Re-registering a path with the same kind is a no-op; a different kind
    /// throws ConfigError.
    void add_unit(const std::string& path, hw::UnitKind kind, std::uint32_t multiplier = 1);
    /// Throws ConfigError for an unregistered unit.
    void record(std::string_view path, EventKind kind, std::uint64_t count = 1);

    bool has(std::string_view path) const { return units_.find(path) != units_.end(); }
    std::uint64_t count(std::string_view path, EventKind kind) const;
    std::uint64_t firings(std::string_view path) const;
    const std::map<std::string, LedgerUnit, std::less<>>& units() const { return units_; }

    bool operator==(const ActivityLedger&) const = default;

private:
    std::map<std::string, LedgerUnit, std::less<>> units_;
};

/// Union of units, counts summed. Commutative and associative.
ActivityLedger merge(const ActivityLedger& a, const ActivityLedger& b);

}  // namespace hsnn::ppa
