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

#include "hsnn/ppa/ledger.hpp"

#include "hsnn/core/error.hpp"

namespace hsnn::ppa {

std::uint64_t LedgerUnit::firings() const {
    std::uint64_t n = 0;
    for (const auto& [kind, c] : counts) n += c;
    return n;
}

void ActivityLedger::add_unit(const std::string& path, hw::UnitKind kind, std::uint32_t multiplier) {
    const auto it = units_.find(path);
    if (it != units_.end()) {
        if (it->second.kind != kind || it->second.multiplier != multiplier)
            throw ConfigError("unit " + path + " registered twice with different kinds");
        return;
    }
    units_.emplace(path, LedgerUnit{kind, multiplier, {}});
}

void ActivityLedger::record(std::string_view path, EventKind kind, std::uint64_t count) {
    const auto it = units_.find(path);
    if (it == units_.end()) throw ConfigError("activity recorded for unknown unit " + std::string(path));
    if (count != 0) it->second.counts[kind] += count;
}

std::uint64_t ActivityLedger::count(std::string_view path, EventKind kind) const {
    const auto it = units_.find(path);
    if (it == units_.end()) return 0;
    const auto c = it->second.counts.find(kind);
    return c == it->second.counts.end() ? 0 : c->second;
}

std::uint64_t ActivityLedger::firings(std::string_view path) const {
    const auto it = units_.find(path);
    return it == units_.end() ? 0 : it->second.firings();
}

ActivityLedger merge(const ActivityLedger& a, const ActivityLedger& b) {
    ActivityLedger out = a;
    for (const auto& [path, unit] : b.units()) {
        out.add_unit(path, unit.kind, unit.multiplier);
        for (const auto& [kind, c] : unit.counts) out.record(path, kind, c);
    }
    return out;
}

}  // namespace hsnn::ppa
