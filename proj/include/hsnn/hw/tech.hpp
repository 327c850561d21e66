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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "hsnn/core/sim_time.hpp"

namespace hsnn::hw {

enum class UnitKind : std::uint8_t { InputUnit, OutputUnit, SwitchAllocator, PeLut, PeSram, PeNeuron, Nic };

inline constexpr std::array<UnitKind, 7> kAllUnitKinds{UnitKind::InputUnit, UnitKind::OutputUnit,
                                                       UnitKind::SwitchAllocator, UnitKind::PeLut,
                                                       UnitKind::PeSram, UnitKind::PeNeuron, UnitKind::Nic};

const char* to_string(UnitKind kind);
std::optional<UnitKind> parse_unit_kind(std::string_view text);
/// Router and NIC units carry traffic; PE units do the neural work.
bool is_interconnect(UnitKind kind);

/// Figures for one unit instance. Energies are kept as integers: leakage in
/// nanowatts and dynamic energy in femtojoules. PE figures are per neuron slot.
struct UnitTech {
    SimTime forward;
    SimTime backward;
    std::int64_t leakage_nw = 0;
    double area_um2 = 0.0;
    std::int64_t dynamic_fj = 0;

    bool operator==(const UnitTech&) const = default;
};

class TechParams {
public:
    void set(UnitKind kind, UnitTech tech) { units_[kind] = tech; }
    bool has(UnitKind kind) const { return units_.contains(kind); }
    /// Throws ConfigError naming the kind when there is no entry.
    const UnitTech& at(UnitKind kind) const;
    const std::map<UnitKind, UnitTech>& units() const { return units_; }

    bool operator==(const TechParams&) const = default;

private:
    std::map<UnitKind, UnitTech> units_;
};

/// Router rows hold the synthesized 180 nm figures; PE and NIC rows, and all
/// dynamic energies, are placeholders to be calibrated by the user.
TechParams default_tech();

/// Keys are `<kind>.forward_latency_ps`, `.backward_latency_ps`,
/// `.leakage_power_mw`, `.area_um2` and `.dynamic_energy_per_event_pj`. A kind
/// that appears must be complete; unknown keys are rejected.
TechParams parse_tech(std::string_view text, const std::string& origin);
TechParams load_tech(const std::filesystem::path& path);
std::string format_tech(const TechParams& tech);

}  // namespace hsnn::hw
