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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hsnn/core/sim_time.hpp"
#include "hsnn/hw/arch_config.hpp"
#include "hsnn/hw/hardware.hpp"
#include "hsnn/hw/tech.hpp"
#include "hsnn/kernel/kernel.hpp"
#include "hsnn/ppa/ledger.hpp"

namespace hsnn::ppa {

struct UnitEnergy {
    std::string path;
    hw::UnitKind kind = hw::UnitKind::InputUnit;
    std::uint64_t firings = 0;
    std::int64_t dynamic_fj = 0;
    std::int64_t leakage_fj = 0;
    bool operator==(const UnitEnergy&) const = default;
};

struct EnergyBreakdown {
    std::int64_t dynamic_fj = 0;
    std::int64_t leakage_fj = 0;
    std::vector<UnitEnergy> units;  // ledger (path) order

    std::int64_t total_fj() const { return dynamic_fj + leakage_fj; }
};

/// Leakage of `multiplier` instances over `duration`, rounded to the nearest fJ.
std::int64_t leakage_fj(std::int64_t leakage_nw, std::uint32_t multiplier, SimTime duration);

/// Per-unit dynamic (firings x energy per event) and leakage (power x time)
/// energy. Throws ConfigError naming a unit kind the technology lacks.
EnergyBreakdown energy_breakdown(const ActivityLedger& ledger, const hw::TechParams& tech, SimTime sim_time);
double energy_total_pj(const ActivityLedger& ledger, const hw::TechParams& tech, SimTime sim_time);

/// Five input units, five output units and one switch allocator. Tied-off
/// edge ports are still physically present.
double router_area(const hw::TechParams& tech);
/// Routers, two NIC halves and the per-slot PE units of every node.
double area_total(const hw::ArchConfig& arch, const hw::TechParams& tech);

/// Energy-delay product in s*nJ.
inline double edp(double energy_pj, SimTime latency) { return (energy_pj / 1000.0) * latency.seconds(); }

inline constexpr std::int32_t kInterconnectRow = -1;

struct LayerRow {
    std::int32_t layer = kInterconnectRow;  // kInterconnectRow for routers and NICs
    std::int64_t energy_fj = 0;
    SimTime latency;
    bool operator==(const LayerRow&) const = default;
};

/// PE dynamic energy per SNN layer (activity is attributed to the layer whose
/// phase produced it) followed by an "interconnect" row for routers and NICs.
std::vector<LayerRow> layer_breakdown(const ActivityLedger& ledger, const hw::TechParams& tech,
                                      const std::vector<SimTime>& layer_latency);

/// Upper bounds on latency, energy and area. Infinity disables a target.
struct PpaTargets {
    double latency_ps = 0.0;
    double energy_pj = 0.0;
    double area_um2 = 0.0;
};

struct PpaReport {
    bool truncated = false;
    SimTime latency;
    SimTime sim_time;
    std::int64_t dynamic_fj = 0;
    std::int64_t leakage_fj = 0;
    double area_um2 = 0.0;
    std::uint64_t events_processed = 0;
    std::uint64_t events_posted = 0;
    std::vector<UnitEnergy> units;
    std::vector<LayerRow> layers;

    std::int64_t energy_fj() const { return dynamic_fj + leakage_fj; }
    double energy_pj() const { return static_cast<double>(energy_fj()) / 1000.0; }
    double edp() const { return ppa::edp(energy_pj(), latency); }
};

PpaReport make_report(const hw::ArchConfig& arch, const hw::TechParams& tech, const hw::SimulationResult& sim);

inline constexpr int kReportFormatVersion = 1;

/// Sectioned CSV: [summary] key,value pairs; [units] path, kind, firings,
/// dynamic_pj, leakage_pj; [layers] layer, energy_pj, latency_ns. Energies
/// in pJ are rounded to 0.01; the summary also keeps exact femtojoules.
std::string format_report(const PpaReport& report);
PpaReport parse_report(std::string_view text, const std::string& origin);
PpaReport load_report(const std::filesystem::path& path);

/// Fixed-point rendering of a femtojoule count in pJ with two decimals.
std::string format_pj(std::int64_t fj);

}  // namespace hsnn::ppa
