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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hsnn/hw/aer.hpp"
#include "hsnn/hw/arch_config.hpp"
#include "hsnn/hw/tech.hpp"
#include "hsnn/kernel/kernel.hpp"
#include "hsnn/ppa/ledger.hpp"
#include "hsnn/workload/mapping.hpp"
#include "hsnn/workload/snn_model.hpp"
#include "hsnn/workload/spike_trace.hpp"

namespace hsnn::hw {

/// One physical unit. Tied-off router ports have no actor but still occupy
/// area and leak.
struct UnitRecord {
    std::string path;
    UnitKind kind = UnitKind::InputUnit;
    std::uint32_t multiplier = 1;
    Coord node;
    std::optional<kernel::ActorId> actor;
};

struct LinkLoad {
    Coord from;
    Port port = Port::East;
    std::uint64_t flits = 0;
    bool operator==(const LinkLoad&) const = default;
};

struct TrafficStats {
    std::uint64_t flits_injected = 0;
    std::uint64_t aer_events = 0;
    std::vector<std::uint64_t> aer_per_pe;  // scan order
    std::vector<LinkLoad> links;            // every inter-router link
    std::uint64_t total_hops = 0;
    std::uint32_t max_distance = 0;
    bool operator==(const TrafficStats&) const = default;
};

struct SimulationResult {
    kernel::SimStats stats;
    workload::SpikeTrace spikes;  // every layer, layer 0 = injected inputs
    bool any_input = false;
    SimTime first_injection;
    std::optional<SimTime> last_output;
    /// First input injection to retirement of the last output-layer spike.
    SimTime latency;
    std::vector<SimTime> layer_latency;  // summed phase durations per layer
    TrafficStats traffic;
    ppa::ActivityLedger ledger;
};

struct SimOptions {
    unsigned workers = 1;
    std::optional<SimTime> time_limit;
    std::uint64_t livelock_window = 10'000'000;
};

/// A mesh of routers, NICs and PEs registered as controller actors. Each
/// (timestep, layer) pair runs as one barrier phase: the PEs holding that
/// layer are ticked and the network runs to quiescence.
class HardwareInstance {
public:
    /// Throws ValidationError listing every structural violation of `arch`.
    HardwareInstance(const ArchConfig& arch, const TechParams& tech, const workload::SnnModel& model,
                     SimOptions options = {});
    ~HardwareInstance();
    HardwareInstance(const HardwareInstance&) = delete;
    HardwareInstance& operator=(const HardwareInstance&) = delete;

    kernel::Kernel& kernel();
    std::size_t actor_count() const;
    const std::vector<UnitRecord>& units() const;
    const AddressMap& address_map() const;
    const workload::MappingTable& mapping() const;

    /// Runs the whole input trace. An instance runs once.
    SimulationResult run(const workload::SpikeTrace& input);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Actors per node: router input/output units for every connected port
/// (local plus in-mesh neighbors), one switch allocator, two NIC halves and
/// three PE units.
std::size_t expected_actor_count(const ArchConfig& arch);

SimulationResult simulate(const ArchConfig& arch, const TechParams& tech, const workload::SnnModel& model,
                          const workload::SpikeTrace& input, SimOptions options = {});

}  // namespace hsnn::hw
