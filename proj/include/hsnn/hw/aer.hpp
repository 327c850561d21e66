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
#include <optional>
#include <vector>

#include "hsnn/hw/arch_config.hpp"
#include "hsnn/kernel/payload.hpp"

namespace hsnn::hw {

/// Router ports. East is +x, North is +y.
enum class Port : std::uint8_t { Local = 0, North = 1, East = 2, South = 3, West = 4 };
inline constexpr int kPortCount = 5;

const char* to_string(Port p);
/// Short lowercase name used in actor paths.
const char* port_name(Port p);
Port opposite(Port p);
/// Neighbor across `p`, or nullopt at a mesh edge.
std::optional<Coord> neighbor(Coord c, Port p, std::uint32_t rows, std::uint32_t cols);

/// Dimension-ordered route: every X hop, then every Y hop. Throws
/// ValidationError when either coordinate lies outside the mesh.
std::vector<Port> route_xy(Coord src, Coord dst, std::uint32_t rows, std::uint32_t cols);
/// First hop from `here` towards `dst`; Local when they coincide.
Port next_hop(Coord here, Coord dst);

inline std::uint32_t vc_for(Coord dst, std::uint32_t virtual_channels) {
    return static_cast<std::uint32_t>(dst.x + dst.y) % virtual_channels;
}

struct NeuronLocation {
    Coord pe;
    std::uint32_t slot = 0;
};

/// Bijection between global neuron ids and packed AER addresses
/// (pe x | pe y | slot), built from a mapping.
class AddressMap {
public:
    AddressMap(const ArchConfig& arch, const workload::MappingTable& mapping, const workload::SnnModel& model);

    std::uint32_t x_bits() const { return x_bits_; }
    std::uint32_t y_bits() const { return y_bits_; }
    std::uint32_t slot_bits() const { return slot_bits_; }
    std::uint32_t total_bits() const { return x_bits_ + y_bits_ + slot_bits_; }
    std::uint32_t neuron_count() const { return static_cast<std::uint32_t>(locations_.size()); }

    const NeuronLocation& locate(std::uint32_t neuron) const;
    std::uint64_t address_of(std::uint32_t neuron) const;
    /// Global neuron id at an address; nullopt for an unused slot.
    std::optional<std::uint32_t> neuron_at(std::uint64_t address) const;

    /// Throws ValidationError for a neuron id outside the mapped range.
    Flit encode(const AerEvent& spike, Coord dst) const;
    /// Throws ValidationError for an address that names no neuron.
    AerEvent decode(const Flit& flit) const;

private:
    std::uint32_t rows_, cols_, npe_, vcs_;
    std::uint32_t x_bits_, y_bits_, slot_bits_;
    std::vector<NeuronLocation> locations_;         // by global neuron id
    std::vector<std::optional<std::uint32_t>> at_;  // by pe scan index * npe + slot
};

}  // namespace hsnn::hw
