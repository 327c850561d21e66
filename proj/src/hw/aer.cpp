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

#include "hsnn/hw/aer.hpp"

#include <cstdlib>
#include <string>

#include "hsnn/core/error.hpp"

namespace hsnn::hw {

const char* to_string(Port p) {
    switch (p) {
        case Port::Local: return "L";
        case Port::North: return "N";
        case Port::East: return "E";
        case Port::South: return "S";
        case Port::West: return "W";
    }
    return "?";
}

const char* port_name(Port p) {
    switch (p) {
        case Port::Local: return "local";
        case Port::North: return "north";
        case Port::East: return "east";
        case Port::South: return "south";
        case Port::West: return "west";
    }
    return "?";
}

Port opposite(Port p) {
    switch (p) {
        case Port::North: return Port::South;
        case Port::South: return Port::North;
        case Port::East: return Port::West;
        case Port::West: return Port::East;
        case Port::Local: return Port::Local;
    }
    return Port::Local;
}

std::optional<Coord> neighbor(Coord c, Port p, std::uint32_t rows, std::uint32_t cols) {
    Coord n = c;
    switch (p) {
        case Port::East: ++n.x; break;
        case Port::West: --n.x; break;
        case Port::North: ++n.y; break;
        case Port::South: --n.y; break;
        case Port::Local: return std::nullopt;
    }
    if (n.x < 0 || n.y < 0 || n.x >= static_cast<int>(rows) || n.y >= static_cast<int>(cols)) return std::nullopt;
    return n;
}

namespace {

void check_in_mesh(Coord c, std::uint32_t rows, std::uint32_t cols) {
    if (c.x < 0 || c.y < 0 || c.x >= static_cast<int>(rows) || c.y >= static_cast<int>(cols))
        throw ValidationError("coordinate (" + std::to_string(c.x) + "," + std::to_string(c.y) + ") outside the " +
                              std::to_string(rows) + "x" + std::to_string(cols) + " mesh");
}

}  // namespace

std::vector<Port> route_xy(Coord src, Coord dst, std::uint32_t rows, std::uint32_t cols) {
    check_in_mesh(src, rows, cols);
    check_in_mesh(dst, rows, cols);
    std::vector<Port> hops;
    hops.reserve(static_cast<std::size_t>(std::abs(dst.x - src.x) + std::abs(dst.y - src.y)));
    for (int x = src.x; x != dst.x; x += dst.x > x ? 1 : -1) hops.push_back(dst.x > x ? Port::East : Port::West);
    for (int y = src.y; y != dst.y; y += dst.y > y ? 1 : -1) hops.push_back(dst.y > y ? Port::North : Port::South);
    return hops;
}

Port next_hop(Coord here, Coord dst) {
    if (dst.x != here.x) return dst.x > here.x ? Port::East : Port::West;
    if (dst.y != here.y) return dst.y > here.y ? Port::North : Port::South;
    return Port::Local;
}

AddressMap::AddressMap(const ArchConfig& arch, const workload::MappingTable& mapping,
                       const workload::SnnModel& model)
    : rows_(arch.rows),
      cols_(arch.cols),
      npe_(arch.neurons_per_pe),
      vcs_(arch.virtual_channels),
      x_bits_(address_bits(arch.rows)),
      y_bits_(address_bits(arch.cols)),
      slot_bits_(address_bits(arch.neurons_per_pe)) {
    if (!is_power_of_two(npe_)) throw ValidationError("neurons_per_pe is not a power of two");
    locations_.resize(model.total_neurons());
    std::vector<bool> seen(locations_.size(), false);
    at_.assign(static_cast<std::size_t>(rows_) * cols_ * npe_, std::nullopt);
    std::vector<std::uint32_t> next_slot(static_cast<std::size_t>(rows_) * cols_, 0);
    for (const auto& r : mapping.ranges) {
        check_in_mesh(r.pe, rows_, cols_);
        const std::size_t pe = static_cast<std::size_t>(r.pe.x) * cols_ + static_cast<std::size_t>(r.pe.y);
        const std::uint32_t base = model.layer_offset(r.layer);
        for (auto n = r.begin; n < r.end; ++n) {
            if (next_slot[pe] >= npe_) throw ValidationError("mapping overflows a PE");
            const std::uint32_t g = base + n;
            if (seen.at(g)) throw ValidationError("mapping places neuron " + std::to_string(g) + " twice");
            seen[g] = true;
            locations_[g] = NeuronLocation{r.pe, next_slot[pe]};
            at_[pe * npe_ + next_slot[pe]] = g;
            ++next_slot[pe];
        }
    }
    for (std::size_t g = 0; g < seen.size(); ++g)
        if (!seen[g]) throw ValidationError("mapping leaves neuron " + std::to_string(g) + " unplaced");
}

const NeuronLocation& AddressMap::locate(std::uint32_t neuron) const {
    if (neuron >= locations_.size())
        throw ValidationError("neuron id " + std::to_string(neuron) + " exceeds the address range of " +
                              std::to_string(locations_.size()) + " neurons");
    return locations_[neuron];
}

std::uint64_t AddressMap::address_of(std::uint32_t neuron) const {
    const auto& loc = locate(neuron);
    return (static_cast<std::uint64_t>(loc.pe.x) << (y_bits_ + slot_bits_)) |
           (static_cast<std::uint64_t>(loc.pe.y) << slot_bits_) | loc.slot;
}

std::optional<std::uint32_t> AddressMap::neuron_at(std::uint64_t address) const {
    const std::uint64_t slot = address & ((std::uint64_t{1} << slot_bits_) - 1);
    const std::uint64_t y = (address >> slot_bits_) & ((std::uint64_t{1} << y_bits_) - 1);
    const std::uint64_t x = address >> (y_bits_ + slot_bits_);
    if (x >= rows_ || y >= cols_) return std::nullopt;
    return at_[(x * cols_ + y) * npe_ + slot];
}

Flit AddressMap::encode(const AerEvent& spike, Coord dst) const {
    check_in_mesh(dst, rows_, cols_);
    Flit f;
    f.dst = dst;
    f.vc = vc_for(dst, vcs_);
    f.address = address_of(spike.source_neuron);
    f.aer = spike;
    return f;
}

AerEvent AddressMap::decode(const Flit& flit) const {
    const auto n = neuron_at(flit.address);
    if (!n) throw ValidationError("AER address " + std::to_string(flit.address) + " names no mapped neuron");
    return AerEvent{*n, flit.aer.timestep};
}

}  // namespace hsnn::hw
