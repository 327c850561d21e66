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

#include "hsnn/hw/units.hpp"

#include <string>

#include "hsnn/core/error.hpp"
#include "hsnn/workload/spike_trace.hpp"

namespace hsnn::hw {

namespace {

template <class T>
const T& payload_as(const async::Request& req, const char* unit) {
    const auto* v = std::get_if<T>(&req.payload);
    if (!v) throw ProtocolError(std::string(unit) + " received an unexpected payload");
    return *v;
}

}  // namespace

InputUnit::InputUnit(async::StageDelays delays, Coord here, std::uint32_t virtual_channels)
    : AsyncCtrl(async::Coupling::Decoupled, delays), here_(here), vcs_(virtual_channels) {}

async::DatapathResult InputUnit::main(kernel::Context&, const async::Request& req) {
    Flit flit = payload_as<Flit>(req, "input unit");
    if (flit.vc >= vcs_)
        throw ProtocolError("flit virtual channel " + std::to_string(flit.vc) + " out of range (" +
                            std::to_string(vcs_) + " channels)");
    flit.out_port = static_cast<std::uint8_t>(next_hop(here_, flit.dst));
    return {{async::Emission{0, flit}}};
}

SwitchAllocator::SwitchAllocator(async::StageDelays delays, Arbitration policy)
    : AsyncCtrl(async::Coupling::Coupled, delays), policy_(policy) {}

async::DatapathResult SwitchAllocator::main(kernel::Context& ctx, const async::Request& req) {
    const Flit& flit = payload_as<Flit>(req, "switch allocator");
    const auto in = input_of_.find(req.channel);
    if (in == input_of_.end()) throw ProtocolError("switch allocator request on an unbound channel");
    const auto& out = output_index_.at(flit.out_port);
    if (!out) throw ProtocolError("route leaves through tied-off port " + std::string(port_name(Port{flit.out_port})));
    outputs_by_index_[*out].waiting[static_cast<int>(in->second)].push_back(req.id);
    request_poll(ctx);
    return {{async::Emission{*out, flit}}, false};
}

void SwitchAllocator::on_downstream_ack(kernel::Context& ctx, std::size_t port) {
    outputs_by_index_[port].busy = false;
    request_poll(ctx);
}

void SwitchAllocator::on_poll(kernel::Context& ctx) {
    for (auto& [index, out] : outputs_by_index_) {
        if (out.busy) continue;
        int pick = -1;
        for (int k = 1; k <= kPortCount && pick < 0; ++k) {
            const int in = policy_ == Arbitration::RoundRobin ? (out.last + k) % kPortCount : k - 1;
            if (!out.waiting[in].empty()) pick = in;
        }
        if (pick < 0) continue;
        const ItemId id = out.waiting[pick].front();
        out.waiting[pick].pop_front();
        out.busy = true;
        out.last = pick;
        grants_.push_back(Port{static_cast<std::uint8_t>(pick)});
        signal_ready(ctx, id);
    }
}

async::DatapathResult OutputUnit::main(kernel::Context&, const async::Request& req) {
    return {{async::Emission{0, payload_as<Flit>(req, "output unit")}}};
}

async::DatapathResult NicTx::main(kernel::Context&, const async::Request& req) {
    const Flit& f = payload_as<Flit>(req, "nic tx");
    return {{async::Emission{0, map_.encode(f.aer, f.dst)}}};
}

async::DatapathResult NicRx::main(kernel::Context&, const async::Request& req) {
    return {{async::Emission{0, map_.decode(payload_as<Flit>(req, "nic rx"))}}};
}

async::DatapathResult PeLut::main(kernel::Context&, const async::Request& req) {
    const AerEvent& ev = payload_as<AerEvent>(req, "pe lut");
    const auto it = tables_.lut.find(ev.source_neuron);
    if (it == tables_.lut.end())
        throw ConfigError("mapping error: spike of neuron " + std::to_string(ev.source_neuron) + " reached PE (" +
                          std::to_string(tables_.pe.x) + "," + std::to_string(tables_.pe.y) +
                          ") which holds none of its targets");
    async::DatapathResult r;
    r.outputs.reserve(it->second.size());
    for (const auto& op : it->second) r.outputs.push_back(async::Emission{0, op});
    return r;
}

async::DatapathResult PeSram::main(kernel::Context&, const async::Request& req) {
    SynapseOp op = payload_as<SynapseOp>(req, "pe sram");
    op.weight = tables_.weights.at(op.weight_addr);
    return {{async::Emission{0, op}}};
}

PeNeuron::PeNeuron(async::StageDelays delays, const PeTables& tables)
    : AsyncCtrl(async::Coupling::Decoupled, delays),
      tables_(tables),
      membrane_(tables.slots.size(), 0),
      input_(tables.slots.size(), 0),
      per_layer_(tables.slots_by_layer.size(), 0) {}

std::uint64_t PeNeuron::fired_in_layer(std::uint32_t layer) const {
    return layer < per_layer_.size() ? per_layer_[layer] : 0;
}

bool PeNeuron::counts_activity(const Payload& payload) const {
    // Ticks are the timestep barrier, not neuron work.
    return !std::holds_alternative<TickParams>(payload);
}

async::DatapathResult PeNeuron::main(kernel::Context&, const async::Request& req) {
    if (const auto* op = std::get_if<SynapseOp>(&req.payload)) {
        input_.at(op->slot) += op->weight;
        return {};
    }
    const TickParams& tick = payload_as<TickParams>(req, "pe neuron");
    std::vector<std::uint32_t> spiking;
    if (tick.layer == 0) {
        if (tick.timestep < tables_.input_slots.size()) spiking = tables_.input_slots[tick.timestep];
    } else if (tick.layer < tables_.slots_by_layer.size()) {
        for (auto s : tables_.slots_by_layer[tick.layer]) {
            const auto& slot = tables_.slots[s];
            const bool fire = slot.maxpool ? input_[s] > 0 : workload::lif_update(membrane_[s], input_[s], slot.params);
            input_[s] = 0;
            if (fire) spiking.push_back(s);
        }
    }
    async::DatapathResult r;
    for (auto s : spiking) {
        const auto& slot = tables_.slots[s];
        fired_.push_back({tick.timestep, slot.layer, slot.neuron});
        ++per_layer_.at(slot.layer);
        for (const Coord& dst : slot.destinations) {
            Flit f;
            f.dst = dst;
            f.aer = AerEvent{slot.global, tick.timestep};
            r.outputs.push_back(async::Emission{0, f});
        }
    }
    return r;
}

}  // namespace hsnn::hw
