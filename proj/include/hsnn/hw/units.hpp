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
#include <deque>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hsnn/async/async_ctrl.hpp"
#include "hsnn/hw/aer.hpp"
#include "hsnn/hw/arch_config.hpp"
#include "hsnn/workload/snn_model.hpp"
#include "hsnn/workload/spike_trace.hpp"

namespace hsnn::hw {

/// Router input port: a FIFO stage that computes the XY output port.
class InputUnit : public async::AsyncCtrl {
public:
    InputUnit(async::StageDelays delays, Coord here, std::uint32_t virtual_channels);

protected:
    async::DatapathResult main(kernel::Context& ctx, const async::Request& req) override;

private:
    Coord here_;
    std::uint32_t vcs_;
};

/// Per-router switch allocator. Requests wait per output port; one grant per
/// output is outstanding until that output unit acknowledges it.
class SwitchAllocator : public async::AsyncCtrl {
public:
    SwitchAllocator(async::StageDelays delays, Arbitration policy);

    void bind_input(ChannelId channel, Port port) { input_of_[channel] = port; }
    void bind_output(Port port, std::size_t index) { output_index_[static_cast<int>(port)] = index; }

    /// Input port of every grant, in grant order.
    const std::vector<Port>& grant_log() const { return grants_; }

protected:
    async::DatapathResult main(kernel::Context& ctx, const async::Request& req) override;
    void on_downstream_ack(kernel::Context& ctx, std::size_t port) override;
    void on_poll(kernel::Context& ctx) override;

private:
    struct OutputState {
        std::array<std::deque<ItemId>, kPortCount> waiting;  // per input port
        bool busy = false;
        int last = kPortCount - 1;  // round-robin pointer
    };

    Arbitration policy_;
    std::map<ChannelId, Port> input_of_;
    std::array<std::optional<std::size_t>, kPortCount> output_index_{};
    std::map<std::size_t, OutputState> outputs_by_index_;
    std::vector<Port> grants_;
};

/// Router output port: forwards each granted flit to the link.
class OutputUnit : public async::AsyncCtrl {
public:
    explicit OutputUnit(async::StageDelays delays) : AsyncCtrl(async::Coupling::Decoupled, delays) {}

protected:
    async::DatapathResult main(kernel::Context& ctx, const async::Request& req) override;
};

/// NIC transmit side: AER-encodes a spike into a flit for the router.
class NicTx : public async::AsyncCtrl {
public:
    NicTx(async::StageDelays delays, const AddressMap& map) : AsyncCtrl(async::Coupling::Decoupled, delays), map_(map) {}

protected:
    async::DatapathResult main(kernel::Context& ctx, const async::Request& req) override;

private:
    const AddressMap& map_;
};

/// NIC receive side: decodes a delivered flit back into an AER event.
class NicRx : public async::AsyncCtrl {
public:
    NicRx(async::StageDelays delays, const AddressMap& map) : AsyncCtrl(async::Coupling::Decoupled, delays), map_(map) {}

protected:
    async::DatapathResult main(kernel::Context& ctx, const async::Request& req) override;

private:
    const AddressMap& map_;
};

/// Read-only contents of one PE, shared by its lut, sram and neuron units.
struct PeTables {
    struct Slot {
        std::uint32_t layer = 0;
        std::uint32_t neuron = 0;  // index within its layer
        std::uint32_t global = 0;
        workload::NeuronParams params;
        bool maxpool = false;
        std::vector<Coord> destinations;  // PEs holding fan-out targets, scan order
    };

    Coord pe;
    std::unordered_map<std::uint32_t, std::vector<SynapseOp>> lut;  // by source global id
    std::vector<std::int32_t> weights;                                // SRAM contents
    std::vector<Slot> slots;
    std::vector<std::vector<std::uint32_t>> slots_by_layer;
    std::vector<std::vector<std::uint32_t>> input_slots;  // layer-0 slots spiking, by timestep
};

/// Spike lookup: resolves an incoming AER event to the synapses it drives.
class PeLut : public async::AsyncCtrl {
public:
    PeLut(async::StageDelays delays, const PeTables& tables)
        : AsyncCtrl(async::Coupling::Decoupled, delays), tables_(tables) {}

protected:
    async::DatapathResult main(kernel::Context& ctx, const async::Request& req) override;

private:
    const PeTables& tables_;
};

/// Weight SRAM: fetches the weight of one synapse.
class PeSram : public async::AsyncCtrl {
public:
    PeSram(async::StageDelays delays, const PeTables& tables)
        : AsyncCtrl(async::Coupling::Decoupled, delays), tables_(tables) {}

protected:
    async::DatapathResult main(kernel::Context& ctx, const async::Request& req) override;

private:
    const PeTables& tables_;
};

/// Neuron array. Synapse operations accumulate into per-slot input sums; a
/// tick for (timestep, layer) applies the LIF update to that layer's neurons
/// and emits one flit per fired neuron and destination PE.
class PeNeuron : public async::AsyncCtrl {
public:
    PeNeuron(async::StageDelays delays, const PeTables& tables);

    const std::vector<workload::SpikeRecord>& fired() const { return fired_; }
    std::uint64_t fired_in_layer(std::uint32_t layer) const;

protected:
    async::DatapathResult main(kernel::Context& ctx, const async::Request& req) override;
    bool counts_activity(const Payload& payload) const override;

private:
    const PeTables& tables_;
    std::vector<std::int16_t> membrane_;
    std::vector<std::int64_t> input_;
    std::vector<workload::SpikeRecord> fired_;
    std::vector<std::uint64_t> per_layer_;
};

}  // namespace hsnn::hw
