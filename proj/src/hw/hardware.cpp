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

#include "hsnn/hw/hardware.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "hsnn/core/error.hpp"
#include "hsnn/hw/units.hpp"

namespace hsnn::hw {

namespace {

std::string node_name(Coord c) { return "node(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")"; }

async::StageDelays delays_of(const UnitTech& t) { return {t.forward, t.backward}; }

std::vector<Port> connected_ports(Coord c, const ArchConfig& arch) {
    std::vector<Port> ports{Port::Local};
    for (Port p : {Port::North, Port::East, Port::South, Port::West})
        if (neighbor(c, p, arch.rows, arch.cols)) ports.push_back(p);
    return ports;
}

}  // namespace

std::size_t expected_actor_count(const ArchConfig& arch) {
    std::size_t n = 0;
    for (const Coord c : workload::scan_order(arch.rows, arch.cols))
        n += 2 * connected_ports(c, arch).size() + 1 + 2 + 3;
    return n;
}

struct HardwareInstance::Impl : kernel::Source {
    struct Node {
        Coord coord;
        std::array<std::optional<kernel::ActorId>, kPortCount> in, out;
        std::array<OutputUnit*, kPortCount> out_unit{};
        kernel::ActorId sa, tx, rx, lut, sram, neuron;
        SwitchAllocator* sa_unit = nullptr;
        NicTx* tx_unit = nullptr;
        PeLut* lut_unit = nullptr;
        PeNeuron* neuron_unit = nullptr;
    };

    ArchConfig arch;
    TechParams tech;
    workload::SnnModel model;
    workload::MappingTable mapping;
    std::unique_ptr<AddressMap> address_map;
    std::vector<std::unique_ptr<PeTables>> tables;  // scan order, outlives the actors
    kernel::Kernel kernel;
    std::vector<Node> nodes;                        // scan order
    std::vector<UnitRecord> units;
    std::optional<SimTime> time_limit;
    bool ran = false;

    // Barrier driver state.
    std::int32_t current_layer = -1;
    std::uint32_t phase_t = 0;
    std::uint32_t phase_l = 0;
    bool in_phase = false;
    bool finished = false;
    SimTime phase_start;
    std::uint64_t outputs_seen = 0;
    SimulationResult result;

    Impl(const ArchConfig& a, const TechParams& t, const workload::SnnModel& m, SimOptions options)
        : arch(a), tech(t), model(m), kernel(kernel::KernelOptions{options.workers, options.livelock_window}),
          time_limit(options.time_limit) {
        const auto violations = arch_violations(arch, model);
        if (!violations.empty()) {
            std::string msg = "invalid architecture:";
            for (const auto& v : violations) msg += "\n  - " + v;
            throw ValidationError(msg);
        }
        for (auto k : kAllUnitKinds) tech.at(k);
        mapping = resolved_mapping(arch, model);
        address_map = std::make_unique<AddressMap>(arch, mapping, model);
        build_tables();
        build_actors();
        kernel.add_source(*this);
    }

    std::size_t scan_index(Coord c) const {
        return static_cast<std::size_t>(c.x) * arch.cols + static_cast<std::size_t>(c.y);
    }

    void build_tables() {
        const auto pes = workload::scan_order(arch.rows, arch.cols);
        const std::size_t n_layers = model.layers.size();
        for (const Coord pe : pes) {
            auto t = std::make_unique<PeTables>();
            t->pe = pe;
            t->slots.resize(arch.neurons_per_pe);
            t->slots_by_layer.assign(n_layers, {});
            tables.push_back(std::move(t));
        }
        std::vector<std::uint32_t> used(pes.size(), 0);
        for (std::uint32_t l = 0; l < n_layers; ++l) {
            const std::uint32_t base = model.layer_offset(l);
            for (std::uint32_t n = 0; n < model.layer_size(l); ++n) {
                const auto& loc = address_map->locate(base + n);
                const std::size_t pe = scan_index(loc.pe);
                auto& slot = tables[pe]->slots[loc.slot];
                slot.layer = l;
                slot.neuron = n;
                slot.global = base + n;
                slot.params = model.layers[l].neuron;
                slot.maxpool = model.layers[l].kind == workload::LayerKind::MaxPool;
                used[pe] = std::max(used[pe], loc.slot + 1);
            }
        }
        for (std::size_t pe = 0; pe < tables.size(); ++pe) {
            tables[pe]->slots.resize(used[pe]);
            for (std::uint32_t s = 0; s < used[pe]; ++s)
                tables[pe]->slots_by_layer[tables[pe]->slots[s].layer].push_back(s);
        }
        for (std::uint32_t l = 1; l < n_layers; ++l) {
            const auto fan = workload::fanout(model, l);
            const std::uint32_t src_base = model.layer_offset(l - 1);
            const std::uint32_t dst_base = model.layer_offset(l);
            for (std::uint32_t s = 0; s < fan.size(); ++s) {
                const std::uint32_t src = src_base + s;
                std::set<std::size_t> dests;
                for (const auto& syn : fan[s]) {
                    const auto& loc = address_map->locate(dst_base + syn.target);
                    const std::size_t pe = scan_index(loc.pe);
                    auto& t = *tables[pe];
                    t.lut[src].push_back(SynapseOp{loc.slot, static_cast<std::uint32_t>(t.weights.size()), 0});
                    t.weights.push_back(syn.weight);
                    dests.insert(pe);
                }
                const auto& src_loc = address_map->locate(src);
                auto& slot = tables[scan_index(src_loc.pe)]->slots[src_loc.slot];
                for (auto pe : dests) slot.destinations.push_back(tables[pe]->pe);
            }
        }
    }

    template <class T, class... Args>
    std::pair<kernel::ActorId, T*> add(Coord c, const char* module, std::string unit, UnitKind kind,
                                       std::uint32_t multiplier, Args&&... args) {
        auto actor = std::make_unique<T>(std::forward<Args>(args)...);
        T* raw = actor.get();
        raw->set_activity_tag(&current_layer);
        kernel::ActorPath path{"sys", node_name(c), module, std::move(unit)};
        units.push_back(UnitRecord{path.str(), kind, multiplier, c, std::nullopt});
        const auto id = kernel.register_actor(std::move(path), std::move(actor));
        units.back().actor = id;
        return {id, raw};
    }

    void init(kernel::ActorId id, std::uint32_t depth, std::vector<OutputPort> outputs) {
        auto params = std::make_shared<InitParams>();
        params->buffer_depth = depth;
        params->outputs = std::move(outputs);
        kernel.post(SimTime{}, id,
                    HandshakeMessage{MessageKind::Init, kLocalChannel, {}, std::shared_ptr<const InitParams>(params)});
    }

    void build_actors() {
        const auto coords = workload::scan_order(arch.rows, arch.cols);
        const std::uint32_t fifo = arch.fifo_depth_per_port;
        const std::uint32_t npe = arch.neurons_per_pe;
        nodes.resize(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i) {
            const Coord c = coords[i];
            Node& n = nodes[i];
            n.coord = c;
            const auto ports = connected_ports(c, arch);
            for (int p = 0; p < kPortCount; ++p) {
                const Port port{static_cast<std::uint8_t>(p)};
                const std::string name = port_name(port);
                if (std::find(ports.begin(), ports.end(), port) == ports.end()) {
                    units.push_back(
                        UnitRecord{kernel::ActorPath{"sys", node_name(c), "router", "in_" + name}.str(),
                                   UnitKind::InputUnit, 1, c, std::nullopt});
                    units.push_back(
                        UnitRecord{kernel::ActorPath{"sys", node_name(c), "router", "out_" + name}.str(),
                                   UnitKind::OutputUnit, 1, c, std::nullopt});
                    continue;
                }
                n.in[p] = add<InputUnit>(c, "router", "in_" + name, UnitKind::InputUnit, 1,
                                         delays_of(tech.at(UnitKind::InputUnit)), c, arch.virtual_channels)
                              .first;
                auto [oid, optr] = add<OutputUnit>(c, "router", "out_" + name, UnitKind::OutputUnit, 1,
                                                   delays_of(tech.at(UnitKind::OutputUnit)));
                n.out[p] = oid;
                n.out_unit[p] = optr;
            }
            std::tie(n.sa, n.sa_unit) = add<SwitchAllocator>(c, "router", "sa", UnitKind::SwitchAllocator, 1,
                                                             delays_of(tech.at(UnitKind::SwitchAllocator)),
                                                             arch.arbitration);
            std::tie(n.tx, n.tx_unit) =
                add<NicTx>(c, "nic", "tx", UnitKind::Nic, 1, delays_of(tech.at(UnitKind::Nic)), *address_map);
            n.rx = add<NicRx>(c, "nic", "rx", UnitKind::Nic, 1, delays_of(tech.at(UnitKind::Nic)), *address_map).first;
            std::tie(n.lut, n.lut_unit) =
                add<PeLut>(c, "pe", "lut", UnitKind::PeLut, npe, delays_of(tech.at(UnitKind::PeLut)), *tables[i]);
            n.sram = add<PeSram>(c, "pe", "sram", UnitKind::PeSram, npe, delays_of(tech.at(UnitKind::PeSram)),
                                 *tables[i])
                         .first;
            std::tie(n.neuron, n.neuron_unit) = add<PeNeuron>(c, "pe", "neuron", UnitKind::PeNeuron, npe,
                                                              delays_of(tech.at(UnitKind::PeNeuron)), *tables[i]);
        }

        ChannelId next_channel = 0;
        auto link = [&](kernel::ActorId target) { return OutputPort{next_channel++, target}; };
        for (Node& n : nodes) {
            const auto ports = connected_ports(n.coord, arch);
            init(n.tx, fifo, {link(*n.in[0])});
            std::vector<OutputPort> sa_outputs;
            for (Port p : ports) {
                const int pi = static_cast<int>(p);
                const OutputPort to_sa = link(n.sa);
                n.sa_unit->bind_input(to_sa.channel, p);
                init(*n.in[pi], fifo, {to_sa});
                n.sa_unit->bind_output(p, sa_outputs.size());
                sa_outputs.push_back(link(*n.out[pi]));
                if (p == Port::Local) {
                    init(*n.out[pi], 1, {link(n.rx)});
                } else {
                    const Coord nb = *neighbor(n.coord, p, arch.rows, arch.cols);
                    init(*n.out[pi], 1, {link(*nodes[scan_index(nb)].in[static_cast<int>(opposite(p))])});
                }
            }
            init(n.sa, static_cast<std::uint32_t>(ports.size()) * fifo, std::move(sa_outputs));
            init(n.rx, fifo, {link(n.lut)});
            init(n.lut, fifo, {link(n.sram)});
            init(n.sram, fifo, {link(n.neuron)});
            init(n.neuron, fifo + 1, {link(n.tx)});
        }
    }

    std::uint64_t total_outputs() const {
        const auto last = static_cast<std::uint32_t>(model.layers.size() - 1);
        std::uint64_t n = 0;
        for (const Node& node : nodes) n += node.neuron_unit->fired_in_layer(last);
        return n;
    }

    void on_quiescence(kernel::Injector& inj) override {
        if (finished) return;
        const SimTime now = inj.now();
        const auto last_layer = static_cast<std::uint32_t>(model.layers.size() - 1);
        if (in_phase) {
            result.layer_latency[phase_l] += now - phase_start;
            if (phase_l == last_layer) {
                const std::uint64_t outputs = total_outputs();
                if (outputs > outputs_seen) result.last_output = phase_start + tech.at(UnitKind::PeNeuron).forward;
                outputs_seen = outputs;
            }
            if (++phase_l == model.layers.size()) {
                phase_l = 0;
                ++phase_t;
            }
        }
        if (phase_t >= model.timesteps) {
            finished = true;
            in_phase = false;
            return;
        }
        in_phase = true;
        phase_start = now;
        current_layer = static_cast<std::int32_t>(phase_l);
        bool injects = false;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const PeTables& t = *tables[i];
            const bool hosts = !t.slots_by_layer[phase_l].empty();
            if (!hosts) continue;
            if (phase_l == 0 && phase_t < t.input_slots.size() && !t.input_slots[phase_t].empty()) injects = true;
            inj.post(now, nodes[i].neuron,
                     HandshakeMessage{MessageKind::Req, kLocalChannel, {}, TickParams{phase_t, phase_l}});
        }
        if (injects && !result.any_input) {
            result.any_input = true;
            result.first_injection = now;
        }
    }

    void load_input(const workload::SpikeTrace& input) {
        for (auto& t : tables) t->input_slots.assign(model.timesteps, {});
        for (const auto& r : input.records) {
            if (r.layer != 0) continue;
            if (r.timestep >= model.timesteps || r.neuron >= model.layer_size(0))
                throw ValidationError("input spike (" + std::to_string(r.timestep) + "," + std::to_string(r.neuron) +
                                      ") outside the model's input layer or timestep range");
            const auto& loc = address_map->locate(r.neuron);
            tables[scan_index(loc.pe)]->input_slots[r.timestep].push_back(loc.slot);
        }
    }

    SimulationResult run(const workload::SpikeTrace& input) {
        if (ran) throw ConfigError("a hardware instance runs once");
        ran = true;
        load_input(input);
        result.layer_latency.assign(model.layers.size(), SimTime{});
        result.stats = kernel.run(kernel::RunLimit{time_limit});

        result.spikes.model_hash = model.hash();
        result.spikes.timesteps = model.timesteps;
        for (const Node& n : nodes)
            result.spikes.records.insert(result.spikes.records.end(), n.neuron_unit->fired().begin(),
                                         n.neuron_unit->fired().end());
        std::sort(result.spikes.records.begin(), result.spikes.records.end());

        if (!result.any_input)
            result.latency = SimTime{};
        else if (result.last_output)
            result.latency = *result.last_output - result.first_injection;
        else
            result.latency = result.stats.final_time - result.first_injection;

        for (const auto& u : units) {
            result.ledger.add_unit(u.path, u.kind, u.multiplier);
            if (!u.actor) continue;
            const auto& ctrl = kernel.actor_as<async::AsyncCtrl>(*u.actor);
            for (const auto& [tag, count] : ctrl.fires_by_tag()) result.ledger.record(u.path, tag, count);
        }

        TrafficStats& tr = result.traffic;
        tr.max_distance = (arch.rows - 1) + (arch.cols - 1);
        for (const Node& n : nodes) {
            tr.flits_injected += n.tx_unit->counters().fires;
            tr.aer_per_pe.push_back(n.lut_unit->counters().fires);
            tr.aer_events += n.lut_unit->counters().fires;
            for (int p = 1; p < kPortCount; ++p) {
                if (!n.out_unit[p]) continue;
                const std::uint64_t flits = n.out_unit[p]->counters().fires;
                tr.links.push_back(LinkLoad{n.coord, Port{static_cast<std::uint8_t>(p)}, flits});
                tr.total_hops += flits;
            }
        }
        return std::move(result);
    }
};

HardwareInstance::HardwareInstance(const ArchConfig& arch, const TechParams& tech, const workload::SnnModel& model,
                                   SimOptions options)
    : impl_(std::make_unique<Impl>(arch, tech, model, options)) {}

HardwareInstance::~HardwareInstance() = default;

kernel::Kernel& HardwareInstance::kernel() { return impl_->kernel; }
std::size_t HardwareInstance::actor_count() const { return impl_->kernel.actor_count(); }
const std::vector<UnitRecord>& HardwareInstance::units() const { return impl_->units; }
const AddressMap& HardwareInstance::address_map() const { return *impl_->address_map; }
const workload::MappingTable& HardwareInstance::mapping() const { return impl_->mapping; }

SimulationResult HardwareInstance::run(const workload::SpikeTrace& input) { return impl_->run(input); }

SimulationResult simulate(const ArchConfig& arch, const TechParams& tech, const workload::SnnModel& model,
                          const workload::SpikeTrace& input, SimOptions options) {
    HardwareInstance hw(arch, tech, model, options);
    return hw.run(input);
}

}  // namespace hsnn::hw
