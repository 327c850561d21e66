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

#include <doctest.h>

#include <map>
#include <set>

#include "hsnn/core/error.hpp"
#include "hsnn/hw/hardware.hpp"
#include "hsnn/hw/units.hpp"
#include "hsnn/ppa/ppa.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"

using namespace hsnn;
using namespace hsnn::hw;
using kernel::ActorId;

namespace {

HandshakeMessage init_msg(std::uint32_t depth, std::vector<OutputPort> outputs) {
    auto p = std::make_shared<InitParams>();
    p->buffer_depth = depth;
    p->outputs = std::move(outputs);
    return HandshakeMessage{MessageKind::Init, kLocalChannel, {}, std::shared_ptr<const InitParams>(p)};
}

async::StageDelays delays_of(const TechParams& t, UnitKind k) {
    return {t.at(k).forward, t.at(k).backward};
}

ArchConfig arch(std::uint32_t rows, std::uint32_t cols, std::uint32_t npe) {
    ArchConfig a;
    a.rows = rows;
    a.cols = cols;
    a.neurons_per_pe = npe;
    return a;
}

// Forwards anything it receives to `peer` on `channel` one picosecond later.
struct Feeder : kernel::Actor {
    ActorId peer;
    ChannelId channel = 0;
    void receive(kernel::Context& ctx, const kernel::SimEvent& ev) override {
        if (ev.message.kind == MessageKind::Req)
            ctx.post(peer, SimTime{1}, HandshakeMessage{MessageKind::Req, channel, {}, ev.message.payload});
    }
};

}  // namespace

TEST_CASE("a 2x2 mesh has four routers, NICs and PEs and the predicted actor count") {
    const auto model = testing::fc_chain({8, 8}, 1, 100);
    HardwareInstance hw(arch(2, 2, 4), default_tech(), model);
    std::map<UnitKind, int> kinds;
    std::set<Coord> nodes;
    for (const auto& u : hw.units()) {
        ++kinds[u.kind];
        nodes.insert(u.node);
    }
    CHECK(nodes.size() == 4);
    CHECK(kinds[UnitKind::SwitchAllocator] == 4);
    CHECK(kinds[UnitKind::InputUnit] == 20);
    CHECK(kinds[UnitKind::OutputUnit] == 20);
    CHECK(kinds[UnitKind::Nic] == 8);  // tx and rx halves
    CHECK(kinds[UnitKind::PeLut] == 4);
    // Each corner node: local + 2 neighbor ports, in and out each, one
    // allocator, two NIC halves, three PE units.
    const std::size_t by_hand = 4 * (3 * 2 + 1 + 2 + 3);
    CHECK(hw.actor_count() == by_hand);
    CHECK(expected_actor_count(arch(2, 2, 4)) == by_hand);
}

TEST_CASE("a 1x1 mesh ties every edge port off") {
    const auto model = testing::fc_chain({2, 2}, 1, 100);
    HardwareInstance hw(arch(1, 1, 4), default_tech(), model);
    CHECK(hw.actor_count() == 2 + 1 + 2 + 3);
    int tied = 0;
    for (const auto& u : hw.units())
        if (!u.actor) {
            ++tied;
            CHECK(u.path.find("local") == std::string::npos);
        }
    CHECK(tied == 8);
    CHECK(hw.units().size() == 8 + 8);
}

TEST_CASE("actor paths follow the system/node/module/unit levels") {
    const auto model = testing::fc_chain({2, 2}, 1, 100);
    HardwareInstance hw(arch(1, 2, 2), default_tech(), model);
    CHECK(hw.kernel().find(kernel::ActorPath::parse("sys/node(0,0)/router/in_north")).has_value());
    CHECK(hw.kernel().find(kernel::ActorPath::parse("sys/node(0,1)/router/in_south")).has_value());
    CHECK_FALSE(hw.kernel().find(kernel::ActorPath::parse("sys/node(0,0)/router/in_east")).has_value());
    CHECK(hw.kernel().find(kernel::ActorPath::parse("sys/node(0,1)/pe/neuron")).has_value());
}

TEST_CASE("one router occupies 186179 um2 of unit area") {
    CHECK(ppa::router_area(default_tech()) == doctest::Approx(5.0 * (20547 + 14536) + 10764));
    CHECK(ppa::router_area(default_tech()) == doctest::Approx(186179.0));
}

TEST_CASE("XY routing takes every X hop before any Y hop") {
    CHECK(route_xy({0, 0}, {0, 0}, 3, 3).empty());
    CHECK(route_xy({0, 0}, {2, 1}, 3, 3) == std::vector<Port>{Port::East, Port::East, Port::North});
    CHECK(route_xy({1, 2}, {0, 0}, 3, 3) == std::vector<Port>{Port::West, Port::South, Port::South});
    CHECK_THROWS_AS(route_xy({0, 0}, {3, 0}, 3, 3), ValidationError);
    CHECK_THROWS_AS(route_xy({-1, 0}, {0, 0}, 3, 3), ValidationError);
}

TEST_CASE("route length is the Manhattan distance") {
    for (int sx = 0; sx < 4; ++sx)
        for (int sy = 0; sy < 3; ++sy)
            for (int dx = 0; dx < 4; ++dx)
                for (int dy = 0; dy < 3; ++dy) {
                    const auto r = route_xy({sx, sy}, {dx, dy}, 4, 3);
                    CHECK(r.size() == static_cast<std::size_t>(std::abs(sx - dx) + std::abs(sy - dy)));
                }
}

namespace {

struct RouterRig {
    kernel::Kernel k;
    ActorId feeder, in, sa, out, sink;

    explicit RouterRig(std::uint32_t vcs) {
        const auto tech = default_tech();
        auto f = std::make_unique<Feeder>();
        auto* fp = f.get();
        feeder = k.register_actor({"sys", "t", "a", "feed"}, std::move(f));
        in = k.register_actor({"sys", "t", "b", "in"}, std::make_unique<InputUnit>(delays_of(tech, UnitKind::InputUnit), Coord{0, 0}, vcs));
        auto s = std::make_unique<SwitchAllocator>(delays_of(tech, UnitKind::SwitchAllocator), Arbitration::RoundRobin);
        s->bind_input(1, Port::West);
        s->bind_output(Port::East, 0);
        sa = k.register_actor({"sys", "t", "c", "sa"}, std::move(s));
        out = k.register_actor({"sys", "t", "d", "out"}, std::make_unique<OutputUnit>(delays_of(tech, UnitKind::OutputUnit)));
        sink = k.register_actor({"sys", "t", "e", "sink"}, std::make_unique<testing::Sink>(SimTime{1}));
        fp->peer = in;
        fp->channel = 0;
        k.post(SimTime{}, in, init_msg(8, {{1, sa}}));
        k.post(SimTime{}, sa, init_msg(8, {{2, out}}));
        k.post(SimTime{}, out, init_msg(1, {{3, sink}}));
    }
};

}  // namespace

TEST_CASE("an uncontended flit crosses input unit, allocator and output unit in 4.7 ns") {
    RouterRig r(4);
    Flit f;
    f.dst = {1, 0};
    f.vc = vc_for(f.dst, 4);
    r.k.post(SimTime{}, r.feeder, HandshakeMessage{MessageKind::Req, kLocalChannel, {}, f});
    r.k.run();
    const auto& sink = r.k.actor_as<testing::Sink>(r.sink);
    REQUIRE(sink.arrivals.size() == 1);
    CHECK(sink.arrivals[0].at.ps == 1 + 1200 + 1900 + 1600);
    CHECK(std::get<Flit>(sink.arrivals[0].payload).out_port == static_cast<std::uint8_t>(Port::East));
    // Backward budget of the same three stages.
    const auto t = default_tech();
    CHECK((t.at(UnitKind::InputUnit).backward + t.at(UnitKind::SwitchAllocator).backward +
           t.at(UnitKind::OutputUnit).backward).ps == 5900);
}

TEST_CASE("a virtual channel index out of range is rejected") {
    RouterRig r(4);
    Flit f;
    f.dst = {1, 0};
    f.vc = 4;
    r.k.post(SimTime{}, r.feeder, HandshakeMessage{MessageKind::Req, kLocalChannel, {}, f});
    CHECK_THROWS_AS(r.k.run(), ProtocolError);
}

namespace {

std::vector<Port> grants(Arbitration policy) {
    const auto tech = default_tech();
    kernel::Kernel k;
    auto n = std::make_unique<Feeder>(), e = std::make_unique<Feeder>();
    auto *np = n.get(), *ep = e.get();
    const auto fn = k.register_actor({"sys", "t", "a", "n"}, std::move(n));
    const auto fe = k.register_actor({"sys", "t", "a", "e"}, std::move(e));
    auto s = std::make_unique<SwitchAllocator>(delays_of(tech, UnitKind::SwitchAllocator), policy);
    s->bind_input(1, Port::North);
    s->bind_input(2, Port::East);
    s->bind_output(Port::West, 0);
    const auto sa = k.register_actor({"sys", "t", "b", "sa"}, std::move(s));
    const auto sink = k.register_actor({"sys", "t", "c", "sink"}, std::make_unique<testing::Sink>(SimTime{100}));
    np->peer = ep->peer = sa;
    np->channel = 1;
    ep->channel = 2;
    k.post(SimTime{}, sa, init_msg(8, {{9, sink}}));
    Flit f;
    f.out_port = static_cast<std::uint8_t>(Port::West);
    for (int i = 0; i < 3; ++i) k.post(SimTime{}, fn, HandshakeMessage{MessageKind::Req, kLocalChannel, {}, f});
    for (int i = 0; i < 3; ++i) k.post(SimTime{}, fe, HandshakeMessage{MessageKind::Req, kLocalChannel, {}, f});
    k.run();
    return k.actor_as<SwitchAllocator>(sa).grant_log();
}

}  // namespace

TEST_CASE("round robin alternates between contending inputs, fixed priority favors the lower port") {
    using P = Port;
    CHECK(grants(Arbitration::RoundRobin) == std::vector<Port>{P::North, P::East, P::North, P::East, P::North, P::East});
    CHECK(grants(Arbitration::FixedPriority) == std::vector<Port>{P::North, P::North, P::North, P::East, P::East, P::East});
}

TEST_CASE("AER encode and decode are inverse over a 2x2 mesh with 4 neurons per PE") {
    const auto model = testing::fc_chain({8, 8}, 1, 100);
    const auto a = arch(2, 2, 4);
    AddressMap map(a, workload::map_model(model, 2, 2, 4), model);
    CHECK(map.slot_bits() == 2);
    std::set<std::uint64_t> addresses;
    for (std::uint32_t id = 0; id < 16; ++id) {
        const auto& loc = map.locate(id);
        const Flit f = map.encode(AerEvent{id, 3}, loc.pe);
        CHECK(map.decode(f) == AerEvent{id, 3});
        addresses.insert(f.address);
    }
    CHECK(addresses.size() == 16);
    CHECK_THROWS_AS(map.encode(AerEvent{16, 0}, Coord{0, 0}), ValidationError);
}

TEST_CASE("8 neurons per PE need 3 slot bits and waste none") {
    const auto model = testing::fc_chain({8, 8}, 1, 100);
    AddressMap map(arch(1, 2, 8), workload::map_model(model, 1, 2, 8), model);
    CHECK(map.slot_bits() == 3);
    CHECK((1u << map.slot_bits()) == 8);
    CHECK(map.y_bits() == 1);
    CHECK(map.x_bits() == 0);
}

TEST_CASE("a weight equal to the threshold fires exactly once and resets") {
    const auto model = testing::fc_chain({1, 1}, 50, 50);
    workload::SpikeTrace in{model.hash(), 1, {{0, 0, 0}}};
    const auto sim = simulate(arch(1, 1, 2), default_tech(), model, in);
    CHECK(sim.spikes.count_layer(1) == 1);
}

TEST_CASE("a zero weight never drives a spike") {
    auto model = testing::fc_chain({1, 1}, 0, 1);
    model.timesteps = 3;
    workload::SpikeTrace in{model.hash(), 3, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}};
    const auto sim = simulate(arch(1, 1, 2), default_tech(), model, in);
    CHECK(sim.spikes.count_layer(1) == 0);
}

TEST_CASE("a fan-out of three inside one PE costs one lookup, three fetches and three updates") {
    const auto model = testing::fc_chain({1, 3}, 1, 100);
    workload::SpikeTrace in{model.hash(), 1, {{0, 0, 0}}};
    const auto sim = simulate(arch(1, 1, 4), default_tech(), model, in);
    CHECK(sim.ledger.firings("sys/node(0,0)/pe/lut") == 1);
    CHECK(sim.ledger.firings("sys/node(0,0)/pe/sram") == 3);
    CHECK(sim.ledger.firings("sys/node(0,0)/pe/neuron") == 3);
}

TEST_CASE("every spike reaches each PE holding one of its targets exactly once") {
    Rng rng(404);
    for (int trial = 0; trial < 15; ++trial) {
        const auto model = testing::random_model(rng, 40, 3);
        const auto a = testing::random_arch(rng, model);
        const auto input = workload::generate_input(model, 0.7, 50 + trial);
        const auto sim = simulate(a, default_tech(), model, input);
        const auto mapping = resolved_mapping(a, model);
        AddressMap map(a, mapping, model);

        // Count (spike, destination PE) pairs from the dense weights.
        std::uint64_t expected = 0;
        for (const auto& r : sim.spikes.records) {
            if (r.layer + 1 >= model.layers.size()) continue;
            std::set<Coord> pes;
            const auto fan = workload::fanout(model, r.layer + 1);
            for (const auto& s : fan[r.neuron]) pes.insert(map.locate(model.layer_offset(r.layer + 1) + s.target).pe);
            expected += pes.size();
        }
        std::uint64_t lookups = 0, received = 0;
        for (const auto& [path, unit] : sim.ledger.units()) {
            if (unit.kind == UnitKind::PeLut) lookups += unit.firings();
            if (path.ends_with("nic/rx")) received += unit.firings();
        }
        CHECK(lookups == expected);
        CHECK(received == expected);
        CHECK(sim.traffic.flits_injected == expected);
    }
}

TEST_CASE("no port ever holds more flits than its FIFO depth") {
    Rng rng(77);
    for (int trial = 0; trial < 8; ++trial) {
        const auto model = testing::random_model(rng, 48, 3);
        auto a = testing::random_arch(rng, model);
        a.fifo_depth_per_port = 1 + trial % 3;
        HardwareInstance hw(a, default_tech(), model);
        hw.run(workload::generate_input(model, 0.9, trial));
        for (const auto& u : hw.units()) {
            if (!u.actor || u.kind != UnitKind::InputUnit) continue;
            const auto& c = hw.kernel().actor_as<async::AsyncCtrl>(*u.actor);
            CHECK(c.counters().max_in_flight <= a.fifo_depth_per_port);
            CHECK(c.stash_size() == 0);
        }
    }
}

TEST_CASE("each extra hop adds exactly one router transit of 4.7 ns") {
    const auto model = testing::fc_chain({1, 1}, 10, 100);
    workload::SpikeTrace in{model.hash(), 1, {{0, 0, 0}}};
    std::vector<std::uint64_t> phase;
    for (int h = 1; h <= 3; ++h) {
        auto a = arch(1, 4, 2);
        a.mapping = workload::MappingTable{{{0, 0, 1, {0, 0}}, {1, 0, 1, {0, h}}}};
        const auto sim = simulate(a, default_tech(), model, in);
        CHECK(sim.traffic.total_hops == static_cast<std::uint64_t>(h));
        phase.push_back(sim.layer_latency.at(0).ps);
    }
    CHECK(phase[1] - phase[0] == 4700);
    CHECK(phase[2] - phase[1] == 4700);
}

TEST_CASE("architecture and technology files reject unknown keys") {
    CHECK_THROWS_AS(parse_arch("format_version = 1\nmesh_dims = 2x2\nneurons_per_pe = 4\nbogus = 1\n", "a"), ParseError);
    CHECK_THROWS_AS(parse_tech("format_version = 1\ninput_unit.colour = 3\n", "t"), ParseError);
    const auto a = parse_arch(format_arch(arch(2, 3, 16)), "a");
    CHECK(a == arch(2, 3, 16));
    CHECK(parse_tech(format_tech(default_tech()), "t").units().size() == default_tech().units().size());
}

TEST_CASE("the default technology table carries the router figures") {
    const auto t = default_tech();
    CHECK(t.at(UnitKind::InputUnit).forward.ps == 1200);
    CHECK(t.at(UnitKind::InputUnit).backward.ps == 1500);
    CHECK(t.at(UnitKind::OutputUnit).forward.ps == 1600);
    CHECK(t.at(UnitKind::OutputUnit).backward.ps == 2000);
    CHECK(t.at(UnitKind::SwitchAllocator).forward.ps == 1900);
    CHECK(t.at(UnitKind::SwitchAllocator).backward.ps == 2400);
    CHECK(t.at(UnitKind::InputUnit).leakage_nw == 63000);
    CHECK(t.at(UnitKind::OutputUnit).area_um2 == doctest::Approx(14536));
    CHECK(t.at(UnitKind::SwitchAllocator).area_um2 == doctest::Approx(10764));
}

TEST_CASE("an invalid architecture is refused with every violation listed") {
    const auto model = testing::fc_chain({8, 8}, 1, 100);
    auto a = arch(1, 1, 6);
    try {
        HardwareInstance hw(a, default_tech(), model);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("power of two") != std::string::npos);
        CHECK(msg.find("insufficient capacity") != std::string::npos);
    }
}
