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

#include "hsnn/core/error.hpp"
#include "hsnn/core/rng.hpp"
#include "hsnn/hw/hardware.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"

using namespace hsnn;
using namespace hsnn::kernel;

namespace {

struct Recorder : Actor {
    std::vector<std::pair<SimTime, ItemId>> seen;
    void receive(Context&, const SimEvent& ev) override {
        seen.emplace_back(ev.deliver_at, std::get<ItemId>(ev.message.payload));
    }
};

// Sends itself a zero-delay message forever.
struct Spinner : Actor {
    void receive(Context& ctx, const SimEvent&) override {
        ctx.post(ctx.self(), SimTime{}, HandshakeMessage{MessageKind::Poll, kLocalChannel, {}, {}});
    }
};

struct Shouter : Actor {
    ActorId peer;
    void receive(Context& ctx, const SimEvent&) override {
        ctx.post(peer, SimTime{}, HandshakeMessage{MessageKind::Req, kLocalChannel, {}, ItemId{0}});
    }
};

HandshakeMessage req(ItemId v) { return HandshakeMessage{MessageKind::Req, kLocalChannel, {}, v}; }

}  // namespace

TEST_CASE("registered actors are addressable by their four-level path") {
    Kernel k;
    const auto id = k.register_actor(ActorPath::parse("sys/node(0,0)/router/in_east"), std::make_unique<Recorder>());
    CHECK(k.path(id).str() == "sys/node(0,0)/router/in_east");
    CHECK(k.find(ActorPath::parse("sys/node(0,0)/router/in_east")) == id);
    CHECK_FALSE(k.find(ActorPath::parse("sys/node(0,0)/router/in_west")).has_value());
}

TEST_CASE("a duplicate path is rejected and named") {
    Kernel k;
    k.register_actor(ActorPath::parse("sys/n/m/u"), std::make_unique<Recorder>());
    try {
        k.register_actor(ActorPath::parse("sys/n/m/u"), std::make_unique<Recorder>());
        FAIL("expected a rejection");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("duplicate path: sys/n/m/u") != std::string::npos);
    }
}

TEST_CASE("malformed paths and late registration are rejected") {
    CHECK_THROWS_AS(ActorPath::parse("sys/node/router"), ConfigError);
    Kernel k;
    k.run();
    CHECK_THROWS_AS(k.register_actor(ActorPath::parse("a/b/c/d"), std::make_unique<Recorder>()), ConfigError);
}

TEST_CASE("an empty event set finishes at time zero") {
    Kernel k;
    const auto s = k.run();
    CHECK(s.final_time.ps == 0);
    CHECK(s.events_processed == 0);
    CHECK_FALSE(s.truncated);
}

TEST_CASE("an event posted for t=0 is delivered at t=0") {
    Kernel k;
    const auto id = k.register_actor(ActorPath::parse("s/n/m/u"), std::make_unique<Recorder>());
    k.post(SimTime{}, id, req(7));
    const auto s = k.run();
    const auto& r = k.actor_as<Recorder>(id);
    REQUIRE(r.seen.size() == 1);
    CHECK(r.seen[0].first.ps == 0);
    CHECK(s.events_processed == 1);
    CHECK(s.events_posted == 1);
}

TEST_CASE("events for the same time and target arrive in issue order") {
    Kernel k;
    const auto id = k.register_actor(ActorPath::parse("s/n/m/u"), std::make_unique<Recorder>());
    for (ItemId v = 0; v < 20; ++v) k.post(SimTime{5}, id, req(v));
    k.post(SimTime{3}, id, req(99));
    k.run();
    const auto& seen = k.actor_as<Recorder>(id).seen;
    REQUIRE(seen.size() == 21);
    CHECK(seen[0].second == 99);
    for (ItemId v = 0; v < 20; ++v) CHECK(seen[v + 1].second == v);
}

TEST_CASE("posting into the past is a causality error") {
    Kernel k;
    const auto id = k.register_actor(ActorPath::parse("s/n/m/u"), std::make_unique<Recorder>());
    k.post(SimTime{100}, id, req(0));
    k.run();
    CHECK_THROWS_AS(k.post(SimTime{50}, id, req(1)), CausalityError);
}

TEST_CASE("zero-delay posts to another actor are refused") {
    Kernel k;
    auto shouter = std::make_unique<Shouter>();
    auto* raw = shouter.get();
    const auto a = k.register_actor(ActorPath::parse("s/n/m/a"), std::move(shouter));
    raw->peer = k.register_actor(ActorPath::parse("s/n/m/b"), std::make_unique<Recorder>());
    k.post(SimTime{}, a, req(0));
    CHECK_THROWS_AS(k.run(), CausalityError);
}

TEST_CASE("no virtual-time progress trips the livelock detector") {
    Kernel k(KernelOptions{1, 1000});
    const auto id = k.register_actor(ActorPath::parse("s/n/m/u"), std::make_unique<Spinner>());
    k.post(SimTime{}, id, req(0));
    CHECK_THROWS_AS(k.run(), LivelockError);
}

TEST_CASE("three forward delays from the router table add up to 4.7 ns") {
    Kernel k;
    const auto p = testing::build_pipeline(
        k, {{SimTime{1200}, SimTime{1500}}, {SimTime{1900}, SimTime{2400}}, {SimTime{1600}, SimTime{2000}}}, SimTime{1});
    testing::inject(k, p, 1);
    k.run();
    const auto& sink = k.actor_as<testing::Sink>(p.sink);
    REQUIRE(sink.arrivals.size() == 1);
    CHECK(sink.arrivals[0].at.ps == 4700);
}

TEST_CASE("a time limit truncates the run with events pending") {
    Kernel k;
    const auto p = testing::build_pipeline(k, {{SimTime{1000}, SimTime{1000}}, {SimTime{1000}, SimTime{1000}}}, SimTime{1});
    testing::inject(k, p, 10);
    const auto s = k.run(RunLimit{SimTime{2500}});
    CHECK(s.truncated);
    CHECK(s.final_time.ps <= 2500);
    CHECK(s.events_processed < s.events_posted);
}

TEST_CASE("every event is delivered exactly once") {
    Kernel k;
    const auto p = testing::build_pipeline(k, {{SimTime{700}, SimTime{300}, 2}, {SimTime{500}, SimTime{900}, 3}}, SimTime{10});
    testing::inject(k, p, 50);
    const auto s = k.run();
    CHECK(s.events_processed == s.events_posted);
    CHECK(k.actor_as<testing::Sink>(p.sink).arrivals.size() == 50);
}

namespace {

SimStats run_mesh(unsigned workers, std::uint64_t seed) {
    Rng rng(seed);
    const auto model = testing::random_model(rng, 48, 3);
    const auto arch = testing::random_arch(rng, model);
    const auto input = workload::generate_input(model, 0.6, seed);
    hw::SimOptions o;
    o.workers = workers;
    return hw::simulate(arch, hw::default_tech(), model, input, o).stats;
}

}  // namespace

TEST_CASE("worker count never changes the statistics") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto one = run_mesh(1, seed);
        CHECK(run_mesh(2, seed) == one);
        CHECK(run_mesh(4, seed) == one);
    }
}
