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

// Linear handshake pipelines built from bare controllers, used by the
// kernel, controller and acceptance tests.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "hsnn/async/async_ctrl.hpp"
#include "hsnn/kernel/kernel.hpp"

namespace hsnn::testing {

/// Decoupled identity stage with at most one output.
class Relay : public async::AsyncCtrl {
public:
    using AsyncCtrl::AsyncCtrl;

protected:
    async::DatapathResult main(kernel::Context&, const async::Request& req) override {
        async::DatapathResult r;
        if (!outputs().empty()) r.outputs.push_back({0, req.payload});
        return r;
    }
};

/// Coupled stage that holds every request until it receives a Poll.
class Holder : public async::AsyncCtrl {
public:
    explicit Holder(async::StageDelays d) : AsyncCtrl(async::Coupling::Coupled, d) {}
    std::vector<ItemId> held;

protected:
    async::DatapathResult main(kernel::Context&, const async::Request& req) override {
        held.push_back(req.id);
        async::DatapathResult r;
        if (!outputs().empty()) r.outputs.push_back({0, req.payload});
        r.ready = false;
        return r;
    }
    void on_poll(kernel::Context& ctx) override {
        for (auto id : held) signal_ready(ctx, id);
        held.clear();
    }
};

/// Terminal actor: records arrivals and acks each one after `ack_delay`.
class Sink : public kernel::Actor {
public:
    explicit Sink(SimTime ack_delay) : ack_delay_(ack_delay) {}
    struct Arrival {
        SimTime at;
        Payload payload;
    };
    std::vector<Arrival> arrivals;

    void receive(kernel::Context& ctx, const kernel::SimEvent& ev) override {
        if (ev.message.kind != MessageKind::Req) return;
        arrivals.push_back({ev.deliver_at, ev.message.payload});
        if (ev.message.channel != kLocalChannel)
            ctx.post(ev.source, ack_delay_, HandshakeMessage{MessageKind::Ack, ev.message.channel, {}, {}});
    }

private:
    SimTime ack_delay_;
};

struct StageSpec {
    SimTime forward;
    SimTime backward;
    std::uint32_t depth = 1;
};

struct Pipeline {
    std::vector<kernel::ActorId> stages;
    kernel::ActorId sink;
};

/// Registers stages `sys/pipe/stage/sNN` and `sys/pipe/stage/zsink`, wires
/// them in a chain and posts every initMsg at t = 0. Channel i links stage i
/// to its successor.
inline Pipeline build_pipeline(kernel::Kernel& k, const std::vector<StageSpec>& specs, SimTime sink_ack) {
    Pipeline p;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "s%02zu", i);
        p.stages.push_back(k.register_actor(
            {"sys", "pipe", "stage", name},
            std::make_unique<Relay>(async::Coupling::Decoupled, async::StageDelays{specs[i].forward, specs[i].backward})));
    }
    p.sink = k.register_actor({"sys", "pipe", "stage", "zsink"}, std::make_unique<Sink>(sink_ack));
    for (std::size_t i = 0; i < specs.size(); ++i) {
        auto init = std::make_shared<InitParams>();
        init->buffer_depth = specs[i].depth;
        const auto next = i + 1 < specs.size() ? p.stages[i + 1] : p.sink;
        init->outputs.push_back({static_cast<ChannelId>(i), next});
        k.post(SimTime{}, p.stages[i], HandshakeMessage{MessageKind::Init, kLocalChannel, {}, std::shared_ptr<const InitParams>(init)});
    }
    return p;
}

/// Injects `tokens` requests into stage 0 at `at`; the payload is the token index.
inline void inject(kernel::Kernel& k, const Pipeline& p, std::size_t tokens, SimTime at = {}) {
    for (std::size_t i = 0; i < tokens; ++i)
        k.post(at, p.stages.front(), HandshakeMessage{MessageKind::Req, kLocalChannel, {}, static_cast<ItemId>(i)});
}

}  // namespace hsnn::testing
