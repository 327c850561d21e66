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
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "hsnn/core/sim_time.hpp"
#include "hsnn/kernel/kernel.hpp"

namespace hsnn::async {

enum class FsmState : std::uint8_t { Init, Forward, Backward };
enum class Coupling : std::uint8_t { Decoupled, Coupled };

const char* to_string(FsmState s);

struct StageDelays {
    SimTime forward;
    SimTime backward;
};

/// One downstream request produced by a datapath: which output port it
/// leaves on and what it carries.
struct Emission {
    std::size_t port = 0;
    Payload payload;
};

struct DatapathResult {
    std::vector<Emission> outputs;
    /// Coupled units only: false holds the request until the unit calls
    /// `signal_ready`.
    bool ready = true;
};

/// An accepted request as seen by the datapath.
struct Request {
    ItemId id = 0;
    ChannelId channel = kLocalChannel;
    kernel::ActorId upstream;
    const Payload& payload;
};

struct CtrlCounters {
    std::uint64_t reqs_received = 0;
    std::uint64_t reqs_accepted = 0;
    std::uint64_t local_accepted = 0;  // accepted from kLocalChannel, never acked
    std::uint64_t reqs_emitted = 0;
    std::uint64_t acks_received = 0;
    std::uint64_t acks_emitted = 0;
    std::uint64_t fires = 0;
    std::uint64_t stashed = 0;
    std::uint64_t max_in_flight = 0;
    std::uint64_t max_stash = 0;
};

/// FSM-based asynchronous pipeline controller. Init -> Forward on initMsg;
/// Forward accepts requests until the buffer depth reaches zero, then
/// Backward stashes requests until a downstream ack frees a token.
///
/// Each accepted request is an item holding one token until every request it
/// emitted downstream has been acknowledged (items with no outputs retire one
/// forward delay after their datapath ran). Decoupled units ack upstream on
/// acceptance and run `main` on a zero-delay fire; coupled units run `main`
/// directly and delay both the upstream ack and the downstream requests until
/// the datapath reports ready.
class AsyncCtrl : public kernel::Actor {
public:
    using Observer = std::function<void(SimTime, FsmState from, FsmState to)>;

    AsyncCtrl(Coupling coupling, StageDelays delays);

    void receive(kernel::Context& ctx, const kernel::SimEvent& event) final;

    FsmState state() const { return fsm_; }
    std::uint32_t buffer_depth() const { return depth_; }
    std::uint32_t initial_depth() const { return initial_depth_; }
    std::size_t stash_size() const { return stash_.size(); }
    std::size_t held_size() const;
    std::size_t in_flight() const { return items_.size(); }
    Coupling coupling() const { return coupling_; }
    const StageDelays& delays() const { return delays_; }
    const CtrlCounters& counters() const { return counters_; }
    std::span<const OutputPort> outputs() const { return outputs_; }

    /// Datapath invocations keyed by the activity tag active at the time.
    const std::map<std::int32_t, std::uint64_t>& fires_by_tag() const { return fires_by_tag_; }
    void set_activity_tag(const std::int32_t* tag) { tag_ = tag; }
    void set_observer(Observer obs) { observer_ = std::move(obs); }

protected:
    virtual DatapathResult main(kernel::Context& ctx, const Request& req) = 0;
    virtual void on_initialized() {}
    virtual void on_downstream_ack(kernel::Context& /*ctx*/, std::size_t /*port*/) {}
    virtual void on_poll(kernel::Context& /*ctx*/) {}
    /// Whether an invocation on this payload counts as switching activity.
    /// Every invocation still counts towards `counters().fires`.
    virtual bool counts_activity(const Payload& /*payload*/) const { return true; }

    /// isDatapathReady for a held request (coupled units).
    void signal_ready(kernel::Context& ctx, ItemId id);
    /// Schedules a zero-delay `on_poll`; repeated calls before it runs coalesce.
    void request_poll(kernel::Context& ctx);

private:
    struct Item {
        ChannelId channel = kLocalChannel;
        kernel::ActorId upstream;
        Payload payload;
        std::vector<Emission> outputs;
        std::uint32_t outstanding = 0;
        bool held = false;
        bool ready_signaled = false;
    };

    void handle_init(const kernel::SimEvent& ev);
    void handle_req(kernel::Context& ctx, const kernel::SimEvent& ev);
    void accept(kernel::Context& ctx, ChannelId channel, kernel::ActorId upstream, Payload payload);
    void handle_fire(kernel::Context& ctx, ItemId id);
    void handle_ready(kernel::Context& ctx, ItemId id);
    void handle_ack(kernel::Context& ctx, ChannelId channel);
    void ack_upstream(kernel::Context& ctx, const Item& item);
    void emit(kernel::Context& ctx, ItemId id, Item& item);
    void complete(kernel::Context& ctx, ItemId id);
    void record_fire(const Payload& payload);
    void transition(SimTime at, FsmState to);
    static ItemId item_of(const kernel::SimEvent& ev);

    Coupling coupling_;
    StageDelays delays_;
    FsmState fsm_ = FsmState::Init;
    std::uint32_t depth_ = 0;
    std::uint32_t initial_depth_ = 0;
    std::vector<OutputPort> outputs_;
    std::deque<kernel::SimEvent> stash_;
    std::map<ItemId, Item> items_;
    std::vector<std::deque<ItemId>> awaiting_ack_;  // per output port
    ItemId next_item_ = 0;
    bool poll_pending_ = false;
    CtrlCounters counters_;
    std::map<std::int32_t, std::uint64_t> fires_by_tag_;
    const std::int32_t* tag_ = nullptr;
    Observer observer_;
};

}  // namespace hsnn::async
