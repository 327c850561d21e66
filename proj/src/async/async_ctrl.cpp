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

#include "hsnn/async/async_ctrl.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "hsnn/core/error.hpp"

namespace hsnn::async {

const char* to_string(FsmState s) {
    switch (s) {
        case FsmState::Init: return "init";
        case FsmState::Forward: return "forward";
        case FsmState::Backward: return "backward";
    }
    return "?";
}

AsyncCtrl::AsyncCtrl(Coupling coupling, StageDelays delays) : coupling_(coupling), delays_(delays) {}

std::size_t AsyncCtrl::held_size() const {
    return static_cast<std::size_t>(
        std::count_if(items_.begin(), items_.end(), [](const auto& kv) { return kv.second.held; }));
}

ItemId AsyncCtrl::item_of(const kernel::SimEvent& ev) {
    const auto* id = std::get_if<ItemId>(&ev.message.payload);
    if (!id) throw ProtocolError(std::string(to_string(ev.message.kind)) + " without an item id");
    return *id;
}

void AsyncCtrl::receive(kernel::Context& ctx, const kernel::SimEvent& ev) {
    switch (ev.message.kind) {
        case MessageKind::Init: handle_init(ev); break;
        case MessageKind::Req: handle_req(ctx, ev); break;
        case MessageKind::Ack: handle_ack(ctx, ev.message.channel); break;
        case MessageKind::Fire: handle_fire(ctx, item_of(ev)); break;
        case MessageKind::Ready: handle_ready(ctx, item_of(ev)); break;
        case MessageKind::Release: complete(ctx, item_of(ev)); break;
        case MessageKind::Poll:
            poll_pending_ = false;
            on_poll(ctx);
            break;
    }
    assert(fsm_ == FsmState::Init || ((fsm_ == FsmState::Backward) == (depth_ == 0)));
}

void AsyncCtrl::transition(SimTime at, FsmState to) {
    if (fsm_ == to) return;
    const FsmState from = fsm_;
    fsm_ = to;
    if (observer_) observer_(at, from, to);
}

void AsyncCtrl::handle_init(const kernel::SimEvent& ev) {
    if (fsm_ != FsmState::Init) throw ProtocolError("initMsg received twice");
    const auto* params = std::get_if<std::shared_ptr<const InitParams>>(&ev.message.payload);
    if (!params || !*params) throw ProtocolError("initMsg without init parameters");
    if ((*params)->buffer_depth == 0) throw ConfigError("initMsg with buffer depth 0");
    depth_ = initial_depth_ = (*params)->buffer_depth;
    outputs_ = (*params)->outputs;
    awaiting_ack_.assign(outputs_.size(), {});
    transition(ev.deliver_at, FsmState::Forward);
    on_initialized();
}

void AsyncCtrl::handle_req(kernel::Context& ctx, const kernel::SimEvent& ev) {
    if (fsm_ == FsmState::Init) throw ProtocolError("reqMsg before initMsg");
    ++counters_.reqs_received;
    if (fsm_ == FsmState::Backward) {
        stash_.push_back(ev);
        ++counters_.stashed;
        counters_.max_stash = std::max<std::uint64_t>(counters_.max_stash, stash_.size());
        return;
    }
    accept(ctx, ev.message.channel, ev.source, ev.message.payload);
}

void AsyncCtrl::accept(kernel::Context& ctx, ChannelId channel, kernel::ActorId upstream, Payload payload) {
    assert(depth_ > 0);
    --depth_;
    ++counters_.reqs_accepted;
    if (channel == kLocalChannel) ++counters_.local_accepted;
    if (depth_ == 0) transition(ctx.now(), FsmState::Backward);

    const ItemId id = next_item_++;
    Item& item = items_[id];
    item.channel = channel;
    item.upstream = upstream;
    item.payload = std::move(payload);
    counters_.max_in_flight = std::max<std::uint64_t>(counters_.max_in_flight, items_.size());

    if (coupling_ == Coupling::Decoupled) {
        ack_upstream(ctx, item);
        ctx.post(ctx.self(), SimTime{}, HandshakeMessage{MessageKind::Fire, kLocalChannel, {}, id});
        return;
    }

    record_fire(item.payload);
    DatapathResult r = main(ctx, Request{id, item.channel, item.upstream, item.payload});
    // main may have re-entered signal_ready; look the item up again.
    Item& held = items_.at(id);
    held.outputs = std::move(r.outputs);
    held.held = true;
    if (r.ready) signal_ready(ctx, id);
}

void AsyncCtrl::ack_upstream(kernel::Context& ctx, const Item& item) {
    if (item.channel == kLocalChannel || !item.upstream.valid()) return;
    ctx.post(item.upstream, delays_.backward, HandshakeMessage{MessageKind::Ack, item.channel, {}, {}});
    ++counters_.acks_emitted;
}

void AsyncCtrl::record_fire(const Payload& payload) {
    ++counters_.fires;
    if (counts_activity(payload)) ++fires_by_tag_[tag_ ? *tag_ : -1];
}

void AsyncCtrl::handle_fire(kernel::Context& ctx, ItemId id) {
    const auto it = items_.find(id);
    if (it == items_.end()) throw ProtocolError("fire for unknown item");
    record_fire(it->second.payload);
    DatapathResult r = main(ctx, Request{id, it->second.channel, it->second.upstream, it->second.payload});
    Item& item = items_.at(id);
    item.outputs = std::move(r.outputs);
    emit(ctx, id, item);
}

void AsyncCtrl::signal_ready(kernel::Context& ctx, ItemId id) {
    auto it = items_.find(id);
    if (it == items_.end() || it->second.ready_signaled) return;
    it->second.ready_signaled = true;
    ctx.post(ctx.self(), SimTime{}, HandshakeMessage{MessageKind::Ready, kLocalChannel, {}, id});
}

void AsyncCtrl::handle_ready(kernel::Context& ctx, ItemId id) {
    const auto it = items_.find(id);
    if (it == items_.end() || !it->second.held) throw ProtocolError("isDatapathReady with no held request");
    Item& item = it->second;
    item.held = false;
    ack_upstream(ctx, item);
    emit(ctx, id, item);
}

void AsyncCtrl::emit(kernel::Context& ctx, ItemId id, Item& item) {
    for (auto& e : item.outputs) {
        if (e.port >= outputs_.size())
            throw ConfigError("datapath emitted on port " + std::to_string(e.port) + " but only " +
                              std::to_string(outputs_.size()) + " outputs exist");
        const OutputPort& port = outputs_[e.port];
        ctx.post(port.target, delays_.forward, HandshakeMessage{MessageKind::Req, port.channel, {}, std::move(e.payload)});
        awaiting_ack_[e.port].push_back(id);
        ++item.outstanding;
        ++counters_.reqs_emitted;
    }
    item.outputs.clear();
    if (item.outstanding == 0)
        ctx.post(ctx.self(), delays_.forward, HandshakeMessage{MessageKind::Release, kLocalChannel, {}, id});
}

void AsyncCtrl::handle_ack(kernel::Context& ctx, ChannelId channel) {
    if (fsm_ == FsmState::Init) throw ProtocolError("ackMsg before initMsg");
    const auto it = std::find_if(outputs_.begin(), outputs_.end(),
                                 [&](const OutputPort& p) { return p.channel == channel; });
    if (it == outputs_.end()) throw ProtocolError("ackMsg on unknown channel " + std::to_string(channel));
    const auto port = static_cast<std::size_t>(it - outputs_.begin());
    auto& waiting = awaiting_ack_[port];
    if (waiting.empty())
        throw ProtocolError("ackMsg with no outstanding reqMsg on channel " + std::to_string(channel));
    const ItemId id = waiting.front();
    waiting.pop_front();
    ++counters_.acks_received;
    Item& item = items_.at(id);
    if (--item.outstanding == 0) complete(ctx, id);
    on_downstream_ack(ctx, port);
}

void AsyncCtrl::complete(kernel::Context& ctx, ItemId id) {
    if (items_.erase(id) == 0) throw ProtocolError("release of unknown item");
    ++depth_;
    if (depth_ > initial_depth_) throw ProtocolError("buffer depth exceeds its initMsg value");
    transition(ctx.now(), FsmState::Forward);
    if (!stash_.empty()) {
        kernel::SimEvent replay = std::move(stash_.front());
        stash_.pop_front();
        accept(ctx, replay.message.channel, replay.source, std::move(replay.message.payload));
    }
}

void AsyncCtrl::request_poll(kernel::Context& ctx) {
    if (poll_pending_) return;
    poll_pending_ = true;
    ctx.post(ctx.self(), SimTime{}, HandshakeMessage{MessageKind::Poll, kLocalChannel, {}, {}});
}

}  // namespace hsnn::async
