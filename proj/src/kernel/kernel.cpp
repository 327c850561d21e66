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

#include "hsnn/kernel/kernel.hpp"

#include <algorithm>
#include <exception>
#include <numeric>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"

namespace hsnn {

const char* to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::Init: return "initMsg";
        case MessageKind::Req: return "reqMsg";
        case MessageKind::Ack: return "ackMsg";
        case MessageKind::Fire: return "fire";
        case MessageKind::Ready: return "isDatapathReady";
        case MessageKind::Release: return "release";
        case MessageKind::Poll: return "poll";
    }
    return "?";
}

}  // namespace hsnn

namespace hsnn::kernel {

ActorPath ActorPath::parse(std::string_view text) {
    const auto parts = split(text, '/');
    if (parts.size() != 4 || std::any_of(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); }))
        throw ConfigError("actor path must have four non-empty segments: '" + std::string(text) + "'");
    return ActorPath{parts[0], parts[1], parts[2], parts[3]};
}

void Context::post(ActorId target, SimTime delay, HandshakeMessage msg) {
    if (delay.ps == 0 && target != self_)
        throw CausalityError("zero-delay post is only allowed to self (" + std::string(to_string(msg.kind)) + ")");
    msg.issue_time = now_;
    const bool is_inline = delay.ps == 0;
    if (is_inline) {
        SimEvent ev;
        ev.deliver_at = now_;
        ev.target = self_;
        ev.source = self_;
        ev.message = msg;
        inline_->push_back(std::move(ev));
    }
    out_->push_back(Outgoing{now_ + delay, target, std::move(msg), is_inline});
}

SimTime Injector::now() const { return kernel_.now(); }

void Injector::post(SimTime at, ActorId target, HandshakeMessage msg) {
    kernel_.post(at, target, std::move(msg));
    posted_ = true;
}

bool Kernel::Later::operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.deliver_at != b.deliver_at) return a.deliver_at > b.deliver_at;
    const auto ra = (*rank)[a.target.index];
    const auto rb = (*rank)[b.target.index];
    if (ra != rb) return ra > rb;
    return a.seq > b.seq;
}

Kernel::Kernel(KernelOptions options)
    : options_(options), queue_(Later{&rank_}), pool_(std::make_unique<WorkerPool>(std::max(1u, options.workers))) {}

Kernel::~Kernel() = default;

ActorId Kernel::register_actor(ActorPath path, std::unique_ptr<Actor> actor) {
    if (started_) throw ConfigError("cannot register '" + path.str() + "' after the simulation started");
    if (by_path_.contains(path)) throw ConfigError("duplicate path: " + path.str());
    const ActorId id{static_cast<std::uint32_t>(actors_.size())};
    by_path_.emplace(path, id);
    paths_.push_back(std::move(path));
    actors_.push_back(std::move(actor));
    return id;
}

std::optional<ActorId> Kernel::find(const ActorPath& path) const {
    const auto it = by_path_.find(path);
    if (it == by_path_.end()) return std::nullopt;
    return it->second;
}

void Kernel::add_source(Source& source) { sources_.push_back(&source); }

void Kernel::finalize_ranks() {
    // by_path_ iterates in path order, which is the tie-break order.
    rank_.assign(actors_.size(), 0);
    std::uint32_t r = 0;
    for (const auto& [path, id] : by_path_) rank_[id.index] = r++;
    per_actor_.assign(actors_.size(), 0);
}

void Kernel::post(SimTime at, ActorId target, HandshakeMessage msg, ActorId source) {
    if (at < now_)
        throw CausalityError("event for t=" + to_string(at) + " posted at t=" + to_string(now_) + " (causality)");
    if (!target.valid() || target.index >= actors_.size()) throw ConfigError("post to unknown actor");
    SimEvent ev;
    ev.deliver_at = at;
    ev.target = target;
    ev.source = source;
    ev.message = std::move(msg);
    ev.seq = next_seq_++;
    ++posted_;
    push(std::move(ev));
}

void Kernel::push(SimEvent ev) {
    // Ranks are only fixed once registration closes.
    if (!started_) {
        prestart_.push_back(std::move(ev));
        return;
    }
    queue_.push(std::move(ev));
}

void Kernel::process_group(Group& group) {
    Actor& target = *actors_[group.target.index];
    Context ctx;
    ctx.self_ = group.target;
    ctx.out_ = &group.out;
    ctx.inline_ = &group.events;
    while (!group.events.empty()) {
        SimEvent ev = std::move(group.events.front());
        group.events.pop_front();
        ctx.now_ = ev.deliver_at;
        target.receive(ctx, ev);
        ++group.processed;
        if (group.processed > options_.livelock_window)
            throw LivelockError("livelock: " + std::to_string(group.processed) + " events at t=" +
                                to_string(ev.deliver_at) + " without time progress in " +
                                paths_[group.target.index].str());
    }
}

SimStats Kernel::run(RunLimit limit) {
    if (!started_) {
        finalize_ranks();
        started_ = true;
        for (auto& ev : prestart_) queue_.push(std::move(ev));
        prestart_.clear();
    }
    SimStats stats;
    std::uint64_t since_progress = 0;
    std::vector<Group> groups;
    while (true) {
        if (queue_.empty()) {
            bool any = false;
            for (Source* s : sources_) {
                Injector inj(*this);
                s->on_quiescence(inj);
                any = any || inj.posted();
            }
            if (!any || queue_.empty()) break;
            continue;
        }
        const SimTime t = queue_.top().deliver_at;
        if (limit.time_limit && t > *limit.time_limit) {
            stats.truncated = true;
            break;
        }
        if (t > now_) {
            now_ = t;
            since_progress = 0;
        }

        groups.clear();
        while (!queue_.empty() && queue_.top().deliver_at == t) {
            SimEvent ev = queue_.top();
            queue_.pop();
            if (groups.empty() || groups.back().target != ev.target) {
                groups.emplace_back();
                groups.back().target = ev.target;
            }
            groups.back().events.push_back(std::move(ev));
        }

        std::vector<std::exception_ptr> errors(groups.size());
        pool_->run(groups.size(), [&](std::size_t i) {
            try {
                process_group(groups[i]);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);

        std::uint64_t batch = 0;
        for (auto& g : groups) {
            batch += g.processed;
            per_actor_[g.target.index] += g.processed;
            for (auto& o : g.out) {
                const std::uint64_t seq = next_seq_++;
                ++posted_;
                if (o.inline_self) continue;
                SimEvent ev;
                ev.deliver_at = o.at;
                ev.target = o.target;
                ev.source = g.target;
                ev.message = std::move(o.message);
                ev.seq = seq;
                queue_.push(std::move(ev));
            }
        }
        processed_ += batch;
        since_progress += batch;
        if (since_progress > options_.livelock_window)
            throw LivelockError("livelock: no virtual-time progress over " + std::to_string(since_progress) +
                                " events at t=" + to_string(t));
    }
    stats.final_time = now_;
    stats.events_processed = processed_;
    stats.events_posted = posted_;
    stats.messages_per_actor = per_actor_;
    return stats;
}

}  // namespace hsnn::kernel
