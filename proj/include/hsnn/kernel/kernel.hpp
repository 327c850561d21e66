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
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "hsnn/core/sim_time.hpp"
#include "hsnn/kernel/actor_id.hpp"
#include "hsnn/kernel/message.hpp"
#include "hsnn/kernel/worker_pool.hpp"

namespace hsnn::kernel {

struct SimEvent {
    SimTime deliver_at;
    ActorId target;
    ActorId source;  // invalid for injected events
    HandshakeMessage message;
    std::uint64_t seq = 0;
};

class Kernel;

/// Handle an actor uses while processing one message. Posts are buffered and
/// released into the global queue after the current timestamp completes.
class Context {
public:
    SimTime now() const { return now_; }
    ActorId self() const { return self_; }

    /// `delay` must be positive unless `target` is the calling actor.
    void post(ActorId target, SimTime delay, HandshakeMessage msg);

private:
    friend class Kernel;
    struct Outgoing {
        SimTime at;
        ActorId target;
        HandshakeMessage message;
        bool inline_self = false;
    };

    SimTime now_;
    ActorId self_;
    std::vector<Outgoing>* out_ = nullptr;
    std::deque<SimEvent>* inline_ = nullptr;
};

class Actor {
public:
    virtual ~Actor() = default;
    virtual void receive(Context& ctx, const SimEvent& event) = 0;
};

/// Posting surface handed to sources at quiescence.
class Injector {
public:
    explicit Injector(Kernel& kernel) : kernel_(kernel) {}
    SimTime now() const;
    void post(SimTime at, ActorId target, HandshakeMessage msg);
    bool posted() const { return posted_; }

private:
    Kernel& kernel_;
    bool posted_ = false;
};

/// Consulted, in registration order, whenever the event set drains. A source
/// that posts nothing is considered exhausted for that quiescence point.
class Source {
public:
    virtual ~Source() = default;
    virtual void on_quiescence(Injector& injector) = 0;
};

struct KernelOptions {
    unsigned workers = 1;
    std::uint64_t livelock_window = 10'000'000;
};

struct RunLimit {
    std::optional<SimTime> time_limit;
};

struct SimStats {
    SimTime final_time;
    std::uint64_t events_processed = 0;
    std::uint64_t events_posted = 0;
    bool truncated = false;
    std::vector<std::uint64_t> messages_per_actor;

    bool operator==(const SimStats&) const = default;
};

/// Conservative discrete-event kernel. Delivery follows the total order
/// (deliver_at, target path, seq); actors with events at the same timestamp
/// run on the worker pool, and their posts are merged back in path order so
/// every worker count yields the same schedule.
class Kernel {
public:
    explicit Kernel(KernelOptions options = {});
    ~Kernel();

    ActorId register_actor(ActorPath path, std::unique_ptr<Actor> actor);
    void add_source(Source& source);

    /// Enqueue an event from outside any actor. Throws CausalityError when
    /// `at` is earlier than the current kernel time.
    void post(SimTime at, ActorId target, HandshakeMessage msg, ActorId source = {});

    SimStats run(RunLimit limit = {});

    SimTime now() const { return now_; }
    bool started() const { return started_; }
    std::size_t actor_count() const { return actors_.size(); }
    const ActorPath& path(ActorId id) const { return paths_.at(id.index); }
    std::optional<ActorId> find(const ActorPath& path) const;
    Actor& actor(ActorId id) { return *actors_.at(id.index); }
    const Actor& actor(ActorId id) const { return *actors_.at(id.index); }

    template <class T>
    T& actor_as(ActorId id) {
        return dynamic_cast<T&>(actor(id));
    }

private:
    struct Group {
        ActorId target;
        std::deque<SimEvent> events;
        std::vector<Context::Outgoing> out;
        std::uint64_t processed = 0;
    };

    struct Later {
        bool operator()(const SimEvent& a, const SimEvent& b) const;
        const std::vector<std::uint32_t>* rank;
    };

    void push(SimEvent ev);
    void process_group(Group& group);
    void finalize_ranks();

    KernelOptions options_;
    std::vector<std::unique_ptr<Actor>> actors_;
    std::vector<ActorPath> paths_;
    std::map<ActorPath, ActorId> by_path_;
    std::vector<std::uint32_t> rank_;
    std::vector<Source*> sources_;
    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> queue_;
    std::vector<SimEvent> prestart_;
    std::unique_ptr<WorkerPool> pool_;
    SimTime now_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t posted_ = 0;
    std::uint64_t processed_ = 0;
    std::vector<std::uint64_t> per_actor_;
    bool started_ = false;
};

}  // namespace hsnn::kernel
