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
#include <limits>

#include "hsnn/core/sim_time.hpp"
#include "hsnn/kernel/payload.hpp"

namespace hsnn {

/// Init/Req/Ack travel between controllers. The remaining kinds are
/// controller-internal notifications an actor sends to itself.
enum class MessageKind : std::uint8_t {
    Init,
    Req,
    Ack,
    Fire,     // zero-delay datapath trigger (decoupled)
    Ready,    // isDatapathReady (coupled)
    Release,  // an item with no downstream outputs retires
    Poll,     // datapath re-evaluation request (arbitration)
};

const char* to_string(MessageKind kind);

/// Requests injected from outside the handshake network (barrier ticks,
/// test generators) arrive on this channel and are never acknowledged.
inline constexpr ChannelId kLocalChannel = std::numeric_limits<ChannelId>::max();

struct HandshakeMessage {
    MessageKind kind = MessageKind::Req;
    ChannelId channel = kLocalChannel;
    SimTime issue_time;
    Payload payload;
};

}  // namespace hsnn
