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

#include <compare>
#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "hsnn/kernel/actor_id.hpp"

namespace hsnn {

/// Mesh coordinate. `x` indexes rows and moves East/West, `y` indexes columns
/// and moves North/South.
struct Coord {
    int x = 0;
    int y = 0;
    constexpr auto operator<=>(const Coord&) const = default;
};

/// One spike, addressed by its global source neuron id.
struct AerEvent {
    std::uint32_t source_neuron = 0;
    std::uint32_t timestep = 0;
    constexpr auto operator<=>(const AerEvent&) const = default;
};

/// Unit of NoC transfer: one AER event plus routing metadata.
struct Flit {
    Coord dst;
    std::uint32_t vc = 0;
    std::uint64_t address = 0;  // packed (pe x, pe y, slot)
    AerEvent aer;
    std::uint8_t out_port = 0;  // set by the input unit's route computation
    constexpr bool operator==(const Flit&) const = default;
};

/// LUT -> SRAM -> neuron record for one synapse.
struct SynapseOp {
    std::uint32_t slot = 0;
    std::uint32_t weight_addr = 0;
    std::int32_t weight = 0;
    bool operator==(const SynapseOp&) const = default;
};

/// Barrier-phase evaluation request for one layer at one timestep.
struct TickParams {
    std::uint32_t timestep = 0;
    std::uint32_t layer = 0;
    bool operator==(const TickParams&) const = default;
};

using ChannelId = std::uint32_t;

struct OutputPort {
    ChannelId channel = 0;
    kernel::ActorId target;
};

struct InitParams {
    std::uint32_t buffer_depth = 0;
    std::vector<OutputPort> outputs;
};

using ItemId = std::uint64_t;

/// Opaque data bundle carried by a handshake message.
using Payload = std::variant<std::monostate, std::shared_ptr<const InitParams>, Flit, AerEvent, SynapseOp,
                             TickParams, ItemId>;

}  // namespace hsnn
