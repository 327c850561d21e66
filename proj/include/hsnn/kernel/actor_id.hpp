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
#include <limits>
#include <string>
#include <string_view>

namespace hsnn::kernel {

struct ActorId {
    static constexpr std::uint32_t kInvalid = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t index = kInvalid;

    constexpr bool valid() const { return index != kInvalid; }
    constexpr auto operator<=>(const ActorId&) const = default;
};

/// Four-level component path: system / node / module / unit.
struct ActorPath {
    std::string system;
    std::string node;
    std::string module;
    std::string unit;

    static ActorPath parse(std::string_view text);
    std::string str() const { return system + "/" + node + "/" + module + "/" + unit; }

    auto operator<=>(const ActorPath&) const = default;
};

}  // namespace hsnn::kernel
