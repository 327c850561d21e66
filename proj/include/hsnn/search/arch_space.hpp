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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hsnn/hw/arch_config.hpp"
#include "hsnn/hw/hardware.hpp"
#include "hsnn/workload/snn_model.hpp"

namespace hsnn::search {

/// Allowed values per ArchConfig field, each sorted ascending.
struct SearchBounds {
    std::vector<std::uint32_t> neurons_per_pe;
    std::vector<std::uint32_t> rows;
    std::vector<std::uint32_t> cols;
    std::vector<std::uint32_t> fifo_depths;
    std::vector<hw::Arbitration> arbitrations;
    std::uint32_t virtual_channels = 4;
    std::uint32_t flit_payload_bits = 32;

    /// Size of the cartesian product, before capacity filtering.
    std::uint64_t product() const;
    bool operator==(const SearchBounds&) const = default;
};

/// Problems with the bounds themselves (empty ranges, non-power-of-two
/// neuron counts).
std::vector<std::string> bounds_violations(const SearchBounds& bounds);

/// Same keys as an architecture file. Integer fields take a value, a range
/// `min..max` or a set `{a,b,c}`; `mesh_dims` takes one of those per side,
/// e.g. `1..2x{1,3}`. A neurons_per_pe range keeps only its powers of two.
SearchBounds parse_bounds(std::string_view text, const std::string& origin);
SearchBounds load_bounds(const std::filesystem::path& path);
std::string format_bounds(const SearchBounds& bounds);

enum class ActionKind : std::uint8_t { Partitioning, Mapping, Balancing, Arbitrating, Altering };
inline constexpr int kActionKinds = 5;

const char* to_string(ActionKind kind);

enum class PartitionAxis : std::int32_t { NeuronsPerPe = 0, Rows = 1, Cols = 2 };

/// `target` is the partition axis for Partitioning and the layer for Mapping.
/// `delta` is a step through the bound list for Partitioning, a scan-order PE
/// shift for Mapping and a raw depth change for Altering.
struct SearchAction {
    ActionKind kind = ActionKind::Partitioning;
    std::int32_t target = 0;
    std::int32_t delta = 0;

    auto operator<=>(const SearchAction&) const = default;
};

std::string to_string(const SearchAction& action);

/// Every rule `arch` breaks: structure, mapping and bounds. Empty when valid.
std::vector<std::string> validate(const hw::ArchConfig& arch, const SearchBounds& bounds,
                                  const workload::SnnModel& model);

/// Sorts and merges mapping ranges; a mapping equal to the canonical fill is
/// dropped so equal architectures compare equal.
hw::ArchConfig canonicalize(hw::ArchConfig arch, const workload::SnnModel& model);

/// Throws ValidationError ("out of bounds" or the violated rule) when the
/// action cannot be applied; the input is never modified.
hw::ArchConfig apply_action(const hw::ArchConfig& arch, const SearchAction& action, const SearchBounds& bounds,
                            const workload::SnnModel& model);

/// Actions that apply and change the architecture, in the fixed tie-break
/// order: kind, then target, then delta.
std::vector<SearchAction> legal_actions(const hw::ArchConfig& arch, const SearchBounds& bounds,
                                        const workload::SnnModel& model);

inline constexpr std::uint64_t kEnumerateLimit = 100'000;

/// Every valid canonical-mapping architecture, ordered by neurons_per_pe,
/// rows, cols, fifo depth, arbitration. Throws ValidationError when the
/// product exceeds kEnumerateLimit.
std::vector<hw::ArchConfig> enumerate(const SearchBounds& bounds, const workload::SnnModel& model);

struct RlState {
    std::uint32_t aer = 0;
    std::uint32_t noc = 0;
    std::uint32_t hops = 0;
    auto operator<=>(const RlState&) const = default;
};

inline constexpr std::uint32_t kDefaultBuckets = 8;

std::uint32_t bucketize(double ratio, std::uint32_t buckets);

/// AER congestion = busiest PE's share of AER events; NoC congestion =
/// busiest link's flits over injected flits; hops = total hops over
/// injected flits times the mesh diameter.
RlState encode_state(const hw::TrafficStats& traffic, std::uint32_t buckets = kDefaultBuckets);

}  // namespace hsnn::search
