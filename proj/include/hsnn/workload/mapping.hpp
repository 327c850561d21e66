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
#include <string>
#include <vector>

#include "hsnn/kernel/payload.hpp"
#include "hsnn/workload/snn_model.hpp"

namespace hsnn::workload {

/// Neurons [begin, end) of `layer` live on `pe`.
struct MappingRange {
    std::uint32_t layer = 0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    Coord pe;

    std::uint32_t size() const { return end - begin; }
    bool operator==(const MappingRange&) const = default;
};

/// Layer -> PE assignment. Within a PE, slots are handed out in range order.
struct MappingTable {
    std::vector<MappingRange> ranges;
    bool operator==(const MappingTable&) const = default;
};

/// PEs in mesh scan order: x outer, y inner.
std::vector<Coord> scan_order(std::uint32_t rows, std::uint32_t cols);

/// Canonical fill: layers placed contiguously across PEs in scan order,
/// splitting at neurons_per_pe boundaries. Throws ValidationError when the
/// mesh cannot hold the model.
MappingTable map_model(const SnnModel& model, std::uint32_t rows, std::uint32_t cols, std::uint32_t neurons_per_pe);

/// Every problem with `table` against the model and mesh; empty when valid.
std::vector<std::string> mapping_violations(const MappingTable& table, const SnnModel& model, std::uint32_t rows,
                                            std::uint32_t cols, std::uint32_t neurons_per_pe);

/// Mapped neuron count per PE, indexed by scan position.
std::vector<std::uint32_t> pe_loads(const MappingTable& table, std::uint32_t rows, std::uint32_t cols);

std::string format_mapping(const MappingTable& table);
MappingTable parse_mapping(const std::string& text);

}  // namespace hsnn::workload
