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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hsnn/workload/snn_model.hpp"

namespace hsnn::workload {

struct SpikeRecord {
    std::uint32_t timestep = 0;
    std::uint32_t layer = 0;
    std::uint32_t neuron = 0;  // index within the layer
    constexpr auto operator<=>(const SpikeRecord&) const = default;
};

/// Timed spike events sorted by (timestep, layer, neuron).
struct SpikeTrace {
    std::uint64_t model_hash = 0;
    std::uint32_t timesteps = 0;
    std::vector<SpikeRecord> records;

    bool operator==(const SpikeTrace&) const = default;

    SpikeTrace only_layer(std::uint32_t layer) const;
    std::size_t count_layer(std::uint32_t layer) const;
};

inline constexpr int kTraceFormatVersion = 1;

std::string format_trace(const SpikeTrace& trace);
/// Validates ordering; with a model also checks the hash, the timestep count
/// and that every id lies inside its layer.
SpikeTrace parse_trace(std::string_view text, const std::string& origin, const SnnModel* model = nullptr);
SpikeTrace load_trace(const std::filesystem::path& path, const SnnModel* model = nullptr);
void save_trace(const SpikeTrace& trace, const std::filesystem::path& path);

/// Bernoulli input spikes for layer 0 at `rate` per neuron per timestep.
SpikeTrace generate_input(const SnnModel& model, double rate, std::uint64_t seed);

/// Software forward pass of the fixed-point LIF dynamics, timestep-major and
/// layer-synchronous. Returns every layer's spikes (layer 0 = the inputs).
SpikeTrace lif_generate_trace(const SnnModel& model, const SpikeTrace& input);

/// One neuron update: leak, integrate the timestep's summed input, saturate
/// to 16 bits, fire on v >= threshold with hard reset.
bool lif_update(std::int16_t& v, std::int64_t input, const NeuronParams& p);

}  // namespace hsnn::workload
