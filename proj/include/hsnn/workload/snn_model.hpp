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

namespace hsnn::workload {

enum class LayerKind : std::uint8_t { Input, Conv, Fc, MaxPool };

const char* to_string(LayerKind kind);

struct Shape {
    std::uint32_t channels = 1;
    std::uint32_t height = 1;
    std::uint32_t width = 1;

    std::uint32_t size() const { return channels * height * width; }
    bool operator==(const Shape&) const = default;
};

/// Hard-reset LIF parameters. `leak_q8` is the membrane decay factor in
/// 1/256 units (256 = no leak).
struct NeuronParams {
    std::int32_t leak_q8 = 256;
    std::int32_t threshold = 1;
    std::int32_t reset = 0;
    bool operator==(const NeuronParams&) const = default;
};

struct Layer {
    LayerKind kind = LayerKind::Input;
    Shape shape;                   // output shape
    std::uint32_t kernel = 0;      // conv, maxpool
    std::uint32_t padding = 0;     // conv
    std::vector<std::int8_t> weights;  // fc: [out][in]; conv: [out_c][in_c][ky][kx]
    NeuronParams neuron;           // conv, fc

    bool operator==(const Layer&) const = default;
};

/// Feed-forward SNN. Layer 0 is the input layer; every other layer is
/// connected to the one before it.
struct SnnModel {
    std::uint32_t timesteps = 1;
    std::vector<Layer> layers;

    std::uint32_t total_neurons() const;
    std::uint32_t layer_offset(std::size_t layer) const;
    std::uint32_t layer_size(std::size_t layer) const { return layers.at(layer).shape.size(); }
    /// FNV-1a over the canonical text form.
    std::uint64_t hash() const;

    bool operator==(const SnnModel&) const = default;
};

struct Synapse {
    std::uint32_t target = 0;  // neuron index within the consuming layer
    std::int32_t weight = 0;
};

/// Outgoing synapses of every neuron of layer `layer - 1` into `layer`.
/// Zero-weight connections are not stored. Max-pool windows use weight 1.
std::vector<std::vector<Synapse>> fanout(const SnnModel& model, std::size_t layer);

/// Checks shape composition, weight counts and ranges, and the excluded
/// operator rules. Throws ValidationError.
void validate(const SnnModel& model);

SnnModel parse_model(std::string_view text, const std::string& origin);
SnnModel load_model(const std::filesystem::path& path);
std::string format_model(const SnnModel& model);
void save_model(const SnnModel& model, const std::filesystem::path& path);

}  // namespace hsnn::workload
