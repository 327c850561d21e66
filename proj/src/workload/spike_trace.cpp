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

#include "hsnn/workload/spike_trace.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"
#include "hsnn/core/rng.hpp"

namespace hsnn::workload {

SpikeTrace SpikeTrace::only_layer(std::uint32_t layer) const {
    SpikeTrace out{model_hash, timesteps, {}};
    for (const auto& r : records)
        if (r.layer == layer) out.records.push_back(r);
    return out;
}

std::size_t SpikeTrace::count_layer(std::uint32_t layer) const {
    return static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [&](const SpikeRecord& r) { return r.layer == layer; }));
}

std::string format_trace(const SpikeTrace& trace) {
    std::string out;
    char buf[96];
    std::snprintf(buf, sizeof buf, "format_version=%d\nmodel_hash=%016llx,timesteps=%u\n", kTraceFormatVersion,
                  static_cast<unsigned long long>(trace.model_hash), trace.timesteps);
    out += buf;
    for (const auto& r : trace.records) {
        std::snprintf(buf, sizeof buf, "%u,%u,%u\n", r.timestep, r.layer, r.neuron);
        out += buf;
    }
    return out;
}

SpikeTrace parse_trace(std::string_view text, const std::string& origin, const SnnModel* model) {
    SpikeTrace trace;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) { return ParseError(origin + ":" + std::to_string(line_no) + ": " + msg); };

    if (!std::getline(in, line)) throw ParseError(origin + ": empty trace file");
    ++line_no;
    if (trim(line) != "format_version=" + std::to_string(kTraceFormatVersion))
        throw fail("expected 'format_version=" + std::to_string(kTraceFormatVersion) + "'");
    if (!std::getline(in, line)) throw ParseError(origin + ": missing header line");
    ++line_no;
    {
        const auto fields = split(trim(line), ',');
        if (fields.size() != 2 || fields[0].rfind("model_hash=", 0) != 0 || fields[1].rfind("timesteps=", 0) != 0)
            throw fail("expected 'model_hash=<hex>,timesteps=<n>'");
        const std::string hex = fields[0].substr(11);
        char* end = nullptr;
        trace.model_hash = std::strtoull(hex.c_str(), &end, 16);
        if (hex.empty() || end != hex.c_str() + hex.size()) throw fail("bad model hash '" + hex + "'");
        const auto t = parse_int(fields[1].substr(10), "timesteps");
        if (t < 0 || t > std::numeric_limits<std::uint32_t>::max()) throw fail("bad timestep count");
        trace.timesteps = static_cast<std::uint32_t>(t);
    }
    if (model) {
        if (trace.model_hash != model->hash()) throw fail("model hash mismatch: trace was recorded for another model");
        if (trace.timesteps != model->timesteps)
            throw fail("trace has " + std::to_string(trace.timesteps) + " timesteps, model has " +
                       std::to_string(model->timesteps));
    }
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto f = split(body, ',');
        if (f.size() != 3) throw fail("expected 'timestep,layer,neuron'");
        SpikeRecord r;
        const auto ts = parse_int(f[0], "timestep");
        const auto layer = parse_int(f[1], "layer");
        const auto neuron = parse_int(f[2], "neuron");
        if (ts < 0 || layer < 0 || neuron < 0) throw fail("negative field");
        r.timestep = static_cast<std::uint32_t>(ts);
        r.layer = static_cast<std::uint32_t>(layer);
        r.neuron = static_cast<std::uint32_t>(neuron);
        if (r.timestep >= trace.timesteps) throw fail("timestep " + std::to_string(ts) + " out of range");
        if (model) {
            if (r.layer >= model->layers.size()) throw fail("layer " + std::to_string(layer) + " out of range");
            if (r.neuron >= model->layer_size(r.layer))
                throw fail("neuron id " + std::to_string(neuron) + " out of range for layer " + std::to_string(layer) +
                           " of size " + std::to_string(model->layer_size(r.layer)));
        }
        if (!trace.records.empty() && !(trace.records.back() < r))
            throw fail("records must be strictly sorted by (timestep, layer, neuron)");
        trace.records.push_back(r);
    }
    return trace;
}

SpikeTrace load_trace(const std::filesystem::path& path, const SnnModel* model) {
    return parse_trace(read_file(path), path.string(), model);
}

void save_trace(const SpikeTrace& trace, const std::filesystem::path& path) { write_file(path, format_trace(trace)); }

SpikeTrace generate_input(const SnnModel& model, double rate, std::uint64_t seed) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ValidationError("input spike rate must lie in [0, 1]");
    Rng rng(seed);
    SpikeTrace trace{model.hash(), model.timesteps, {}};
    const std::uint32_t n = model.layer_size(0);
    for (std::uint32_t t = 0; t < model.timesteps; ++t)
        for (std::uint32_t i = 0; i < n; ++i)
            if (uniform01(rng) < rate) trace.records.push_back({t, 0, i});
    return trace;
}

bool lif_update(std::int16_t& v, std::int64_t input, const NeuronParams& p) {
    const std::int64_t leaked = (static_cast<std::int64_t>(v) * p.leak_q8) >> 8;
    const std::int64_t next = std::clamp<std::int64_t>(leaked + input, std::numeric_limits<std::int16_t>::min(),
                                                       std::numeric_limits<std::int16_t>::max());
    if (next >= p.threshold) {
        v = static_cast<std::int16_t>(p.reset);
        return true;
    }
    v = static_cast<std::int16_t>(next);
    return false;
}

SpikeTrace lif_generate_trace(const SnnModel& model, const SpikeTrace& input) {
    const std::size_t n_layers = model.layers.size();
    for (const auto& r : input.records)
        if (r.layer != 0 || r.neuron >= model.layer_size(0) || r.timestep >= model.timesteps)
            throw ValidationError("input spike (" + std::to_string(r.timestep) + "," + std::to_string(r.layer) + "," +
                                  std::to_string(r.neuron) + ") does not match the input layer");

    std::vector<std::vector<std::vector<Synapse>>> fan(n_layers);
    std::vector<std::vector<std::int16_t>> membrane(n_layers);
    for (std::size_t l = 1; l < n_layers; ++l) {
        fan[l] = fanout(model, l);
        membrane[l].assign(model.layer_size(l), 0);
    }

    SpikeTrace out{model.hash(), model.timesteps, {}};
    std::size_t cursor = 0;
    std::vector<std::uint32_t> prev;
    for (std::uint32_t t = 0; t < model.timesteps; ++t) {
        prev.clear();
        while (cursor < input.records.size() && input.records[cursor].timestep == t)
            prev.push_back(input.records[cursor++].neuron);
        std::sort(prev.begin(), prev.end());
        prev.erase(std::unique(prev.begin(), prev.end()), prev.end());
        for (auto n : prev) out.records.push_back({t, 0, n});

        for (std::size_t l = 1; l < n_layers; ++l) {
            const Layer& layer = model.layers[l];
            std::vector<std::int64_t> acc(model.layer_size(l), 0);
            for (auto src : prev)
                for (const auto& s : fan[l][src]) acc[s.target] += s.weight;
            std::vector<std::uint32_t> fired;
            for (std::uint32_t n = 0; n < acc.size(); ++n) {
                const bool spike = layer.kind == LayerKind::MaxPool ? acc[n] > 0
                                                                    : lif_update(membrane[l][n], acc[n], layer.neuron);
                if (spike) {
                    fired.push_back(n);
                    out.records.push_back({t, static_cast<std::uint32_t>(l), n});
                }
            }
            prev = std::move(fired);
        }
    }
    return out;
}

}  // namespace hsnn::workload
