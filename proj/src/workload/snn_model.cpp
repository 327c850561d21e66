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

#include "hsnn/workload/snn_model.hpp"

#include <limits>
#include <map>
#include <sstream>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"
#include "hsnn/core/rng.hpp"

namespace hsnn::workload {

namespace {

constexpr int kModelFormatVersion = 1;

std::uint32_t expected_weights(const Layer& layer, const Shape& in) {
    switch (layer.kind) {
        case LayerKind::Fc: return in.size() * layer.shape.size();
        case LayerKind::Conv: return layer.shape.channels * in.channels * layer.kernel * layer.kernel;
        default: return 0;
    }
}

std::string shape_str(const Shape& s) {
    return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" + std::to_string(s.width);
}

}  // namespace

const char* to_string(LayerKind kind) {
    switch (kind) {
        case LayerKind::Input: return "input";
        case LayerKind::Conv: return "conv";
        case LayerKind::Fc: return "fc";
        case LayerKind::MaxPool: return "maxpool";
    }
    return "?";
}

std::uint32_t SnnModel::total_neurons() const {
    std::uint32_t n = 0;
    for (const auto& l : layers) n += l.shape.size();
    return n;
}

std::uint32_t SnnModel::layer_offset(std::size_t layer) const {
    std::uint32_t n = 0;
    for (std::size_t i = 0; i < layer; ++i) n += layers.at(i).shape.size();
    return n;
}

std::uint64_t SnnModel::hash() const { return fnv1a64(format_model(*this)); }

void validate(const SnnModel& model) {
    if (model.timesteps == 0) throw ValidationError("model: timesteps must be positive");
    if (model.layers.size() < 2) throw ValidationError("model: needs an input layer and at least one more layer");
    if (model.layers.front().kind != LayerKind::Input) throw ValidationError("model: layer 0 must be the input layer");
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const Layer& l = model.layers[i];
        const std::string where = "model layer " + std::to_string(i) + " (" + to_string(l.kind) + ")";
        if (l.shape.size() == 0) throw ValidationError(where + ": empty shape");
        if (i == 0) continue;
        if (l.kind == LayerKind::Input) throw ValidationError(where + ": only layer 0 may be an input layer");
        const Shape& in = model.layers[i - 1].shape;
        Shape expect = l.shape;
        switch (l.kind) {
            case LayerKind::Fc: expect = Shape{l.shape.size(), 1, 1}; break;
            case LayerKind::Conv: {
                if (l.kernel == 0) throw ValidationError(where + ": kernel must be positive");
                const auto h = static_cast<std::int64_t>(in.height) + 2 * l.padding - l.kernel + 1;
                const auto w = static_cast<std::int64_t>(in.width) + 2 * l.padding - l.kernel + 1;
                if (h <= 0 || w <= 0) throw ValidationError(where + ": kernel larger than padded input");
                expect = Shape{l.shape.channels, static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(w)};
                break;
            }
            case LayerKind::MaxPool:
                if (l.kernel == 0 || in.height % l.kernel != 0 || in.width % l.kernel != 0)
                    throw ValidationError(where + ": pooling kernel must divide the input height and width");
                expect = Shape{in.channels, in.height / l.kernel, in.width / l.kernel};
                break;
            case LayerKind::Input: break;
        }
        if (!(expect == l.shape))
            throw ValidationError(where + ": shape mismatch, declares " + shape_str(l.shape) + " but input " +
                                  shape_str(in) + " yields " + shape_str(expect));
        if (l.weights.size() != expected_weights(l, in))
            throw ValidationError(where + ": expected " + std::to_string(expected_weights(l, in)) + " weights, got " +
                                  std::to_string(l.weights.size()));
        if (l.kind == LayerKind::Conv || l.kind == LayerKind::Fc) {
            const auto& p = l.neuron;
            if (p.leak_q8 < 0 || p.leak_q8 > 256) throw ValidationError(where + ": leak must lie in [0, 256]");
            if (p.threshold < 1 || p.threshold > std::numeric_limits<std::int16_t>::max())
                throw ValidationError(where + ": threshold must lie in [1, 32767]");
            if (p.reset < std::numeric_limits<std::int16_t>::min() || p.reset > std::numeric_limits<std::int16_t>::max())
                throw ValidationError(where + ": reset must fit in 16 bits");
        }
    }
}

std::vector<std::vector<Synapse>> fanout(const SnnModel& model, std::size_t layer) {
    const Layer& l = model.layers.at(layer);
    const Shape& in = model.layers.at(layer - 1).shape;
    std::vector<std::vector<Synapse>> out(in.size());
    switch (l.kind) {
        case LayerKind::Fc: {
            const std::uint32_t n_in = in.size();
            for (std::uint32_t o = 0; o < l.shape.size(); ++o)
                for (std::uint32_t i = 0; i < n_in; ++i)
                    if (const auto w = l.weights[o * n_in + i]; w != 0) out[i].push_back({o, w});
            break;
        }
        case LayerKind::Conv: {
            const auto k = l.kernel;
            for (std::uint32_t oc = 0; oc < l.shape.channels; ++oc)
                for (std::uint32_t oy = 0; oy < l.shape.height; ++oy)
                    for (std::uint32_t ox = 0; ox < l.shape.width; ++ox) {
                        const std::uint32_t dst = (oc * l.shape.height + oy) * l.shape.width + ox;
                        for (std::uint32_t ic = 0; ic < in.channels; ++ic)
                            for (std::uint32_t ky = 0; ky < k; ++ky)
                                for (std::uint32_t kx = 0; kx < k; ++kx) {
                                    const auto iy = static_cast<std::int64_t>(oy + ky) - l.padding;
                                    const auto ix = static_cast<std::int64_t>(ox + kx) - l.padding;
                                    if (iy < 0 || ix < 0 || iy >= in.height || ix >= in.width) continue;
                                    const auto w = l.weights[((oc * in.channels + ic) * k + ky) * k + kx];
                                    if (w == 0) continue;
                                    const auto src = static_cast<std::uint32_t>((ic * in.height + iy) * in.width + ix);
                                    out[src].push_back({dst, w});
                                }
                    }
            break;
        }
        case LayerKind::MaxPool: {
            const auto k = l.kernel;
            for (std::uint32_t c = 0; c < in.channels; ++c)
                for (std::uint32_t y = 0; y < in.height; ++y)
                    for (std::uint32_t x = 0; x < in.width; ++x) {
                        const std::uint32_t src = (c * in.height + y) * in.width + x;
                        const std::uint32_t dst = (c * l.shape.height + y / k) * l.shape.width + x / k;
                        out[src].push_back({dst, 1});
                    }
            break;
        }
        case LayerKind::Input: break;
    }
    return out;
}

SnnModel parse_model(std::string_view text, const std::string& origin) {
    SnnModel model;
    bool have_version = false;
    bool have_timesteps = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    auto fail = [&](const std::string& msg) -> ParseError {
        return ParseError(origin + ":" + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream words{std::string(line)};
        std::string head;
        words >> head;
        if (!have_version) {
            if (head != "format_version") throw fail("expected leading 'format_version'");
            std::string v;
            words >> v;
            if (parse_int(v, "format_version") != kModelFormatVersion)
                throw fail("unsupported format_version " + v);
            have_version = true;
            continue;
        }
        if (head == "timesteps") {
            std::string v;
            words >> v;
            const auto t = parse_int(v, "timesteps");
            if (t < 1) throw fail("timesteps must be positive");
            model.timesteps = static_cast<std::uint32_t>(t);
            have_timesteps = true;
        } else if (head == "layer") {
            std::string kind;
            words >> kind;
            Layer layer;
            if (kind == "input") layer.kind = LayerKind::Input;
            else if (kind == "conv") layer.kind = LayerKind::Conv;
            else if (kind == "fc") layer.kind = LayerKind::Fc;
            else if (kind == "maxpool") layer.kind = LayerKind::MaxPool;
            else if (kind == "avgpool")
                throw fail("average pooling is excluded: it is not hardware friendly, use maxpool");
            else throw fail("unknown layer kind '" + kind + "'");
            std::map<std::string, std::string> kv;
            std::string tok;
            while (words >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) throw fail("expected key=value, got '" + tok + "'");
                kv[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            auto get = [&](const char* key, std::int64_t fallback, bool required) -> std::int64_t {
                const auto it = kv.find(key);
                if (it == kv.end()) {
                    if (required) throw fail(std::string("layer ") + kind + " requires '" + key + "'");
                    return fallback;
                }
                const auto v = parse_int(it->second, origin + ":" + std::to_string(line_no) + ": " + key);
                kv.erase(it);
                return v;
            };
            if (const auto it = kv.find("neuron"); it != kv.end()) {
                if (it->second == "plif")
                    throw fail("parametric LIF neurons are excluded: they are not hardware friendly, use lif");
                if (it->second != "lif") throw fail("unknown neuron model '" + it->second + "'");
                kv.erase(it);
            }
            const bool flat = kv.contains("size");
            if (layer.kind == LayerKind::Fc || (layer.kind == LayerKind::Input && flat)) {
                const auto n = get("size", 0, true);
                if (n < 1) throw fail("size must be positive");
                layer.shape = Shape{static_cast<std::uint32_t>(n), 1, 1};
            } else {
                const auto c = get("channels", 0, true);
                const auto h = get("height", 0, true);
                const auto w = get("width", 0, true);
                if (c < 1 || h < 1 || w < 1) throw fail("shape dimensions must be positive");
                layer.shape = Shape{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(h),
                                    static_cast<std::uint32_t>(w)};
            }
            if (layer.kind == LayerKind::Conv || layer.kind == LayerKind::MaxPool) {
                const auto k = get("kernel", 0, true);
                if (k < 1) throw fail("kernel must be positive");
                layer.kernel = static_cast<std::uint32_t>(k);
            }
            if (layer.kind == LayerKind::Conv) {
                const auto p = get("padding", 0, false);
                if (p < 0) throw fail("padding must be non-negative");
                layer.padding = static_cast<std::uint32_t>(p);
            }
            if (layer.kind == LayerKind::Conv || layer.kind == LayerKind::Fc) {
                layer.neuron.leak_q8 = static_cast<std::int32_t>(get("leak", 256, false));
                layer.neuron.threshold = static_cast<std::int32_t>(get("threshold", 0, true));
                layer.neuron.reset = static_cast<std::int32_t>(get("reset", 0, false));
            }
            if (!kv.empty()) throw fail("unknown layer key '" + kv.begin()->first + "'");
            model.layers.push_back(std::move(layer));
        } else if (head == "weights") {
            if (model.layers.empty()) throw fail("weights before any layer");
            Layer& layer = model.layers.back();
            if (layer.kind != LayerKind::Conv && layer.kind != LayerKind::Fc)
                throw fail(std::string("layer kind ") + to_string(layer.kind) + " takes no weights");
            std::string tok;
            while (words >> tok) {
                const auto w = parse_int(tok, origin + ":" + std::to_string(line_no) + ": weight");
                if (w < -128 || w > 127) throw fail("weight " + tok + " does not fit in 8 bits");
                layer.weights.push_back(static_cast<std::int8_t>(w));
            }
        } else {
            throw fail("unknown directive '" + head + "'");
        }
    }
    if (!have_version) throw ParseError(origin + ": missing format_version");
    if (!have_timesteps) throw ParseError(origin + ": missing timesteps");
    try {
        validate(model);
    } catch (const ValidationError& e) {
        throw ValidationError(origin + ": " + e.what());
    }
    return model;
}

SnnModel load_model(const std::filesystem::path& path) { return parse_model(read_file(path), path.string()); }

std::string format_model(const SnnModel& model) {
    std::ostringstream os;
    os << "format_version " << kModelFormatVersion << "\n";
    os << "timesteps " << model.timesteps << "\n";
    for (const auto& l : model.layers) {
        os << "layer " << to_string(l.kind);
        const bool flat = l.kind == LayerKind::Fc || (l.kind == LayerKind::Input && l.shape.height == 1 &&
                                                       l.shape.width == 1);
        if (flat) os << " size=" << l.shape.size();
        else os << " channels=" << l.shape.channels << " height=" << l.shape.height << " width=" << l.shape.width;
        if (l.kind == LayerKind::Conv || l.kind == LayerKind::MaxPool) os << " kernel=" << l.kernel;
        if (l.kind == LayerKind::Conv) os << " padding=" << l.padding;
        if (l.kind == LayerKind::Conv || l.kind == LayerKind::Fc)
            os << " leak=" << l.neuron.leak_q8 << " threshold=" << l.neuron.threshold << " reset=" << l.neuron.reset;
        os << "\n";
        for (std::size_t i = 0; i < l.weights.size(); i += 32) {
            os << "weights";
            for (std::size_t j = i; j < std::min(l.weights.size(), i + 32); ++j) os << ' ' << int{l.weights[j]};
            os << "\n";
        }
    }
    return os.str();
}

void save_model(const SnnModel& model, const std::filesystem::path& path) { write_file(path, format_model(model)); }

}  // namespace hsnn::workload
