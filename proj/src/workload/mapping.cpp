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

#include "hsnn/workload/mapping.hpp"

#include <algorithm>
#include <sstream>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"

namespace hsnn::workload {

std::vector<Coord> scan_order(std::uint32_t rows, std::uint32_t cols) {
    std::vector<Coord> out;
    out.reserve(static_cast<std::size_t>(rows) * cols);
    for (std::uint32_t x = 0; x < rows; ++x)
        for (std::uint32_t y = 0; y < cols; ++y) out.push_back(Coord{static_cast<int>(x), static_cast<int>(y)});
    return out;
}

MappingTable map_model(const SnnModel& model, std::uint32_t rows, std::uint32_t cols, std::uint32_t neurons_per_pe) {
    const std::uint64_t available = static_cast<std::uint64_t>(rows) * cols * neurons_per_pe;
    const std::uint64_t required = model.total_neurons();
    if (required > available)
        throw ValidationError("insufficient capacity: required " + std::to_string(required) + " neurons, available " +
                              std::to_string(available));
    const auto pes = scan_order(rows, cols);
    MappingTable table;
    std::size_t pe = 0;
    std::uint32_t used = 0;
    for (std::uint32_t l = 0; l < model.layers.size(); ++l) {
        std::uint32_t begin = 0;
        const std::uint32_t size = model.layer_size(l);
        while (begin < size) {
            if (used == neurons_per_pe) {
                ++pe;
                used = 0;
            }
            const std::uint32_t take = std::min(size - begin, neurons_per_pe - used);
            table.ranges.push_back({l, begin, begin + take, pes[pe]});
            begin += take;
            used += take;
        }
    }
    return table;
}

std::vector<std::uint32_t> pe_loads(const MappingTable& table, std::uint32_t rows, std::uint32_t cols) {
    std::vector<std::uint32_t> loads(static_cast<std::size_t>(rows) * cols, 0);
    for (const auto& r : table.ranges) {
        if (r.pe.x < 0 || r.pe.y < 0 || static_cast<std::uint32_t>(r.pe.x) >= rows ||
            static_cast<std::uint32_t>(r.pe.y) >= cols)
            continue;
        loads[static_cast<std::size_t>(r.pe.x) * cols + static_cast<std::size_t>(r.pe.y)] += r.size();
    }
    return loads;
}

std::vector<std::string> mapping_violations(const MappingTable& table, const SnnModel& model, std::uint32_t rows,
                                            std::uint32_t cols, std::uint32_t neurons_per_pe) {
    std::vector<std::string> v;
    std::vector<std::vector<std::uint8_t>> covered(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) covered[l].assign(model.layer_size(l), 0);
    bool duplicate = false;
    for (const auto& r : table.ranges) {
        if (r.layer >= model.layers.size()) {
            v.push_back("mapping names layer " + std::to_string(r.layer) + " which the model does not have");
            continue;
        }
        if (r.begin >= r.end || r.end > model.layer_size(r.layer)) {
            v.push_back("mapping range " + std::to_string(r.layer) + ":" + std::to_string(r.begin) + "-" +
                        std::to_string(r.end) + " is empty or exceeds the layer");
            continue;
        }
        if (r.pe.x < 0 || r.pe.y < 0 || static_cast<std::uint32_t>(r.pe.x) >= rows ||
            static_cast<std::uint32_t>(r.pe.y) >= cols)
            v.push_back("mapped PE (" + std::to_string(r.pe.x) + "," + std::to_string(r.pe.y) +
                        ") lies outside the mesh");
        for (auto n = r.begin; n < r.end; ++n) {
            if (covered[r.layer][n]) duplicate = true;
            covered[r.layer][n] = 1;
        }
    }
    if (duplicate) v.push_back("duplicate neuron: a neuron is mapped more than once");
    for (std::size_t l = 0; l < covered.size(); ++l)
        for (std::size_t n = 0; n < covered[l].size(); ++n)
            if (!covered[l][n]) {
                v.push_back("uncovered neuron: layer " + std::to_string(l) + " neuron " + std::to_string(n));
                l = covered.size() - 1;
                break;
            }
    const auto loads = pe_loads(table, rows, cols);
    for (std::size_t i = 0; i < loads.size(); ++i)
        if (loads[i] > neurons_per_pe) {
            v.push_back("PE #" + std::to_string(i) + " holds " + std::to_string(loads[i]) + " neurons, capacity " +
                        std::to_string(neurons_per_pe));
            break;
        }
    return v;
}

std::string format_mapping(const MappingTable& table) {
    std::ostringstream os;
    bool first = true;
    for (const auto& r : table.ranges) {
        if (!first) os << ' ';
        first = false;
        os << r.layer << ':' << r.begin << '-' << r.end << '@' << r.pe.x << ',' << r.pe.y;
    }
    return os.str();
}

MappingTable parse_mapping(const std::string& text) {
    MappingTable table;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        const auto colon = tok.find(':');
        const auto dash = tok.find('-', colon);
        const auto at = tok.find('@', dash);
        const auto comma = tok.find(',', at);
        if (colon == std::string::npos || dash == std::string::npos || at == std::string::npos ||
            comma == std::string::npos)
            throw ParseError("mapping entry '" + tok + "' is not layer:begin-end@x,y");
        MappingRange r;
        r.layer = static_cast<std::uint32_t>(parse_int(tok.substr(0, colon), "mapping layer"));
        r.begin = static_cast<std::uint32_t>(parse_int(tok.substr(colon + 1, dash - colon - 1), "mapping begin"));
        r.end = static_cast<std::uint32_t>(parse_int(tok.substr(dash + 1, at - dash - 1), "mapping end"));
        r.pe.x = static_cast<int>(parse_int(tok.substr(at + 1, comma - at - 1), "mapping pe x"));
        r.pe.y = static_cast<int>(parse_int(tok.substr(comma + 1), "mapping pe y"));
        table.ranges.push_back(r);
    }
    return table;
}

}  // namespace hsnn::workload
