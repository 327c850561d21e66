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

#include "hsnn/search/arch_space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"

namespace hsnn::search {

using hw::ArchConfig;
using workload::MappingRange;
using workload::MappingTable;
using workload::SnnModel;

std::uint64_t SearchBounds::product() const {
    return std::uint64_t{neurons_per_pe.size()} * rows.size() * cols.size() * fifo_depths.size() *
           arbitrations.size();
}

std::vector<std::string> bounds_violations(const SearchBounds& b) {
    std::vector<std::string> v;
    if (b.neurons_per_pe.empty()) v.push_back("neurons_per_pe range is empty");
    for (auto n : b.neurons_per_pe)
        if (!hw::is_power_of_two(n) || n < 2)
            v.push_back("neurons_per_pe = " + std::to_string(n) + " is not a power of two (2^n, n >= 1)");
    if (b.rows.empty() || b.cols.empty()) v.push_back("mesh_dims range is empty");
    if (std::find(b.rows.begin(), b.rows.end(), 0u) != b.rows.end() ||
        std::find(b.cols.begin(), b.cols.end(), 0u) != b.cols.end())
        v.push_back("mesh dimensions must be at least 1");
    if (b.fifo_depths.empty()) v.push_back("fifo_depth_per_port range is empty");
    if (std::find(b.fifo_depths.begin(), b.fifo_depths.end(), 0u) != b.fifo_depths.end())
        v.push_back("fifo_depth_per_port must be at least 1");
    if (b.arbitrations.empty()) v.push_back("arbitration set is empty");
    if (b.virtual_channels == 0) v.push_back("virtual_channels must be at least 1");
    return v;
}

namespace {

std::vector<std::uint32_t> parse_values(std::string_view text, const std::string& what) {
    text = trim(text);
    std::vector<std::uint32_t> out;
    auto one = [&](std::string_view s) {
        const auto v = parse_int(s, what);
        if (v < 0 || v > 0xffffffffLL) throw ParseError(what + ": value out of range");
        return static_cast<std::uint32_t>(v);
    };
    if (!text.empty() && text.front() == '{') {
        if (text.back() != '}') throw ParseError(what + ": unterminated set");
        const auto inner = trim(text.substr(1, text.size() - 2));
        if (!inner.empty())
            for (const auto& part : split(inner, ',')) out.push_back(one(part));
    } else if (const auto dots = text.find(".."); dots != std::string_view::npos) {
        const auto lo = one(text.substr(0, dots));
        const auto hi = one(text.substr(dots + 2));
        if (hi >= lo && hi - lo > kEnumerateLimit) throw ParseError(what + ": range too wide");
        for (auto v = lo; v <= hi && hi >= lo; ++v) out.push_back(v);
    } else {
        out.push_back(one(text));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string format_values(const std::vector<std::uint32_t>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
}

bool contains(const std::vector<std::uint32_t>& v, std::uint32_t x) { return std::binary_search(v.begin(), v.end(), x); }

std::size_t scan_index(const ArchConfig& a, Coord c) {
    return static_cast<std::size_t>(c.x) * a.cols + static_cast<std::size_t>(c.y);
}

Coord scan_coord(const ArchConfig& a, std::size_t i) {
    return Coord{static_cast<int>(i / a.cols), static_cast<int>(i % a.cols)};
}

/// PE scan index of every neuron, per layer.
std::vector<std::vector<std::size_t>> assignment(const ArchConfig& a, const MappingTable& m, const SnnModel& model) {
    std::vector<std::vector<std::size_t>> out(model.layers.size());
    for (std::size_t l = 0; l < out.size(); ++l) out[l].assign(model.layer_size(l), 0);
    for (const auto& r : m.ranges)
        for (auto n = r.begin; n < r.end; ++n) out.at(r.layer).at(n) = scan_index(a, r.pe);
    return out;
}

MappingTable from_assignment(const ArchConfig& a, const std::vector<std::vector<std::size_t>>& asg) {
    MappingTable m;
    for (std::uint32_t l = 0; l < asg.size(); ++l) {
        for (std::uint32_t n = 0; n < asg[l].size(); ++n) {
            const Coord pe = scan_coord(a, asg[l][n]);
            if (!m.ranges.empty() && m.ranges.back().layer == l && m.ranges.back().end == n && m.ranges.back().pe == pe)
                ++m.ranges.back().end;
            else
                m.ranges.push_back(MappingRange{l, n, n + 1, pe});
        }
    }
    return m;
}

void require_valid(const ArchConfig& a, const SearchBounds& b, const SnnModel& model) {
    const auto v = validate(a, b, model);
    if (!v.empty()) throw ValidationError(v.front());
}

const std::vector<std::uint32_t>& axis_values(const SearchBounds& b, PartitionAxis axis) {
    switch (axis) {
        case PartitionAxis::NeuronsPerPe: return b.neurons_per_pe;
        case PartitionAxis::Rows: return b.rows;
        case PartitionAxis::Cols: return b.cols;
    }
    return b.rows;
}

std::uint32_t& axis_field(ArchConfig& a, PartitionAxis axis) {
    switch (axis) {
        case PartitionAxis::NeuronsPerPe: return a.neurons_per_pe;
        case PartitionAxis::Rows: return a.rows;
        case PartitionAxis::Cols: return a.cols;
    }
    return a.rows;
}

}  // namespace

SearchBounds parse_bounds(std::string_view text, const std::string& origin) {
    KvDocument doc = KvDocument::parse(text, origin);
    if (doc.require_int("format_version") != 1) throw ParseError(origin + ": unsupported format_version");
    SearchBounds b;
    {
        const std::string dims = doc.require("mesh_dims");
        int depth = 0;
        std::size_t cut = std::string::npos;
        for (std::size_t i = 0; i < dims.size(); ++i) {
            if (dims[i] == '{') ++depth;
            if (dims[i] == '}') --depth;
            if (dims[i] == 'x' && depth == 0) {
                cut = i;
                break;
            }
        }
        if (cut == std::string::npos) throw ParseError(origin + ": mesh_dims must look like ROWSxCOLS");
        b.rows = parse_values(dims.substr(0, cut), origin + ": mesh_dims rows");
        b.cols = parse_values(dims.substr(cut + 1), origin + ": mesh_dims cols");
    }
    {
        const std::string npe = doc.require("neurons_per_pe");
        b.neurons_per_pe = parse_values(npe, origin + ": neurons_per_pe");
        if (npe.find("..") != std::string::npos && trim(npe).front() != '{')
            std::erase_if(b.neurons_per_pe, [](std::uint32_t n) { return !hw::is_power_of_two(n) || n < 2; });
    }
    b.fifo_depths = parse_values(doc.require("fifo_depth_per_port"), origin + ": fifo_depth_per_port");
    {
        std::string arb(trim(doc.require("arbitration")));
        if (!arb.empty() && arb.front() == '{') {
            if (arb.back() != '}') throw ParseError(origin + ": arbitration: unterminated set");
            arb = arb.substr(1, arb.size() - 2);
        }
        if (!trim(arb).empty())
            for (const auto& part : split(arb, ',')) b.arbitrations.push_back(hw::parse_arbitration(part));
        std::sort(b.arbitrations.begin(), b.arbitrations.end());
        b.arbitrations.erase(std::unique(b.arbitrations.begin(), b.arbitrations.end()), b.arbitrations.end());
    }
    if (auto v = doc.take_int("virtual_channels")) b.virtual_channels = static_cast<std::uint32_t>(*v);
    if (auto v = doc.take_int("flit_payload_bits")) b.flit_payload_bits = static_cast<std::uint32_t>(*v);
    doc.reject_unknown();
    return b;
}

SearchBounds load_bounds(const std::filesystem::path& path) { return parse_bounds(read_file(path), path.string()); }

std::string format_bounds(const SearchBounds& b) {
    std::ostringstream os;
    os << "format_version = 1\n"
       << "mesh_dims = " << format_values(b.rows) << 'x' << format_values(b.cols) << '\n'
       << "neurons_per_pe = " << format_values(b.neurons_per_pe) << '\n'
       << "fifo_depth_per_port = " << format_values(b.fifo_depths) << '\n'
       << "arbitration = {";
    for (std::size_t i = 0; i < b.arbitrations.size(); ++i) os << (i ? "," : "") << hw::to_string(b.arbitrations[i]);
    os << "}\n"
       << "virtual_channels = " << b.virtual_channels << '\n'
       << "flit_payload_bits = " << b.flit_payload_bits << '\n';
    return os.str();
}

const char* to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Partitioning: return "partitioning";
        case ActionKind::Mapping: return "mapping";
        case ActionKind::Balancing: return "balancing";
        case ActionKind::Arbitrating: return "arbitrating";
        case ActionKind::Altering: return "altering";
    }
    return "?";
}

std::string to_string(const SearchAction& a) {
    static const char* axes[] = {"neurons_per_pe", "rows", "cols"};
    const std::string sign = a.delta >= 0 ? "+" + std::to_string(a.delta) : std::to_string(a.delta);
    switch (a.kind) {
        case ActionKind::Partitioning: return std::string("partitioning(") + axes[a.target % 3] + "," + sign + ")";
        case ActionKind::Mapping: return "mapping(layer " + std::to_string(a.target) + "," + sign + ")";
        case ActionKind::Balancing: return "balancing";
        case ActionKind::Arbitrating: return "arbitrating";
        case ActionKind::Altering: return "altering(" + sign + ")";
    }
    return "?";
}

std::vector<std::string> validate(const ArchConfig& a, const SearchBounds& b, const SnnModel& model) {
    std::vector<std::string> v = hw::arch_violations(a, model);
    if (!contains(b.neurons_per_pe, a.neurons_per_pe))
        v.push_back("neurons_per_pe = " + std::to_string(a.neurons_per_pe) + " out of bounds");
    if (!contains(b.rows, a.rows) || !contains(b.cols, a.cols))
        v.push_back("mesh_dims " + std::to_string(a.rows) + "x" + std::to_string(a.cols) + " out of bounds");
    if (!contains(b.fifo_depths, a.fifo_depth_per_port))
        v.push_back("fifo_depth_per_port = " + std::to_string(a.fifo_depth_per_port) + " out of bounds");
    if (std::find(b.arbitrations.begin(), b.arbitrations.end(), a.arbitration) == b.arbitrations.end())
        v.push_back(std::string("arbitration ") + hw::to_string(a.arbitration) + " out of bounds");
    if (a.virtual_channels != b.virtual_channels) v.push_back("virtual_channels out of bounds");
    if (a.flit_payload_bits != b.flit_payload_bits) v.push_back("flit_payload_bits out of bounds");
    return v;
}

ArchConfig canonicalize(ArchConfig a, const SnnModel& model) {
    if (!a.mapping) return a;
    MappingTable m = from_assignment(a, assignment(a, *a.mapping, model));
    MappingTable canonical;
    try {
        canonical = workload::map_model(model, a.rows, a.cols, a.neurons_per_pe);
    } catch (const ValidationError&) {
        a.mapping = std::move(m);
        return a;
    }
    if (m == canonical)
        a.mapping.reset();
    else
        a.mapping = std::move(m);
    return a;
}

ArchConfig apply_action(const ArchConfig& arch, const SearchAction& action, const SearchBounds& b,
                        const SnnModel& model) {
    ArchConfig a = arch;
    switch (action.kind) {
        case ActionKind::Partitioning: {
            if (action.target < 0 || action.target > 2) throw ValidationError("unknown partitioning axis");
            const auto axis = static_cast<PartitionAxis>(action.target);
            const auto& values = axis_values(b, axis);
            std::uint32_t& field = axis_field(a, axis);
            const auto it = std::find(values.begin(), values.end(), field);
            if (it == values.end()) throw ValidationError("out of bounds: current value is not in the bound list");
            const auto target = (it - values.begin()) + action.delta;
            if (target < 0 || target >= static_cast<std::ptrdiff_t>(values.size()))
                throw ValidationError("out of bounds: partitioning past the end of the bound list");
            field = values[static_cast<std::size_t>(target)];
            a.mapping.reset();
            break;
        }
        case ActionKind::Mapping: {
            if (action.target < 0 || static_cast<std::size_t>(action.target) >= model.layers.size())
                throw ValidationError("mapping action names an unknown layer");
            MappingTable m = hw::resolved_mapping(a, model);
            const auto nodes = static_cast<std::ptrdiff_t>(a.nodes());
            for (auto& r : m.ranges) {
                if (r.layer != static_cast<std::uint32_t>(action.target)) continue;
                const auto to = static_cast<std::ptrdiff_t>(scan_index(a, r.pe)) + action.delta;
                if (to < 0 || to >= nodes) throw ValidationError("out of bounds: layer moved outside the mesh");
                r.pe = scan_coord(a, static_cast<std::size_t>(to));
            }
            a.mapping = std::move(m);
            break;
        }
        case ActionKind::Balancing: {
            auto asg = assignment(a, hw::resolved_mapping(a, model), model);
            std::vector<std::uint32_t> load(a.nodes(), 0);
            for (const auto& layer : asg)
                for (auto pe : layer) ++load[pe];
            while (true) {
                const auto hi = static_cast<std::size_t>(std::max_element(load.begin(), load.end()) - load.begin());
                const auto lo = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
                if (load[hi] - load[lo] <= 1) break;
                // Move the highest-numbered neuron off the busiest PE.
                bool moved = false;
                for (auto l = asg.size(); l-- > 0 && !moved;)
                    for (auto n = asg[l].size(); n-- > 0 && !moved;)
                        if (asg[l][n] == hi) {
                            asg[l][n] = lo;
                            moved = true;
                        }
                --load[hi];
                ++load[lo];
            }
            a.mapping = from_assignment(a, asg);
            break;
        }
        case ActionKind::Arbitrating:
            a.arbitration = a.arbitration == hw::Arbitration::RoundRobin ? hw::Arbitration::FixedPriority
                                                                         : hw::Arbitration::RoundRobin;
            break;
        case ActionKind::Altering: {
            const std::int64_t depth = std::int64_t{a.fifo_depth_per_port} + action.delta;
            if (depth < 1 || depth > 0xffffffffLL || !contains(b.fifo_depths, static_cast<std::uint32_t>(depth)))
                throw ValidationError("out of bounds: fifo_depth_per_port " + std::to_string(depth));
            a.fifo_depth_per_port = static_cast<std::uint32_t>(depth);
            break;
        }
    }
    a = canonicalize(std::move(a), model);
    require_valid(a, b, model);
    return a;
}

std::vector<SearchAction> legal_actions(const ArchConfig& arch, const SearchBounds& b, const SnnModel& model) {
    std::vector<SearchAction> candidates;
    for (std::int32_t axis = 0; axis < 3; ++axis)
        for (std::int32_t d : {-1, 1}) candidates.push_back({ActionKind::Partitioning, axis, d});
    for (std::int32_t l = 0; l < static_cast<std::int32_t>(model.layers.size()); ++l)
        for (std::int32_t d : {-1, 1}) candidates.push_back({ActionKind::Mapping, l, d});
    candidates.push_back({ActionKind::Balancing, 0, 0});
    candidates.push_back({ActionKind::Arbitrating, 0, 0});
    {
        const auto& f = b.fifo_depths;
        const auto it = std::lower_bound(f.begin(), f.end(), arch.fifo_depth_per_port);
        const auto cur = static_cast<std::int64_t>(arch.fifo_depth_per_port);
        if (it != f.begin()) candidates.push_back({ActionKind::Altering, 0, static_cast<std::int32_t>(*(it - 1) - cur)});
        auto up = it;
        if (up != f.end() && *up == arch.fifo_depth_per_port) ++up;
        if (up != f.end()) candidates.push_back({ActionKind::Altering, 0, static_cast<std::int32_t>(*up - cur)});
    }
    const ArchConfig here = canonicalize(arch, model);
    std::vector<SearchAction> legal;
    for (const auto& c : candidates) {
        try {
            if (apply_action(arch, c, b, model) != here) legal.push_back(c);
        } catch (const ValidationError&) {
        }
    }
    return legal;
}

std::vector<ArchConfig> enumerate(const SearchBounds& b, const SnnModel& model) {
    const std::uint64_t n = b.product();
    if (n > kEnumerateLimit)
        throw ValidationError("bounds describe " + std::to_string(n) + " configurations, more than the " +
                              std::to_string(kEnumerateLimit) + " enumeration limit");
    std::vector<ArchConfig> out;
    for (auto npe : b.neurons_per_pe)
        for (auto r : b.rows)
            for (auto c : b.cols)
                for (auto f : b.fifo_depths)
                    for (auto arb : b.arbitrations) {
                        ArchConfig a;
                        a.rows = r;
                        a.cols = c;
                        a.neurons_per_pe = npe;
                        a.fifo_depth_per_port = f;
                        a.arbitration = arb;
                        a.virtual_channels = b.virtual_channels;
                        a.flit_payload_bits = b.flit_payload_bits;
                        if (validate(a, b, model).empty()) out.push_back(a);
                    }
    return out;
}

std::uint32_t bucketize(double ratio, std::uint32_t buckets) {
    if (buckets == 0) return 0;
    if (!(ratio > 0.0)) return 0;
    const double b = std::floor(ratio * buckets);
    return b >= buckets - 1 ? buckets - 1 : static_cast<std::uint32_t>(b);
}

RlState encode_state(const hw::TrafficStats& t, std::uint32_t buckets) {
    RlState s;
    if (t.aer_events > 0) {
        const auto peak = *std::max_element(t.aer_per_pe.begin(), t.aer_per_pe.end());
        s.aer = bucketize(static_cast<double>(peak) / static_cast<double>(t.aer_events), buckets);
    }
    if (t.flits_injected > 0) {
        std::uint64_t peak = 0;
        for (const auto& l : t.links) peak = std::max(peak, l.flits);
        s.noc = bucketize(static_cast<double>(peak) / static_cast<double>(t.flits_injected), buckets);
        if (t.max_distance > 0)
            s.hops = bucketize(static_cast<double>(t.total_hops) /
                                   (static_cast<double>(t.flits_injected) * t.max_distance),
                               buckets);
    }
    return s;
}

}  // namespace hsnn::search
