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

#include "hsnn/hw/arch_config.hpp"

#include <sstream>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"

namespace hsnn::hw {

const char* to_string(Arbitration a) {
    return a == Arbitration::RoundRobin ? "round_robin" : "fixed_priority";
}

Arbitration parse_arbitration(std::string_view text) {
    if (text == "round_robin") return Arbitration::RoundRobin;
    if (text == "fixed_priority") return Arbitration::FixedPriority;
    throw ParseError("arbitration must be round_robin or fixed_priority, got '" + std::string(text) + "'");
}

std::uint32_t address_bits(std::uint64_t n) {
    std::uint32_t bits = 0;
    while ((std::uint64_t{1} << bits) < n) ++bits;
    return bits;
}

std::uint32_t aer_address_bits(const ArchConfig& arch) {
    return address_bits(arch.rows) + address_bits(arch.cols) + address_bits(arch.neurons_per_pe);
}

workload::MappingTable resolved_mapping(const ArchConfig& arch, const workload::SnnModel& model) {
    if (arch.mapping) return *arch.mapping;
    return workload::map_model(model, arch.rows, arch.cols, arch.neurons_per_pe);
}

std::vector<std::string> arch_violations(const ArchConfig& arch, const workload::SnnModel& model) {
    std::vector<std::string> v;
    if (arch.rows == 0 || arch.cols == 0) v.push_back("mesh dimensions must be at least 1x1");
    if (!is_power_of_two(arch.neurons_per_pe) || arch.neurons_per_pe < 2)
        v.push_back("neurons_per_pe = " + std::to_string(arch.neurons_per_pe) + " is not a power of two (2^n, n >= 1)");
    if (arch.fifo_depth_per_port == 0) v.push_back("fifo_depth_per_port must be at least 1");
    if (arch.virtual_channels == 0) v.push_back("virtual_channels must be at least 1");
    if (arch.flit_payload_bits < aer_address_bits(arch))
        v.push_back("AER address needs " + std::to_string(aer_address_bits(arch)) + " bits but a flit carries " +
                    std::to_string(arch.flit_payload_bits));
    const std::uint64_t available = std::uint64_t{arch.rows} * arch.cols * arch.neurons_per_pe;
    if (!arch.mapping || !v.empty()) {
        if (model.total_neurons() > available)
            v.push_back("insufficient capacity: required " + std::to_string(model.total_neurons()) +
                        " neurons, available " + std::to_string(available));
        return v;
    }
    for (auto& m : workload::mapping_violations(*arch.mapping, model, arch.rows, arch.cols, arch.neurons_per_pe))
        v.push_back(std::move(m));
    return v;
}

ArchConfig parse_arch(std::string_view text, const std::string& origin) {
    KvDocument doc = KvDocument::parse(text, origin);
    if (doc.require_int("format_version") != 1) throw ParseError(origin + ": unsupported format_version");
    ArchConfig a;
    {
        const std::string dims = doc.require("mesh_dims");
        const auto x = dims.find('x');
        if (x == std::string::npos) throw ParseError(origin + ": mesh_dims must look like ROWSxCOLS");
        const auto rows = parse_int(dims.substr(0, x), origin + ": mesh_dims rows");
        const auto cols = parse_int(dims.substr(x + 1), origin + ": mesh_dims cols");
        if (rows < 0 || cols < 0 || rows > 4096 || cols > 4096) throw ParseError(origin + ": mesh_dims out of range");
        a.rows = static_cast<std::uint32_t>(rows);
        a.cols = static_cast<std::uint32_t>(cols);
    }
    auto u32 = [&](const char* key) {
        const auto v = doc.require_int(key);
        if (v < 0 || v > 0xffffffffLL) throw ParseError(origin + ": " + key + " out of range");
        return static_cast<std::uint32_t>(v);
    };
    a.neurons_per_pe = u32("neurons_per_pe");
    a.fifo_depth_per_port = u32("fifo_depth_per_port");
    a.virtual_channels = u32("virtual_channels");
    a.arbitration = parse_arbitration(doc.require("arbitration"));
    a.flit_payload_bits = u32("flit_payload_bits");
    if (auto m = doc.take("mapping"); m && *m != "canonical") a.mapping = workload::parse_mapping(*m);
    doc.reject_unknown();
    return a;
}

ArchConfig load_arch(const std::filesystem::path& path) { return parse_arch(read_file(path), path.string()); }

std::string format_arch(const ArchConfig& a) {
    std::ostringstream os;
    os << "format_version = 1\n"
       << "mesh_dims = " << a.rows << 'x' << a.cols << '\n'
       << "neurons_per_pe = " << a.neurons_per_pe << '\n'
       << "fifo_depth_per_port = " << a.fifo_depth_per_port << '\n'
       << "virtual_channels = " << a.virtual_channels << '\n'
       << "arbitration = " << to_string(a.arbitration) << '\n'
       << "flit_payload_bits = " << a.flit_payload_bits << '\n'
       << "mapping = " << (a.mapping ? workload::format_mapping(*a.mapping) : std::string("canonical")) << '\n';
    return os.str();
}

void save_arch(const ArchConfig& arch, const std::filesystem::path& path) { write_file(path, format_arch(arch)); }

}  // namespace hsnn::hw
