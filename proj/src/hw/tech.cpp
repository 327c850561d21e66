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

#include "hsnn/hw/tech.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"

namespace hsnn::hw {

const char* to_string(UnitKind kind) {
    switch (kind) {
        case UnitKind::InputUnit: return "input_unit";
        case UnitKind::OutputUnit: return "output_unit";
        case UnitKind::SwitchAllocator: return "switch_allocator";
        case UnitKind::PeLut: return "pe_lut";
        case UnitKind::PeSram: return "pe_sram";
        case UnitKind::PeNeuron: return "pe_neuron";
        case UnitKind::Nic: return "nic";
    }
    return "?";
}

std::optional<UnitKind> parse_unit_kind(std::string_view text) {
    for (auto k : kAllUnitKinds)
        if (text == to_string(k)) return k;
    return std::nullopt;
}

bool is_interconnect(UnitKind kind) {
    return kind == UnitKind::InputUnit || kind == UnitKind::OutputUnit || kind == UnitKind::SwitchAllocator ||
           kind == UnitKind::Nic;
}

const UnitTech& TechParams::at(UnitKind kind) const {
    const auto it = units_.find(kind);
    if (it == units_.end())
        throw ConfigError(std::string("technology has no entry for unit kind '") + to_string(kind) + "'");
    return it->second;
}

namespace {

UnitTech make(std::uint64_t fwd_ps, std::uint64_t bwd_ps, double leak_mw, double area, double pj) {
    return UnitTech{SimTime{fwd_ps}, SimTime{bwd_ps}, std::llround(leak_mw * 1e6), area, std::llround(pj * 1e3)};
}

constexpr const char* kFields[] = {"forward_latency_ps", "backward_latency_ps", "leakage_power_mw", "area_um2",
                                   "dynamic_energy_per_event_pj"};

}  // namespace

TechParams default_tech() {
    TechParams t;
    t.set(UnitKind::InputUnit, make(1200, 1500, 0.063, 20547, 0.42));
    t.set(UnitKind::OutputUnit, make(1600, 2000, 0.044, 14536, 0.31));
    t.set(UnitKind::SwitchAllocator, make(1900, 2400, 0.031, 10764, 0.24));
    t.set(UnitKind::PeLut, make(800, 1000, 0.0004, 96, 0.55));
    t.set(UnitKind::PeSram, make(1000, 1200, 0.0009, 210, 1.10));
    t.set(UnitKind::PeNeuron, make(900, 1100, 0.0006, 150, 0.75));
    t.set(UnitKind::Nic, make(1000, 1200, 0.020, 6400, 0.36));
    return t;
}

TechParams parse_tech(std::string_view text, const std::string& origin) {
    KvDocument doc = KvDocument::parse(text, origin);
    if (doc.require_int("format_version") != 1) throw ParseError(origin + ": unsupported format_version");
    TechParams t;
    for (auto kind : kAllUnitKinds) {
        const std::string prefix = std::string(to_string(kind)) + ".";
        bool any = false;
        for (const char* f : kFields) any = any || doc.has(prefix + f);
        if (!any) continue;
        auto num = [&](const char* field) {
            const double v = doc.require_double(prefix + field);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ValidationError(origin + ": " + prefix + field + " must be a finite value >= 0");
            return v;
        };
        auto latency = [&](const char* field) {
            const auto v = doc.require_int(prefix + field);
            if (v <= 0) throw ValidationError(origin + ": " + prefix + field + " must be positive");
            return SimTime{static_cast<std::uint64_t>(v)};
        };
        UnitTech u;
        u.forward = latency("forward_latency_ps");
        u.backward = latency("backward_latency_ps");
        u.leakage_nw = std::llround(num("leakage_power_mw") * 1e6);
        u.area_um2 = num("area_um2");
        u.dynamic_fj = std::llround(num("dynamic_energy_per_event_pj") * 1e3);
        t.set(kind, u);
    }
    doc.reject_unknown();
    return t;
}

TechParams load_tech(const std::filesystem::path& path) { return parse_tech(read_file(path), path.string()); }

std::string format_tech(const TechParams& tech) {
    std::string out = "format_version = 1\n";
    char buf[512];
    for (const auto& [kind, u] : tech.units()) {
        const char* k = to_string(kind);
        std::snprintf(buf, sizeof buf,
                      "%s.forward_latency_ps = %llu\n%s.backward_latency_ps = %llu\n%s.leakage_power_mw = %.6f\n"
                      "%s.area_um2 = %.3f\n%s.dynamic_energy_per_event_pj = %.3f\n",
                      k, static_cast<unsigned long long>(u.forward.ps), k,
                      static_cast<unsigned long long>(u.backward.ps), k, static_cast<double>(u.leakage_nw) / 1e6, k,
                      u.area_um2, k, static_cast<double>(u.dynamic_fj) / 1e3);
        out += buf;
    }
    return out;
}

}  // namespace hsnn::hw
