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

#include "hsnn/ppa/ppa.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"

namespace hsnn::ppa {

std::int64_t leakage_fj(std::int64_t leakage_nw, std::uint32_t multiplier, SimTime duration) {
    // nW * ps = 1e-21 J = 1e-6 fJ
    const __int128 raw = static_cast<__int128>(leakage_nw) * multiplier * static_cast<__int128>(duration.ps);
    return static_cast<std::int64_t>((raw + 500'000) / 1'000'000);
}

EnergyBreakdown energy_breakdown(const ActivityLedger& ledger, const hw::TechParams& tech, SimTime sim_time) {
    EnergyBreakdown out;
    out.units.reserve(ledger.units().size());
    for (const auto& [path, unit] : ledger.units()) {
        const hw::UnitTech& t = tech.at(unit.kind);
        UnitEnergy e;
        e.path = path;
        e.kind = unit.kind;
        e.firings = unit.firings();
        e.dynamic_fj = static_cast<std::int64_t>(e.firings) * t.dynamic_fj;
        e.leakage_fj = leakage_fj(t.leakage_nw, unit.multiplier, sim_time);
        out.dynamic_fj += e.dynamic_fj;
        out.leakage_fj += e.leakage_fj;
        out.units.push_back(std::move(e));
    }
    return out;
}

double energy_total_pj(const ActivityLedger& ledger, const hw::TechParams& tech, SimTime sim_time) {
    return static_cast<double>(energy_breakdown(ledger, tech, sim_time).total_fj()) / 1000.0;
}

double router_area(const hw::TechParams& tech) {
    using hw::UnitKind;
    return 5 * (tech.at(UnitKind::InputUnit).area_um2 + tech.at(UnitKind::OutputUnit).area_um2) +
           tech.at(UnitKind::SwitchAllocator).area_um2;
}

double area_total(const hw::ArchConfig& arch, const hw::TechParams& tech) {
    using hw::UnitKind;
    const double nodes = static_cast<double>(arch.rows) * arch.cols;
    if (nodes == 0) return 0.0;
    const double pe = arch.neurons_per_pe * (tech.at(UnitKind::PeLut).area_um2 + tech.at(UnitKind::PeSram).area_um2 +
                                             tech.at(UnitKind::PeNeuron).area_um2);
    return nodes * (router_area(tech) + 2 * tech.at(UnitKind::Nic).area_um2 + pe);
}

std::vector<LayerRow> layer_breakdown(const ActivityLedger& ledger, const hw::TechParams& tech,
                                      const std::vector<SimTime>& layer_latency) {
    std::vector<LayerRow> rows(layer_latency.size());
    for (std::size_t l = 0; l < rows.size(); ++l) {
        rows[l].layer = static_cast<std::int32_t>(l);
        rows[l].latency = layer_latency[l];
    }
    LayerRow interconnect;
    for (const auto& [path, unit] : ledger.units()) {
        const std::int64_t per_event = tech.at(unit.kind).dynamic_fj;
        for (const auto& [tag, count] : unit.counts) {
            const std::int64_t fj = static_cast<std::int64_t>(count) * per_event;
            if (hw::is_interconnect(unit.kind)) {
                interconnect.energy_fj += fj;
            } else {
                if (tag < 0 || static_cast<std::size_t>(tag) >= rows.size())
                    throw ConfigError("PE activity tagged with unknown layer " + std::to_string(tag) + " in " + path);
                rows[static_cast<std::size_t>(tag)].energy_fj += fj;
            }
        }
    }
    rows.push_back(interconnect);
    return rows;
}

PpaReport make_report(const hw::ArchConfig& arch, const hw::TechParams& tech, const hw::SimulationResult& sim) {
    PpaReport r;
    r.truncated = sim.stats.truncated;
    r.latency = sim.latency;
    r.sim_time = sim.stats.final_time;
    r.events_processed = sim.stats.events_processed;
    r.events_posted = sim.stats.events_posted;
    auto energy = energy_breakdown(sim.ledger, tech, sim.stats.final_time);
    r.dynamic_fj = energy.dynamic_fj;
    r.leakage_fj = energy.leakage_fj;
    r.units = std::move(energy.units);
    r.area_um2 = area_total(arch, tech);
    r.layers = layer_breakdown(sim.ledger, tech, sim.layer_latency);
    return r;
}

std::string format_pj(std::int64_t fj) {
    const bool neg = fj < 0;
    const std::uint64_t mag = static_cast<std::uint64_t>(neg ? -fj : fj);
    const std::uint64_t centi = (mag + 5) / 10;  // 0.01 pJ = 10 fJ, half up
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%" PRIu64 ".%02" PRIu64, neg ? "-" : "", centi / 100, centi % 100);
    return buf;
}

namespace {

std::string ns_text(SimTime t) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%" PRIu64 ".%03" PRIu64, t.ps / 1000, t.ps % 1000);
    return buf;
}

std::int64_t pj_to_fj(const std::string& text, const std::string& what) {
    return std::llround(parse_double(text, what) * 1000.0);
}

SimTime ns_to_time(const std::string& text, const std::string& what) {
    return SimTime{static_cast<std::uint64_t>(std::llround(parse_double(text, what) * 1000.0))};
}

}  // namespace

std::string format_report(const PpaReport& r) {
    std::ostringstream os;
    char buf[64];
    os << "format_version," << kReportFormatVersion << '\n';
    os << "[summary]\n";
    os << "truncated," << (r.truncated ? "true" : "false") << '\n';
    os << "latency_ps," << r.latency.ps << '\n';
    os << "latency_ns," << ns_text(r.latency) << '\n';
    os << "sim_time_ps," << r.sim_time.ps << '\n';
    os << "energy_fj," << r.energy_fj() << '\n';
    os << "dynamic_fj," << r.dynamic_fj << '\n';
    os << "leakage_fj," << r.leakage_fj << '\n';
    os << "energy_pj," << format_pj(r.energy_fj()) << '\n';
    std::snprintf(buf, sizeof buf, "%.3f", r.area_um2);
    os << "area_um2," << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.6e", r.edp());
    os << "edp_snj," << buf << '\n';
    os << "events_processed," << r.events_processed << '\n';
    os << "events_posted," << r.events_posted << '\n';
    os << "[units]\n";
    os << "path,kind,firings,dynamic_pj,leakage_pj\n";
    for (const auto& u : r.units)
        os << '"' << u.path << "\"," << hw::to_string(u.kind) << ',' << u.firings << ',' << format_pj(u.dynamic_fj) << ','
           << format_pj(u.leakage_fj) << '\n';
    os << "[layers]\n";
    os << "layer,energy_pj,latency_ns\n";
    for (const auto& l : r.layers) {
        if (l.layer == kInterconnectRow)
            os << "interconnect," << format_pj(l.energy_fj) << ",\n";
        else
            os << l.layer << ',' << format_pj(l.energy_fj) << ',' << ns_text(l.latency) << '\n';
    }
    return os.str();
}

PpaReport parse_report(std::string_view text, const std::string& origin) {
    PpaReport r;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    int line_no = 0;
    bool version = false, have_summary = false, have_units = false, have_layers = false;
    bool header_pending = false;
    auto fail = [&](const std::string& msg) { return ParseError(origin + ":" + std::to_string(line_no) + ": " + msg); };
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body(trim(line));
        if (body.empty()) continue;
        if (!version) {
            if (body != "format_version," + std::to_string(kReportFormatVersion))
                throw fail("expected 'format_version," + std::to_string(kReportFormatVersion) + "'");
            version = true;
            continue;
        }
        if (body.front() == '[') {
            section = body;
            header_pending = section != "[summary]";
            if (section == "[summary]") have_summary = true;
            else if (section == "[units]") have_units = true;
            else if (section == "[layers]") have_layers = true;
            else throw fail("unknown section " + section);
            continue;
        }
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto f = split(body, ',');
        const std::string where = origin + ":" + std::to_string(line_no);
        if (section == "[summary]") {
            if (f.size() != 2) throw fail("expected key,value");
            const auto& k = f[0];
            const auto& v = f[1];
            if (k == "truncated") r.truncated = v == "true";
            else if (k == "latency_ps") r.latency = SimTime{static_cast<std::uint64_t>(parse_int(v, where))};
            else if (k == "sim_time_ps") r.sim_time = SimTime{static_cast<std::uint64_t>(parse_int(v, where))};
            else if (k == "dynamic_fj") r.dynamic_fj = parse_int(v, where);
            else if (k == "leakage_fj") r.leakage_fj = parse_int(v, where);
            else if (k == "area_um2") r.area_um2 = parse_double(v, where);
            else if (k == "events_processed") r.events_processed = static_cast<std::uint64_t>(parse_int(v, where));
            else if (k == "events_posted") r.events_posted = static_cast<std::uint64_t>(parse_int(v, where));
            else if (k != "latency_ns" && k != "energy_fj" && k != "energy_pj" && k != "edp_snj")
                throw fail("unknown summary key '" + k + "'");
        } else if (section == "[units]") {
            // The quoted path may itself contain commas.
            const auto close = body.size() > 1 && body.front() == '"' ? body.find('"', 1) : std::string_view::npos;
            if (close == std::string_view::npos || close + 1 >= body.size() || body[close + 1] != ',')
                throw fail("expected a quoted unit path");
            const auto rest = split(body.substr(close + 2), ',');
            if (rest.size() != 4) throw fail("expected 5 unit columns");
            std::vector<std::string> f{std::string(body.substr(1, close - 1))};
            f.insert(f.end(), rest.begin(), rest.end());
            UnitEnergy u;
            u.path = f[0];
            const auto kind = hw::parse_unit_kind(f[1]);
            if (!kind) throw fail("unknown unit kind '" + f[1] + "'");
            u.kind = *kind;
            u.firings = static_cast<std::uint64_t>(parse_int(f[2], where));
            u.dynamic_fj = pj_to_fj(f[3], where);
            u.leakage_fj = pj_to_fj(f[4], where);
            r.units.push_back(std::move(u));
        } else if (section == "[layers]") {
            if (f.size() != 3) throw fail("expected 3 layer columns");
            LayerRow row;
            row.layer = f[0] == "interconnect" ? kInterconnectRow : static_cast<std::int32_t>(parse_int(f[0], where));
            row.energy_fj = pj_to_fj(f[1], where);
            if (!f[2].empty()) row.latency = ns_to_time(f[2], where);
            r.layers.push_back(row);
        } else {
            throw fail("data outside any section");
        }
    }
    if (!version || !have_summary || !have_units || !have_layers)
        throw ParseError(origin + ": incomplete report (missing sections)");
    return r;
}

PpaReport load_report(const std::filesystem::path& path) { return parse_report(read_file(path), path.string()); }

}  // namespace hsnn::ppa
