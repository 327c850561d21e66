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

#include <doctest.h>

#include <cmath>

#include "hsnn/core/error.hpp"
#include "hsnn/hw/hardware.hpp"
#include "hsnn/ppa/ppa.hpp"
#include "oracles.hpp"
#include "pipeline.hpp"

using namespace hsnn;
using namespace hsnn::ppa;
using hw::UnitKind;

namespace {

ActivityLedger random_ledger(Rng& rng) {
    ActivityLedger l;
    const int n = static_cast<int>(uniform_int(rng, 0, 6));
    for (int i = 0; i < n; ++i) {
        const std::string path = "sys/n/m/u" + std::to_string(uniform_int(rng, 0, 8));
        // The path fixes the kind so merges never conflict.
        l.add_unit(path, static_cast<UnitKind>(path.back() % 7));
        const int recs = static_cast<int>(uniform_int(rng, 0, 4));
        for (int r = 0; r < recs; ++r) l.record(path, static_cast<EventKind>(uniform_int(rng, -1, 3)), uniform_int(rng, 1, 50));
    }
    return l;
}

hw::TechParams zero_tech() {
    hw::TechParams t;
    for (auto k : hw::kAllUnitKinds) t.set(k, hw::UnitTech{SimTime{1}, SimTime{1}, 0, 0.0, 0});
    return t;
}

}  // namespace

TEST_CASE("a fresh ledger counts one record as one") {
    ActivityLedger l;
    l.add_unit("sys/n/m/u", UnitKind::InputUnit);
    l.record("sys/n/m/u", 0);
    CHECK(l.count("sys/n/m/u", 0) == 1);
    CHECK(l.firings("sys/n/m/u") == 1);
}

TEST_CASE("recording against an unknown unit is an error") {
    ActivityLedger l;
    CHECK_THROWS_AS(l.record("sys/n/m/ghost", 0), ConfigError);
}

TEST_CASE("ledger merge is commutative and associative") {
    Rng rng(3);
    for (int i = 0; i < 300; ++i) {
        const auto a = random_ledger(rng), b = random_ledger(rng), c = random_ledger(rng);
        CHECK(merge(a, b) == merge(b, a));
        CHECK(merge(merge(a, b), c) == merge(a, merge(b, c)));
    }
}

TEST_CASE("one token through three stages is three firings") {
    kernel::Kernel k;
    const auto p = testing::build_pipeline(k, {{SimTime{10}, SimTime{10}}, {SimTime{10}, SimTime{10}}, {SimTime{10}, SimTime{10}}},
                                           SimTime{1});
    testing::inject(k, p, 1);
    k.run();
    ActivityLedger l;
    for (std::size_t i = 0; i < p.stages.size(); ++i) {
        const std::string path = k.path(p.stages[i]).str();
        l.add_unit(path, UnitKind::InputUnit);
        for (const auto& [tag, n] : k.actor_as<async::AsyncCtrl>(p.stages[i]).fires_by_tag()) l.record(path, tag, n);
    }
    std::uint64_t total = 0;
    for (const auto& [path, u] : l.units()) total += u.firings();
    CHECK(total == 3);
}

TEST_CASE("an idle input unit leaks 63 pJ in one microsecond") {
    ActivityLedger l;
    l.add_unit("sys/n/router/in", UnitKind::InputUnit);
    CHECK(energy_total_pj(l, hw::default_tech(), SimTime{1'000'000}) == 63.0);
    CHECK(leakage_fj(63'000, 1, SimTime{1'000'000}) == 63'000);
}

TEST_CASE("no activity and no time costs nothing") {
    ActivityLedger l;
    l.add_unit("sys/n/router/in", UnitKind::InputUnit);
    CHECK(energy_total_pj(l, hw::default_tech(), SimTime{}) == 0.0);
}

TEST_CASE("dynamic energy is linear in firings") {
    auto t = zero_tech();
    t.set(UnitKind::InputUnit, hw::UnitTech{SimTime{1}, SimTime{1}, 0, 0.0, 2000});
    ActivityLedger l;
    l.add_unit("sys/n/router/in", UnitKind::InputUnit);
    l.record("sys/n/router/in", 0, 10);
    CHECK(energy_total_pj(l, t, SimTime{5'000'000}) == 20.0);
}

TEST_CASE("a unit kind missing from the technology is named in the error") {
    hw::TechParams t;
    t.set(UnitKind::InputUnit, hw::default_tech().at(UnitKind::InputUnit));
    ActivityLedger l;
    l.add_unit("sys/n/nic/tx", UnitKind::Nic);
    try {
        energy_total_pj(l, t, SimTime{1});
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("nic") != std::string::npos);
    }
}

TEST_CASE("router area adds up per node and vanishes for an empty mesh") {
    auto t = zero_tech();
    for (auto k : {UnitKind::InputUnit, UnitKind::OutputUnit, UnitKind::SwitchAllocator}) t.set(k, hw::default_tech().at(k));
    hw::ArchConfig a;
    a.rows = a.cols = 1;
    CHECK(area_total(a, t) == doctest::Approx(186179.0));
    a.rows = a.cols = 2;
    CHECK(area_total(a, t) == doctest::Approx(4 * 186179.0));
    a.rows = 0;
    CHECK(area_total(a, t) == 0.0);
}

TEST_CASE("total area counts two NIC halves and every PE slot") {
    const auto t = hw::default_tech();
    hw::ArchConfig a;
    a.rows = 2;
    a.cols = 3;
    a.neurons_per_pe = 4;
    const double node = 186179.0 + 2 * 6400.0 + 4 * (96.0 + 210.0 + 150.0);
    CHECK(area_total(a, t) == doctest::Approx(6 * node));
}

TEST_CASE("EDP of two known frame measurements") {
    // 9.05 uJ over 29.99 us, and 6.47 uJ over 28.46 us.
    CHECK(std::abs(edp(9.05e6, SimTime{29'990'000}) - 0.27) <= 0.005);
    CHECK(std::abs(edp(6.47e6, SimTime{28'460'000}) - 0.184) <= 0.005);
    CHECK(edp(0.0, SimTime{28'460'000}) == 0.0);
    CHECK(edp(1000.0, SimTime{1'000'000'000'000}) == doctest::Approx(1.0));  // 1 nJ for 1 s
}

TEST_CASE("picojoule rendering rounds half up to two decimals") {
    CHECK(format_pj(0) == "0.00");
    CHECK(format_pj(4) == "0.00");
    CHECK(format_pj(5) == "0.01");
    CHECK(format_pj(63'000) == "63.00");
    CHECK(format_pj(1'234'565) == "1234.57");
    CHECK(format_pj(-15) == "-0.02");
}

namespace {

hw::ArchConfig arch(std::uint32_t r, std::uint32_t c, std::uint32_t npe) {
    hw::ArchConfig a;
    a.rows = r;
    a.cols = c;
    a.neurons_per_pe = npe;
    return a;
}

std::int64_t row_energy(const std::vector<LayerRow>& rows, std::int32_t layer) {
    for (const auto& r : rows)
        if (r.layer == layer) return r.energy_fj;
    return 0;
}

}  // namespace

TEST_CASE("layer rows match a hand count on a three-layer net") {
    // Two neurons per layer, every weight 100 over a threshold of 50, both
    // inputs spike once. Each delivery phase: 2 lookups, 4 fetches, 4
    // updates; each spike crosses the local port as one flit.
    const auto model = testing::fc_chain({2, 2, 2}, 100, 50);
    workload::SpikeTrace in{model.hash(), 1, {{0, 0, 0}, {0, 0, 1}}};
    const auto sim = hw::simulate(arch(1, 1, 8), hw::default_tech(), model, in);
    const auto rows = layer_breakdown(sim.ledger, hw::default_tech(), sim.layer_latency);
    const std::int64_t pe_phase = 2 * 550 + 4 * 1100 + 4 * 750;
    CHECK(row_energy(rows, 0) == pe_phase);
    CHECK(row_energy(rows, 1) == pe_phase);
    CHECK(row_energy(rows, 2) == 0);
    const std::int64_t per_flit = 2 * 360 + 420 + 240 + 310;  // tx, rx, in, sa, out
    CHECK(row_energy(rows, kInterconnectRow) == 4 * per_flit);
}

TEST_CASE("a silent second layer leaves its row at zero") {
    const auto model = testing::fc_chain({3, 2, 2}, 1, 1000);
    workload::SpikeTrace in{model.hash(), 1, {{0, 0, 0}, {0, 0, 2}}};
    const auto sim = hw::simulate(arch(1, 2, 4), hw::default_tech(), model, in);
    const auto rows = layer_breakdown(sim.ledger, hw::default_tech(), sim.layer_latency);
    CHECK(row_energy(rows, 0) > 0);
    CHECK(row_energy(rows, 1) == 0);
    CHECK(row_energy(rows, 2) == 0);
}

TEST_CASE("a single-layer net has one PE row holding all PE energy") {
    const auto model = testing::fc_chain({4, 3}, 30, 20);
    const auto in = workload::generate_input(model, 1.0, 1);
    const auto sim = hw::simulate(arch(1, 1, 8), hw::default_tech(), model, in);
    const auto r = make_report(arch(1, 1, 8), hw::default_tech(), sim);
    std::int64_t pe = 0;
    for (const auto& u : r.units)
        if (!hw::is_interconnect(u.kind)) pe += u.dynamic_fj;
    std::int64_t rows = 0;
    int nonzero = 0;
    for (const auto& l : r.layers)
        if (l.layer != kInterconnectRow) {
            rows += l.energy_fj;
            nonzero += l.energy_fj > 0;
        }
    CHECK(nonzero == 1);
    CHECK(rows == pe);
}

TEST_CASE("report energy equals per-unit dynamic plus leakage, exactly") {
    Rng rng(99);
    const auto tech = hw::default_tech();
    for (int trial = 0; trial < 20; ++trial) {
        const auto model = testing::random_model(rng, 48, 4);
        const auto a = testing::random_arch(rng, model);
        const auto sim = hw::simulate(a, tech, model, workload::generate_input(model, 0.5, trial));
        const auto r = make_report(a, tech, sim);
        // Independent recount from the ledger and the technology table.
        std::int64_t dyn = 0, leak = 0;
        for (const auto& [path, u] : sim.ledger.units()) {
            dyn += static_cast<std::int64_t>(u.firings()) * tech.at(u.kind).dynamic_fj;
            const long double fj = static_cast<long double>(tech.at(u.kind).leakage_nw) * u.multiplier *
                                   static_cast<long double>(sim.stats.final_time.ps) / 1e6L;
            leak += static_cast<std::int64_t>(std::llround(fj));
        }
        CHECK(r.dynamic_fj == dyn);
        CHECK(r.leakage_fj == leak);
        std::int64_t sum = 0;
        for (const auto& u : r.units) sum += u.dynamic_fj + u.leakage_fj;
        CHECK(r.energy_fj() == sum);
        std::int64_t layer_sum = 0, pe = 0;
        for (const auto& l : r.layers) layer_sum += l.energy_fj;
        for (const auto& u : r.units) pe += u.dynamic_fj;
        CHECK(layer_sum == pe);
    }
}

TEST_CASE("adding input spikes never lowers energy") {
    Rng rng(5);
    const auto tech = hw::default_tech();
    for (int trial = 0; trial < 15; ++trial) {
        const auto model = testing::random_model(rng, 40, 3);
        const auto a = testing::random_arch(rng, model);
        const auto full = workload::generate_input(model, 0.6, trial);
        workload::SpikeTrace part = full;
        part.records.clear();
        for (const auto& r : full.records)
            if (uniform01(rng) < 0.5) part.records.push_back(r);
        const auto e_part = make_report(a, tech, hw::simulate(a, tech, model, part)).energy_fj();
        const auto e_full = make_report(a, tech, hw::simulate(a, tech, model, full)).energy_fj();
        CHECK(e_part <= e_full);
    }
}

TEST_CASE("a report survives a format and parse round trip") {
    Rng rng(8);
    const auto model = testing::random_model(rng, 40, 3);
    const auto a = testing::random_arch(rng, model);
    const auto r = make_report(a, hw::default_tech(), hw::simulate(a, hw::default_tech(), model, workload::generate_input(model, 0.5, 2)));
    const auto text = format_report(r);
    const auto back = parse_report(text, "mem");
    CHECK(format_report(back) == text);
    CHECK(back.energy_fj() == r.energy_fj());
    CHECK(back.latency == r.latency);
    CHECK(back.units.size() == r.units.size());
    CHECK_THROWS_AS(parse_report("format_version,2\n", "mem"), ParseError);
}
