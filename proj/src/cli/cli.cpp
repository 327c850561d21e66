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

#include "hsnn/cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <vector>

#include "hsnn/coexplore/coexplore.hpp"
#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"
#include "hsnn/search/rl_search.hpp"

namespace fs = std::filesystem;

namespace hsnn::cli {
namespace {

struct Common {
    std::string out;
    bool force = false;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string tech;
    double time_limit_ns = 0.0;
};

// Records the command line in manifest.txt so a run can be reproduced.
class RunManifest {
public:
    RunManifest(std::string command, const Common& c) : command_(std::move(command)), common_(c) {}
    void add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

    std::string str() const {
        std::ostringstream os;
        os << "format_version = 1\n"
           << "command = " << command_ << '\n';
        for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
        os << "tech = " << (common_.tech.empty() ? "builtin" : common_.tech) << '\n'
           << "seed = " << common_.seed << '\n'
           << "workers = " << common_.workers << '\n'
           << "out = " << common_.out << '\n';
        return os.str();
    }

private:
    std::string command_;
    Common common_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

void add_common(CLI::App& app, Common& c, bool with_time_limit) {
    app.add_option("--out", c.out, "Output directory")->required();
    app.add_flag("--force", c.force, "Write into an existing output directory");
    app.add_option("--seed", c.seed, "Seed for generated traces and search");
    app.add_option("--workers", c.workers, "Kernel worker threads")->check(CLI::Range(1u, 1024u));
    app.add_option("--tech", c.tech, "Technology file (default: built-in table)");
    if (with_time_limit) app.add_option("--time-limit", c.time_limit_ns, "Stop simulation at this time (ns)");
}

void prepare_out(const Common& c) {
    const fs::path dir(c.out);
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) throw ValidationError("output path is not a directory: " + c.out);
        if (!fs::is_empty(dir) && !c.force)
            throw ValidationError("output directory is not empty: " + c.out + " (pass --force to overwrite)");
    }
    fs::create_directories(dir);
}

hw::TechParams tech_of(const Common& c) { return c.tech.empty() ? hw::default_tech() : hw::load_tech(c.tech); }

hw::SimOptions sim_of(const Common& c) {
    hw::SimOptions o;
    o.workers = c.workers;
    if (c.time_limit_ns > 0.0) o.time_limit = SimTime::from_ps(static_cast<std::uint64_t>(std::llround(c.time_limit_ns * 1000.0)));
    return o;
}

struct TraceArgs {
    std::string trace;
    bool gen = false;
    double rate = 0.5;
};

void add_trace(CLI::App& app, TraceArgs& t) {
    auto* trace = app.add_option("--trace", t.trace, "Input spike trace");
    auto* gen = app.add_flag("--gen-trace", t.gen, "Generate a Bernoulli input trace from --seed");
    trace->excludes(gen);
    app.add_option("--rate", t.rate, "Spike rate for --gen-trace")->check(CLI::Range(0.0, 1.0));
}

workload::SpikeTrace input_of(const TraceArgs& t, const workload::SnnModel& model, const Common& c,
                              RunManifest& manifest) {
    if (t.gen) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "gen:%.17g:%llu", t.rate, static_cast<unsigned long long>(c.seed));
        manifest.add("trace", buf);
        return workload::generate_input(model, t.rate, c.seed);
    }
    if (t.trace.empty()) throw ValidationError("one of --trace or --gen-trace is required");
    manifest.add("trace", t.trace);
    return workload::load_trace(t.trace, &model);
}

int cmd_simulate(const std::string& arch_path, const std::string& model_path, const TraceArgs& ta, const Common& c,
                 std::ostream& out) {
    const auto arch = hw::load_arch(arch_path);
    const auto model = workload::load_model(model_path);
    const auto tech = tech_of(c);
    RunManifest manifest("simulate", c);
    manifest.add("arch", arch_path);
    manifest.add("model", model_path);
    const auto input = input_of(ta, model, c, manifest);
    prepare_out(c);

    const auto sim = hw::simulate(arch, tech, model, input, sim_of(c));
    const auto report = ppa::make_report(arch, tech, sim);
    const fs::path dir(c.out);
    write_file(dir / "manifest.txt", manifest.str());
    write_file(dir / "report.txt", ppa::format_report(report));
    save_trace(input, dir / "input_trace.txt");
    save_trace(sim.spikes, dir / "spikes.txt");
    char buf[256];
    std::snprintf(buf, sizeof buf, "latency %.3f ns, energy %s pJ, area %.3f um2, edp %.6e s*nJ%s\n",
                  report.latency.ns(), ppa::format_pj(report.energy_fj()).c_str(), report.area_um2, report.edp(),
                  report.truncated ? " (truncated)" : "");
    out << buf;
    return kExitOk;
}

search::RewardSpec spec_of(const std::string& path) { return search::load_reward_spec(path); }

int cmd_search(const std::string& bounds_path, const std::string& spec_path, const std::string& model_path,
               const std::string& initial_path, const TraceArgs& ta, double accuracy, std::size_t episodes,
               const Common& c, std::ostream& out) {
    const auto bounds = search::load_bounds(bounds_path);
    const auto spec = spec_of(spec_path);
    const auto model = workload::load_model(model_path);
    const auto tech = tech_of(c);
    RunManifest manifest("search", c);
    manifest.add("bounds", bounds_path);
    manifest.add("reward_spec", spec_path);
    manifest.add("model", model_path);
    const auto input = input_of(ta, model, c, manifest);
    manifest.add("accuracy", std::to_string(accuracy));
    manifest.add("episodes", std::to_string(episodes));

    hw::ArchConfig initial;
    if (!initial_path.empty()) {
        initial = hw::load_arch(initial_path);
        manifest.add("initial_arch", initial_path);
    } else {
        const auto space = search::enumerate(bounds, model);
        if (space.empty()) throw ValidationError(bounds_path + ": no architecture inside the bounds fits the model");
        initial = space.front();
    }
    prepare_out(c);

    search::Environment env(model, input, tech, bounds, spec, accuracy, sim_of(c));
    search::SearchConfig sc;
    sc.episodes = episodes;
    sc.seed = c.seed;
    const auto result = search::run_search(initial, env, sc);

    const fs::path dir(c.out);
    write_file(dir / "manifest.txt", manifest.str());
    write_file(dir / "history.csv", search::format_history(result));
    hw::save_arch(result.best_arch, dir / "best_arch.txt");
    for (const auto& e : result.history)
        if (e.ok && hw::format_arch(e.arch) == hw::format_arch(result.best_arch)) {
            write_file(dir / "report.txt", ppa::format_report(e.report));
            break;
        }
    out << "best reward " << result.best_reward << " after " << result.history.size() << " episodes ("
        << result.simulations << " simulations): " << search::arch_label(result.best_arch) << '\n';
    return kExitOk;
}

int cmd_coexplore(const std::string& manifest_path, const std::string& bounds_path, const std::string& spec_path,
                  std::size_t budget, const Common& c, std::ostream& out) {
    const auto candidates = coexplore::load_manifest(manifest_path);
    const auto bounds = search::load_bounds(bounds_path);
    const auto spec = spec_of(spec_path);
    RunManifest manifest("coexplore", c);
    manifest.add("manifest", manifest_path);
    manifest.add("bounds", bounds_path);
    manifest.add("reward_spec", spec_path);
    manifest.add("budget", std::to_string(budget));
    coexplore::CoExploreConfig cfg;
    cfg.budget = budget;
    cfg.seed = c.seed;
    cfg.tech = tech_of(c);
    cfg.sim = sim_of(c);
    prepare_out(c);

    const auto result = coexplore::co_explore(candidates.candidates, bounds, spec, candidates.accuracy, cfg);
    const fs::path dir(c.out);
    write_file(dir / "manifest.txt", manifest.str());
    write_file(dir / "coexplore.csv", coexplore::format_result(result));
    if (result.best) {
        const auto& d = result.dispositions[*result.best];
        hw::save_arch(*d.arch, dir / "best_arch.txt");
        write_file(dir / "report.txt", ppa::format_report(*d.report));
        out << "winner " << d.id << " (full accuracy " << *d.full_accuracy << "): " << search::arch_label(*d.arch)
            << '\n';
    } else {
        out << "no candidate met the targets";
        if (result.nearest_miss) out << "; nearest miss " << result.dispositions[*result.nearest_miss].id;
        out << '\n';
    }
    return kExitOk;
}

std::string render_table(const ppa::PpaReport& r) {
    std::ostringstream os;
    char buf[256];
    os << "PPA report" << (r.truncated ? " [TRUNCATED]" : "") << '\n';
    std::snprintf(buf, sizeof buf, "  latency        %14.3f ns\n", r.latency.ns());
    os << buf;
    std::snprintf(buf, sizeof buf, "  energy         %14s pJ\n", ppa::format_pj(r.energy_fj()).c_str());
    os << buf;
    std::snprintf(buf, sizeof buf, "    dynamic      %14s pJ\n", ppa::format_pj(r.dynamic_fj).c_str());
    os << buf;
    std::snprintf(buf, sizeof buf, "    leakage      %14s pJ\n", ppa::format_pj(r.leakage_fj).c_str());
    os << buf;
    std::snprintf(buf, sizeof buf, "  area           %14.3f um2\n", r.area_um2);
    os << buf;
    // Desk-scale runs have EDP far below 0.01 s*nJ; keep two significant
    // decimals visible there.
    const double edp = r.edp();
    if (edp >= 0.005 || edp == 0.0) std::snprintf(buf, sizeof buf, "  EDP            %14.2f s*nJ\n", edp);
    else std::snprintf(buf, sizeof buf, "  EDP            %14.2e s*nJ\n", edp);
    os << buf;
    std::snprintf(buf, sizeof buf, "  events         %14llu processed, %llu posted\n",
                  static_cast<unsigned long long>(r.events_processed), static_cast<unsigned long long>(r.events_posted));
    os << buf;
    os << "\nlayer          energy (pJ)    latency (ns)\n";
    for (const auto& l : r.layers) {
        const std::string name = l.layer == ppa::kInterconnectRow ? "interconnect" : std::to_string(l.layer);
        if (l.layer == ppa::kInterconnectRow)
            std::snprintf(buf, sizeof buf, "%-12s %14s %15s\n", name.c_str(), ppa::format_pj(l.energy_fj).c_str(), "-");
        else
            std::snprintf(buf, sizeof buf, "%-12s %14s %15.3f\n", name.c_str(), ppa::format_pj(l.energy_fj).c_str(),
                          l.latency.ns());
        os << buf;
    }
    return os.str();
}

int cmd_report(const std::string& run_dir, const std::string& format, std::ostream& out) {
    const fs::path dir(run_dir);
    if (!fs::is_directory(dir)) throw ValidationError("run directory not found: " + run_dir);
    if (!fs::exists(dir / "manifest.txt")) throw ValidationError("run directory has no manifest.txt: " + run_dir);
    const fs::path path = dir / "report.txt";
    if (!fs::exists(path)) throw ValidationError("run directory has no report.txt: " + run_dir);
    const auto report = ppa::load_report(path);
    if (format == "csv") out << ppa::format_report(report);
    else out << render_table(report);
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Event-driven simulation and architecture search for asynchronous SNN accelerators", "hsnn"};
    app.require_subcommand(1);

    Common sim_c, search_c, co_c;
    TraceArgs sim_t, search_t;
    std::string arch_path, model_path, search_model, bounds_path, spec_path, initial_path;
    std::string co_manifest, co_bounds, co_spec, run_dir, format = "table";
    double accuracy = 1.0;
    std::size_t episodes = 100, budget = 300;

    auto* sim = app.add_subcommand("simulate", "Simulate one architecture and write a PPA report");
    sim->add_option("--arch", arch_path, "Architecture file")->required();
    sim->add_option("--model", model_path, "SNN model file")->required();
    add_trace(*sim, sim_t);
    add_common(*sim, sim_c, true);

    auto* srch = app.add_subcommand("search", "Q-learning search over an architecture space");
    srch->add_option("--bounds", bounds_path, "Search bounds file")->required();
    srch->add_option("--reward-spec", spec_path, "Reward specification file")->required();
    srch->add_option("--model", search_model, "SNN model file")->required();
    srch->add_option("--initial-arch", initial_path, "Starting architecture (default: first in bounds)");
    srch->add_option("--accuracy", accuracy, "Accuracy used in the reward")->check(CLI::Range(0.0, 1.0));
    srch->add_option("--episodes", episodes, "Episode budget")->check(CLI::PositiveNumber);
    add_trace(*srch, search_t);
    add_common(*srch, search_c, true);

    auto* co = app.add_subcommand("coexplore", "Search every candidate SNN and pick the best feasible pair");
    co->add_option("--manifest", co_manifest, "Candidate manifest")->required();
    co->add_option("--bounds", co_bounds, "Search bounds file")->required();
    co->add_option("--reward-spec", co_spec, "Reward specification file")->required();
    co->add_option("--budget", budget, "Total episode budget")->check(CLI::PositiveNumber);
    add_common(*co, co_c, true);

    auto* rep = app.add_subcommand("report", "Render a stored report");
    rep->add_option("--run-dir", run_dir, "Output directory of a previous run")->required();
    rep->add_option("--format", format, "table or csv")->check(CLI::IsMember({"table", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    try {
        if (*sim) return cmd_simulate(arch_path, model_path, sim_t, sim_c, out);
        if (*srch) return cmd_search(bounds_path, spec_path, search_model, initial_path, search_t, accuracy, episodes,
                                     search_c, out);
        if (*co) return cmd_coexplore(co_manifest, co_bounds, co_spec, budget, co_c, out);
        return cmd_report(run_dir, format, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace hsnn::cli
