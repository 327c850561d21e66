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

#include "hsnn/coexplore/coexplore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"
#include "hsnn/core/rng.hpp"

namespace hsnn::coexplore {

const char* to_string(Stage stage) { return stage == Stage::Partial ? "partial" : "full"; }

AccuracyProvider AccuracyProvider::constant(double accuracy) {
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ValidationError("accuracy must lie in [0, 1]");
    AccuracyProvider p;
    p.constant_ = accuracy;
    return p;
}

void AccuracyProvider::set(const std::string& candidate, Stage stage, double accuracy) {
    if (!(accuracy >= 0.0 && accuracy <= 1.0))
        throw ValidationError("accuracy for candidate '" + candidate + "' must lie in [0, 1]");
    table_[{candidate, stage}] = accuracy;
}

bool AccuracyProvider::covers(const std::string& candidate, Stage stage) const {
    return constant_ || table_.count({candidate, stage}) != 0;
}

double AccuracyProvider::get(const std::string& candidate, Stage stage) const {
    if (const auto it = table_.find({candidate, stage}); it != table_.end()) return it->second;
    if (constant_) return *constant_;
    throw ValidationError("no " + std::string(to_string(stage)) + " accuracy for candidate '" + candidate + "'");
}

Manifest parse_manifest(std::string_view text, const std::string& origin, const std::filesystem::path& base_dir) {
    Manifest m;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    bool seen_version = false, seen_header = false;
    const auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto cols = split(t, ',');
        if (!seen_version) {
            if (cols.size() != 2 || trim(cols[0]) != "format_version" || trim(cols[1]) != "1")
                throw ParseError(where + ": expected 'format_version,1'");
            seen_version = true;
            continue;
        }
        if (!seen_header) {
            if (t != "id,model,trace,partial,full") throw ParseError(where + ": expected header 'id,model,trace,partial,full'");
            seen_header = true;
            continue;
        }
        if (cols.size() != 5) throw ParseError(where + ": expected 5 columns");
        Candidate c;
        c.id = std::string(trim(cols[0]));
        if (c.id.empty()) throw ParseError(where + ": empty candidate id");
        for (const auto& other : m.candidates)
            if (other.id == c.id) throw ValidationError(where + ": duplicate candidate id '" + c.id + "'");
        const auto model_path = resolve(std::string(trim(cols[1])));
        c.model = workload::load_model(model_path);
        m.files.push_back(model_path);
        const std::string trace(trim(cols[2]));
        if (trace.rfind("gen:", 0) == 0) {
            const auto parts = split(trace, ':');
            if (parts.size() != 3) throw ParseError(where + ": generated trace must read gen:<rate>:<seed>");
            const double rate = parse_double(parts[1], where + ": rate");
            const auto seed = parse_int(parts[2], where + ": seed");
            if (!(rate >= 0.0 && rate <= 1.0)) throw ValidationError(where + ": rate must lie in [0, 1]");
            if (seed < 0) throw ValidationError(where + ": seed must be non-negative");
            c.input = workload::generate_input(c.model, rate, static_cast<std::uint64_t>(seed));
        } else {
            const auto trace_path = resolve(trace);
            c.input = workload::load_trace(trace_path, &c.model);
            m.files.push_back(trace_path);
        }
        m.accuracy.set(c.id, Stage::Partial, parse_double(cols[3], where + ": partial"));
        m.accuracy.set(c.id, Stage::Full, parse_double(cols[4], where + ": full"));
        m.candidates.push_back(std::move(c));
    }
    if (!seen_header) throw ParseError(origin + ": missing format_version or header");
    if (m.candidates.empty()) throw ValidationError(origin + ": manifest lists no candidates");
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    return parse_manifest(read_file(path), path.string(), path.parent_path());
}

std::vector<std::string> prune_check(const search::PpaPoint& ppa, const ppa::PpaTargets& targets) {
    return search::violated_targets(ppa, targets);
}

namespace {

// Worst ratio of measurement to target; below 1 means feasible.
double worst_ratio(const ppa::PpaReport& r, const ppa::PpaTargets& t) {
    const auto p = search::point_of(r);
    return std::max({p.latency_ps / t.latency_ps, p.energy_pj / t.energy_pj, p.area_um2 / t.area_um2});
}

}  // namespace

CoExploreResult co_explore(const std::vector<Candidate>& candidates, const search::SearchBounds& bounds,
                           const search::RewardSpec& spec, const AccuracyProvider& provider,
                           const CoExploreConfig& config) {
    if (candidates.empty()) throw ValidationError("co-exploration needs at least one candidate");
    if (config.budget < candidates.size())
        throw ValidationError("budget of " + std::to_string(config.budget) + " episodes cannot cover " +
                              std::to_string(candidates.size()) + " candidates");
    for (const auto& c : candidates)
        if (!provider.covers(c.id, Stage::Partial))
            throw ValidationError("no partial accuracy for candidate '" + c.id + "'");
    if (const auto v = search::bounds_violations(bounds); !v.empty())
        throw ValidationError("invalid search bounds: " + v.front());

    CoExploreResult result;
    std::size_t remaining = config.budget;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Candidate& c = candidates[i];
        Disposition d;
        d.id = c.id;
        d.partial_accuracy = provider.get(c.id, Stage::Partial);
        // Unspent budget carries forward to later candidates.
        const std::size_t share = remaining / (candidates.size() - i);

        const auto space = search::enumerate(bounds, c.model);
        if (space.empty()) {
            d.reasons.push_back("capacity");
            result.dispositions.push_back(std::move(d));
            continue;
        }
        search::Environment env(c.model, c.input, config.tech, bounds, spec, d.partial_accuracy, config.sim);
        search::SearchConfig sc;
        sc.episodes = share;
        sc.seed = splitmix64(config.seed ^ static_cast<std::uint64_t>(i));
        sc.alpha = config.alpha;
        sc.gamma = config.gamma;
        const auto sr = search::run_search(space.front(), env, sc);
        d.episodes = sr.history.size();
        d.simulations = sr.simulations;
        remaining -= d.episodes;

        const search::EpisodeRecord* chosen = nullptr;
        for (const auto& e : sr.history)
            if (e.ok && e.feasible && (!chosen || e.reward > chosen->reward)) chosen = &e;
        if (chosen) {
            d.survived = true;
            d.arch = chosen->arch;
            d.report = chosen->report;
            d.reward = chosen->reward;
            d.full_accuracy = provider.get(c.id, Stage::Full);
        } else {
            d.arch = sr.best_arch;
            d.reward = sr.best_reward;
            for (const auto& e : sr.history)
                if (e.ok && hw::format_arch(e.arch) == hw::format_arch(sr.best_arch)) {
                    d.report = e.report;
                    break;
                }
            d.reasons = prune_check(search::point_of(*d.report), spec.targets);
        }
        result.dispositions.push_back(std::move(d));
    }

    for (std::size_t i = 0; i < result.dispositions.size(); ++i) {
        const auto& d = result.dispositions[i];
        result.episodes += d.episodes;
        result.simulations += d.simulations;
        if (!d.survived) continue;
        if (!result.best) {
            result.best = i;
            continue;
        }
        const auto& b = result.dispositions[*result.best];
        if (*d.full_accuracy > *b.full_accuracy ||
            (*d.full_accuracy == *b.full_accuracy && d.report->edp() < b.report->edp()))
            result.best = i;
    }
    if (!result.best) {
        double worst = 0.0;
        for (std::size_t i = 0; i < result.dispositions.size(); ++i) {
            const auto& d = result.dispositions[i];
            if (!d.report) continue;
            const double w = worst_ratio(*d.report, spec.targets);
            if (!result.nearest_miss || w < worst) {
                result.nearest_miss = i;
                worst = w;
            }
        }
    }
    return result;
}

std::string format_result(const CoExploreResult& r) {
    std::ostringstream os;
    os << "format_version,1\n";
    os << "best," << (r.best ? r.dispositions[*r.best].id : "") << '\n';
    os << "nearest_miss," << (r.nearest_miss ? r.dispositions[*r.nearest_miss].id : "") << '\n';
    os << "episodes," << r.episodes << '\n';
    os << "simulations," << r.simulations << '\n';
    os << "[candidates]\n";
    os << "id,status,reasons,partial,full,reward,latency_ns,energy_pj,area_um2,edp_snj,episodes,arch\n";
    char buf[256];
    for (const auto& d : r.dispositions) {
        std::string reasons;
        for (const auto& s : d.reasons) reasons += (reasons.empty() ? "" : ";") + s;
        os << d.id << ',' << (d.survived ? "survived" : "pruned") << ',' << reasons << ',';
        std::snprintf(buf, sizeof buf, "%.6g,", d.partial_accuracy);
        os << buf;
        if (d.full_accuracy) {
            std::snprintf(buf, sizeof buf, "%.6g", *d.full_accuracy);
            os << buf;
        }
        os << ',';
        if (d.report) {
            std::snprintf(buf, sizeof buf, "%.12g,%.3f,%s,%.3f,%.6e,", d.reward, d.report->latency.ns(),
                          ppa::format_pj(d.report->energy_fj()).c_str(), d.report->area_um2, d.report->edp());
            os << buf;
        } else {
            os << ",,,,,";
        }
        os << d.episodes << ',' << (d.arch ? search::arch_label(*d.arch) : "") << '\n';
    }
    return os.str();
}

}  // namespace hsnn::coexplore
