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

#include "hsnn/search/rl_search.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "hsnn/core/error.hpp"
#include "hsnn/core/kv_file.hpp"

namespace hsnn::search {

RewardSpec parse_reward_spec(std::string_view text, const std::string& origin) {
    KvDocument doc = KvDocument::parse(text, origin);
    if (doc.require_int("format_version") != 1) throw ParseError(origin + ": unsupported format_version");
    RewardSpec s;
    for (int i = 0; i < 3; ++i) {
        if (auto v = doc.take_double("p" + std::to_string(i))) s.p[i] = *v;
        if (auto v = doc.take_double("q" + std::to_string(i))) s.q[i] = *v;
        if (!std::isfinite(s.p[i]) || !std::isfinite(s.q[i])) throw ValidationError(origin + ": exponents must be finite");
    }
    s.targets.latency_ps = doc.require_double("t_latency_ns") * 1000.0;
    s.targets.energy_pj = doc.require_double("t_energy_pj");
    s.targets.area_um2 = doc.require_double("t_area_um2");
    if (!(s.targets.latency_ps > 0) || !(s.targets.energy_pj > 0) || !(s.targets.area_um2 > 0))
        throw ValidationError(origin + ": targets must be positive");
    if (auto m = doc.take("mode")) {
        if (*m == "joint") s.mode = RewardMode::Joint;
        else if (*m == "per_metric") s.mode = RewardMode::PerMetric;
        else throw ParseError(origin + ": mode must be joint or per_metric");
    }
    doc.reject_unknown();
    return s;
}

RewardSpec load_reward_spec(const std::filesystem::path& path) {
    return parse_reward_spec(read_file(path), path.string());
}

std::string format_reward_spec(const RewardSpec& s) {
    std::ostringstream os;
    os.precision(17);
    os << "format_version = 1\n";
    for (int i = 0; i < 3; ++i) os << 'p' << i << " = " << s.p[i] << '\n';
    for (int i = 0; i < 3; ++i) os << 'q' << i << " = " << s.q[i] << '\n';
    os << "t_latency_ns = " << s.targets.latency_ps / 1000.0 << '\n'
       << "t_energy_pj = " << s.targets.energy_pj << '\n'
       << "t_area_um2 = " << s.targets.area_um2 << '\n'
       << "mode = " << (s.mode == RewardMode::Joint ? "joint" : "per_metric") << '\n';
    return os.str();
}

PpaPoint point_of(const ppa::PpaReport& r) {
    return PpaPoint{static_cast<double>(r.latency.ps), r.energy_pj(), r.area_um2};
}

std::vector<std::string> violated_targets(const PpaPoint& p, const ppa::PpaTargets& t) {
    std::vector<std::string> v;
    if (!(p.latency_ps <= t.latency_ps)) v.push_back("latency");
    if (!(p.energy_pj <= t.energy_pj)) v.push_back("energy");
    if (!(p.area_um2 <= t.area_um2)) v.push_back("area");
    return v;
}

double reward(double accuracy, const PpaPoint& ppa, const RewardSpec& spec) {
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ValidationError("accuracy must lie in [0, 1]");
    const std::array<double, 3> value{ppa.latency_ps, ppa.energy_pj, ppa.area_um2};
    const std::array<double, 3> target{spec.targets.latency_ps, spec.targets.energy_pj, spec.targets.area_um2};
    static const char* names[] = {"latency", "energy", "area"};
    for (int i = 0; i < 3; ++i) {
        if (!(value[i] > 0.0)) throw ValidationError(std::string("reward needs a positive ") + names[i]);
        if (!(target[i] > 0.0)) throw ValidationError(std::string("reward needs a positive ") + names[i] + " target");
    }
    const bool joint = value[0] <= target[0] && value[1] <= target[1] && value[2] <= target[2];
    double r = accuracy;
    for (int i = 0; i < 3; ++i) {
        // An infinite target leaves its metric unconstrained: the factor is 1.
        if (std::isinf(target[i])) continue;
        const bool ok = spec.mode == RewardMode::Joint ? joint : value[i] <= target[i];
        r *= std::pow(value[i] / target[i], ok ? spec.p[i] : spec.q[i]);
    }
    return r;
}

ActionKey key_of(const SearchAction& a) {
    const std::int32_t sign = a.delta > 0 ? 1 : (a.delta < 0 ? -1 : 0);
    const bool targeted = a.kind == ActionKind::Partitioning || a.kind == ActionKind::Mapping;
    return ActionKey{a.kind, targeted ? a.target : 0, sign};
}

double QTable::get(const RlState& s, const ActionKey& a) const {
    const auto it = values_.find({s, a});
    return it == values_.end() ? 0.0 : it->second;
}

void QTable::set(const RlState& s, const ActionKey& a, double value) { values_[{s, a}] = value; }

double QTable::max_value(const RlState& s, const std::vector<ActionKey>& actions) const {
    if (actions.empty()) return 0.0;
    double best = get(s, actions.front());
    for (const auto& a : actions) best = std::max(best, get(s, a));
    return best;
}

void q_update(QTable& table, const RlState& s, const ActionKey& a, double r, const RlState& next,
              const std::vector<ActionKey>& next_actions, double alpha, double gamma) {
    const double q = table.get(s, a);
    table.set(s, a, q + alpha * (r + gamma * table.max_value(next, next_actions) - q));
}

SearchAction select_action(const QTable& table, const RlState& s, const std::vector<SearchAction>& legal,
                           double epsilon, Rng& rng) {
    if (legal.empty()) throw ValidationError("no legal action: the search bounds are degenerate");
    if (uniform01(rng) < epsilon) return legal[uniform_index(rng, legal.size())];
    std::size_t best = 0;
    double best_q = table.get(s, key_of(legal[0]));
    for (std::size_t i = 1; i < legal.size(); ++i) {
        const double q = table.get(s, key_of(legal[i]));
        if (q > best_q) {
            best_q = q;
            best = i;
        }
    }
    return legal[best];
}

Environment::Environment(workload::SnnModel model, workload::SpikeTrace input, hw::TechParams tech,
                         SearchBounds bounds, RewardSpec spec, double accuracy, hw::SimOptions options,
                         std::uint32_t buckets)
    : model_(std::move(model)),
      input_(std::move(input)),
      tech_(std::move(tech)),
      bounds_(std::move(bounds)),
      spec_(spec),
      accuracy_(accuracy),
      options_(options),
      buckets_(buckets) {
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ValidationError("accuracy must lie in [0, 1]");
}

const Evaluation& Environment::evaluate(const hw::ArchConfig& arch) {
    const std::string key = hw::format_arch(canonicalize(arch, model_));
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
    Evaluation e;
    try {
        ++simulations_;
        const auto sim = hw::simulate(arch, tech_, model_, input_, options_);
        e.report = ppa::make_report(arch, tech_, sim);
        if (e.report.truncated) throw Error("simulation hit its time limit");
        e.state = encode_state(sim.traffic, buckets_);
        const PpaPoint p = point_of(e.report);
        e.reward = reward(accuracy_, p, spec_);
        e.feasible = violated_targets(p, spec_.targets).empty();
        e.ok = true;
    } catch (const Error& err) {
        e.ok = false;
        e.error = err.what();
    }
    return cache_.emplace(key, std::move(e)).first->second;
}

SearchResult run_search(const hw::ArchConfig& initial, Environment& env, const SearchConfig& config) {
    if (config.episodes == 0) throw ValidationError("search budget must be at least one episode");
    {
        const auto v = validate(initial, env.bounds(), env.model());
        if (!v.empty()) throw ValidationError("initial architecture is invalid: " + v.front());
    }
    Rng rng(config.seed);
    QTable table;
    SearchResult result;
    const std::size_t sims_before = env.simulations();

    hw::ArchConfig arch = canonicalize(initial, env.model());
    std::string action_label = "initial";
    struct Previous {
        RlState state;
        ActionKey action;
        hw::ArchConfig arch;
    };
    std::optional<Previous> prev;
    bool have_best = false;

    for (std::size_t ep = 0; ep < config.episodes; ++ep) {
        const Evaluation& eval = env.evaluate(arch);
        EpisodeRecord rec;
        rec.episode = ep;
        rec.arch = arch;
        rec.action = action_label;
        rec.ok = eval.ok;
        rec.error = eval.error;
        rec.reward = eval.reward;
        rec.feasible = eval.feasible;
        rec.report = eval.report;
        result.history.push_back(rec);

        RlState state;
        if (!eval.ok) {
            if (!prev) throw Error("initial architecture failed to simulate: " + eval.error);
            arch = prev->arch;
            state = prev->state;
        } else {
            state = eval.state;
            if (!have_best || eval.reward > result.best_reward) {
                have_best = true;
                result.best_reward = eval.reward;
                result.best_arch = arch;
            }
        }

        const auto legal = legal_actions(arch, env.bounds(), env.model());
        std::vector<ActionKey> keys;
        keys.reserve(legal.size());
        for (const auto& a : legal) keys.push_back(key_of(a));
        if (eval.ok && prev) q_update(table, prev->state, prev->action, eval.reward, state, keys, config.alpha, config.gamma);
        if (ep + 1 == config.episodes) break;

        const double frac = config.episodes > 1 ? static_cast<double>(ep) / static_cast<double>(config.episodes - 1) : 0.0;
        const double eps = config.epsilon_start + (config.epsilon_end - config.epsilon_start) * frac;
        const SearchAction a = select_action(table, state, legal, eps, rng);
        prev = Previous{state, key_of(a), arch};
        arch = apply_action(arch, a, env.bounds(), env.model());
        action_label = to_string(a);
    }
    if (!have_best) throw Error("no architecture simulated successfully");
    result.simulations = env.simulations() - sims_before;
    return result;
}

std::string arch_label(const hw::ArchConfig& a) {
    char buf[64];
    std::string out = std::to_string(a.rows) + "x" + std::to_string(a.cols) + ":npe=" + std::to_string(a.neurons_per_pe) +
                      ":fifo=" + std::to_string(a.fifo_depth_per_port) + ":" + hw::to_string(a.arbitration) + ":";
    if (!a.mapping) return out + "canonical";
    std::snprintf(buf, sizeof buf, "map=%016llx",
                  static_cast<unsigned long long>(fnv1a64(workload::format_mapping(*a.mapping))));
    return out + buf;
}

std::string format_history(const SearchResult& r) {
    std::ostringstream os;
    os << "format_version,1\n";
    os << "episode,status,reward,latency_ns,energy_pj,area_um2,edp_snj,feasible,arch,action\n";
    char buf[256];
    for (const auto& e : r.history) {
        if (!e.ok) {
            os << e.episode << ",failed,,,,,,," << arch_label(e.arch) << ',' << e.action << '\n';
            continue;
        }
        std::snprintf(buf, sizeof buf, "%zu,ok,%.12g,%.3f,%s,%.3f,%.6e,%s,", e.episode, e.reward,
                      e.report.latency.ns(), ppa::format_pj(e.report.energy_fj()).c_str(), e.report.area_um2,
                      e.report.edp(), e.feasible ? "true" : "false");
        os << buf << arch_label(e.arch) << ',' << e.action << '\n';
    }
    return os.str();
}

}  // namespace hsnn::search
