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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsnn/core/rng.hpp"
#include "hsnn/hw/hardware.hpp"
#include "hsnn/ppa/ppa.hpp"
#include "hsnn/search/arch_space.hpp"

namespace hsnn::search {

/// `Joint` switches all three weights on joint satisfaction of the targets;
/// `PerMetric` gates each weight on its own target.
enum class RewardMode : std::uint8_t { Joint, PerMetric };

struct RewardSpec {
    std::array<double, 3> p{0.0, 0.0, 0.0};
    std::array<double, 3> q{-1.0, -1.0, -1.0};
    ppa::PpaTargets targets;
    RewardMode mode = RewardMode::Joint;
};

/// Keys p0..p2, q0..q2, t_latency_ns, t_energy_pj, t_area_um2 and
/// mode = joint|per_metric. Targets may be `inf`.
RewardSpec parse_reward_spec(std::string_view text, const std::string& origin);
RewardSpec load_reward_spec(const std::filesystem::path& path);
std::string format_reward_spec(const RewardSpec& spec);

/// The three quantities the reward looks at.
struct PpaPoint {
    double latency_ps = 0.0;
    double energy_pj = 0.0;
    double area_um2 = 0.0;
};

PpaPoint point_of(const ppa::PpaReport& report);

/// Names of the violated targets ("latency", "energy", "area"); equality
/// satisfies a target.
std::vector<std::string> violated_targets(const PpaPoint& ppa, const ppa::PpaTargets& targets);

/// accu * (L/T_L)^w0 * (E/T_E)^w1 * (A/T_A)^w2, skipping infinite targets. Throws ValidationError for an
/// accuracy outside [0, 1] or a non-positive measurement or target.
double reward(double accuracy, const PpaPoint& ppa, const RewardSpec& spec);

/// Q-table key: the action kind, its target, and the sign of its parameter.
struct ActionKey {
    ActionKind kind = ActionKind::Partitioning;
    std::int32_t target = 0;
    std::int32_t sign = 0;
    auto operator<=>(const ActionKey&) const = default;
};

ActionKey key_of(const SearchAction& action);

class QTable {
public:
    /// Unseen entries read as 0.
    double get(const RlState& s, const ActionKey& a) const;
    void set(const RlState& s, const ActionKey& a, double value);
    /// Max over `actions` in state `s`; 0 when `actions` is empty.
    double max_value(const RlState& s, const std::vector<ActionKey>& actions) const;
    std::size_t size() const { return values_.size(); }
    const std::map<std::pair<RlState, ActionKey>, double>& values() const { return values_; }

private:
    std::map<std::pair<RlState, ActionKey>, double> values_;
};

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)).
void q_update(QTable& table, const RlState& s, const ActionKey& a, double r, const RlState& next,
              const std::vector<ActionKey>& next_actions, double alpha, double gamma);

/// With probability epsilon a uniform legal action, otherwise the first
/// action in `legal` with maximal Q. Throws ValidationError when `legal` is
/// empty.
SearchAction select_action(const QTable& table, const RlState& s, const std::vector<SearchAction>& legal,
                           double epsilon, Rng& rng);

struct Evaluation {
    bool ok = false;
    std::string error;
    ppa::PpaReport report;
    RlState state;
    double reward = 0.0;
    bool feasible = false;
};

/// Simulates architectures for one workload, caching by architecture.
class Environment {
public:
    Environment(workload::SnnModel model, workload::SpikeTrace input, hw::TechParams tech, SearchBounds bounds,
                RewardSpec spec, double accuracy, hw::SimOptions options = {}, std::uint32_t buckets = kDefaultBuckets);

    const Evaluation& evaluate(const hw::ArchConfig& arch);

    const workload::SnnModel& model() const { return model_; }
    const SearchBounds& bounds() const { return bounds_; }
    const RewardSpec& spec() const { return spec_; }
    double accuracy() const { return accuracy_; }
    std::size_t simulations() const { return simulations_; }

private:
    workload::SnnModel model_;
    workload::SpikeTrace input_;
    hw::TechParams tech_;
    SearchBounds bounds_;
    RewardSpec spec_;
    double accuracy_;
    hw::SimOptions options_;
    std::uint32_t buckets_;
    std::map<std::string, Evaluation> cache_;
    std::size_t simulations_ = 0;
};

struct SearchConfig {
    std::size_t episodes = 100;
    std::uint64_t seed = 1;
    double alpha = 0.1;
    double gamma = 0.9;
    double epsilon_start = 0.5;
    double epsilon_end = 0.05;
};

struct EpisodeRecord {
    std::size_t episode = 0;
    hw::ArchConfig arch;
    std::string action;  // the action that produced this architecture
    bool ok = false;
    std::string error;
    double reward = 0.0;
    bool feasible = false;
    ppa::PpaReport report;
};

struct SearchResult {
    hw::ArchConfig best_arch;
    double best_reward = 0.0;
    std::vector<EpisodeRecord> history;
    std::size_t simulations = 0;
};

/// One episode per budget unit: evaluate, update Q, pick and apply an action.
/// A failed evaluation reverts to the previous architecture and skips the
/// update.
SearchResult run_search(const hw::ArchConfig& initial, Environment& env, const SearchConfig& config);

/// Short single-token description, e.g. `2x2:npe=8:fifo=4:round_robin:canonical`.
std::string arch_label(const hw::ArchConfig& arch);

/// CSV: episode, status, reward, latency_ns, energy_pj, area_um2, edp_snj,
/// feasible, arch, action.
std::string format_history(const SearchResult& result);

}  // namespace hsnn::search
