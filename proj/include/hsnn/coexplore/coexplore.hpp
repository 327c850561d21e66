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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsnn/search/rl_search.hpp"

namespace hsnn::coexplore {

enum class Stage : std::uint8_t { Partial, Full };

const char* to_string(Stage stage);

/// Stands in for training: returns a fixed accuracy per candidate and stage.
class AccuracyProvider {
public:
    static AccuracyProvider constant(double accuracy);
    static AccuracyProvider table() { return AccuracyProvider{}; }

    void set(const std::string& candidate, Stage stage, double accuracy);
    bool covers(const std::string& candidate, Stage stage) const;
    /// Throws ValidationError when the entry is missing.
    double get(const std::string& candidate, Stage stage) const;

private:
    std::optional<double> constant_;
    std::map<std::pair<std::string, Stage>, double> table_;
};

struct Candidate {
    std::string id;
    workload::SnnModel model;
    workload::SpikeTrace input;
};

/// Manifest rows carry the model and input trace paths plus both accuracies.
/// A trace column of the form `gen:<rate>:<seed>` asks for a generated input.
struct Manifest {
    std::vector<Candidate> candidates;
    AccuracyProvider accuracy = AccuracyProvider::table();
    std::vector<std::filesystem::path> files;  // every file the manifest pulled in
};

Manifest parse_manifest(std::string_view text, const std::string& origin, const std::filesystem::path& base_dir);
Manifest load_manifest(const std::filesystem::path& path);

/// Every violated target; an empty list means all targets hold.
std::vector<std::string> prune_check(const search::PpaPoint& ppa, const ppa::PpaTargets& targets);

struct CoExploreConfig {
    std::size_t budget = 300;
    std::uint64_t seed = 1;
    hw::TechParams tech;
    hw::SimOptions sim;
    double alpha = 0.1;
    double gamma = 0.9;
};

struct Disposition {
    std::string id;
    bool survived = false;
    std::vector<std::string> reasons;
    double partial_accuracy = 0.0;
    std::optional<double> full_accuracy;
    std::optional<hw::ArchConfig> arch;  // best feasible arch, else the search's best
    std::optional<ppa::PpaReport> report;
    double reward = 0.0;
    std::size_t episodes = 0;
    std::size_t simulations = 0;
};

struct CoExploreResult {
    std::optional<std::size_t> best;          // index into dispositions
    std::optional<std::size_t> nearest_miss;  // set when every candidate was pruned
    std::vector<Disposition> dispositions;
    std::size_t episodes = 0;
    std::size_t simulations = 0;
};

/// Searches each candidate with its partial accuracy, prunes those with no
/// feasible architecture in their history, then picks the survivor with the
/// highest full accuracy (ties: lower EDP, then candidate order).
CoExploreResult co_explore(const std::vector<Candidate>& candidates, const search::SearchBounds& bounds,
                           const search::RewardSpec& spec, const AccuracyProvider& provider,
                           const CoExploreConfig& config);

/// Disposition table as CSV.
std::string format_result(const CoExploreResult& result);

}  // namespace hsnn::coexplore
