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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "hsnn/cli/cli.hpp"
#include "hsnn/core/rng.hpp"
#include "hsnn/ppa/ppa.hpp"
#include "hsnn/workload/snn_model.hpp"
#include "hsnn/workload/spike_trace.hpp"

namespace fs = std::filesystem;
using namespace hsnn;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

Outcome hsnn_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "hsnn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Outcome o;
    o.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    o.out = out.str();
    o.err = err.str();
    return o;
}

std::string data(const std::string& rel) { return (fs::path(HSNN_DATA_DIR) / rel).string(); }

std::string scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("hsnn_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir.parent_path());
    return dir.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spill(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

Outcome simulate(const std::string& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args{"simulate", "--arch", data("arch/example.txt"), "--model", data("models/tiny_fc.txt"),
                                  "--gen-trace", "--seed", "4", "--out", out};
    args.insert(args.end(), extra.begin(), extra.end());
    return hsnn_cli(args);
}

Outcome search(const std::string& out, const std::string& episodes, const std::string& seed = "1") {
    return hsnn_cli({"search", "--bounds", data("search/bounds.txt"), "--reward-spec", data("search/reward.txt"),
                     "--model", data("models/tiny_fc.txt"), "--gen-trace", "--accuracy", "0.9", "--episodes",
                     episodes, "--seed", seed, "--out", out});
}

std::size_t rows(const std::string& csv) { return static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')); }

}  // namespace

TEST_CASE("simulate writes a report with latency, energy, area and EDP") {
    const auto dir = scratch("sim");
    const auto o = simulate(dir);
    REQUIRE(o.code == cli::kExitOk);
    for (const char* word : {"latency", "energy", "area", "edp"}) CHECK(o.out.find(word) != std::string::npos);
    for (const char* f : {"manifest.txt", "report.txt", "input_trace.txt", "spikes.txt"}) CHECK(fs::exists(fs::path(dir) / f));
    const auto manifest = slurp(fs::path(dir) / "manifest.txt");
    CHECK(manifest.find("format_version") != std::string::npos);
    CHECK(manifest.find("simulate") != std::string::npos);
    const auto rep = ppa::load_report(fs::path(dir) / "report.txt");
    CHECK(rep.latency.ps > 0);
    CHECK(rep.area_um2 > 0);
}

TEST_CASE("worker count does not change any output byte") {
    const auto one = scratch("w1"), four = scratch("w4");
    REQUIRE(simulate(one, {"--workers", "1"}).code == 0);
    REQUIRE(simulate(four, {"--workers", "4"}).code == 0);
    for (const char* f : {"report.txt", "spikes.txt", "input_trace.txt"})
        CHECK(slurp(fs::path(one) / f) == slurp(fs::path(four) / f));
}

TEST_CASE("a missing tech file exits 2 and names the path") {
    const auto o = simulate(scratch("notech"), {"--tech", "/no/such/tech.txt"});
    CHECK(o.code == cli::kExitValidation);
    CHECK(o.err.find("/no/such/tech.txt") != std::string::npos);
}

TEST_CASE("an invalid architecture exits 2 with the rule") {
    const auto dir = scratch("badarch_in");
    fs::create_directories(dir);
    auto text = slurp(data("arch/example.txt"));
    text.replace(text.find("neurons_per_pe = 8"), 18, "neurons_per_pe = 48");
    spill(fs::path(dir) / "arch.txt", text);
    const auto o = hsnn_cli({"simulate", "--arch", (fs::path(dir) / "arch.txt").string(), "--model",
                             data("models/tiny_fc.txt"), "--gen-trace", "--out", scratch("badarch")});
    CHECK(o.code == cli::kExitValidation);
    CHECK(o.err.find("power of two") != std::string::npos);
}

TEST_CASE("bad flags exit 2") {
    CHECK(hsnn_cli({"simulate", "--bogus"}).code == cli::kExitValidation);
    CHECK(hsnn_cli({"nonsense"}).code == cli::kExitValidation);
    CHECK(hsnn_cli({"simulate", "--arch", data("arch/example.txt"), "--model", data("models/tiny_fc.txt"), "--out",
                    scratch("notrace")})
              .code == cli::kExitValidation);
}

TEST_CASE("an existing output directory needs --force") {
    const auto dir = scratch("force");
    REQUIRE(simulate(dir).code == 0);
    const auto before = slurp(fs::path(dir) / "report.txt");
    CHECK(simulate(dir).code == cli::kExitValidation);
    CHECK(slurp(fs::path(dir) / "report.txt") == before);
    CHECK(simulate(dir, {"--force"}).code == 0);
}

TEST_CASE("a one-episode search has one history row") {
    const auto dir = scratch("s1");
    REQUIRE(search(dir, "1").code == 0);
    const auto csv = slurp(fs::path(dir) / "history.csv");
    CHECK(rows(csv) == 3);  // version line, header, one episode
    CHECK(fs::exists(fs::path(dir) / "best_arch.txt"));
    CHECK(fs::exists(fs::path(dir) / "report.txt"));
}

TEST_CASE("a repeated seed reproduces the search outputs") {
    const auto a = scratch("sa"), b = scratch("sb");
    REQUIRE(search(a, "25", "9").code == 0);
    REQUIRE(search(b, "25", "9").code == 0);
    for (const char* f : {"history.csv", "best_arch.txt", "report.txt"})
        CHECK(slurp(fs::path(a) / f) == slurp(fs::path(b) / f));
}

TEST_CASE("bounds that fit nothing are refused") {
    const auto dir = scratch("tight_in");
    fs::create_directories(dir);
    spill(fs::path(dir) / "b.txt",
          "format_version = 1\nmesh_dims = 1x1\nneurons_per_pe = 2\nfifo_depth_per_port = 2\n"
          "arbitration = round_robin\nvirtual_channels = 4\nflit_payload_bits = 32\n");
    const auto o = hsnn_cli({"search", "--bounds", (fs::path(dir) / "b.txt").string(), "--reward-spec",
                             data("search/reward.txt"), "--model", data("models/tiny_fc.txt"), "--gen-trace", "--out",
                             scratch("tight")});
    CHECK(o.code != cli::kExitOk);
}

TEST_CASE("a single-candidate co-exploration reduces to a search") {
    const auto in = scratch("single_in");
    fs::create_directories(in);
    const auto model = workload::load_model(data("models/tiny_fc.txt"));
    workload::save_trace(workload::generate_input(model, 0.5, 6), fs::path(in) / "trace.txt");
    spill(fs::path(in) / "reward.txt",
          "format_version = 1\np0 = 0\np1 = 0\np2 = 0\nq0 = -1\nq1 = -1\nq2 = -1\n"
          "t_latency_ns = inf\nt_energy_pj = inf\nt_area_um2 = inf\nmode = joint\n");
    spill(fs::path(in) / "m.csv", "format_version,1\nid,model,trace,partial,full\nonly," + data("models/tiny_fc.txt") +
                                      ",trace.txt,0.7,0.8\n");
    const auto co = scratch("single_co"), se = scratch("single_se");
    REQUIRE(hsnn_cli({"coexplore", "--manifest", (fs::path(in) / "m.csv").string(), "--bounds",
                      data("search/bounds.txt"), "--reward-spec", (fs::path(in) / "reward.txt").string(), "--budget",
                      "12", "--seed", "5", "--out", co})
                .code == 0);
    // The only candidate searches with splitmix64(seed ^ 0) and its partial accuracy.
    REQUIRE(hsnn_cli({"search", "--bounds", data("search/bounds.txt"), "--reward-spec",
                      (fs::path(in) / "reward.txt").string(), "--model", data("models/tiny_fc.txt"), "--trace",
                      (fs::path(in) / "trace.txt").string(), "--accuracy", "0.7", "--episodes", "12", "--seed",
                      std::to_string(splitmix64(5)), "--out", se})
                .code == 0);
    CHECK(slurp(fs::path(co) / "best_arch.txt") == slurp(fs::path(se) / "best_arch.txt"));
    CHECK(slurp(fs::path(co) / "report.txt") == slurp(fs::path(se) / "report.txt"));
}

TEST_CASE("an all-pruned co-exploration still exits 0") {
    const auto in = scratch("pruned_in");
    fs::create_directories(in);
    spill(fs::path(in) / "reward.txt",
          "format_version = 1\np0 = 0\np1 = 0\np2 = 0\nq0 = -1\nq1 = -1\nq2 = -1\n"
          "t_latency_ns = 0.001\nt_energy_pj = 0.001\nt_area_um2 = 1\nmode = joint\n");
    const auto dir = scratch("pruned");
    const auto o = hsnn_cli({"coexplore", "--manifest", data("search/candidates.csv"), "--bounds",
                             data("search/bounds.txt"), "--reward-spec", (fs::path(in) / "reward.txt").string(),
                             "--budget", "9", "--out", dir});
    CHECK(o.code == 0);
    const auto csv = slurp(fs::path(dir) / "coexplore.csv");
    CHECK(csv.find("best,\n") != std::string::npos);
    CHECK_FALSE(fs::exists(fs::path(dir) / "best_arch.txt"));
    CHECK(o.out.find("no candidate met the targets") != std::string::npos);
}

TEST_CASE("the shipped co-exploration example picks a winner") {
    const auto dir = scratch("co");
    const auto o = hsnn_cli({"coexplore", "--manifest", data("search/candidates.csv"), "--bounds",
                             data("search/bounds.txt"), "--reward-spec", data("search/reward.txt"), "--budget", "60",
                             "--out", dir});
    REQUIRE(o.code == 0);
    CHECK(fs::exists(fs::path(dir) / "best_arch.txt"));
    CHECK(o.out.find("winner") != std::string::npos);
}

TEST_CASE("the table shows EDP to two decimals as stored") {
    const auto dir = scratch("table");
    REQUIRE(simulate(dir).code == 0);
    const auto o = hsnn_cli({"report", "--run-dir", dir});
    REQUIRE(o.code == 0);
    const auto rep = ppa::load_report(fs::path(dir) / "report.txt");
    char buf[64];
    const double edp = rep.edp();
    std::snprintf(buf, sizeof buf, edp >= 0.005 ? "%.2f s*nJ" : "%.2e s*nJ", edp);
    CHECK(o.out.find(buf) != std::string::npos);
    CHECK(o.out.find("interconnect") != std::string::npos);
}

TEST_CASE("csv output parses back to the stored report") {
    const auto dir = scratch("csv");
    REQUIRE(simulate(dir).code == 0);
    const auto o = hsnn_cli({"report", "--run-dir", dir, "--format", "csv"});
    REQUIRE(o.code == 0);
    const auto back = ppa::parse_report(o.out, "stdout");
    const auto stored = ppa::load_report(fs::path(dir) / "report.txt");
    CHECK(back.latency == stored.latency);
    CHECK(back.energy_fj() == stored.energy_fj());
    CHECK(back.area_um2 == stored.area_um2);
    CHECK(back.layers == stored.layers);
    CHECK(ppa::format_report(back) == slurp(fs::path(dir) / "report.txt"));
}

TEST_CASE("a truncated run is flagged in the table header") {
    const auto dir = scratch("trunc");
    REQUIRE(simulate(dir, {"--time-limit", "1"}).code == 0);
    const auto o = hsnn_cli({"report", "--run-dir", dir});
    REQUIRE(o.code == 0);
    CHECK(o.out.rfind("PPA report [TRUNCATED]", 0) == 0);
}

TEST_CASE("report refuses missing or partial run directories") {
    CHECK(hsnn_cli({"report", "--run-dir", "/no/such/run"}).code == cli::kExitValidation);
    const auto dir = scratch("partial");
    REQUIRE(simulate(dir).code == 0);
    fs::remove(fs::path(dir) / "report.txt");
    CHECK(hsnn_cli({"report", "--run-dir", dir}).code == cli::kExitValidation);
}
