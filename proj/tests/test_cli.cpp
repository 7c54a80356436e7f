// Copyright 2026 The fiberloom Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "fiberloom/scenario.h"
#include "support/growth_oracle.h"

namespace fiberloom {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string &name) {
    const fs::path p = fs::temp_directory_path() / ("fiberloom_test_" + name);
    fs::remove_all(p);
    return p;
}

ScenarioError parse_error(const std::string &text) {
    try {
        parse_scenario(text, "t.yaml");
    } catch (const ScenarioError &e) {
        return e;
    }
    ADD_FAILURE() << "scenario parsed:\n" << text;
    return ScenarioError("t.yaml", 0, "", "");
}

TEST(Scenario, MissingTrialsNamesField) {
    const auto e = parse_error("fiberloom/1\nname: x\nkind: fusion\ngate: fusion1_tb\ninput: seed_pair\nseed: 7\n");
    EXPECT_EQ(e.field, "trials");
    EXPECT_NE(std::string(e.what()).find("trials"), std::string::npos);
}

TEST(Scenario, ValidationReportsLines) {
    auto e = parse_error("fiberloom/1\nname: x\nkind: fusion\ngate: fusion9\ninput: seed_pair\ntrials: 3\nseed: 1\n");
    EXPECT_EQ(e.field, "gate");
    EXPECT_EQ(e.line, 4);
    e = parse_error("fiberloom/1\nname: x\nkind: state\ninput: seed\ntrials: 0\nseed: 1\n");
    EXPECT_EQ(e.field, "trials");
    EXPECT_EQ(e.line, 5);
    e = parse_error("fiberloom/1\nname: x\nkind: fusion\ngate: fusion1_tb\ninput: seed_pair\ntrials: 3\nseed: 1\n"
                    "loss: {switch: 1.5}\n");
    EXPECT_EQ(e.field, "loss");
    e = parse_error("fiberloom/2\nname: x\n");
    EXPECT_EQ(e.field, "header");
    EXPECT_EQ(e.line, 1);
    e = parse_error("fiberloom/1\nname: x\nkind: state\ninput: seed\ntrials: 1\nseed: 1\ncolour: red\n");
    EXPECT_EQ(e.field, "colour");
    EXPECT_EQ(e.line, 7);
    e = parse_error("fiberloom/1\nname: x\nkind: pattern\nchain: [0, 1, 2]\nthetas: [0.1]\ntrials: 1\nseed: 1\n");
    EXPECT_EQ(e.field, "thetas");
    e = parse_error("fiberloom/1\nname: x\nkind: pattern\nchain: [0, 1, 2, 3, 4]\nthetas: [0, 0, 0, 0]\n"
                    "backend: CIRCUIT\ntrials: 1\nseed: 1\n");
    EXPECT_EQ(e.field, "backend");
}

TEST(Scenario, AnglesAndPatterns) {
    const Scenario s = parse_scenario(
        "fiberloom/1\nname: p\nkind: pattern\ngraph: [[0, 1], [1, 2]]\nsteps:\n  - {vertex: 0, theta: pi/2}\n"
        "  - {vertex: 1, theta: -0.25pi, sign_deps: [0]}\noutputs:\n  - {vertex: 2, x_deps: [1], z_deps: [0]}\n"
        "trials: 5\nseed: 2\n");
    ASSERT_EQ(s.pattern.steps.size(), 2u);
    EXPECT_NEAR(s.pattern.steps[0].theta, std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(s.pattern.steps[1].theta, -std::numbers::pi / 4, 1e-15);
    EXPECT_TRUE(s.graph->has_edge(1, 2));
    const ScenarioResult r = execute(s);
    EXPECT_TRUE(r.deterministic);
}

TEST(Scenario, FusionSeedPairRate) {
    const Scenario s = load_scenario(FIBERLOOM_DATA_DIR "/scenarios/fusion1_seed_pair.yaml");
    EXPECT_EQ(s.trials, 10000);
    EXPECT_EQ(s.seed, 7u);
    const ScenarioResult r = execute(s);
    const double sigma = std::sqrt(0.25 / s.trials);
    EXPECT_NEAR(*r.success_exact, 0.5, 1e-10);
    EXPECT_LT(std::abs(*r.success_rate - 0.5), 3 * sigma);
}

TEST(Scenario, MakeSeedAmplitudes) {
    const fs::path out = scratch("seed");
    run_scenario(load_scenario(FIBERLOOM_DATA_DIR "/scenarios/make_seed.yaml"), out);
    EXPECT_EQ(slurp(out / "make_seed.amplitudes"),
              "fiberloom/1 amplitudes\n"
              "ss 0.500000000000 0.000000000000\n"
              "sl 0.500000000000 0.000000000000\n"
              "ls 0.500000000000 0.000000000000\n"
              "ll -0.500000000000 0.000000000000\n");
    EXPECT_TRUE(fs::exists(out / "make_seed.summary.json"));
    EXPECT_EQ(slurp(out / "make_seed.results").rfind("fiberloom/1 results\n", 0), 0u);
}

TEST(Scenario, ReproducibleFiles) {
    for (const char *name : {"fusion2_lossy", "chain3_pattern", "measure_plus"}) {
        const Scenario s = load_scenario(std::string(FIBERLOOM_DATA_DIR "/scenarios/") + name + ".yaml");
        const fs::path a = scratch(std::string(name) + "_a");
        const fs::path b = scratch(std::string(name) + "_b");
        const auto pa = run_scenario(s, a);
        const auto pb = run_scenario(s, b);
        for (std::size_t i = 0; i < pa.size(); ++i) {
            EXPECT_EQ(slurp(pa[i]), slurp(pb[i])) << pa[i];
        }
    }
}

TEST(Scenario, FrequenciesConverge) {
    Scenario s = load_scenario(FIBERLOOM_DATA_DIR "/scenarios/fusion1_seed_pair.yaml");
    s.trials = 100000;
    for (const auto &o : execute(s).outcomes) {
        const double sigma = std::sqrt(o.exact * (1 - o.exact) / s.trials);
        EXPECT_LT(std::abs(static_cast<double>(o.count) / s.trials - o.exact), 5 * sigma) << o.label;
    }
}

TEST(Scenario, LossAddsLostOutcome) {
    const ScenarioResult r = execute(load_scenario(FIBERLOOM_DATA_DIR "/scenarios/fusion2_lossy.yaml"));
    double total = 0;
    bool lost = false;
    for (const auto &o : r.outcomes) {
        total += o.exact;
        lost = lost || o.label == "LOST";
    }
    EXPECT_TRUE(lost);
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LT(*r.success_exact, 0.5);
}

TEST(Estimate, SeedIsTarget) {
    EstimateConfig cfg;
    cfg.target = 2;
    cfg.trials = 100;
    const auto r = estimate_resources(cfg);
    EXPECT_DOUBLE_EQ(r.expected_seeds, 1.0);
    EXPECT_EQ(r.percentiles.at(99), 1);
    cfg.target = 1;
    EXPECT_THROW(estimate_resources(cfg), InvalidTarget);
}

TEST(Estimate, OracleValues) {
    EXPECT_NEAR(testing::type1_expected_seeds(3, 0.5), 4.5, 1e-12);
    EXPECT_NEAR(testing::type2_expected_seeds(5, 0.5), 1 + 3 / 0.5, 1e-12);
    EXPECT_NEAR(testing::type1_expected_seeds(7, 1.0), 6, 1e-12);
}

TEST(Estimate, Type1MatchesDynamicProgramming) {
    for (int n : {3, 4}) {
        EstimateConfig cfg;
        cfg.target = n;
        cfg.trials = 20000;
        cfg.seed = 99;
        const auto r = estimate_resources(cfg);
        EXPECT_NEAR(r.heralding_probability, 0.5, 1e-10);
        const double exact = testing::type1_expected_seeds(n, 0.5);
        EXPECT_LT(std::abs(r.expected_seeds - exact), 3 * r.std_error) << "n=" << n;
    }
}

TEST(Estimate, Type2MatchesRecurrence) {
    EstimateConfig cfg;
    cfg.target = 5;
    cfg.strategy = Strategy::Type2Redundant;
    cfg.trials = 20000;
    const auto r = estimate_resources(cfg);
    EXPECT_LT(std::abs(r.expected_seeds - testing::type2_expected_seeds(5, 0.5)), 3 * r.std_error);
}

TEST(Estimate, ForcedSuccessIsDeterministic) {
    for (Strategy s : {Strategy::Type1Greedy, Strategy::Type2Redundant}) {
        for (int n = 2; n <= 9; ++n) {
            EstimateConfig cfg;
            cfg.target = n;
            cfg.strategy = s;
            cfg.trials = 20;
            cfg.force_success = true;
            const auto r = estimate_resources(cfg);
            EXPECT_DOUBLE_EQ(r.expected_seeds, n - 1);
            EXPECT_DOUBLE_EQ(r.stddev, 0.0);
        }
    }
}

TEST(Estimate, HeraldingMonotoneInLoss) {
    double last = 2.0;
    for (double loss : {0.0, 0.3, 0.45, 0.6}) {
        EstimateConfig cfg;
        cfg.target = 3;
        cfg.trials = 50;
        cfg.loss = LossModel::uniform_active(loss);
        const auto r = estimate_resources(cfg);
        EXPECT_LE(r.heralding_probability, last);
        if (loss > 0) {
            EXPECT_LT(r.heralding_probability, 0.5);
            EXPECT_NEAR(r.heralding_probability, 0.5 * std::pow(1 - loss, r.active_components), 1e-12);
        }
        last = r.heralding_probability;
    }
}

TEST(Estimate, LossModelByKind) {
    LossModel m;
    m.per_kind = {{"active", 0.1}, {"switch", 0.2}, {"coupler", 0.05}};
    EXPECT_DOUBLE_EQ(m.loss_of(Switch{0, 1, [](int b) { return b == 0; }, ""}), 0.2);
    EXPECT_DOUBLE_EQ(m.loss_of(PhaseMod{0, [](int) { return 0.0; }, true, ""}), 0.1);
    EXPECT_DOUBLE_EQ(m.loss_of(PhaseMod{0, [](int) { return 0.0; }, false, ""}), 0.0);
    EXPECT_DOUBLE_EQ(m.loss_of(Coupler{0, 1, 0.5, 0.0}), 0.05);
    m.per_kind["pbsc"] = 1.0;
    EXPECT_THROW(m.validate(), std::invalid_argument);
}

int cli(const std::string &args) {
    const int status = std::system((std::string(FIBERLOOM_CLI) + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
    const fs::path out = scratch("cli");
    EXPECT_EQ(cli("--out " + out.string() + " run " FIBERLOOM_DATA_DIR "/scenarios/make_seed.yaml"), 0);
    EXPECT_TRUE(fs::exists(out / "make_seed.amplitudes"));
    EXPECT_EQ(cli("run " FIBERLOOM_DATA_DIR "/scenarios/missing_trials.yaml"), 2);
    EXPECT_EQ(cli("run /nonexistent.yaml"), 2);
    EXPECT_EQ(cli("estimate --target 1"), 2);
    EXPECT_EQ(cli("estimate --target 3 --trials 100"), 0);
    EXPECT_EQ(cli("bogus"), 2);
    EXPECT_EQ(cli("catalog"), 0);
    EXPECT_EQ(cli("selftest"), 0);
}

TEST(Cli, ByproductsMatchFrozenTable) {
    const fs::path out = scratch("bp");
    fs::create_directories(out);
    ASSERT_EQ(cli("byproducts --file " + (out / "t.txt").string()), 0);
    EXPECT_EQ(slurp(out / "t.txt"), slurp(FIBERLOOM_DATA_DIR "/byproduct_table.txt"));
}

}  // namespace
}  // namespace fiberloom
