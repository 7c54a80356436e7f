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

// fiberloom: run scenarios, estimate resources, list the circuit catalog.
//
// Exit codes: 0 success, 1 runtime error, 2 invalid input.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fiberloom/circuits.h"
#include "fiberloom/estimate.h"
#include "fiberloom/scenario.h"
#include "fiberloom/selftest.h"

namespace {

constexpr int kRuntimeError = 1;
constexpr int kValidationError = 2;

int cmd_run(const std::string &file, const std::string &out_dir) {
    const fiberloom::Scenario s = fiberloom::load_scenario(file);
    for (const auto &p : fiberloom::run_scenario(s, out_dir)) {
        std::cout << "wrote " << p.string() << "\n";
    }
    return 0;
}

int cmd_estimate(int target, const std::string &strategy, double loss, const std::map<std::string, double> &kinds,
                 int trials, std::uint64_t seed, bool force, const std::string &out_dir) {
    fiberloom::EstimateConfig cfg;
    cfg.target = target;
    try {
        cfg.strategy = fiberloom::strategy_from_string(strategy);
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    }
    if (loss > 0) {
        cfg.loss = fiberloom::LossModel::uniform_active(loss);
    }
    for (const auto &[k, p] : kinds) {
        cfg.loss.per_kind[k] = p;
    }
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.force_success = force;
    try {
        cfg.loss.validate();
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    }
    fiberloom::EstimateReport r;
    try {
        r = fiberloom::estimate_resources(cfg);
    } catch (const fiberloom::InvalidTarget &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    }

    nlohmann::json j;
    j["format"] = "fiberloom/1";
    j["target"] = target;
    j["strategy"] = fiberloom::to_string(cfg.strategy);
    j["loss"] = cfg.loss.per_kind;
    j["trials"] = trials;
    j["seed"] = seed;
    j["force_success"] = force;
    j["circuit"] = r.circuit;
    j["active_components"] = r.active_components;
    j["fusion_success"] = r.fusion_success;
    j["transmission"] = r.transmission;
    j["heralding_probability"] = r.heralding_probability;
    j["expected_seeds"] = r.expected_seeds;
    j["stddev"] = r.stddev;
    j["std_error"] = r.std_error;
    for (const auto &[q, v] : r.percentiles) {
        j["percentiles"]["p" + std::to_string(q)] = v;
    }
    j["censored"] = r.censored;
    std::cout << j.dump(2) << "\n";
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream(std::filesystem::path(out_dir) / "estimate.summary.json") << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_catalog() {
    for (const auto &e : fiberloom::catalog()) {
        const fiberloom::OpticalCircuit c = e.build();
        std::printf("%-12s %2zu elements  %d active  %s\n", e.name.c_str(), c.elements.size(), c.active_count(),
                    e.provenance.c_str());
    }
    return 0;
}

int cmd_selftest() {
    bool ok = true;
    for (const auto &c : fiberloom::run_selftest()) {
        std::printf("%s  %-24s %8.3fs  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.seconds, c.detail.c_str());
        ok = ok && c.passed;
    }
    return ok ? 0 : kRuntimeError;
}

int cmd_byproducts(const std::string &out_file) {
    const std::string text = fiberloom::format_byproduct_table(fiberloom::derive_byproduct_table());
    if (out_file.empty()) {
        std::cout << text;
    } else {
        std::ofstream(out_file) << text;
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"fiberloom: time-bin and polarization photonic cluster-state simulator"};
    app.require_subcommand(1);

    std::string out_dir;
    app.add_option("--out", out_dir, "Directory for output files");

    auto *run = app.add_subcommand("run", "Run a scenario file");
    std::string scenario;
    run->add_option("scenario", scenario, "Scenario file")->required();

    auto *est = app.add_subcommand("estimate", "Estimate seed clusters needed to grow a chain");
    int target = 0;
    std::string strategy = "TYPE1_GREEDY";
    double loss = 0.0;
    std::map<std::string, double> kinds;
    int trials = 10000;
    std::uint64_t seed = 1;
    bool force = false;
    est->add_option("--target", target, "Target chain length")->required();
    est->add_option("--strategy", strategy, "TYPE1_GREEDY or TYPE2_REDUNDANT");
    est->add_option("--loss", loss, "Loss probability per active component")->check(CLI::Range(0.0, 0.999999));
    est->add_option("--loss-kind", kinds, "Per element kind loss, e.g. --loss-kind switch 0.1");
    est->add_option("--trials", trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
    est->add_option("--seed", seed, "Random seed");
    est->add_flag("--force-success", force, "Treat every attempt as heralded");

    app.add_subcommand("catalog", "List named circuits");
    app.add_subcommand("selftest", "Run the built-in oracle checks");
    auto *bp = app.add_subcommand("byproducts", "Derive and print the fusion byproduct table");
    std::string bp_file;
    bp->add_option("--file", bp_file, "Write the table here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kValidationError;
    }

    try {
        if (*run) {
            return cmd_run(scenario, out_dir.empty() ? "." : out_dir);
        }
        if (*est) {
            return cmd_estimate(target, strategy, loss, kinds, trials, seed, force, out_dir);
        }
        if (app.got_subcommand("catalog")) {
            return cmd_catalog();
        }
        if (app.got_subcommand("selftest")) {
            return cmd_selftest();
        }
        if (*bp) {
            return cmd_byproducts(bp_file);
        }
    } catch (const fiberloom::ScenarioError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kRuntimeError;
}
