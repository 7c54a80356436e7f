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

#pragma once

// Scenario files drive the command-line tool. A scenario is a YAML document
// whose first line is the version header "fiberloom/1":
//
//   fiberloom/1
//   name: fusion1_seed_pair
//   kind: fusion            # fusion | state | pattern | circuit
//   gate: fusion1_tb        # fusion kinds and circuit names from the catalog
//   input: seed_pair        # seed | seed_pair, or a `graph:` edge list
//   trials: 10000
//   seed: 7
//   loss: {active: 0.1}     # optional, element kind -> loss probability
//
// Running a scenario writes <name>.results, <name>.amplitudes and
// <name>.summary.json into the output directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fiberloom/circuits.h"
#include "fiberloom/estimate.h"
#include "fiberloom/mbqc.h"

namespace fiberloom {

/// A scenario that does not parse or validate. `line` is 1-based within the
/// file, or 0 when the problem is not tied to a line.
struct ScenarioError : std::runtime_error {
    ScenarioError(const std::string &origin, int line, const std::string &field, const std::string &what);
    std::string field;
    int line = 0;
};

enum class ScenarioKind { Fusion, State, Pattern, Circuit };

std::string to_string(ScenarioKind k);

struct Scenario {
    std::string name;
    ScenarioKind kind = ScenarioKind::Fusion;
    std::string gate;   // fusion gate or catalog circuit
    std::string input;  // named input, empty when `graph` is given
    std::optional<GraphState> graph;
    std::pair<int, int> fuse{1, 2};  // qubits to fuse
    MeasurementPattern pattern;
    Backend backend = Backend::Graph;
    Eigen::Vector2cd qubit = Eigen::Vector2cd(1, 0);  // circuit kind input
    int trials = 1;
    std::uint64_t seed = 0;
    LossModel loss;
};

Scenario parse_scenario(const std::string &text, const std::string &origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path &path);

struct ScenarioOutcome {
    std::string label;
    bool success = true;
    long long count = 0;
    double exact = 0.0;
};

struct ScenarioResult {
    std::vector<ScenarioOutcome> outcomes;
    /// Blocks of amplitudes, each with a heading (empty for a single block).
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, cplx>>>> amplitudes;
    std::optional<double> success_rate;
    std::optional<double> success_exact;
    bool deterministic = true;  // patterns: all histories give the same corrected state
};

ScenarioResult execute(const Scenario &s);

/// Runs the scenario and writes its three output files into `out_dir`.
/// Returns the paths written.
std::vector<std::filesystem::path> run_scenario(const Scenario &s, const std::filesystem::path &out_dir);

/// "label re im" lines with the global phase fixed so that the first nonzero
/// amplitude is real and positive.
std::vector<std::pair<std::string, cplx>> labeled_amplitudes(const Eigen::VectorXcd &v, const std::vector<std::string> &letters,
                                                             int qubits);

}  // namespace fiberloom
