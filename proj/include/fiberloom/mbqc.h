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

// Adaptive single-qubit measurement patterns on cluster states.
//
// A step measures one photon in the basis H * Rz(sign * theta) followed by a
// computational readout. The sign and the final corrections depend on the
// parity of earlier outcomes, given as sets of step indices.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fiberloom/circuits.h"
#include "fiberloom/graph_state.h"

namespace fiberloom {

struct UnknownVertex : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct BackendTooLarge : std::length_error {
    using std::length_error::length_error;
};
struct NotAChain : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Backend { Graph, Circuit };

std::string to_string(Backend b);
Backend backend_from_string(const std::string &s);

struct MeasurementStep {
    int vertex = 0;
    double theta = 0.0;
    /// The sign is -1 iff the outcomes of these steps have odd parity.
    std::set<int> sign_deps;
};

struct OutputCorrection {
    int vertex = 0;
    std::set<int> x_deps;
    std::set<int> z_deps;
};

struct MeasurementPattern {
    std::vector<MeasurementStep> steps;
    std::vector<OutputCorrection> outputs;

    /// Throws std::invalid_argument when a vertex repeats or a step depends
    /// on itself or a later step.
    void validate() const;
    int sign(std::size_t step, const std::vector<int> &outcomes) const;
};

/// Pattern for the chain vertices[0] - ... - vertices[n-1]: the first n-1
/// photons are measured in order with the given angles, the last one is the
/// output. Dependencies follow one-bit teleportation.
MeasurementPattern linear_chain_pattern(const std::vector<int> &vertices, const std::vector<double> &thetas);

/// H * Rz(theta_k) factors of a chain pattern, later steps on the left.
Eigen::Matrix2cd expected_map(const MeasurementPattern &p, int chain_length);

struct RunRecord {
    std::vector<int> outcomes;
    std::vector<int> signs;
    double probability = 1.0;  // of this outcome history
    std::vector<int> output_order;
    Eigen::VectorXcd final_state;  // after corrections, over output_order
    std::map<int, std::pair<int, int>> corrections;  // output vertex -> (x, z)
    Backend backend = Backend::Graph;
};

/// Most photons the circuit backend accepts.
constexpr int kCircuitBackendMaxPhotons = 4;

/// Samples one run; identical seeds give identical records.
RunRecord run(const MeasurementPattern &p, const GraphState &initial, Backend backend, std::uint64_t seed);
/// Circuit backend on an already encoded state (time-bin qubits).
RunRecord run(const MeasurementPattern &p, const EncodedState &initial, std::uint64_t seed);

/// Every outcome history with nonzero probability, in lexicographic order.
std::vector<RunRecord> enumerate_runs(const MeasurementPattern &p, const GraphState &initial, Backend backend);
std::vector<RunRecord> enumerate_runs(const MeasurementPattern &p, const EncodedState &initial);

}  // namespace fiberloom
