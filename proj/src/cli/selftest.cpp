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

#include "fiberloom/selftest.h"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "fiberloom/estimate.h"
#include "fiberloom/mbqc.h"

namespace fiberloom {
namespace {

constexpr double kTol = 1e-10;
constexpr double kPi = std::numbers::pi;

Eigen::Matrix2cd hadamard() {
    const double r = 1 / std::sqrt(2.0);
    return (Eigen::Matrix2cd() << r, r, r, -r).finished();
}

Eigen::Vector2cd random_qubit(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Eigen::Vector2cd v(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
    return v / v.norm();
}

// Each check returns the worst deviation from its oracle.
double gates() {
    const double r = 1 / std::sqrt(2.0);
    Eigen::Matrix2cd r45;
    r45 << r, -r, r, r;
    return std::max(phase_insensitive_distance(gate_matrix(build_rt45(kPi, kPi)), r45),
                    phase_insensitive_distance(gate_matrix(build_rt45(0, kPi)), hadamard()));
}

double seed() {
    return 1.0 - vector_fidelity(decode(make_seed_cluster()), Eigen::Vector4cd(0.5, 0.5, 0.5, -0.5));
}

double fusions() {
    const EncodedState a = make_seed_cluster(0, 1, 0, 1);
    const EncodedState b = make_seed_cluster(2, 3, 2, 3);
    EncodedState joint{tensor(a.state, b.state), a.frame};
    joint.frame.insert(b.frame.begin(), b.frame.end());
    double worst = 0;
    for (FusionKind k : {FusionKind::Type1TimeBin, FusionKind::Type2TimeBin, FusionKind::Type1Pol, FusionKind::Type2Pol}) {
        worst = std::max(worst, std::abs(success_probability(fuse(k, joint, 1, 2)) - 0.5));
    }
    return worst;
}

double byproducts() {
    double worst = 0;
    for (const auto &[key, e] : byproduct_table()) {
        worst = std::max(worst, 1.0 - e.fidelity);
    }
    return worst;
}

double measurement() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    double worst = 0;
    for (int k = 0; k < 10; ++k) {
        const double theta = angle(rng);
        const QubitSlot q{Encoding::TimeBin, 0, 0, Pol::None};
        const QubitSlot qh{Encoding::TimeBin, 0, 0, Pol::H};
        worst = std::max(worst, phase_insensitive_distance(gate_matrix(measure_circuit_timebin(theta, 1, q, 1)),
                                                           gate_matrix(measure_circuit_pol(theta, 1, qh, 1))));
    }
    return worst;
}

double converters() {
    const QubitSlot q{Encoding::TimeBin, 0, 0, Pol::H};
    const OpticalCircuit t = tpc(q, 1);
    const OpticalCircuit p = ptc(t.output.at(0), 1);
    std::mt19937_64 rng(5);
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
        const Eigen::Vector2cd in = random_qubit(rng);
        const auto mid = run_circuit(t, encode(in, t.input)).front().post;
        worst = std::max(worst, 1.0 - vector_fidelity(decode(run_circuit(p, mid).front().post), in));
    }
    return worst;
}

double corrections() {
    const QubitSlot q{Encoding::TimeBin, 0, 0, Pol::None};
    return std::max(phase_insensitive_distance(gate_matrix(bit_flip_circuit(q, 1)), pauli_matrix(Pauli::X)),
                    phase_insensitive_distance(gate_matrix(phase_flip_circuit(q)), pauli_matrix(Pauli::Z)));
}

double mbqc() {
    const auto p = linear_chain_pattern({0, 1, 2}, {0.3, -1.2});
    const Eigen::Vector2cd ideal = expected_map(p, 3) * Eigen::Vector2cd(1, 1) / std::sqrt(2.0);
    double worst = 0;
    for (Backend b : {Backend::Graph, Backend::Circuit}) {
        for (const auto &r : enumerate_runs(p, GraphState::chain({0, 1, 2}), b)) {
            worst = std::max(worst, 1.0 - vector_fidelity(r.final_state, ideal));
        }
    }
    return worst;
}

double estimator() {
    EstimateConfig cfg;
    cfg.target = 2;
    cfg.trials = 10;
    return std::abs(estimate_resources(cfg).expected_seeds - 1.0);
}

}  // namespace

std::vector<SelftestCheck> run_selftest() {
    const std::vector<std::pair<std::string, std::function<double()>>> checks{
        {"gate matrices", gates},          {"seed cluster", seed},        {"fusion success 1/2", fusions},
        {"byproduct table", byproducts},   {"measurement encodings", measurement},
        {"tpc/ptc round trip", converters}, {"bit and phase flip", corrections},
        {"3-chain pattern", mbqc},         {"estimator n=2", estimator},
    };
    std::vector<SelftestCheck> out;
    for (const auto &[name, fn] : checks) {
        SelftestCheck c;
        c.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const double err = fn();
            c.passed = err < kTol;
            std::ostringstream d;
            d << "max deviation " << err;
            c.detail = d.str();
        } catch (const std::exception &e) {
            c.detail = e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(c);
    }
    return out;
}

}  // namespace fiberloom
