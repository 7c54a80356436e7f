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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fiberloom/mbqc.h"

namespace fiberloom {
namespace {

constexpr double kTol = 1e-10;
constexpr double kPi = std::numbers::pi;
const double kR = 1 / std::sqrt(2.0);

std::vector<int> iota(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = i;
    }
    return v;
}

Eigen::Vector2cd plus() { return Eigen::Vector2cd(kR, kR); }

TEST(Mbqc, ChainPatternDependencies) {
    const auto p = linear_chain_pattern(iota(4), {0.1, 0.2, 0.3});
    EXPECT_TRUE(p.steps[0].sign_deps.empty());
    EXPECT_TRUE(p.steps[1].sign_deps == std::set<int>{0});
    EXPECT_TRUE(p.steps[2].sign_deps == std::set<int>{1});
    EXPECT_TRUE(p.outputs[0].x_deps == (std::set<int>{0, 2}));
    EXPECT_TRUE(p.outputs[0].z_deps == std::set<int>{1});
    EXPECT_THROW(linear_chain_pattern({0}, {}), NotAChain);
}

TEST(Mbqc, TwoChainThetaZeroGivesZero) {
    const auto p = linear_chain_pattern({0, 1}, {0.0});
    for (Backend b : {Backend::Graph, Backend::Circuit}) {
        for (const auto &r : enumerate_runs(p, GraphState::chain({0, 1}), b)) {
            EXPECT_NEAR(r.probability, 0.5, kTol);
            EXPECT_NEAR(std::norm(r.final_state[0]), 1.0, kTol) << to_string(b);
        }
    }
}

TEST(Mbqc, ThreeChainMatchesMatrixProduct) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int k = 0; k < 20; ++k) {
        const double t1 = angle(rng);
        const double t2 = angle(rng);
        const auto p = linear_chain_pattern({0, 1, 2}, {t1, t2});
        const Eigen::Vector2cd ideal = expected_map(p, 3) * plus();
        const auto runs = enumerate_runs(p, GraphState::chain({0, 1, 2}), Backend::Graph);
        ASSERT_EQ(runs.size(), 4u);
        for (const auto &r : runs) {
            EXPECT_NEAR(vector_fidelity(r.final_state, ideal), 1.0, kTol);
            EXPECT_NEAR(r.probability, 0.25, kTol);
            EXPECT_EQ(r.signs[1], r.outcomes[0] ? -1 : 1);
        }
    }
}

TEST(Mbqc, ZeroAnglesDeterministicUpToFive) {
    for (int n = 2; n <= 5; ++n) {
        const auto p = linear_chain_pattern(iota(n), std::vector<double>(static_cast<std::size_t>(n - 1), 0.0));
        const Eigen::Vector2cd ideal = expected_map(p, n) * plus();
        const auto runs = enumerate_runs(p, GraphState::chain(iota(n)), Backend::Graph);
        EXPECT_EQ(runs.size(), std::size_t{1} << (n - 1));
        for (const auto &r : runs) {
            EXPECT_NEAR(vector_fidelity(r.final_state, ideal), 1.0, kTol) << "n=" << n;
        }
    }
}

TEST(Mbqc, RandomAnglesDeterministicUpToFive) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int n = 2; n <= 5; ++n) {
        std::vector<double> th;
        for (int k = 0; k + 1 < n; ++k) {
            th.push_back(angle(rng));
        }
        const auto p = linear_chain_pattern(iota(n), th);
        const Eigen::Vector2cd ideal = expected_map(p, n) * plus();
        for (const auto &r : enumerate_runs(p, GraphState::chain(iota(n)), Backend::Graph)) {
            EXPECT_NEAR(vector_fidelity(r.final_state, ideal), 1.0, kTol) << "n=" << n;
        }
    }
}

TEST(Mbqc, BackendsAgreeExactly) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int n : {2, 3}) {
        for (int k = 0; k < 3; ++k) {
            std::vector<double> th;
            for (int j = 0; j + 1 < n; ++j) {
                th.push_back(angle(rng));
            }
            const auto p = linear_chain_pattern(iota(n), th);
            const auto g = enumerate_runs(p, GraphState::chain(iota(n)), Backend::Graph);
            const auto c = enumerate_runs(p, GraphState::chain(iota(n)), Backend::Circuit);
            ASSERT_EQ(g.size(), c.size());
            double tv = 0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                EXPECT_EQ(g[i].outcomes, c[i].outcomes);
                tv += std::abs(g[i].probability - c[i].probability) / 2;
                EXPECT_NEAR(vector_fidelity(g[i].final_state, c[i].final_state), 1.0, kTol);
            }
            EXPECT_LT(tv, 1e-9);
        }
    }
}

TEST(Mbqc, ExpectedMapExamples) {
    const Eigen::Matrix2cd h = (Eigen::Matrix2cd() << kR, kR, kR, -kR).finished();
    EXPECT_LT((expected_map(linear_chain_pattern({0, 1}, {0.0}), 2) - h).cwiseAbs().maxCoeff(), kTol);
    Eigen::Matrix2cd rz = Eigen::Matrix2cd::Zero();
    rz(0, 0) = std::polar(1.0, -kPi / 4);
    rz(1, 1) = std::polar(1.0, kPi / 4);
    const Eigen::Matrix2cd want = h * rz * h * rz;
    EXPECT_LT((expected_map(linear_chain_pattern({0, 1, 2}, {kPi / 2, kPi / 2}), 3) - want).cwiseAbs().maxCoeff(),
              kTol);
    MeasurementPattern bent = linear_chain_pattern({0, 1, 2}, {0.1, 0.2});
    bent.steps[1].sign_deps.clear();
    EXPECT_THROW(expected_map(bent, 3), NotAChain);
    EXPECT_THROW(expected_map(bent, 4), NotAChain);
}

TEST(Mbqc, SampledStatisticsMatchBornRule) {
    const auto p = linear_chain_pattern({0, 1}, {kPi});
    const Eigen::Vector2cd ideal = expected_map(p, 2) * plus();
    EXPECT_NEAR(std::norm(ideal[1]), 1.0, kTol);  // H Rz(pi) |+> = |1> up to phase
    const int trials = 4000;
    int ones = 0;
    for (int t = 0; t < trials; ++t) {
        const RunRecord r = run(p, GraphState::chain({0, 1}), Backend::Graph, 1000 + static_cast<std::uint64_t>(t));
        ones += r.outcomes[0];
        EXPECT_NEAR(std::norm(r.final_state[1]), std::norm(ideal[1]), kTol);
    }
    const double sigma = std::sqrt(trials * 0.25);
    EXPECT_LT(std::abs(ones - trials / 2.0), 5 * sigma);
}

TEST(Mbqc, SeededRunsRepeat) {
    const auto p = linear_chain_pattern({0, 1, 2}, {0.4, -1.1});
    for (Backend b : {Backend::Graph, Backend::Circuit}) {
        const RunRecord a = run(p, GraphState::chain({0, 1, 2}), b, 42);
        const RunRecord c = run(p, GraphState::chain({0, 1, 2}), b, 42);
        EXPECT_EQ(a.outcomes, c.outcomes);
        EXPECT_LT((a.final_state - c.final_state).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Mbqc, Errors) {
    const auto p = linear_chain_pattern({0, 7}, {0.0});
    EXPECT_THROW(run(p, GraphState::chain({0, 1}), Backend::Graph, 1), UnknownVertex);
    EXPECT_THROW(run(p, GraphState::chain({0, 1}), Backend::Circuit, 1), UnknownVertex);
    const auto big = linear_chain_pattern(iota(5), {0, 0, 0, 0});
    EXPECT_THROW(run(big, GraphState::chain(iota(5)), Backend::Circuit, 1), BackendTooLarge);
    EXPECT_THROW(backend_from_string("QUANTUM"), std::invalid_argument);
}

TEST(Mbqc, FeedforwardIsCausal) {
    MeasurementPattern bad = linear_chain_pattern({0, 1, 2}, {0.1, 0.2});
    bad.steps[0].sign_deps = {1};
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = linear_chain_pattern({0, 1, 2}, {0.1, 0.2});
    bad.steps[1].vertex = 0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);

    // permuting the outcomes of later steps never changes an earlier sign
    const auto p = linear_chain_pattern(iota(5), {0.1, 0.2, 0.3, 0.4});
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        std::vector<int> o(4);
        for (int &b : o) {
            b = static_cast<int>(rng() & 1U);
        }
        for (std::size_t k = 0; k < 4; ++k) {
            std::vector<int> shuffled = o;
            std::shuffle(shuffled.begin() + static_cast<std::ptrdiff_t>(k), shuffled.end(), rng);
            EXPECT_EQ(p.sign(k, o), p.sign(k, shuffled));
        }
    }
}

TEST(Mbqc, CircuitBackendOnSeedCluster) {
    const auto p = linear_chain_pattern({0, 1}, {0.7});
    const Eigen::Vector2cd ideal = expected_map(p, 2) * plus();
    const auto runs = enumerate_runs(p, make_seed_cluster());
    ASSERT_EQ(runs.size(), 2u);
    for (const auto &r : runs) {
        EXPECT_NEAR(vector_fidelity(r.final_state, ideal), 1.0, kTol);
    }
}

}  // namespace
}  // namespace fiberloom
