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
#include <random>

#include <gtest/gtest.h>

#include "fiberloom/graph_state.h"

namespace fiberloom {
namespace {

constexpr double kTol = 1e-10;

TEST(GraphState, TwoChainStatevector) {
    const auto psi = to_statevector(GraphState::chain({0, 1}));
    ASSERT_EQ(psi.size(), 4);
    EXPECT_NEAR(std::abs(psi[0] - 0.5), 0, kTol);
    EXPECT_NEAR(std::abs(psi[1] - 0.5), 0, kTol);
    EXPECT_NEAR(std::abs(psi[2] - 0.5), 0, kTol);
    EXPECT_NEAR(std::abs(psi[3] + 0.5), 0, kTol);
}

TEST(GraphState, SingleVertexIsPlus) {
    const auto psi = to_statevector(GraphState::isolated({4}));
    EXPECT_NEAR(psi[0].real(), 1 / std::sqrt(2.0), kTol);
    EXPECT_NEAR(psi[1].real(), 1 / std::sqrt(2.0), kTol);
}

TEST(GraphState, ThreeChainSigns) {
    const auto psi = to_statevector(GraphState::chain({0, 1, 2}));
    const double a = 1 / (2 * std::sqrt(2.0));
    for (int z = 0; z < 8; ++z) {
        const int parity = (((z >> 2) & (z >> 1)) ^ ((z >> 1) & z)) & 1;
        EXPECT_NEAR(psi[z].real(), parity ? -a : a, kTol) << z;
    }
}

TEST(GraphState, CzBuildsAndUndoes) {
    GraphState g = GraphState::isolated({0, 1});
    GraphState c = apply_cz(g, 0, 1);
    EXPECT_EQ(c, GraphState::chain({0, 1}));
    EXPECT_EQ(apply_cz(c, 0, 1), g);
    GraphState three = apply_cz(c.with_vertex(2), 1, 2);
    EXPECT_EQ(three, GraphState::chain({0, 1, 2}));
    EXPECT_THROW(apply_cz(g, 0, 0), SelfLoop);
    EXPECT_THROW(apply_cz(g, 0, 7), MissingVertex);
}

TEST(GraphState, TooLarge) {
    std::vector<int> v(13);
    for (int i = 0; i < 13; ++i) {
        v[i] = i;
    }
    EXPECT_THROW(to_statevector(GraphState::isolated(v)), TooLarge);
}

TEST(GraphState, ZOnMiddleBreaksChain) {
    GraphState g = measure_vertex(GraphState::chain({0, 1, 2}), 1, MeasureBasis::Z, 0);
    EXPECT_EQ(g, GraphState::isolated({0, 2}));
}

TEST(GraphState, XOnEndOfTwoChainLeavesBasisState) {
    // <+|_0 on the 2-chain leaves |0> on vertex 1, <-|_0 leaves |1>.
    const GraphState g = GraphState::chain({0, 1});
    for (int m = 0; m < 2; ++m) {
        const GraphState h = measure_vertex(g, 0, MeasureBasis::X, m);
        const auto psi = to_statevector(h);
        EXPECT_NEAR(std::abs(psi[m]), 1.0, kTol);
        EXPECT_NEAR(outcome_probability(g, 0, MeasureBasis::X, m), 0.5, kTol);
    }
}

TEST(GraphState, IsolatedXMinusIsImpossible) {
    EXPECT_THROW(measure_vertex(GraphState::isolated({0, 1}), 0, MeasureBasis::X, 1), ImpossibleOutcome);
}

TEST(GraphState, AngleZeroIsXProjection) {
    const GraphState g = GraphState::chain({0, 1, 2});
    for (int m = 0; m < 2; ++m) {
        const ProjectedState p = measure_vertex_angle(g, 1, 0.0, 1, m);
        EXPECT_NEAR(p.probability, outcome_probability(g, 1, MeasureBasis::X, m), kTol);
    }
}

GraphState random_graph(std::mt19937_64 &rng, int n, bool groups) {
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) {
        ids[i] = i;
    }
    GraphState g = GraphState::isolated(ids);
    std::bernoulli_distribution coin(0.5);
    if (groups && n >= 3 && coin(rng)) {
        g = g.without_vertex(n - 1).with_redundant_copy(static_cast<int>(rng() % (n - 1)), n - 1);
    }
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            if (coin(rng) && g.representative(a) == a && g.representative(b) == b) {
                g = g.with_edge_toggled(a, b);
            }
        }
    }
    for (int v = 0; v < n; ++v) {
        if (coin(rng)) {
            g = g.with_pauli(v, static_cast<Pauli>(rng() % 4));
        }
    }
    return g;
}

TEST(GraphState, PauliRulesMatchStatevectorProjection) {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 5);
        const GraphState g = random_graph(rng, n, true);
        for (int v : g.vertices()) {
            for (MeasureBasis basis : {MeasureBasis::Z, MeasureBasis::X}) {
                if (basis == MeasureBasis::Z && g.redundant(v)) {
                    continue;
                }
                for (int m = 0; m < 2; ++m) {
                    const double prob = outcome_probability(g, v, basis, m);
                    if (prob < 1e-12) {
                        continue;
                    }
                    const GraphState h = measure_vertex(g, v, basis, m);
                    // Reference: project with the plain state-vector path.
                    std::vector<int> order(g.vertices().begin(), g.vertices().end());
                    const auto psi = to_statevector(g, order);
                    const int nq = static_cast<int>(order.size());
                    const int pos = static_cast<int>(std::find(order.begin(), order.end(), v) - order.begin());
                    Eigen::VectorXcd ref = Eigen::VectorXcd::Zero(psi.size() / 2);
                    for (Eigen::Index i = 0; i < psi.size(); ++i) {
                        const int bit = static_cast<int>((i >> (nq - 1 - pos)) & 1);
                        const Eigen::Index hi = (i >> (nq - pos)) << (nq - 1 - pos);
                        const Eigen::Index lo = i & ((Eigen::Index{1} << (nq - 1 - pos)) - 1);
                        std::complex<double> w = basis == MeasureBasis::Z ? (bit == m ? 1.0 : 0.0)
                                                                          : ((bit && m) ? -1.0 : 1.0) / std::sqrt(2.0);
                        ref[hi | lo] += w * psi[i];
                    }
                    ref /= ref.norm();
                    order.erase(order.begin() + pos);
                    EXPECT_NEAR(vector_fidelity(to_statevector(h, order), ref), 1.0, kTol)
                        << g.to_text() << "measure " << v << (basis == MeasureBasis::Z ? " Z " : " X ") << m;
                    ++checked;
                }
            }
        }
    }
    EXPECT_GT(checked, 1000);
}

TEST(GraphState, Fuse1Chains) {
    const GraphState a = GraphState::chain({0, 1});
    const GraphState b = GraphState::chain({2, 3});
    EXPECT_EQ(fuse1(a, 1, b, 2, true), GraphState::chain({0, 1, 3}));
    EXPECT_EQ(fuse1(a, 1, b, 2, false), GraphState::isolated({0, 3}));
    EXPECT_THROW(fuse1(a, 1, a, 0, true), Overlap);
    const GraphState fused = fuse1(GraphState::star(0, {1, 2, 3}), 0, GraphState::chain({4, 5}), 4, true);
    EXPECT_EQ(fused.neighbors(0).size(), 4u);
}

TEST(GraphState, Fuse2RedundantShapes) {
    // x - {p1, a}  and  {b, p2} - y
    const GraphState left = GraphState::chain({0, 1}).with_redundant_copy(1, 2);
    const GraphState right = GraphState::chain({3, 5}).with_redundant_copy(3, 4);
    const GraphState ok = fuse2(left, 2, right, 4, true);
    EXPECT_EQ(ok.group(1), (std::vector<int>{1, 3}));
    EXPECT_TRUE(ok.has_edge(0, 1));
    EXPECT_TRUE(ok.has_edge(3, 5));
    const GraphState fail = fuse2(left, 2, right, 4, false);
    EXPECT_EQ(fail, GraphState::chain({0, 1}).joined(GraphState::chain({3, 5})));
    EXPECT_THROW(fuse2(GraphState::chain({0, 1}), 1, right, 4, true), MissingRedundancy);
    // swapping the inputs gives the same graph up to relabeling
    const GraphState swapped = fuse2(right, 4, left, 2, true);
    EXPECT_EQ(swapped, ok);
}

TEST(GraphState, TextRoundTrip) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        const GraphState g = random_graph(rng, 1 + static_cast<int>(rng() % 6), true);
        EXPECT_EQ(GraphState::from_text(g.to_text()), g) << g.to_text();
    }
    const GraphState m = measure_vertex(GraphState::chain({0, 1, 2}), 1, MeasureBasis::X, 1);
    EXPECT_EQ(GraphState::from_text(m.to_text()), m);
}

TEST(GraphState, ByproductText) {
    Byproduct b;
    b.paulis[FusionRole::Fused] = Pauli::Z;
    b.paulis[FusionRole::Neighbors2] = Pauli::X;
    EXPECT_EQ(Byproduct::parse(b.str()), b);
    EXPECT_EQ(Byproduct::parse("I"), Byproduct{});
}

}  // namespace
}  // namespace fiberloom
