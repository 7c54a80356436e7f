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
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fiberloom/circuits.h"

namespace fiberloom {
namespace {

constexpr double kTol = 1e-10;
constexpr double kPi = std::numbers::pi;
const double kR = 1 / std::sqrt(2.0);

Eigen::Vector2cd qubit(cplx a, cplx b) { return Eigen::Vector2cd(a, b); }

Eigen::Vector2cd random_qubit(std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    Eigen::Vector2cd v(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
    return v / v.norm();
}

// Output of a one-qubit circuit on a given logical input.
Eigen::VectorXcd run_one(const OpticalCircuit &c, const Eigen::Vector2cd &in) {
    const EncodedState s = encode(in, c.input);
    const auto branches = run_circuit(c, s);
    EXPECT_EQ(branches.size(), 1u);
    return decode(branches.front().post);
}

std::array<double, 2> measure_probs(const OpticalCircuit &c, const Eigen::Vector2cd &in) {
    std::array<double, 2> p{0, 0};
    for (const auto &b : run_circuit(c, encode(in, c.input))) {
        p[measurement_outcome(b)] += b.probability;
    }
    return p;
}

Eigen::Matrix2cd hadamard() { return (Eigen::Matrix2cd() << kR, kR, kR, -kR).finished(); }

Eigen::Matrix2cd rz(double phi) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = std::polar(1.0, -phi / 2);
    m(1, 1) = std::polar(1.0, phi / 2);
    return m;
}

EncodedState two_seeds() {
    const EncodedState a = make_seed_cluster(0, 1, 0, 1);
    const EncodedState b = make_seed_cluster(2, 3, 2, 3);
    EncodedState j{tensor(a.state, b.state), a.frame};
    j.frame.insert(b.frame.begin(), b.frame.end());
    return j;
}

TEST(Circuits, Rt45Transformation) {
    const auto c = build_rt45(kPi, kPi);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 10; ++k) {
        const Eigen::Vector2cd in = random_qubit(rng);
        const Eigen::Vector2cd expected((in[0] - in[1]) * kR, (in[0] + in[1]) * kR);
        EXPECT_NEAR(vector_fidelity(run_one(c, in), expected), 1.0, kTol);
    }
    const auto out = run_one(c, qubit(kR, -kR));
    EXPECT_NEAR(std::norm(out[0]), 1.0, kTol);
}

TEST(Circuits, HadamardSetting) {
    const auto out = run_one(build_rt45(0, kPi), qubit(kR, kR));
    EXPECT_NEAR(std::norm(out[0]), 1.0, kTol);
}

TEST(Circuits, GateMatrices) {
    Eigen::Matrix2cd r45;
    r45 << kR, -kR, kR, kR;
    EXPECT_LT((gate_matrix(build_rt45(kPi, kPi)) - r45).cwiseAbs().maxCoeff(), kTol);
    EXPECT_LT((gate_matrix(build_rt45(0, kPi)) - hadamard()).cwiseAbs().maxCoeff(), kTol);
    OpticalCircuit id;
    id.name = "identity";
    id.input[0] = QubitSlot{Encoding::TimeBin, 0, 0, Pol::None};
    id.output = id.input;
    EXPECT_LT((gate_matrix(id) - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), kTol);
    EXPECT_EQ(build_rt45(kPi, kPi).active_count(), 4);
}

TEST(Circuits, LeakyCircuitIsNotDeterministic) {
    OpticalCircuit c = build_rt45(kPi, kPi);
    c.elements.pop_back();  // without the merging switch half the light stays on the aux rail
    EXPECT_THROW(gate_matrix(c), NotDeterministic);
}

TEST(Circuits, SeedCluster) {
    const EncodedState seed = make_seed_cluster();
    const Eigen::VectorXcd v = decode(seed);
    Eigen::Vector4cd cluster(0.5, 0.5, 0.5, -0.5);
    EXPECT_NEAR(vector_fidelity(v, cluster), 1.0, kTol);
    // The sl and ls terms carry the weight; the ss and ll terms cancel.
    Eigen::Vector4cd pair(kR, 0, 0, kR);
    EXPECT_NEAR(std::abs(pair.dot(v)), 0.0, kTol);
    EXPECT_NEAR(std::norm(v[0]) + std::norm(v[1]), 0.5, kTol);
    EXPECT_NEAR(std::norm(v[2]) + std::norm(v[3]), 0.5, kTol);
    EXPECT_NEAR(vector_fidelity(v, to_statevector(GraphState::chain({0, 1}))), 1.0, kTol);
}

TEST(Circuits, FusionSuccessProbabilities) {
    const EncodedState j = two_seeds();
    for (FusionKind k : {FusionKind::Type1TimeBin, FusionKind::Type1TimeBinSplit, FusionKind::Type2TimeBin,
                         FusionKind::Type1Pol, FusionKind::Type2Pol}) {
        const auto branches = fuse(k, j, 1, 2);
        double total = 0;
        for (const auto &b : branches) {
            total += b.probability;
        }
        EXPECT_NEAR(total, 1.0, kTol) << to_string(k);
        EXPECT_NEAR(success_probability(branches), 0.5, kTol) << to_string(k);
    }
}

TEST(Circuits, FusionBadFrame) {
    const EncodedState j = two_seeds();
    EncodedState clash = j;
    clash.frame[2].rail = 1;
    EXPECT_THROW(fusion_type1_timebin(clash, 1, 2), BadFrame);
    EXPECT_THROW(fusion_type2_timebin(j, 1, 1), BadFrame);
    EXPECT_THROW(fusion_type1_timebin(j, 1, 9), BadFrame);
}

TEST(Circuits, Type1MatchesGraphOracle) {
    const GraphState g = canonical_type1_input();
    for (FusionKind k : {FusionKind::Type1TimeBin, FusionKind::Type1TimeBinSplit, FusionKind::Type1Pol}) {
        for (const auto &b : fuse(k, encode_graph(g), 1, 2)) {
            EXPECT_NEAR(fusion_oracle_fidelity(k, g, 1, 2, b), 1.0, kTol) << to_string(k) << " " << b.outcome;
        }
    }
}

TEST(Circuits, Type1SuccessIsThreeChain) {
    const GraphState g = canonical_type1_input();
    for (const auto &b : fusion_type1_timebin(encode_graph(g), 1, 2)) {
        if (!b.success) {
            continue;
        }
        // brute-force local Pauli search against the plain 3-chain
        const Eigen::VectorXcd chain = to_statevector(GraphState::chain({0, 1, 3}));
        const Eigen::VectorXcd v = decode(b.post, {0, 1, 3});
        double best = 0;
        for (int code = 0; code < 64; ++code) {
            GraphState h = GraphState::chain({0, 1, 3});
            const int ids[] = {0, 1, 3};
            for (int q = 0; q < 3; ++q) {
                h = h.with_pauli(ids[q], static_cast<Pauli>((code >> (2 * q)) & 3));
            }
            best = std::max(best, vector_fidelity(to_statevector(h, {0, 1, 3}), v));
        }
        EXPECT_NEAR(best, 1.0, kTol);
        EXPECT_NEAR(vector_fidelity(chain, to_statevector(fuse1(g, 1, 2, true, b.byproduct), {0, 1, 3})),
                    std::abs(b.byproduct.weight()) ? 0.0 : 1.0, kTol);
    }
}

TEST(Circuits, Type2MatchesGraphOracle) {
    const GraphState g = canonical_type2_input();
    for (FusionKind k : {FusionKind::Type2TimeBin, FusionKind::Type2Pol}) {
        const auto branches = fuse(k, encode_graph(g), 2, 3);
        EXPECT_NEAR(success_probability(branches), 0.5, kTol);
        for (const auto &b : branches) {
            EXPECT_NEAR(fusion_oracle_fidelity(k, g, 2, 3, b), 1.0, kTol) << to_string(k) << " " << b.outcome;
        }
    }
    const GraphState merged = fuse2(g, 2, 3, true);
    EXPECT_EQ(merged.group(1), (std::vector<int>{1, 4}));
    EXPECT_EQ(merged.neighbors(1), (std::set<int>{0, 5}));
}

TEST(Circuits, FusionOracleOnOtherGraphs) {
    struct Case {
        GraphState g;
        int a;
        int b;
    };
    const std::vector<Case> type1{
        {GraphState::chain({0, 1, 2}).joined(GraphState::chain({3, 4})), 1, 3},
        {GraphState::star(0, {1, 2}).joined(GraphState::chain({3, 4, 5})), 0, 4},
        {GraphState::isolated({0, 1}), 0, 1},
    };
    for (const auto &c : type1) {
        for (FusionKind k : {FusionKind::Type1TimeBin, FusionKind::Type1Pol}) {
            for (const auto &b : fuse(k, encode_graph(c.g), c.a, c.b)) {
                EXPECT_NEAR(fusion_oracle_fidelity(k, c.g, c.a, c.b, b), 1.0, kTol) << b.outcome;
            }
        }
    }
    const GraphState three = GraphState::chain({0, 1}).with_redundant_copy(0, 2).joined(
        GraphState::chain({3, 5}).with_redundant_copy(3, 4).with_redundant_copy(3, 6));
    for (FusionKind k : {FusionKind::Type2TimeBin, FusionKind::Type2Pol}) {
        for (const auto &b : fuse(k, encode_graph(three), 2, 4)) {
            EXPECT_NEAR(fusion_oracle_fidelity(k, three, 2, 4, b), 1.0, kTol) << b.outcome;
        }
    }
}

TEST(Circuits, DetectorLayoutsAgree) {
    const EncodedState j = two_seeds();
    std::map<std::string, double> a;
    std::map<std::string, double> b;
    for (const auto &br : fusion_type1_timebin(j, 1, 2, false)) {
        a[br.outcome] += br.probability;
    }
    for (const auto &br : fusion_type1_timebin(j, 1, 2, true)) {
        b[br.outcome] += br.probability;
    }
    ASSERT_EQ(a.size(), b.size());
    for (const auto &[k, p] : a) {
        EXPECT_NEAR(b[k], p, kTol) << k;
    }
}

TEST(Circuits, PolAndTimeBinType1Agree) {
    const EncodedState j = two_seeds();
    const auto tb = fusion_type1_timebin(j, 1, 2);
    const auto pol = fusion_type1_pol(j, 1, 2);
    int compared = 0;
    for (const auto &x : tb) {
        for (const auto &y : pol) {
            if (x.success && y.success && x.byproduct == y.byproduct) {
                EXPECT_NEAR(vector_fidelity(decode(x.post), decode(y.post)), 1.0, kTol);
                ++compared;
            }
        }
    }
    EXPECT_EQ(compared, 2);
}

TEST(Circuits, FailureIsZMeasurement) {
    const GraphState g = canonical_type1_input();
    for (const auto &b : fusion_type1_timebin(encode_graph(g), 1, 2)) {
        if (b.success) {
            continue;
        }
        const GraphState z = measure_vertex(measure_vertex(g, 1, MeasureBasis::Z, 0), 2, MeasureBasis::Z, 0);
        double best = 0;
        for (int code = 0; code < 16; ++code) {
            const GraphState h = z.with_pauli(0, static_cast<Pauli>(code & 3)).with_pauli(3, static_cast<Pauli>(code >> 2));
            best = std::max(best, vector_fidelity(to_statevector(h, {0, 3}), decode(b.post, {0, 3})));
        }
        EXPECT_NEAR(best, 1.0, kTol);
    }
}

TEST(Circuits, Converters) {
    const QubitSlot q{Encoding::TimeBin, 0, 0, Pol::H};
    const OpticalCircuit t = tpc(q, 1);
    const auto s = run_circuit(t, encode(qubit(1, 0), t.input)).front().post;
    EXPECT_NEAR(std::norm(s.state.amplitude(OccupationState::single(Mode{0, 1, Pol::H}))), 1.0, kTol);
    const auto plus = run_circuit(t, encode(qubit(kR, kR), t.input)).front().post;
    EXPECT_NEAR(std::abs(plus.state.amplitude(OccupationState::single(Mode{0, 1, Pol::V})) - kR), 0, kTol);
    EXPECT_THROW(tpc(t.output.at(0), 1), WrongEncoding);
    EXPECT_THROW(ptc(q, 1), WrongEncoding);

    const OpticalCircuit p = ptc(t.output.at(0), 1);
    std::mt19937_64 rng(17);
    for (int k = 0; k < 100; ++k) {
        const Eigen::Vector2cd in = random_qubit(rng);
        const auto mid = run_circuit(t, encode(in, t.input)).front().post;
        const auto out = run_circuit(p, mid).front().post;
        EXPECT_NEAR(vector_fidelity(decode(out), in), 1.0, kTol);
        EXPECT_EQ(out.frame.at(0).bin, 1);
    }
    EXPECT_LT((gate_matrix(t) - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), kTol);
    EXPECT_LT((gate_matrix(p) - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff(), kTol);
}

TEST(Circuits, MeasurementExamples) {
    const QubitSlot q{Encoding::TimeBin, 0, 0, Pol::None};
    auto p = measure_probs(measure_circuit_timebin(0, 1, q, 1), qubit(kR, kR));
    EXPECT_NEAR(p[0], 1.0, kTol);
    p = measure_probs(measure_circuit_timebin(kPi, 1, q, 1), qubit(kR, kR));
    EXPECT_NEAR(p[1], 1.0, kTol);
    p = measure_probs(measure_circuit_timebin(kPi / 2, 1, q, 1), qubit(1, 0));
    EXPECT_NEAR(p[0], 0.5, kTol);
    EXPECT_NEAR(p[1], 0.5, kTol);
    EXPECT_THROW(measure_circuit_timebin(0.1, 0, q, 1), std::invalid_argument);
}

TEST(Circuits, MeasurementMatchesMatrixAndPolarization) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    const QubitSlot q{Encoding::TimeBin, 0, 0, Pol::None};
    const QubitSlot qh{Encoding::TimeBin, 0, 0, Pol::H};
    for (int k = 0; k < 50; ++k) {
        const double theta = angle(rng);
        const int sign = k % 2 ? -1 : 1;
        const Eigen::Vector2cd psi = random_qubit(rng);
        const Eigen::Vector2cd ideal = hadamard() * rz(sign * theta) * psi;
        const auto tb = measure_probs(measure_circuit_timebin(theta, sign, q, 1), psi);
        const auto pol = measure_probs(measure_circuit_pol(theta, sign, qh, 1), psi);
        for (int m = 0; m < 2; ++m) {
            EXPECT_NEAR(tb[m], std::norm(ideal[m]), kTol);
            EXPECT_NEAR(pol[m], tb[m], kTol);
        }
        EXPECT_LT(phase_insensitive_distance(gate_matrix(measure_circuit_timebin(theta, sign, q, 1)),
                                             gate_matrix(measure_circuit_pol(theta, sign, qh, 1))),
                  kTol);
    }
}

TEST(Circuits, Corrections) {
    const QubitSlot q{Encoding::TimeBin, 0, 0, Pol::None};
    const OpticalCircuit x = bit_flip_circuit(q, 1);
    EXPECT_EQ(x.frame_shift, 1);
    EXPECT_LT((gate_matrix(x) - pauli_matrix(Pauli::X)).cwiseAbs().maxCoeff(), kTol);
    const auto l = run_circuit(x, encode(qubit(1, 0), x.input)).front().post;
    EXPECT_NEAR(std::norm(decode(l)[1]), 1.0, kTol);
    const OpticalCircuit x2 = bit_flip_circuit(x.output.at(0), 1);
    const auto twice = run_circuit(x2, l).front().post;
    EXPECT_EQ(twice.frame.at(0).bin, 2);
    EXPECT_NEAR(std::norm(decode(twice)[0]), 1.0, kTol);

    const OpticalCircuit z = phase_flip_circuit(q);
    EXPECT_LT(phase_insensitive_distance(gate_matrix(z), pauli_matrix(Pauli::Z)), kTol);
    const auto minus = run_one(z, qubit(kR, kR));
    EXPECT_NEAR(vector_fidelity(minus, qubit(kR, -kR)), 1.0, kTol);
    EXPECT_THROW(bit_flip_circuit(QubitSlot{Encoding::Polarization, 0, 0, Pol::None}, 1), WrongEncoding);
}

TEST(Circuits, EncodingDuality) {
    // Rz then Hadamard in both encodings, compared as gates.
    for (double theta : {0.0, 0.3, kPi / 2}) {
        const auto tb = gate_matrix(measure_circuit_timebin(theta, 1, QubitSlot{}, 1));
        EXPECT_LT(phase_insensitive_distance(tb, hadamard() * rz(theta)), kTol);
    }
}

TEST(Circuits, Catalog) {
    const std::vector<std::string> names{"rt45", "hadamard_t", "fusion1_tb", "fusion2_tb", "fusion1_pol", "fusion2_pol",
                                         "tpc",  "ptc",        "measure_tb", "measure_pol", "bitflip",    "phaseflip"};
    ASSERT_EQ(catalog().size(), names.size());
    for (const auto &n : names) {
        const OpticalCircuit c = catalog_circuit(n);
        EXPECT_EQ(c.name, n);
        EXPECT_FALSE(c.elements.empty());
    }
    EXPECT_EQ(catalog_circuit("fusion1_tb").active_count(), 5);
    EXPECT_THROW(catalog_circuit("nope"), std::out_of_range);
}

TEST(Circuits, ByproductTableIsFrozen) {
    std::ifstream in(FIBERLOOM_DATA_DIR "/byproduct_table.txt");
    ASSERT_TRUE(in) << "missing data/byproduct_table.txt";
    std::stringstream text;
    text << in.rdbuf();
    const ByproductTable frozen = parse_byproduct_table(text.str());
    const ByproductTable &derived = byproduct_table();
    ASSERT_EQ(frozen.size(), derived.size());
    for (const auto &[key, entry] : derived) {
        auto it = frozen.find(key);
        ASSERT_NE(it, frozen.end()) << to_string(key.kind) << " " << key.outcome;
        EXPECT_EQ(it->second.byproduct, entry.byproduct);
        EXPECT_EQ(it->second.success, entry.success);
        EXPECT_NEAR(entry.fidelity, 1.0, kTol);
    }
    EXPECT_EQ(parse_byproduct_table(format_byproduct_table(derived)).size(), derived.size());
}

}  // namespace
}  // namespace fiberloom
