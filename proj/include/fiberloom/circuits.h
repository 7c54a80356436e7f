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

// Named optical circuits for time-bin and polarization qubits: the
// reconfigurable one-qubit gate, fusion gates of both types, encoding
// converters, feedforward measurements and Pauli corrections.
//
// Time-bin qubits occupy two consecutive bins of one rail (|s> = |0> at
// `bin`, |l> = |1> at bin + 1). Polarization qubits occupy the H and V modes
// of one rail and bin. Every builder states where its output qubit lands; the
// output bin of a time-bin gate is usually later than its input bin.

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fiberloom/elements.h"
#include "fiberloom/fock.h"
#include "fiberloom/graph_state.h"

namespace fiberloom {

struct BadFrame : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct WrongEncoding : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NotDeterministic : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Encoding { TimeBin, Polarization };

std::string to_string(Encoding e);

struct QubitSlot {
    Encoding encoding = Encoding::TimeBin;
    int rail = 0;
    int bin = 0;
    /// Carrier polarization of a time-bin qubit (None when polarization is
    /// not tracked, H inside polarization-scheme circuits). Unused for
    /// polarization qubits.
    Pol pol = Pol::None;

    Mode zero() const;
    Mode one() const;
    bool operator==(const QubitSlot &) const = default;
};

using QubitFrame = std::map<int, QubitSlot>;

struct EncodedState {
    PhotonicState state;
    QubitFrame frame;
};

/// Places logical amplitudes (big-endian over `order`, default ascending
/// qubit ids) onto single photons at the frame's slots.
EncodedState encode(const Eigen::VectorXcd &amplitudes, const QubitFrame &frame, const std::vector<int> &order = {});

/// Reads logical amplitudes back. `leakage` receives the weight outside the
/// qubit subspace.
Eigen::VectorXcd decode(const EncodedState &s, const std::vector<int> &order = {}, double *leakage = nullptr);

/// Encodes a graph state with one time-bin qubit per photon: photon v on
/// rail v, bins (bin, bin + 1).
EncodedState encode_graph(const GraphState &g, int bin = 1);

/// Relabels Pol::None modes as H so that polarization elements can act.
EncodedState lift_polarization(const EncodedState &s);
/// Inverse of lift_polarization; only valid when no photon is V-polarized.
EncodedState drop_polarization(const EncodedState &s);

struct OpticalCircuit {
    std::string name;
    std::string provenance;
    std::vector<Element> elements;
    std::set<int> rails;
    QubitFrame input;
    QubitFrame output;  // qubits absent here are consumed by detection
    std::vector<Detector> detectors;
    /// Bins by which the output frame trails the ideal one (bit flip only).
    int frame_shift = 0;

    int active_count() const;
    std::string describe() const;
};

PhotonicState run_elements(const OpticalCircuit &c, const PhotonicState &s);

struct CircuitBranch {
    std::vector<int> readings;  // one per detector, thresholded where applicable
    std::vector<int> mode_counts;
    double probability = 0.0;
    EncodedState post;

    std::string label(const std::vector<Detector> &detectors) const;
};

/// Runs the elements, then the detectors (if any). Without detectors a single
/// branch with probability 1 is returned. The post frame replaces the
/// circuit's input qubits with its output qubits.
std::vector<CircuitBranch> run_circuit(const OpticalCircuit &c, const EncodedState &in);

/// Logical 2x2 action on one qubit, global phase fixed so that the first
/// nonzero entry in column-major order is real and positive.
Eigen::Matrix2cd gate_matrix(const OpticalCircuit &c, int qubit = 0);

/// Equality up to global phase, as the largest entry-wise deviation after
/// phase alignment.
double phase_insensitive_distance(const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b);

// ---------------------------------------------------------------------------
// One-qubit gates and converters

/// Reconfigurable time-bin gate. (pi, pi) gives R(45 deg) = [[1,-1],[1,1]]/sqrt2,
/// (0, pi) the Hadamard. The qubit at (rail, bin) leaves at (rail, bin + 1);
/// `aux` carries the upper arm and returns to vacuum.
OpticalCircuit build_rt45(double phi1, double phi2, int rail = 0, int aux = 1, int bin = 0, Pol pol = Pol::None);

/// Elements of the gate above, optionally without the final merging switch.
std::vector<Element> rt45_elements(double phi1, double phi2, int rail, int aux, int bin, bool final_switch = true);

/// Time-bin to polarization converter: (rail, bin) -> (rail, bin + 1, H/V).
OpticalCircuit tpc(const QubitSlot &q, int aux);
/// Polarization to time-bin converter: (rail, bin, H/V) -> (rail, bin), H carrier.
OpticalCircuit ptc(const QubitSlot &q, int aux);

/// Applies Rz(sign * theta) then a Hadamard and detects. Detector "m0" fires
/// for outcome 0, "m1" for outcome 1.
OpticalCircuit measure_circuit_timebin(double theta, int sign, const QubitSlot &q, int aux);
OpticalCircuit measure_circuit_pol(double theta, int sign, const QubitSlot &q, int aux);
/// 0 or 1 from a measurement circuit's readings.
int measurement_outcome(const CircuitBranch &b);

/// X on a time-bin qubit: |s> is delayed by two bins. The output frame is
/// shifted by one bin (recorded in frame_shift).
OpticalCircuit bit_flip_circuit(const QubitSlot &q, int aux);
/// Z on a time-bin qubit, realized as Rz(-pi).
OpticalCircuit phase_flip_circuit(const QubitSlot &q);

/// The 2-qubit cluster (|ss> + |sl> + |ls> - |ll>)/2: an ideal pair source
/// followed by the Hadamard setting on the second photon. Both qubits end on
/// bins (1, 2); qubit ids q0, q1 sit on rails r0, r1.
EncodedState make_seed_cluster(int q0 = 0, int q1 = 1, int r0 = 0, int r1 = 1);

// ---------------------------------------------------------------------------
// Fusion

enum class FusionKind { Type1TimeBin, Type1TimeBinSplit, Type2TimeBin, Type1Pol, Type2Pol };

std::string to_string(FusionKind k);
/// Inverse of to_string; throws std::invalid_argument for unknown names.
FusionKind fusion_kind_from_string(const std::string &s);
bool is_type1(FusionKind k);

/// A fusion gate instantiated for two qubit slots.
struct FusionCircuit {
    FusionKind kind = FusionKind::Type1TimeBin;
    OpticalCircuit circuit;
    /// Read only when the heralding detectors report failure (type I), so
    /// that the surviving photon is absorbed and the post-state stays pure.
    std::vector<Detector> on_failure;
    std::function<bool(const std::vector<int> &)> heralds_success;
    QubitSlot fused_output;  // type I success only
};

FusionCircuit build_fusion(FusionKind kind, const QubitSlot &a, const QubitSlot &b, int aux_a, int aux_b);

struct FusionBranch {
    bool success = false;
    std::string outcome;  // detector readings, e.g. "B.s=1 B.l=0"
    double probability = 0.0;
    EncodedState post;
    /// Pauli correction relative to the ideal graph rule (from the byproduct table).
    Byproduct byproduct;
};

/// All detection branches of a fusion between qubits qa and qb of `joint`.
/// Distinct branches may share an outcome label (e.g. a threshold click
/// from one or two photons); they are incoherent and listed separately.
std::vector<FusionBranch> fuse(FusionKind kind, const EncodedState &joint, int qa, int qb);

std::vector<FusionBranch> fusion_type1_timebin(const EncodedState &joint, int qa, int qb, bool split_detectors = false);
std::vector<FusionBranch> fusion_type2_timebin(const EncodedState &joint, int qa, int qb);
std::vector<FusionBranch> fusion_type1_pol(const EncodedState &joint, int qa, int qb);
std::vector<FusionBranch> fusion_type2_pol(const EncodedState &joint, int qa, int qb);

double success_probability(const std::vector<FusionBranch> &branches);
const FusionBranch &sample_branch(const std::vector<FusionBranch> &branches, std::mt19937_64 &rng);

// ---------------------------------------------------------------------------
// Byproduct table
//
// For every fusion kind and outcome, the Pauli correction that maps the graph
// rule's prediction onto the simulated post-state. The entries are derived by
// simulating the canonical inputs below and searching role assignments in
// order of increasing weight.

struct ByproductKey {
    FusionKind kind;
    std::string outcome;
    auto operator<=>(const ByproductKey &) const = default;
};

struct ByproductEntry {
    bool success = false;
    Byproduct byproduct;
    double fidelity = 0.0;
};

using ByproductTable = std::map<ByproductKey, ByproductEntry>;

/// Two 2-chains {0-1}, {2-3}; qubits 1 and 2 are fused.
GraphState canonical_type1_input();
/// 0 - {1, 2} and {3, 4} - 5; photons 2 and 3 are fused.
GraphState canonical_type2_input();

ByproductTable derive_byproduct_table();
/// Derived once per process and cached.
const ByproductTable &byproduct_table();
std::string format_byproduct_table(const ByproductTable &t);
ByproductTable parse_byproduct_table(const std::string &text);

/// Fidelity of a fusion branch with the graph rule's prediction for input g
/// (encoded with encode_graph), after the branch's byproduct.
double fusion_oracle_fidelity(FusionKind kind, const GraphState &g, int va, int vb, const FusionBranch &branch);

// ---------------------------------------------------------------------------
// Catalog

struct CatalogEntry {
    std::string name;
    std::string provenance;
    std::function<OpticalCircuit()> build;
};

const std::vector<CatalogEntry> &catalog();
/// Throws std::out_of_range for unknown names.
OpticalCircuit catalog_circuit(const std::string &name);

}  // namespace fiberloom
