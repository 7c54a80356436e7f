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

// Ideal graph (cluster) states with a tracked Pauli frame.
//
// Vertices are photons. Photons that redundantly encode one logical qubit
// (|0> -> |00..0>, |1> -> |11..1>) form a group; edges connect the groups'
// representatives (the lowest id in each group). The state represented is
//
//     P * Embed( V * prod_{(a,b) in E} CZ_ab |+>^L )
//
// where L is the set of logical vertices, V a product of per-logical-vertex
// local operators (identity unless a graph measurement rule introduced one),
// Embed the redundancy isometry and P the per-photon Pauli frame.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fiberloom {

struct SelfLoop : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct MissingVertex : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct TooLarge : std::length_error {
    using std::length_error::length_error;
};
struct Overlap : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct MissingRedundancy : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ImpossibleOutcome : std::domain_error {
    using std::domain_error::domain_error;
};

inline constexpr int kMaxStatevectorQubits = 12;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);
Eigen::Matrix2cd pauli_matrix(Pauli p);

struct PauliBits {
    bool x = false;
    bool z = false;

    bool trivial() const { return !x && !z; }
    Pauli pauli() const;
    bool operator==(const PauliBits &) const = default;
};

class GraphState {
   public:
    GraphState() = default;

    static GraphState isolated(const std::vector<int> &vertices);
    static GraphState chain(const std::vector<int> &vertices);
    static GraphState star(int center, const std::vector<int> &leaves);

    const std::set<int> &vertices() const { return vertices_; }
    const std::set<std::pair<int, int>> &edges() const { return edges_; }
    bool contains(int v) const { return vertices_.contains(v); }
    bool has_edge(int a, int b) const;

    /// Neighbors of v's logical vertex (representatives).
    std::set<int> neighbors(int v) const;

    int representative(int v) const;
    std::vector<int> group(int v) const;
    std::vector<int> logical_vertices() const;
    bool redundant(int v) const { return group(v).size() > 1; }

    PauliBits frame(int v) const;
    /// Local operator of v's logical vertex, if not the identity.
    std::optional<Eigen::Matrix2cd> local_op(int v) const;

    GraphState with_vertex(int v) const;
    GraphState with_edge_toggled(int a, int b) const;
    /// Multiplies the Pauli frame of photon v by p (global phases dropped).
    GraphState with_pauli(int v, Pauli p) const;
    /// Adds photon `copy` as a redundant copy of v's logical vertex.
    GraphState with_redundant_copy(int v, int copy) const;
    GraphState without_vertex(int v) const;

    /// Disjoint union.
    GraphState joined(const GraphState &other) const;
    GraphState relabeled(const std::map<int, int> &mapping) const;

    std::string to_text() const;
    static GraphState from_text(const std::string &text);

    bool operator==(const GraphState &other) const;

    /// Composes m after the local operator of v's logical vertex, i.e. applies
    /// m to the logical qubit before embedding and the Pauli frame. Paulis on
    /// a vertex without a local operator are folded into the frame instead.
    GraphState with_inner_op(int v, const Eigen::Matrix2cd &m) const;
    /// Merges b's logical vertex into a's: one group holding both member
    /// sets, neighborhoods combined by symmetric difference.
    GraphState with_merged(int a, int b) const;

    void require(int v) const;

   private:
    void set_edge(int a, int b, bool present);
    void move_representative(int old_rep, int new_rep);

    std::set<int> vertices_;
    std::set<std::pair<int, int>> edges_;
    std::map<int, PauliBits> frame_;
    std::map<int, Eigen::Matrix2cd> local_op_;  // keyed by representative
    std::map<int, std::vector<int>> groups_;    // representative -> all members, only for groups of size > 1
};

/// Toggles the edge (a, b) between two logical vertices. Pauli frames on a
/// and b are propagated through the controlled-Z.
GraphState apply_cz(const GraphState &g, int a, int b);

/// Amplitudes over the photons in `order` (default: ascending id), big-endian:
/// the first listed photon is the most significant bit.
Eigen::VectorXcd to_statevector(const GraphState &g, const std::vector<int> &order = {});

enum class MeasureBasis { Z, X };

/// Pauli measurement by graph rules. `outcome` is the physical result
/// (0 for the +1 eigenstate). Z applies to unencoded logical vertices; X to
/// any photon (redundant members are simply dropped from their group).
GraphState measure_vertex(const GraphState &g, int v, MeasureBasis basis, int outcome);

/// Probability of `outcome` for a Pauli measurement, from the state vector.
double outcome_probability(const GraphState &g, int v, MeasureBasis basis, int outcome);

struct ProjectedState {
    double probability = 0.0;
    std::vector<int> order;  // remaining photons
    Eigen::VectorXcd state;  // normalized; empty when probability is 0
};

/// Measures photon v in the basis obtained by applying H * Rz(sign * theta)
/// before a computational-basis readout; Rz(phi) = diag(e^{-i phi/2}, e^{i phi/2}).
ProjectedState measure_vertex_angle(const GraphState &g, int v, double theta, int sign, int outcome);

/// Roles of the vertices touched by a fusion, used to express byproducts.
enum class FusionRole : std::uint8_t {
    Fused,       // surviving photon of a type-I fusion
    Partner1,    // remaining redundant partners of the first fused photon
    Partner2,    // remaining redundant partners of the second fused photon
    Neighbors1,  // logical neighbors of the first fused vertex
    Neighbors2,  // logical neighbors of the second fused vertex
};

std::string role_name(FusionRole r);

/// Pauli byproduct attached to each role (absent = identity).
struct Byproduct {
    std::map<FusionRole, Pauli> paulis;

    Pauli at(FusionRole r) const;
    int weight() const;
    std::string str() const;
    static Byproduct parse(const std::string &s);
    bool operator==(const Byproduct &) const = default;
};

/// Type-I fusion of unencoded vertex v1 (in g1) with v2 (in g2).
/// Success keeps photon v1 as the fused vertex, whose neighborhood becomes
/// N(v1) + N(v2). Failure removes both vertices as Z measurements do; the
/// outcome dependence is carried by the byproduct on the neighbor roles.
GraphState fuse1(const GraphState &g1, int v1, const GraphState &g2, int v2, bool success,
                 const Byproduct &byproduct = {});

/// Type-II fusion of photons v1 and v2, each a member of a redundantly
/// encoded logical vertex. Success merges the two logical vertices into one
/// encoded by the remaining partners; failure removes the two photons as X
/// measurements do, leaving both clusters intact.
GraphState fuse2(const GraphState &g1, int v1, const GraphState &g2, int v2, bool success,
                 const Byproduct &byproduct = {});

/// Both fusions on vertices of one graph (e.g. an already joined pair).
GraphState fuse1(const GraphState &g, int v1, int v2, bool success, const Byproduct &byproduct = {});
GraphState fuse2(const GraphState &g, int v1, int v2, bool success, const Byproduct &byproduct = {});

/// Applies a byproduct to the vertices playing each role. Partner roles form
/// one logical vertex; the other roles list logical vertices.
struct RoleMap {
    std::map<FusionRole, std::vector<int>> members;
};
GraphState apply_byproduct(const GraphState &g, const RoleMap &roles, const Byproduct &b);

/// |<a|b>|^2 of two state vectors.
double vector_fidelity(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b);

}  // namespace fiberloom
