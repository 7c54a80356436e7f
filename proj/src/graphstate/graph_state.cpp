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

#include "fiberloom/graph_state.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace fiberloom {

namespace {

using cplx = std::complex<double>;

std::pair<int, int> edge_key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

Eigen::Matrix2cd sqrt_plus_iy() {
    Eigen::Matrix2cd m;
    m << 1, 1, -1, 1;
    return m / std::sqrt(2.0);
}

Eigen::Matrix2cd sqrt_minus_iy() {
    Eigen::Matrix2cd m;
    m << 1, -1, 1, 1;
    return m / std::sqrt(2.0);
}

// Returns the Pauli p with m = c * p for |c| = 1, if any.
std::optional<Pauli> as_pauli(const Eigen::Matrix2cd &m) {
    for (Pauli p : {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z}) {
        const Eigen::Matrix2cd pm = pauli_matrix(p);
        const cplx c = (pm.adjoint() * m).trace() / 2.0;
        if (std::abs(std::abs(c) - 1.0) < 1e-12 && (m - c * pm).cwiseAbs().maxCoeff() < 1e-12) {
            return p;
        }
    }
    return std::nullopt;
}

// Applies the row vector `bra` to qubit `pos` (big-endian) of an n-qubit state.
Eigen::VectorXcd project_qubit(const Eigen::VectorXcd &psi, int n, int pos, cplx bra0, cplx bra1) {
    const int shift = n - 1 - pos;
    const Eigen::Index out_dim = Eigen::Index{1} << (n - 1);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(out_dim);
    for (Eigen::Index j = 0; j < out_dim; ++j) {
        const Eigen::Index high = (j >> shift) << (shift + 1);
        const Eigen::Index low = j & ((Eigen::Index{1} << shift) - 1);
        const Eigen::Index i0 = high | low;
        const Eigen::Index i1 = i0 | (Eigen::Index{1} << shift);
        out[j] = bra0 * psi[i0] + bra1 * psi[i1];
    }
    return out;
}

Eigen::Matrix2cd hadamard() {
    Eigen::Matrix2cd h;
    h << 1, 1, 1, -1;
    return h / std::sqrt(2.0);
}

Eigen::Matrix2cd rz(double phi) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = std::polar(1.0, -phi / 2);
    m(1, 1) = std::polar(1.0, phi / 2);
    return m;
}

ProjectedState project_vertex(const GraphState &g, int v, const Eigen::Matrix2cd &basis_change, int outcome) {
    g.require(v);
    if (outcome != 0 && outcome != 1) {
        throw std::invalid_argument("measurement outcome must be 0 or 1");
    }
    std::vector<int> order(g.vertices().begin(), g.vertices().end());
    const Eigen::VectorXcd psi = to_statevector(g, order);
    const int n = static_cast<int>(order.size());
    const int pos = static_cast<int>(std::find(order.begin(), order.end(), v) - order.begin());
    ProjectedState r;
    Eigen::VectorXcd out = project_qubit(psi, n, pos, basis_change(outcome, 0), basis_change(outcome, 1));
    r.probability = out.squaredNorm();
    order.erase(order.begin() + pos);
    r.order = std::move(order);
    if (r.probability > 1e-15) {
        r.state = out / std::sqrt(r.probability);
    }
    return r;
}

GraphState local_complement(const GraphState &g, int a) {
    const auto nb = g.neighbors(a);
    GraphState h = g;
    for (auto i = nb.begin(); i != nb.end(); ++i) {
        for (auto j = std::next(i); j != nb.end(); ++j) {
            h = h.with_edge_toggled(*i, *j);
        }
    }
    return h;
}

void require_plain(const GraphState &g, int v, const char *what) {
    if (g.local_op(v)) {
        throw std::invalid_argument(std::string(what) + ": vertex " + std::to_string(v) +
                                    " carries a local operator; use the state-vector path");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// Paulis

char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

Pauli pauli_from_char(char c) {
    switch (c) {
        case 'I':
            return Pauli::I;
        case 'X':
            return Pauli::X;
        case 'Y':
            return Pauli::Y;
        case 'Z':
            return Pauli::Z;
        default:
            throw std::invalid_argument(std::string("not a Pauli: ") + c);
    }
}

Eigen::Matrix2cd pauli_matrix(Pauli p) {
    Eigen::Matrix2cd m;
    const cplx i(0, 1);
    switch (p) {
        case Pauli::I:
            m << 1, 0, 0, 1;
            break;
        case Pauli::X:
            m << 0, 1, 1, 0;
            break;
        case Pauli::Y:
            m << 0, -i, i, 0;
            break;
        case Pauli::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

Pauli PauliBits::pauli() const {
    if (x && z) {
        return Pauli::Y;
    }
    return x ? Pauli::X : (z ? Pauli::Z : Pauli::I);
}

// ---------------------------------------------------------------------------
// GraphState structure

GraphState GraphState::isolated(const std::vector<int> &vertices) {
    GraphState g;
    for (int v : vertices) {
        g = g.with_vertex(v);
    }
    return g;
}

GraphState GraphState::chain(const std::vector<int> &vertices) {
    GraphState g = isolated(vertices);
    for (std::size_t k = 1; k < vertices.size(); ++k) {
        g = g.with_edge_toggled(vertices[k - 1], vertices[k]);
    }
    return g;
}

GraphState GraphState::star(int center, const std::vector<int> &leaves) {
    GraphState g = isolated({center});
    for (int l : leaves) {
        g = g.with_vertex(l).with_edge_toggled(center, l);
    }
    return g;
}

void GraphState::require(int v) const {
    if (!vertices_.contains(v)) {
        throw MissingVertex("vertex " + std::to_string(v) + " is not in the graph");
    }
}

bool GraphState::has_edge(int a, int b) const {
    return edges_.contains(edge_key(representative(a), representative(b)));
}

int GraphState::representative(int v) const {
    require(v);
    for (const auto &[rep, members] : groups_) {
        if (std::binary_search(members.begin(), members.end(), v)) {
            return rep;
        }
    }
    return v;
}

std::vector<int> GraphState::group(int v) const {
    const int r = representative(v);
    auto it = groups_.find(r);
    return it == groups_.end() ? std::vector<int>{r} : it->second;
}

std::vector<int> GraphState::logical_vertices() const {
    std::vector<int> out;
    for (int v : vertices_) {
        if (representative(v) == v) {
            out.push_back(v);
        }
    }
    return out;
}

std::set<int> GraphState::neighbors(int v) const {
    const int r = representative(v);
    std::set<int> out;
    for (const auto &[a, b] : edges_) {
        if (a == r) {
            out.insert(b);
        } else if (b == r) {
            out.insert(a);
        }
    }
    return out;
}

PauliBits GraphState::frame(int v) const {
    require(v);
    auto it = frame_.find(v);
    return it == frame_.end() ? PauliBits{} : it->second;
}

std::optional<Eigen::Matrix2cd> GraphState::local_op(int v) const {
    auto it = local_op_.find(representative(v));
    if (it == local_op_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void GraphState::set_edge(int a, int b, bool present) {
    if (present) {
        edges_.insert(edge_key(a, b));
    } else {
        edges_.erase(edge_key(a, b));
    }
}

void GraphState::move_representative(int old_rep, int new_rep) {
    if (old_rep == new_rep) {
        return;
    }
    std::set<std::pair<int, int>> edges;
    for (auto [a, b] : edges_) {
        if (a == old_rep) {
            a = new_rep;
        }
        if (b == old_rep) {
            b = new_rep;
        }
        edges.insert(edge_key(a, b));
    }
    edges_ = std::move(edges);
    if (auto it = local_op_.find(old_rep); it != local_op_.end()) {
        local_op_[new_rep] = it->second;
        local_op_.erase(old_rep);
    }
    if (auto it = groups_.find(old_rep); it != groups_.end()) {
        auto members = it->second;
        groups_.erase(it);
        groups_[new_rep] = std::move(members);
    }
}

GraphState GraphState::with_vertex(int v) const {
    if (vertices_.contains(v)) {
        throw std::invalid_argument("vertex " + std::to_string(v) + " already exists");
    }
    GraphState g = *this;
    g.vertices_.insert(v);
    return g;
}

GraphState GraphState::with_edge_toggled(int a, int b) const {
    const int ra = representative(a);
    const int rb = representative(b);
    if (ra == rb) {
        throw SelfLoop("edge would connect vertex " + std::to_string(a) + " to itself");
    }
    GraphState g = *this;
    g.set_edge(ra, rb, !edges_.contains(edge_key(ra, rb)));
    return g;
}

GraphState GraphState::with_pauli(int v, Pauli p) const {
    require(v);
    GraphState g = *this;
    PauliBits &bits = g.frame_[v];
    bits.x ^= (p == Pauli::X || p == Pauli::Y);
    bits.z ^= (p == Pauli::Z || p == Pauli::Y);
    if (bits.trivial()) {
        g.frame_.erase(v);
    }
    return g;
}

GraphState GraphState::with_redundant_copy(int v, int copy) const {
    const int r = representative(v);
    GraphState g = with_vertex(copy);
    std::vector<int> members = group(r);
    members.push_back(copy);
    std::sort(members.begin(), members.end());
    g.groups_.erase(r);
    g.groups_[r] = members;
    g.move_representative(r, members.front());
    return g;
}

GraphState GraphState::without_vertex(int v) const {
    const int r = representative(v);
    GraphState g = *this;
    g.vertices_.erase(v);
    g.frame_.erase(v);
    std::vector<int> members = group(r);
    if (members.size() > 1) {
        members.erase(std::find(members.begin(), members.end(), v));
        const int new_rep = members.front();
        g.groups_.erase(r);
        if (members.size() > 1) {
            g.groups_[r] = members;
        }
        // Re-key edges and operators from r to the new representative. When r
        // itself was removed its edges move to the next member.
        if (new_rep != r) {
            if (members.size() > 1) {
                g.move_representative(r, new_rep);
            } else {
                std::set<std::pair<int, int>> edges;
                for (auto [a, b] : g.edges_) {
                    if (a == r) {
                        a = new_rep;
                    }
                    if (b == r) {
                        b = new_rep;
                    }
                    edges.insert(edge_key(a, b));
                }
                g.edges_ = std::move(edges);
                if (auto it = g.local_op_.find(r); it != g.local_op_.end()) {
                    g.local_op_[new_rep] = it->second;
                    g.local_op_.erase(it);
                }
            }
        }
        return g;
    }
    std::erase_if(g.edges_, [v](const auto &e) { return e.first == v || e.second == v; });
    g.local_op_.erase(v);
    return g;
}

GraphState GraphState::joined(const GraphState &other) const {
    for (int v : other.vertices_) {
        if (vertices_.contains(v)) {
            throw Overlap("graphs share vertex " + std::to_string(v));
        }
    }
    GraphState g = *this;
    g.vertices_.insert(other.vertices_.begin(), other.vertices_.end());
    g.edges_.insert(other.edges_.begin(), other.edges_.end());
    g.frame_.insert(other.frame_.begin(), other.frame_.end());
    g.local_op_.insert(other.local_op_.begin(), other.local_op_.end());
    g.groups_.insert(other.groups_.begin(), other.groups_.end());
    return g;
}

GraphState GraphState::relabeled(const std::map<int, int> &mapping) const {
    auto map_id = [&](int v) {
        auto it = mapping.find(v);
        return it == mapping.end() ? v : it->second;
    };
    std::map<int, int> new_rep;  // old representative -> new representative
    GraphState g;
    for (int v : vertices_) {
        g.vertices_.insert(map_id(v));
    }
    if (g.vertices_.size() != vertices_.size()) {
        throw std::invalid_argument("relabeling is not injective");
    }
    for (int r : logical_vertices()) {
        std::vector<int> members;
        for (int m : group(r)) {
            members.push_back(map_id(m));
        }
        std::sort(members.begin(), members.end());
        new_rep[r] = members.front();
        if (members.size() > 1) {
            g.groups_[members.front()] = members;
        }
    }
    for (const auto &[a, b] : edges_) {
        g.edges_.insert(edge_key(new_rep.at(a), new_rep.at(b)));
    }
    for (const auto &[v, bits] : frame_) {
        g.frame_[map_id(v)] = bits;
    }
    for (const auto &[r, op] : local_op_) {
        g.local_op_[new_rep.at(r)] = op;
    }
    return g;
}

GraphState GraphState::with_inner_op(int v, const Eigen::Matrix2cd &m) const {
    const int r = representative(v);
    GraphState g = *this;
    auto it = local_op_.find(r);
    if (it == local_op_.end()) {
        if (auto p = as_pauli(m)) {
            const bool x = *p == Pauli::X || *p == Pauli::Y;
            const bool z = *p == Pauli::Z || *p == Pauli::Y;
            if (x) {
                for (int member : group(r)) {
                    g = g.with_pauli(member, Pauli::X);
                }
            }
            if (z) {
                g = g.with_pauli(r, Pauli::Z);
            }
            return g;
        }
        g.local_op_[r] = m;
        return g;
    }
    const Eigen::Matrix2cd combined = it->second * m;
    if (as_pauli(combined) == Pauli::I) {
        g.local_op_.erase(r);
    } else {
        g.local_op_[r] = combined;
    }
    return g;
}

GraphState GraphState::with_merged(int a, int b) const {
    const int ra = representative(a);
    const int rb = representative(b);
    if (ra == rb) {
        throw SelfLoop("cannot merge a logical vertex with itself");
    }
    if (local_op_.contains(ra) || local_op_.contains(rb)) {
        throw std::invalid_argument("cannot merge vertices carrying local operators");
    }
    GraphState g = *this;
    const bool adjacent = edges_.contains(edge_key(ra, rb));
    g.set_edge(ra, rb, false);
    for (int n : neighbors(rb)) {
        if (n == ra) {
            continue;
        }
        g.set_edge(rb, n, false);
        g.set_edge(ra, n, !g.edges_.contains(edge_key(ra, n)));
    }
    std::vector<int> members = group(ra);
    for (int m : group(rb)) {
        members.push_back(m);
    }
    std::sort(members.begin(), members.end());
    g.groups_.erase(ra);
    g.groups_.erase(rb);
    g.groups_[ra] = members;
    g.move_representative(ra, members.front());
    if (adjacent) {
        // CZ between two copies of the same logical value acts as Z.
        g = g.with_pauli(members.front(), Pauli::Z);
    }
    return g;
}

bool GraphState::operator==(const GraphState &other) const {
    if (vertices_ != other.vertices_ || edges_ != other.edges_ || frame_ != other.frame_ ||
        groups_ != other.groups_ || local_op_.size() != other.local_op_.size()) {
        return false;
    }
    for (const auto &[r, op] : local_op_) {
        auto it = other.local_op_.find(r);
        if (it == other.local_op_.end() || (it->second - op).cwiseAbs().maxCoeff() > 1e-12) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Text form

std::string GraphState::to_text() const {
    std::ostringstream out;
    out << std::setprecision(17);
    for (int v : vertices_) {
        out << "vertex " << v << "\n";
    }
    for (const auto &[a, b] : edges_) {
        out << a << " " << b << "\n";
    }
    if (!frame_.empty()) {
        out << "[frame]\n";
        for (const auto &[v, bits] : frame_) {
            out << v << " " << bits.x << " " << bits.z << "\n";
        }
    }
    if (!groups_.empty()) {
        out << "[groups]\n";
        for (const auto &[r, members] : groups_) {
            for (std::size_t k = 0; k < members.size(); ++k) {
                out << (k ? " " : "") << members[k];
            }
            out << "\n";
        }
    }
    if (!local_op_.empty()) {
        out << "[ops]\n";
        for (const auto &[r, m] : local_op_) {
            out << r;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    out << " " << m(i, j).real() << " " << m(i, j).imag();
                }
            }
            out << "\n";
        }
    }
    return out.str();
}

GraphState GraphState::from_text(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    std::string section = "edges";
    GraphState g;
    int line_no = 0;
    auto fail = [&](const std::string &msg) {
        throw std::invalid_argument("graph text line " + std::to_string(line_no) + ": " + msg);
    };
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> groups;
    std::vector<std::pair<int, PauliBits>> frames;
    std::vector<std::pair<int, Eigen::Matrix2cd>> ops;
    auto ensure = [&](int v) {
        if (!g.contains(v)) {
            g = g.with_vertex(v);
        }
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) {
            continue;
        }
        if (first.front() == '[') {
            if (first != "[frame]" && first != "[groups]" && first != "[ops]") {
                fail("unknown section " + first);
            }
            section = first;
            continue;
        }
        if (section == "edges") {
            if (first == "vertex") {
                int v;
                if (!(ls >> v)) {
                    fail("expected a vertex id");
                }
                ensure(v);
                continue;
            }
            int a;
            int b;
            try {
                a = std::stoi(first);
            } catch (const std::exception &) {
                fail("expected 'v1 v2'");
            }
            if (!(ls >> b)) {
                fail("expected 'v1 v2'");
            }
            ensure(a);
            ensure(b);
            edges.emplace_back(a, b);
        } else if (section == "[frame]") {
            int v;
            int x;
            int z;
            try {
                v = std::stoi(first);
            } catch (const std::exception &) {
                fail("expected 'vertex x z'");
            }
            if (!(ls >> x >> z)) {
                fail("expected 'vertex x z'");
            }
            frames.emplace_back(v, PauliBits{x != 0, z != 0});
        } else if (section == "[groups]") {
            std::vector<int> members{std::stoi(first)};
            int m;
            while (ls >> m) {
                members.push_back(m);
            }
            groups.push_back(members);
        } else {
            int r = std::stoi(first);
            Eigen::Matrix2cd m;
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    double re;
                    double im;
                    if (!(ls >> re >> im)) {
                        fail("expected eight numbers after the vertex id");
                    }
                    m(i, j) = cplx(re, im);
                }
            }
            ops.emplace_back(r, m);
        }
    }
    for (const auto &members : groups) {
        for (int m : members) {
            ensure(m);
        }
        for (std::size_t k = 1; k < members.size(); ++k) {
            g = g.without_vertex(members[k]).with_redundant_copy(members[0], members[k]);
        }
    }
    for (const auto &[a, b] : edges) {
        g = g.with_edge_toggled(a, b);
    }
    for (const auto &[v, bits] : frames) {
        g.require(v);
        if (!bits.trivial()) {
            g.frame_[v] = bits;
        }
    }
    for (const auto &[r, m] : ops) {
        g.local_op_[g.representative(r)] = m;
    }
    return g;
}

// ---------------------------------------------------------------------------
// Operations

GraphState apply_cz(const GraphState &g, int a, int b) {
    g.require(a);
    g.require(b);
    const int ra = g.representative(a);
    const int rb = g.representative(b);
    if (ra == rb) {
        throw SelfLoop("controlled-Z needs two distinct vertices");
    }
    require_plain(g, ra, "apply_cz");
    require_plain(g, rb, "apply_cz");
    GraphState h = g.with_edge_toggled(ra, rb);
    // CZ X_a CZ = X_a Z_b.
    if (g.frame(ra).x) {
        h = h.with_pauli(rb, Pauli::Z);
    }
    if (g.frame(rb).x) {
        h = h.with_pauli(ra, Pauli::Z);
    }
    return h;
}

Eigen::VectorXcd to_statevector(const GraphState &g, const std::vector<int> &order_in) {
    std::vector<int> order = order_in;
    if (order.empty()) {
        order.assign(g.vertices().begin(), g.vertices().end());
    }
    {
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        if (!std::equal(sorted.begin(), sorted.end(), g.vertices().begin(), g.vertices().end())) {
            throw std::invalid_argument("statevector order must list every vertex exactly once");
        }
    }
    const int n = static_cast<int>(order.size());
    if (n > kMaxStatevectorQubits) {
        throw TooLarge("graph has " + std::to_string(n) + " vertices; the state-vector limit is " +
                       std::to_string(kMaxStatevectorQubits));
    }
    const std::vector<int> logical = g.logical_vertices();
    const int nl = static_cast<int>(logical.size());
    std::map<int, int> lpos;
    for (int k = 0; k < nl; ++k) {
        lpos[logical[k]] = k;
    }
    auto lbit = [&](Eigen::Index z, int k) { return (z >> (nl - 1 - k)) & 1; };

    const Eigen::Index ldim = Eigen::Index{1} << nl;
    Eigen::VectorXcd psi(ldim);
    const double amp = std::pow(2.0, -nl / 2.0);
    for (Eigen::Index z = 0; z < ldim; ++z) {
        int parity = 0;
        for (const auto &[a, b] : g.edges()) {
            parity ^= static_cast<int>(lbit(z, lpos.at(a)) & lbit(z, lpos.at(b)));
        }
        psi[z] = parity ? -amp : amp;
    }
    for (int k = 0; k < nl; ++k) {
        auto op = g.local_op(logical[k]);
        if (!op) {
            continue;
        }
        const Eigen::Index bit = Eigen::Index{1} << (nl - 1 - k);
        for (Eigen::Index z = 0; z < ldim; ++z) {
            if (z & bit) {
                continue;
            }
            const cplx a0 = psi[z];
            const cplx a1 = psi[z | bit];
            psi[z] = (*op)(0, 0) * a0 + (*op)(0, 1) * a1;
            psi[z | bit] = (*op)(1, 0) * a0 + (*op)(1, 1) * a1;
        }
    }

    std::vector<int> photon_logical(n);
    for (int i = 0; i < n; ++i) {
        photon_logical[i] = lpos.at(g.representative(order[i]));
    }
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
    for (Eigen::Index z = 0; z < ldim; ++z) {
        Eigen::Index idx = 0;
        double sign = 1.0;
        for (int i = 0; i < n; ++i) {
            int b = static_cast<int>(lbit(z, photon_logical[i]));
            const PauliBits f = g.frame(order[i]);
            if (f.z && b) {
                sign = -sign;
            }
            if (f.x) {
                b ^= 1;
            }
            idx = (idx << 1) | b;
        }
        out[idx] += sign * psi[z];
    }
    return out;
}

GraphState measure_vertex(const GraphState &g, int v, MeasureBasis basis, int outcome) {
    g.require(v);
    if (outcome != 0 && outcome != 1) {
        throw std::invalid_argument("measurement outcome must be 0 or 1");
    }
    const Eigen::Matrix2cd Z = pauli_matrix(Pauli::Z);
    if (basis == MeasureBasis::Z) {
        if (g.redundant(v)) {
            throw std::invalid_argument("Z measurement of a redundantly encoded photon is outside the graph rules");
        }
        require_plain(g, v, "Z measurement");
        const int result = outcome ^ static_cast<int>(g.frame(v).x);
        GraphState h = g.without_vertex(v);
        if (result) {
            for (int n : g.neighbors(v)) {
                h = h.with_inner_op(n, Z);
            }
        }
        return h;
    }

    const int result = outcome ^ static_cast<int>(g.frame(v).z);
    if (g.redundant(v)) {
        GraphState h = g.without_vertex(v);
        if (result) {
            int remaining = -1;
            for (int m : g.group(v)) {
                if (m != v) {
                    remaining = m;
                    break;
                }
            }
            h = h.with_pauli(h.representative(remaining), Pauli::Z);
        }
        return h;
    }
    require_plain(g, v, "X measurement");
    const std::set<int> nv = g.neighbors(v);
    if (nv.empty()) {
        if (result) {
            throw ImpossibleOutcome("isolated vertex " + std::to_string(v) + " cannot give X outcome -1");
        }
        return g.without_vertex(v);
    }
    // X measurement via the lowest-id neighbor b0: the remaining state is
    // U |tau_b0(tau_v(tau_b0(G))) - v>.
    const int b0 = *nv.begin();
    const std::set<int> nb0 = g.neighbors(b0);
    GraphState h = local_complement(local_complement(local_complement(g, b0), v), b0).without_vertex(v);
    if (result == 0) {
        h = h.with_inner_op(b0, sqrt_plus_iy());
        for (int b : nv) {
            if (b != b0 && !nb0.contains(b)) {
                h = h.with_inner_op(b, Z);
            }
        }
    } else {
        h = h.with_inner_op(b0, sqrt_minus_iy());
        for (int b : nb0) {
            if (b != v && !nv.contains(b)) {
                h = h.with_inner_op(b, Z);
            }
        }
    }
    return h;
}

double outcome_probability(const GraphState &g, int v, MeasureBasis basis, int outcome) {
    const Eigen::Matrix2cd change = basis == MeasureBasis::Z ? Eigen::Matrix2cd::Identity() : hadamard();
    return project_vertex(g, v, change, outcome).probability;
}

ProjectedState measure_vertex_angle(const GraphState &g, int v, double theta, int sign, int outcome) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("measurement sign must be +1 or -1");
    }
    return project_vertex(g, v, hadamard() * rz(sign * theta), outcome);
}

// ---------------------------------------------------------------------------
// Fusion

std::string role_name(FusionRole r) {
    switch (r) {
        case FusionRole::Fused:
            return "F";
        case FusionRole::Partner1:
            return "P1";
        case FusionRole::Partner2:
            return "P2";
        case FusionRole::Neighbors1:
            return "N1";
        case FusionRole::Neighbors2:
            return "N2";
    }
    return "?";
}

Pauli Byproduct::at(FusionRole r) const {
    auto it = paulis.find(r);
    return it == paulis.end() ? Pauli::I : it->second;
}

int Byproduct::weight() const {
    int w = 0;
    for (const auto &kv : paulis) {
        w += kv.second != Pauli::I;
    }
    return w;
}

std::string Byproduct::str() const {
    std::string out;
    for (const auto &[role, p] : paulis) {
        if (p == Pauli::I) {
            continue;
        }
        if (!out.empty()) {
            out += ",";
        }
        out += role_name(role) + ":" + pauli_char(p);
    }
    return out.empty() ? "I" : out;
}

Byproduct Byproduct::parse(const std::string &s) {
    Byproduct b;
    if (s == "I" || s.empty()) {
        return b;
    }
    std::istringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos || colon + 2 != item.size()) {
            throw std::invalid_argument("malformed byproduct entry '" + item + "'");
        }
        const std::string role = item.substr(0, colon);
        FusionRole r;
        if (role == "F") {
            r = FusionRole::Fused;
        } else if (role == "P1") {
            r = FusionRole::Partner1;
        } else if (role == "P2") {
            r = FusionRole::Partner2;
        } else if (role == "N1") {
            r = FusionRole::Neighbors1;
        } else if (role == "N2") {
            r = FusionRole::Neighbors2;
        } else {
            throw std::invalid_argument("unknown fusion role '" + role + "'");
        }
        b.paulis[r] = pauli_from_char(item.back());
    }
    return b;
}

GraphState apply_byproduct(const GraphState &g, const RoleMap &roles, const Byproduct &b) {
    GraphState h = g;
    // A logical Pauli acts as X on every photon of the group and Z on one.
    auto apply_logical = [&h](const std::vector<int> &members, Pauli p) {
        const bool x = p == Pauli::X || p == Pauli::Y;
        const bool z = p == Pauli::Z || p == Pauli::Y;
        if (x) {
            for (int v : members) {
                h = h.with_pauli(v, Pauli::X);
            }
        }
        if (z && !members.empty()) {
            h = h.with_pauli(members.front(), Pauli::Z);
        }
    };
    for (const auto &[role, p] : b.paulis) {
        if (p == Pauli::I) {
            continue;
        }
        auto it = roles.members.find(role);
        if (it == roles.members.end()) {
            continue;
        }
        if (role == FusionRole::Partner1 || role == FusionRole::Partner2) {
            std::vector<int> present;
            for (int v : it->second) {
                if (h.contains(v)) {
                    present.push_back(v);
                }
            }
            apply_logical(present, p);
            continue;
        }
        for (int v : it->second) {
            if (h.contains(v)) {
                apply_logical(h.group(v), p);
            }
        }
    }
    return h;
}

namespace {

void require_fusable(const GraphState &g, int v) {
    g.require(v);
    require_plain(g, v, "fusion");
    if (!g.frame(v).trivial()) {
        throw std::invalid_argument("fusion input " + std::to_string(v) + " must have a trivial Pauli frame");
    }
}

std::vector<int> to_vec(const std::set<int> &s) { return {s.begin(), s.end()}; }

}  // namespace

GraphState fuse1(const GraphState &g1, int v1, const GraphState &g2, int v2, bool success,
                 const Byproduct &byproduct) {
    g1.require(v1);
    g2.require(v2);
    return fuse1(g1.joined(g2), v1, v2, success, byproduct);
}

GraphState fuse1(const GraphState &g, int v1, int v2, bool success, const Byproduct &byproduct) {
    require_fusable(g, v1);
    require_fusable(g, v2);
    if (g.representative(v1) == g.representative(v2)) {
        throw SelfLoop("cannot fuse a vertex with itself");
    }
    if (g.redundant(v1) || g.redundant(v2)) {
        throw std::invalid_argument("type-I fusion acts on unencoded vertices");
    }
    RoleMap roles;
    roles.members[FusionRole::Neighbors1] = to_vec(g.neighbors(v1));
    roles.members[FusionRole::Neighbors2] = to_vec(g.neighbors(v2));
    GraphState h;
    if (success) {
        h = g.with_merged(v1, v2).without_vertex(v2);
        roles.members[FusionRole::Fused] = {v1};
    } else {
        h = g.without_vertex(v1).without_vertex(v2);
    }
    return apply_byproduct(h, roles, byproduct);
}

GraphState fuse2(const GraphState &g1, int v1, const GraphState &g2, int v2, bool success,
                 const Byproduct &byproduct) {
    g1.require(v1);
    g2.require(v2);
    if (!g1.redundant(v1) || !g2.redundant(v2)) {
        throw MissingRedundancy("type-II fusion needs both photons to belong to redundantly encoded vertices");
    }
    return fuse2(g1.joined(g2), v1, v2, success, byproduct);
}

GraphState fuse2(const GraphState &g, int v1, int v2, bool success, const Byproduct &byproduct) {
    require_fusable(g, v1);
    require_fusable(g, v2);
    if (!g.redundant(v1) || !g.redundant(v2)) {
        throw MissingRedundancy("type-II fusion needs both photons to belong to redundantly encoded vertices");
    }
    if (g.representative(v1) == g.representative(v2)) {
        throw SelfLoop("cannot fuse two photons of the same logical vertex");
    }
    RoleMap roles;
    for (auto [v, role] : {std::pair{v1, FusionRole::Partner1}, std::pair{v2, FusionRole::Partner2}}) {
        std::vector<int> partners;
        for (int m : g.group(v)) {
            if (m != v) {
                partners.push_back(m);
            }
        }
        roles.members[role] = partners;
    }
    roles.members[FusionRole::Neighbors1] = to_vec(g.neighbors(v1));
    roles.members[FusionRole::Neighbors2] = to_vec(g.neighbors(v2));
    GraphState h = success ? g.with_merged(v1, v2) : g;
    h = h.without_vertex(v1).without_vertex(v2);
    return apply_byproduct(h, roles, byproduct);
}

double vector_fidelity(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
    if (a.size() != b.size()) {
        return 0.0;
    }
    return std::norm(a.dot(b));
}

}  // namespace fiberloom
