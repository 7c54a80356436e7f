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

#include "fiberloom/mbqc.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <random>

namespace fiberloom {
namespace {

constexpr double kZeroProb = 1e-14;

Eigen::Matrix2cd hadamard() {
    const double r = 1 / std::sqrt(2.0);
    return (Eigen::Matrix2cd() << r, r, r, -r).finished();
}

Eigen::Matrix2cd rz(double phi) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    m(0, 0) = std::polar(1.0, -phi / 2);
    m(1, 1) = std::polar(1.0, phi / 2);
    return m;
}

int parity(const std::set<int> &deps, const std::vector<int> &outcomes) {
    int p = 0;
    for (int k : deps) {
        p ^= outcomes.at(static_cast<std::size_t>(k));
    }
    return p;
}

std::set<int> xor_sets(const std::set<int> &a, const std::set<int> &b) {
    std::set<int> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

// One backend's view of the state between steps.
class Executor {
   public:
    virtual ~Executor() = default;
    virtual void check(const MeasurementPattern &p) const = 0;
    /// Post-measurement executors indexed by outcome; null when impossible.
    virtual std::array<std::pair<double, std::unique_ptr<Executor>>, 2> measure(int v, double theta, int sign) const = 0;
    virtual void correct(int v, int x, int z) = 0;
    virtual Eigen::VectorXcd state(const std::vector<int> &order) const = 0;
};

// Logical state vector, big-endian over `order_`.
class VectorExecutor : public Executor {
   public:
    explicit VectorExecutor(const GraphState &g) : vertices_(g.vertices()) {
        order_.assign(vertices_.begin(), vertices_.end());
        psi_ = to_statevector(g, order_);
    }

    void check(const MeasurementPattern &p) const override {
        for (const auto &s : p.steps) {
            require(s.vertex);
        }
        for (const auto &o : p.outputs) {
            require(o.vertex);
        }
    }

    std::array<std::pair<double, std::unique_ptr<Executor>>, 2> measure(int v, double theta, int sign) const override {
        const std::size_t q = index(v);
        const Eigen::Matrix2cd m = hadamard() * rz(sign * theta);
        const std::size_t n = order_.size();
        const std::size_t bit = n - 1 - q;
        std::array<std::pair<double, std::unique_ptr<Executor>>, 2> out;
        for (int outcome = 0; outcome < 2; ++outcome) {
            Eigen::VectorXcd rest = Eigen::VectorXcd::Zero(psi_.size() / 2);
            for (Eigen::Index i = 0; i < psi_.size(); ++i) {
                const int b = static_cast<int>((static_cast<std::size_t>(i) >> bit) & 1U);
                const std::size_t high = (static_cast<std::size_t>(i) >> (bit + 1)) << bit;
                const std::size_t low = static_cast<std::size_t>(i) & ((std::size_t{1} << bit) - 1);
                rest[static_cast<Eigen::Index>(high | low)] += m(outcome, b) * psi_[i];
            }
            const double prob = rest.squaredNorm();
            if (prob < kZeroProb) {
                out[outcome] = {0.0, nullptr};
                continue;
            }
            auto next = std::make_unique<VectorExecutor>(*this);
            next->order_.erase(next->order_.begin() + static_cast<std::ptrdiff_t>(q));
            next->vertices_.erase(v);
            next->psi_ = rest / std::sqrt(prob);
            out[outcome] = {prob, std::move(next)};
        }
        return out;
    }

    void correct(int v, int x, int z) override {
        Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
        if (x) {
            m = pauli_matrix(Pauli::X) * m;
        }
        if (z) {
            m = pauli_matrix(Pauli::Z) * m;
        }
        apply(index(v), m);
    }

    Eigen::VectorXcd state(const std::vector<int> &order) const override {
        if (order == order_) {
            return psi_;
        }
        // reorder the qubits
        std::vector<std::size_t> pos;
        for (int v : order) {
            pos.push_back(index(v));
        }
        if (pos.size() != order_.size()) {
            throw UnknownVertex("output order must list every unmeasured photon");
        }
        const std::size_t n = order_.size();
        Eigen::VectorXcd out(psi_.size());
        for (Eigen::Index i = 0; i < psi_.size(); ++i) {
            std::size_t j = 0;
            for (std::size_t k = 0; k < n; ++k) {
                const std::size_t b = (static_cast<std::size_t>(i) >> (n - 1 - pos[k])) & 1U;
                j |= b << (n - 1 - k);
            }
            out[static_cast<Eigen::Index>(j)] = psi_[i];
        }
        return out;
    }

   private:
    void require(int v) const {
        if (!vertices_.contains(v)) {
            throw UnknownVertex("vertex " + std::to_string(v) + " is not in the cluster");
        }
    }

    std::size_t index(int v) const {
        require(v);
        return static_cast<std::size_t>(std::find(order_.begin(), order_.end(), v) - order_.begin());
    }

    void apply(std::size_t q, const Eigen::Matrix2cd &m) {
        const std::size_t bit = order_.size() - 1 - q;
        const std::size_t mask = std::size_t{1} << bit;
        for (Eigen::Index i = 0; i < psi_.size(); ++i) {
            const auto u = static_cast<std::size_t>(i);
            if (u & mask) {
                continue;
            }
            const auto j = static_cast<Eigen::Index>(u | mask);
            const cplx a = psi_[i];
            const cplx b = psi_[j];
            psi_[i] = m(0, 0) * a + m(0, 1) * b;
            psi_[j] = m(1, 0) * a + m(1, 1) * b;
        }
    }

    std::set<int> vertices_;
    std::vector<int> order_;
    Eigen::VectorXcd psi_;
};

// Circuits act on qubit 0; move that slot to qubit q.
OpticalCircuit rekeyed(OpticalCircuit c, int q) {
    auto move = [q](QubitFrame &f) {
        auto it = f.find(0);
        if (it != f.end()) {
            const QubitSlot s = it->second;
            f.erase(it);
            f[q] = s;
        }
    };
    move(c.input);
    move(c.output);
    return c;
}

class CircuitExecutor : public Executor {
   public:
    explicit CircuitExecutor(EncodedState s) : s_(std::move(s)) {
        if (static_cast<int>(s_.frame.size()) > kCircuitBackendMaxPhotons) {
            throw BackendTooLarge("circuit backend simulates at most " + std::to_string(kCircuitBackendMaxPhotons) +
                                  " photons, got " + std::to_string(s_.frame.size()));
        }
        for (const auto &kv : s_.frame) {
            if (kv.second.encoding != Encoding::TimeBin) {
                throw WrongEncoding("circuit backend expects time-bin qubits");
            }
        }
    }

    void check(const MeasurementPattern &p) const override {
        for (const auto &s : p.steps) {
            require(s.vertex);
        }
        for (const auto &o : p.outputs) {
            require(o.vertex);
        }
    }

    std::array<std::pair<double, std::unique_ptr<Executor>>, 2> measure(int v, double theta, int sign) const override {
        require(v);
        const OpticalCircuit c = rekeyed(measure_circuit_timebin(theta, sign, s_.frame.at(v), free_rail()), v);
        std::array<std::pair<double, std::unique_ptr<Executor>>, 2> out;
        for (auto &b : run_circuit(c, s_)) {
            if (b.probability < kZeroProb) {
                continue;
            }
            const int m = measurement_outcome(b);
            if (out[m].second) {
                throw std::logic_error("measurement produced two branches with one outcome");
            }
            out[m] = {b.probability, std::make_unique<CircuitExecutor>(b.post)};
        }
        return out;
    }

    void correct(int v, int x, int z) override {
        require(v);
        if (x) {
            step(rekeyed(bit_flip_circuit(s_.frame.at(v), free_rail()), v));
        }
        if (z) {
            step(rekeyed(phase_flip_circuit(s_.frame.at(v)), v));
        }
    }

    Eigen::VectorXcd state(const std::vector<int> &order) const override { return decode(s_, order); }

   private:
    void require(int v) const {
        if (!s_.frame.contains(v)) {
            throw UnknownVertex("vertex " + std::to_string(v) + " is not in the encoded cluster");
        }
    }

    int free_rail() const {
        int top = -1;
        for (const auto &kv : s_.frame) {
            top = std::max(top, kv.second.rail);
        }
        for (const Mode &m : s_.state.occupied_modes()) {
            top = std::max(top, m.rail);
        }
        return top + 1;
    }

    void step(const OpticalCircuit &c) {
        auto branches = run_circuit(c, s_);
        s_ = branches.front().post;
    }

    EncodedState s_;
};

std::vector<int> output_order(const MeasurementPattern &p) {
    std::vector<int> order;
    for (const auto &o : p.outputs) {
        order.push_back(o.vertex);
    }
    return order;
}

RunRecord finish(const MeasurementPattern &p, Executor &e, RunRecord rec) {
    for (const auto &o : p.outputs) {
        const int x = parity(o.x_deps, rec.outcomes);
        const int z = parity(o.z_deps, rec.outcomes);
        e.correct(o.vertex, x, z);
        rec.corrections[o.vertex] = {x, z};
    }
    rec.output_order = output_order(p);
    rec.final_state = e.state(rec.output_order);
    return rec;
}

// Walks the outcome tree. `choose` picks the outcomes to follow at each step.
void walk(const MeasurementPattern &p, const Executor &e, RunRecord rec,
          const std::function<std::vector<int>(const std::array<double, 2> &)> &choose, std::vector<RunRecord> &out) {
    const std::size_t k = rec.outcomes.size();
    const auto &s = p.steps[k];
    const int sign = p.sign(k, rec.outcomes);
    auto branches = e.measure(s.vertex, s.theta, sign);
    const std::array<double, 2> probs{branches[0].first, branches[1].first};
    for (int m : choose(probs)) {
        if (!branches[m].second) {
            continue;
        }
        RunRecord next = rec;
        next.outcomes.push_back(m);
        next.signs.push_back(sign);
        next.probability *= probs[m];
        if (k + 1 == p.steps.size()) {
            out.push_back(finish(p, *branches[m].second, std::move(next)));
        } else {
            walk(p, *branches[m].second, std::move(next), choose, out);
        }
    }
}

std::vector<RunRecord> drive(const MeasurementPattern &p, std::unique_ptr<Executor> e, Backend backend,
                             const std::function<std::vector<int>(const std::array<double, 2> &)> &choose) {
    p.validate();
    e->check(p);
    RunRecord rec;
    rec.backend = backend;
    std::vector<RunRecord> out;
    if (p.steps.empty()) {
        out.push_back(finish(p, *e, rec));
        return out;
    }
    walk(p, *e, rec, choose, out);
    return out;
}

std::unique_ptr<Executor> make_executor(const GraphState &g, Backend b) {
    if (b == Backend::Graph) {
        return std::make_unique<VectorExecutor>(g);
    }
    if (static_cast<int>(g.vertices().size()) > kCircuitBackendMaxPhotons) {
        throw BackendTooLarge("circuit backend simulates at most " + std::to_string(kCircuitBackendMaxPhotons) +
                              " photons, got " + std::to_string(g.vertices().size()));
    }
    return std::make_unique<CircuitExecutor>(encode_graph(g));
}

std::function<std::vector<int>(const std::array<double, 2> &)> sampler(std::uint64_t seed) {
    auto rng = std::make_shared<std::mt19937_64>(seed);
    return [rng](const std::array<double, 2> &probs) {
        const double u = std::uniform_real_distribution<double>(0.0, probs[0] + probs[1])(*rng);
        return std::vector<int>{u < probs[0] ? 0 : 1};
    };
}

std::vector<int> both(const std::array<double, 2> &) { return {0, 1}; }

}  // namespace

std::string to_string(Backend b) { return b == Backend::Graph ? "GRAPH" : "CIRCUIT"; }

Backend backend_from_string(const std::string &s) {
    if (s == "GRAPH") {
        return Backend::Graph;
    }
    if (s == "CIRCUIT") {
        return Backend::Circuit;
    }
    throw std::invalid_argument("unknown backend '" + s + "' (expected GRAPH or CIRCUIT)");
}

void MeasurementPattern::validate() const {
    std::set<int> seen;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (!seen.insert(steps[k].vertex).second) {
            throw std::invalid_argument("vertex " + std::to_string(steps[k].vertex) + " is measured twice");
        }
        for (int d : steps[k].sign_deps) {
            if (d < 0 || static_cast<std::size_t>(d) >= k) {
                throw std::invalid_argument("step " + std::to_string(k) + " depends on step " + std::to_string(d) +
                                            ", which is not earlier");
            }
        }
    }
    for (const auto &o : outputs) {
        if (seen.contains(o.vertex)) {
            throw std::invalid_argument("output vertex " + std::to_string(o.vertex) + " is also measured");
        }
        for (const auto *deps : {&o.x_deps, &o.z_deps}) {
            for (int d : *deps) {
                if (d < 0 || static_cast<std::size_t>(d) >= steps.size()) {
                    throw std::invalid_argument("correction depends on unknown step " + std::to_string(d));
                }
            }
        }
    }
}

int MeasurementPattern::sign(std::size_t step, const std::vector<int> &outcomes) const {
    return parity(steps.at(step).sign_deps, outcomes) ? -1 : 1;
}

MeasurementPattern linear_chain_pattern(const std::vector<int> &vertices, const std::vector<double> &thetas) {
    if (vertices.size() < 2 || thetas.size() + 1 != vertices.size()) {
        throw NotAChain("a chain of n vertices needs n >= 2 and n - 1 angles");
    }
    // x, z: outcome sets whose parity gives the X and Z byproduct on the
    // current logical carrier. X^m H X^x Z^z = X^(m+z) Z^x H up to phase.
    MeasurementPattern p;
    std::set<int> x;
    std::set<int> z;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        p.steps.push_back(MeasurementStep{vertices[k], thetas[k], x});
        const std::set<int> nx = xor_sets({static_cast<int>(k)}, z);
        z = x;
        x = nx;
    }
    p.outputs.push_back(OutputCorrection{vertices.back(), x, z});
    p.validate();
    return p;
}

Eigen::Matrix2cd expected_map(const MeasurementPattern &p, int chain_length) {
    if (chain_length < 2 || p.steps.size() + 1 != static_cast<std::size_t>(chain_length) || p.outputs.size() != 1) {
        throw NotAChain("pattern does not describe a chain of length " + std::to_string(chain_length));
    }
    std::vector<int> vertices;
    std::vector<double> thetas;
    for (const auto &s : p.steps) {
        vertices.push_back(s.vertex);
        thetas.push_back(s.theta);
    }
    vertices.push_back(p.outputs.front().vertex);
    const MeasurementPattern ref = linear_chain_pattern(vertices, thetas);
    for (std::size_t k = 0; k < p.steps.size(); ++k) {
        if (p.steps[k].sign_deps != ref.steps[k].sign_deps) {
            throw NotAChain("step " + std::to_string(k) + " does not use chain feedforward");
        }
    }
    if (p.outputs.front().x_deps != ref.outputs.front().x_deps ||
        p.outputs.front().z_deps != ref.outputs.front().z_deps) {
        throw NotAChain("output corrections do not follow the chain rule");
    }
    Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
    for (const auto &s : p.steps) {
        u = hadamard() * rz(s.theta) * u;
    }
    return u;
}

RunRecord run(const MeasurementPattern &p, const GraphState &initial, Backend backend, std::uint64_t seed) {
    return drive(p, make_executor(initial, backend), backend, sampler(seed)).front();
}

RunRecord run(const MeasurementPattern &p, const EncodedState &initial, std::uint64_t seed) {
    return drive(p, std::make_unique<CircuitExecutor>(initial), Backend::Circuit, sampler(seed)).front();
}

std::vector<RunRecord> enumerate_runs(const MeasurementPattern &p, const GraphState &initial, Backend backend) {
    return drive(p, make_executor(initial, backend), backend, both);
}

std::vector<RunRecord> enumerate_runs(const MeasurementPattern &p, const EncodedState &initial) {
    return drive(p, std::make_unique<CircuitExecutor>(initial), Backend::Circuit, both);
}

}  // namespace fiberloom
