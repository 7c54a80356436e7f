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

#include "fiberloom/circuits.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace fiberloom {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLeakTol = 1e-10;
constexpr double kOracleTol = 1e-10;

std::function<bool(int)> only_bin(int bin) {
    return [bin](int b) { return b == bin; };
}

std::function<double(int)> constant_phase(double phi) {
    return [phi](int) { return phi; };
}

std::string fmt_angle(double a) {
    std::ostringstream out;
    out << std::setprecision(6) << a;
    return out.str();
}

PhotonicState map_modes(const PhotonicState &s, const std::function<Mode(const Mode &)> &f) {
    std::vector<std::pair<OccupationState, cplx>> terms;
    for (const auto &[occ, amp] : s.terms()) {
        OccupationState o;
        for (const auto &[m, n] : occ.entries()) {
            const Mode mapped = f(m);
            o = o.with_count(mapped, o.count(mapped) + n);
        }
        terms.emplace_back(o, amp);
    }
    return PhotonicState::from_terms(terms);
}

std::vector<int> frame_order(const QubitFrame &frame) {
    std::vector<int> order;
    for (const auto &kv : frame) {
        order.push_back(kv.first);
    }
    return order;
}

void require_timebin(const QubitSlot &q, const char *what) {
    if (q.encoding != Encoding::TimeBin) {
        throw WrongEncoding(std::string(what) + " needs a time-bin qubit");
    }
}

QubitSlot timebin(int rail, int bin, Pol pol = Pol::None) { return {Encoding::TimeBin, rail, bin, pol}; }
QubitSlot polarization(int rail, int bin) { return {Encoding::Polarization, rail, bin, Pol::None}; }

std::vector<Element> tpc_elements(int rail, int aux, int bin) {
    return {
        Switch{rail, aux, only_bin(bin + 1), "swap bin " + std::to_string(bin + 1)},
        Delay{rail, 1},
        PolRot{aux, kPi / 2},
        Pbsc{rail, aux},
    };
}

std::vector<Element> ptc_elements(int rail, int aux, int bin) {
    return {
        Pbsc{rail, aux},
        PolRot{aux, -kPi / 2},
        Delay{aux, 1},
        Switch{rail, aux, only_bin(bin + 1), "swap bin " + std::to_string(bin + 1)},
    };
}

Element rz_modulator(double theta, int sign, int rail, int bin) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("measurement sign must be +1 or -1");
    }
    const double phi = sign * theta;
    return PhaseMod{rail,
                    [phi, bin](int b) {
                        if (b == bin) {
                            return -phi / 2;
                        }
                        return b == bin + 1 ? phi / 2 : 0.0;
                    },
                    true, "Rz(" + fmt_angle(phi) + ")"};
}

void append(std::vector<Element> &dst, const std::vector<Element> &src) { dst.insert(dst.end(), src.begin(), src.end()); }

int free_rail_above(const EncodedState &s) {
    int top = -1;
    for (int r : s.state.rails()) {
        top = std::max(top, r);
    }
    for (const auto &kv : s.frame) {
        top = std::max(top, kv.second.rail);
    }
    return top + 1;
}

}  // namespace

std::string to_string(Encoding e) { return e == Encoding::TimeBin ? "timebin" : "polarization"; }

Mode QubitSlot::zero() const {
    if (encoding == Encoding::TimeBin) {
        return Mode{rail, bin, pol};
    }
    return Mode{rail, bin, Pol::H};
}

Mode QubitSlot::one() const {
    if (encoding == Encoding::TimeBin) {
        return Mode{rail, bin + 1, pol};
    }
    return Mode{rail, bin, Pol::V};
}

// ---------------------------------------------------------------------------
// Encoding

EncodedState encode(const Eigen::VectorXcd &amplitudes, const QubitFrame &frame, const std::vector<int> &order_in) {
    const std::vector<int> order = order_in.empty() ? frame_order(frame) : order_in;
    const int n = static_cast<int>(order.size());
    if (amplitudes.size() != (Eigen::Index{1} << n)) {
        throw std::invalid_argument("amplitude vector does not match the number of qubits");
    }
    std::set<int> rails;
    std::vector<QubitSlot> slots;
    for (int q : order) {
        auto it = frame.find(q);
        if (it == frame.end()) {
            throw BadFrame("qubit " + std::to_string(q) + " is not in the frame");
        }
        if (!rails.insert(it->second.rail).second) {
            throw BadFrame("two qubits share rail " + std::to_string(it->second.rail));
        }
        slots.push_back(it->second);
    }
    std::vector<std::pair<OccupationState, cplx>> terms;
    for (Eigen::Index z = 0; z < amplitudes.size(); ++z) {
        if (std::abs(amplitudes[z]) < kPruneEps) {
            continue;
        }
        OccupationState occ;
        for (int k = 0; k < n; ++k) {
            const bool bit = (z >> (n - 1 - k)) & 1;
            occ = occ.with_count(bit ? slots[k].one() : slots[k].zero(), 1);
        }
        terms.emplace_back(occ, amplitudes[z]);
    }
    return EncodedState{PhotonicState::from_terms(terms), frame};
}

Eigen::VectorXcd decode(const EncodedState &s, const std::vector<int> &order_in, double *leakage) {
    const std::vector<int> order = order_in.empty() ? frame_order(s.frame) : order_in;
    const int n = static_cast<int>(order.size());
    std::vector<QubitSlot> slots;
    for (int q : order) {
        auto it = s.frame.find(q);
        if (it == s.frame.end()) {
            throw BadFrame("qubit " + std::to_string(q) + " is not in the frame");
        }
        slots.push_back(it->second);
    }
    Eigen::VectorXcd out(Eigen::Index{1} << n);
    for (Eigen::Index z = 0; z < out.size(); ++z) {
        OccupationState occ;
        for (int k = 0; k < n; ++k) {
            const bool bit = (z >> (n - 1 - k)) & 1;
            occ = occ.with_count(bit ? slots[k].one() : slots[k].zero(), 1);
        }
        out[z] = s.state.amplitude(occ);
    }
    if (leakage != nullptr) {
        const double total = s.state.norm() * s.state.norm();
        *leakage = std::max(0.0, total - out.squaredNorm());
    }
    return out;
}

EncodedState encode_graph(const GraphState &g, int bin) {
    QubitFrame frame;
    for (int v : g.vertices()) {
        frame[v] = timebin(v, bin);
    }
    return encode(to_statevector(g), frame);
}

EncodedState lift_polarization(const EncodedState &s) {
    EncodedState out;
    out.state = map_modes(s.state, [](const Mode &m) { return m.pol == Pol::None ? m.with_pol(Pol::H) : m; });
    out.frame = s.frame;
    for (auto &kv : out.frame) {
        if (kv.second.encoding == Encoding::TimeBin && kv.second.pol == Pol::None) {
            kv.second.pol = Pol::H;
        }
    }
    return out;
}

EncodedState drop_polarization(const EncodedState &s) {
    for (const auto &m : s.state.occupied_modes()) {
        if (m.pol == Pol::V) {
            throw WrongEncoding("cannot drop polarization while a photon is V-polarized");
        }
    }
    for (const auto &kv : s.frame) {
        if (kv.second.encoding == Encoding::Polarization) {
            throw WrongEncoding("cannot drop polarization from a polarization-encoded qubit");
        }
    }
    EncodedState out;
    out.state = map_modes(s.state, [](const Mode &m) { return m.with_pol(Pol::None); });
    out.frame = s.frame;
    for (auto &kv : out.frame) {
        kv.second.pol = Pol::None;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Execution

int OpticalCircuit::active_count() const {
    return static_cast<int>(std::count_if(elements.begin(), elements.end(), [](const Element &e) { return is_active(e); }));
}

std::string OpticalCircuit::describe() const {
    std::ostringstream out;
    out << name << ": " << provenance << "\n";
    for (const auto &e : elements) {
        out << "  " << fiberloom::describe(e) << "\n";
    }
    for (const auto &d : detectors) {
        out << "  DETECT " << d.name << (d.model == DetectorModel::Threshold ? " threshold" : " number-resolving");
        for (const auto &m : d.modes) {
            out << " " << m.str();
        }
        out << "\n";
    }
    return out.str();
}

PhotonicState run_elements(const OpticalCircuit &c, const PhotonicState &s) {
    std::set<int> rails = c.rails;
    for (int r : s.rails()) {
        rails.insert(r);
    }
    PhotonicState out = s;
    for (const auto &e : c.elements) {
        out = apply_element(e, out, rails);
    }
    return out;
}

std::string CircuitBranch::label(const std::vector<Detector> &detectors) const {
    std::string out;
    for (std::size_t i = 0; i < detectors.size(); ++i) {
        if (i) {
            out += " ";
        }
        out += detectors[i].name + "=" + std::to_string(readings[i]);
    }
    return out;
}

std::vector<CircuitBranch> run_circuit(const OpticalCircuit &c, const EncodedState &in) {
    QubitFrame frame = in.frame;
    for (const auto &[q, slot] : c.input) {
        auto it = frame.find(q);
        if (it == frame.end() || it->second != slot) {
            throw BadFrame("circuit " + c.name + " expects qubit " + std::to_string(q) + " at rail " +
                           std::to_string(slot.rail) + " bin " + std::to_string(slot.bin));
        }
        frame.erase(it);
    }
    std::set<Mode> detected;
    for (const auto &d : c.detectors) {
        detected.insert(d.modes.begin(), d.modes.end());
    }
    for (const auto &[q, slot] : c.output) {
        if (!detected.contains(slot.zero()) && !detected.contains(slot.one())) {
            frame[q] = slot;
        }
    }
    const PhotonicState out = run_elements(c, in.state);
    if (c.detectors.empty()) {
        return {CircuitBranch{{}, {}, 1.0, EncodedState{out, frame}}};
    }
    std::vector<CircuitBranch> branches;
    for (auto &b : detect(out, c.detectors)) {
        CircuitBranch cb;
        for (std::size_t i = 0; i < c.detectors.size(); ++i) {
            cb.readings.push_back(b.reading(c.detectors, i));
        }
        cb.mode_counts = b.mode_counts;
        cb.probability = b.probability;
        cb.post = EncodedState{b.post, frame};
        branches.push_back(std::move(cb));
    }
    return branches;
}

Eigen::Matrix2cd gate_matrix(const OpticalCircuit &c, int qubit) {
    auto in = c.input.find(qubit);
    auto out = c.output.find(qubit);
    if (in == c.input.end() || out == c.output.end()) {
        throw BadFrame("circuit " + c.name + " has no qubit " + std::to_string(qubit));
    }
    Eigen::Matrix2cd m;
    for (int k = 0; k < 2; ++k) {
        const Mode src = k ? in->second.one() : in->second.zero();
        const PhotonicState s = run_elements(c, PhotonicState::single_photon(src));
        const cplx a0 = s.amplitude(OccupationState::single(out->second.zero()));
        const cplx a1 = s.amplitude(OccupationState::single(out->second.one()));
        const double leak = 1.0 - std::norm(a0) - std::norm(a1);
        if (leak > kLeakTol) {
            throw NotDeterministic("circuit " + c.name + " leaks " + std::to_string(leak) + " outside the qubit frame");
        }
        m(0, k) = a0;
        m(1, k) = a1;
    }
    for (Eigen::Index i = 0; i < 4; ++i) {
        const cplx x = m.data()[i];
        if (std::abs(x) > 1e-12) {
            m *= std::conj(x) / std::abs(x);
            break;
        }
    }
    return m;
}

double phase_insensitive_distance(const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b) {
    const cplx overlap = (b.adjoint() * a).trace();
    const cplx phase = std::abs(overlap) > 1e-15 ? overlap / std::abs(overlap) : cplx(1.0);
    return (a - phase * b).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// One-qubit circuits

std::vector<Element> rt45_elements(double phi1, double phi2, int rail, int aux, int bin, bool final_switch) {
    std::vector<Element> e{
        Switch{rail, aux, only_bin(bin), "swap bin " + std::to_string(bin)},
        Delay{aux, 1},
        PhaseMod{aux, constant_phase(phi1), true, "phi1=" + fmt_angle(phi1)},
        // fixed trims so that the symmetric coupler yields the textbook matrices
        PhaseMod{aux, constant_phase(kPi / 2), false, "trim +pi/2"},
        Coupler{rail, aux, 0.5, 0.0},
        PhaseMod{aux, constant_phase(-kPi / 2), false, "trim -pi/2"},
        PhaseMod{aux, constant_phase(phi2), true, "phi2=" + fmt_angle(phi2)},
        Delay{rail, 1},
    };
    if (final_switch) {
        e.push_back(Switch{rail, aux, only_bin(bin + 1), "swap bin " + std::to_string(bin + 1)});
    }
    return e;
}

OpticalCircuit build_rt45(double phi1, double phi2, int rail, int aux, int bin, Pol pol) {
    OpticalCircuit c;
    c.name = "rt45";
    c.provenance = "reconfigurable time-bin one-qubit gate";
    c.elements = rt45_elements(phi1, phi2, rail, aux, bin);
    c.rails = {rail, aux};
    c.input[0] = timebin(rail, bin, pol);
    c.output[0] = timebin(rail, bin + 1, pol);
    return c;
}

OpticalCircuit tpc(const QubitSlot &q, int aux) {
    require_timebin(q, "time-bin to polarization converter");
    OpticalCircuit c;
    c.name = "tpc";
    c.provenance = "time-bin to polarization converter: |s> -> |H>, |l> -> |V>";
    c.elements = tpc_elements(q.rail, aux, q.bin);
    c.rails = {q.rail, aux};
    c.input[0] = timebin(q.rail, q.bin, Pol::H);
    c.output[0] = polarization(q.rail, q.bin + 1);
    return c;
}

OpticalCircuit ptc(const QubitSlot &q, int aux) {
    if (q.encoding != Encoding::Polarization) {
        throw WrongEncoding("polarization to time-bin converter needs a polarization qubit");
    }
    OpticalCircuit c;
    c.name = "ptc";
    c.provenance = "polarization to time-bin converter: |H> -> |s>, |V> -> |l>";
    c.elements = ptc_elements(q.rail, aux, q.bin);
    c.rails = {q.rail, aux};
    c.input[0] = polarization(q.rail, q.bin);
    c.output[0] = timebin(q.rail, q.bin, Pol::H);
    return c;
}

OpticalCircuit measure_circuit_timebin(double theta, int sign, const QubitSlot &q, int aux) {
    require_timebin(q, "time-bin measurement");
    OpticalCircuit c;
    c.name = "measure_tb";
    c.provenance = "feedforward measurement: Rz(sign*theta), Hadamard setting, detection";
    c.elements.push_back(rz_modulator(theta, sign, q.rail, q.bin));
    append(c.elements, rt45_elements(0.0, kPi, q.rail, aux, q.bin));
    c.rails = {q.rail, aux};
    c.input[0] = q;
    c.output[0] = timebin(q.rail, q.bin + 1, q.pol);
    c.detectors = {Detector{"m0", {c.output[0].zero()}, DetectorModel::NumberResolving},
                   Detector{"m1", {c.output[0].one()}, DetectorModel::NumberResolving}};
    return c;
}

OpticalCircuit measure_circuit_pol(double theta, int sign, const QubitSlot &q, int aux) {
    require_timebin(q, "polarization-scheme measurement");
    OpticalCircuit c;
    c.name = "measure_pol";
    c.provenance = "feedforward measurement in polarization: Rz(sign*theta), conversion, half-wave plate";
    c.elements.push_back(rz_modulator(theta, sign, q.rail, q.bin));
    append(c.elements, tpc_elements(q.rail, aux, q.bin));
    c.elements.push_back(HalfWave{q.rail, kPi / 8});
    c.rails = {q.rail, aux};
    c.input[0] = timebin(q.rail, q.bin, Pol::H);
    c.output[0] = polarization(q.rail, q.bin + 1);
    c.detectors = {Detector{"m0", {c.output[0].zero()}, DetectorModel::NumberResolving},
                   Detector{"m1", {c.output[0].one()}, DetectorModel::NumberResolving}};
    return c;
}

int measurement_outcome(const CircuitBranch &b) {
    if (b.readings.size() == 2 && b.readings[0] + b.readings[1] == 1) {
        return b.readings[1];
    }
    throw std::runtime_error("measurement branch does not show exactly one photon");
}

OpticalCircuit bit_flip_circuit(const QubitSlot &q, int aux) {
    require_timebin(q, "bit flip");
    OpticalCircuit c;
    c.name = "bitflip";
    c.provenance = "bit flip: |s> delayed by two bins, frame shifted by one";
    c.elements = {
        Switch{q.rail, aux, only_bin(q.bin), "swap bin " + std::to_string(q.bin)},
        Delay{aux, 2},
        Switch{q.rail, aux, only_bin(q.bin + 2), "swap bin " + std::to_string(q.bin + 2)},
    };
    c.rails = {q.rail, aux};
    c.input[0] = q;
    c.output[0] = timebin(q.rail, q.bin + 1, q.pol);
    c.frame_shift = 1;
    return c;
}

OpticalCircuit phase_flip_circuit(const QubitSlot &q) {
    require_timebin(q, "phase flip");
    OpticalCircuit c;
    c.name = "phaseflip";
    c.provenance = "phase flip as Rz(-pi)";
    c.elements = {rz_modulator(-kPi, 1, q.rail, q.bin)};
    c.rails = {q.rail};
    c.input[0] = q;
    c.output[0] = q;
    return c;
}

EncodedState make_seed_cluster(int q0, int q1, int r0, int r1) {
    if (r0 == r1 || q0 == q1) {
        throw BadFrame("seed cluster needs two qubits on distinct rails");
    }
    const double a = 1 / std::sqrt(2.0);
    const Mode s0{r0, 0, Pol::None};
    const Mode l0{r0, 1, Pol::None};
    const Mode s1{r1, 0, Pol::None};
    const Mode l1{r1, 1, Pol::None};
    PhotonicState pair = PhotonicState::from_terms(
        {{OccupationState({{s0, 1}, {s1, 1}}), a}, {OccupationState({{l0, 1}, {l1, 1}}), a}});
    const int aux = std::max(r0, r1) + 1;
    OpticalCircuit c = build_rt45(0.0, kPi, r1, aux, 0);
    c.elements.push_back(Delay{r0, 1});  // realign the first photon with the second
    c.rails.insert(r0);
    EncodedState out;
    out.state = run_elements(c, pair);
    out.frame[q0] = timebin(r0, 1);
    out.frame[q1] = timebin(r1, 1);
    return out;
}

// ---------------------------------------------------------------------------
// Fusion

std::string to_string(FusionKind k) {
    switch (k) {
        case FusionKind::Type1TimeBin:
            return "fusion1_tb";
        case FusionKind::Type1TimeBinSplit:
            return "fusion1_tb_split";
        case FusionKind::Type2TimeBin:
            return "fusion2_tb";
        case FusionKind::Type1Pol:
            return "fusion1_pol";
        case FusionKind::Type2Pol:
            return "fusion2_pol";
    }
    return "?";
}

namespace {

bool is_pol(FusionKind k) { return k == FusionKind::Type1Pol || k == FusionKind::Type2Pol; }

}  // namespace

FusionKind fusion_kind_from_string(const std::string &s) {
    for (FusionKind k : {FusionKind::Type1TimeBin, FusionKind::Type1TimeBinSplit, FusionKind::Type2TimeBin,
                         FusionKind::Type1Pol, FusionKind::Type2Pol}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw std::invalid_argument("unknown fusion kind '" + s + "'");
}

bool is_type1(FusionKind k) {
    return k == FusionKind::Type1TimeBin || k == FusionKind::Type1TimeBinSplit || k == FusionKind::Type1Pol;
}

FusionCircuit build_fusion(FusionKind kind, const QubitSlot &a, const QubitSlot &b, int aux_a, int aux_b) {
    require_timebin(a, "fusion");
    require_timebin(b, "fusion");
    if (a.rail == b.rail) {
        throw BadFrame("fusion inputs share rail " + std::to_string(a.rail));
    }
    const std::set<int> rails{a.rail, b.rail, aux_a, aux_b};
    if (rails.size() != 4) {
        throw BadFrame("fusion auxiliary rails must be distinct from the qubit rails");
    }
    const int ra = a.rail;
    const int rb = b.rail;
    const Pol p = is_pol(kind) ? Pol::H : a.pol;
    if (!is_pol(kind) && a.pol != b.pol) {
        throw BadFrame("fusion inputs use different carrier polarizations");
    }

    FusionCircuit fc;
    fc.kind = kind;
    OpticalCircuit &c = fc.circuit;
    c.name = to_string(kind);
    c.rails = rails;
    c.input[0] = timebin(ra, a.bin, is_pol(kind) ? Pol::H : a.pol);
    c.input[1] = timebin(rb, b.bin, is_pol(kind) ? Pol::H : b.pol);
    // Bring both qubits onto the same pair of bins.
    const int b0 = std::max(a.bin, b.bin);
    if (a.bin < b0) {
        c.elements.push_back(Delay{ra, b0 - a.bin});
    } else if (b.bin < b0) {
        c.elements.push_back(Delay{rb, b0 - b.bin});
    }
    auto detector = [](std::string name, Mode m, DetectorModel model) { return Detector{std::move(name), {m}, model}; };
    const auto nr = DetectorModel::NumberResolving;
    const auto th = DetectorModel::Threshold;

    switch (kind) {
        case FusionKind::Type1TimeBin:
        case FusionKind::Type1TimeBinSplit: {
            const bool split = kind == FusionKind::Type1TimeBinSplit;
            c.provenance = split ? "type-I fusion, time-bin, detectors on both rails of the final gate"
                                 : "type-I fusion, time-bin: switch as PBSC, then R(45 deg) and detection";
            c.elements.push_back(Switch{ra, rb, only_bin(b0 + 1), "swap bin " + std::to_string(b0 + 1)});
            append(c.elements, rt45_elements(kPi, kPi, rb, aux_b, b0, !split));
            c.detectors = {detector("B.s", Mode{split ? aux_b : rb, b0 + 1, p}, nr), detector("B.l", Mode{rb, b0 + 2, p}, nr)};
            fc.on_failure = {detector("A.s", Mode{ra, b0, p}, nr), detector("A.l", Mode{ra, b0 + 1, p}, nr)};
            fc.fused_output = timebin(ra, b0, p);
            fc.heralds_success = [](const std::vector<int> &r) { return r[0] + r[1] == 1; };
            break;
        }
        case FusionKind::Type2TimeBin: {
            c.provenance = "type-II fusion, time-bin: R(45 deg) gates around a switch acting as PBSC";
            append(c.elements, rt45_elements(kPi, kPi, ra, aux_a, b0));
            append(c.elements, rt45_elements(kPi, kPi, rb, aux_b, b0));
            c.elements.push_back(Switch{ra, rb, only_bin(b0 + 2), "swap bin " + std::to_string(b0 + 2)});
            append(c.elements, rt45_elements(kPi, kPi, ra, aux_a, b0 + 1));
            append(c.elements, rt45_elements(kPi, kPi, rb, aux_b, b0 + 1));
            c.detectors = {detector("A.s", Mode{ra, b0 + 2, p}, th), detector("A.l", Mode{ra, b0 + 3, p}, th),
                           detector("B.s", Mode{rb, b0 + 2, p}, th), detector("B.l", Mode{rb, b0 + 3, p}, th)};
            fc.heralds_success = [](const std::vector<int> &r) { return (r[0] || r[1]) && (r[2] || r[3]); };
            break;
        }
        case FusionKind::Type1Pol: {
            c.provenance = "type-I fusion, polarization: converters, PBSC, 45 deg rotation, converter back";
            append(c.elements, tpc_elements(ra, aux_a, b0));
            append(c.elements, tpc_elements(rb, aux_b, b0));
            c.elements.push_back(Pbsc{ra, rb});
            c.elements.push_back(PolRot{rb, kPi / 4});
            append(c.elements, ptc_elements(ra, aux_a, b0 + 1));
            c.detectors = {detector("B.H", Mode{rb, b0 + 1, Pol::H}, nr), detector("B.V", Mode{rb, b0 + 1, Pol::V}, nr)};
            fc.on_failure = {detector("A.s", Mode{ra, b0 + 1, Pol::H}, nr), detector("A.l", Mode{ra, b0 + 2, Pol::H}, nr)};
            fc.fused_output = timebin(ra, b0 + 1, Pol::H);
            fc.heralds_success = [](const std::vector<int> &r) { return r[0] + r[1] == 1; };
            break;
        }
        case FusionKind::Type2Pol: {
            c.provenance = "type-II fusion, polarization: converters, 45 deg rotations around a PBSC";
            append(c.elements, tpc_elements(ra, aux_a, b0));
            append(c.elements, tpc_elements(rb, aux_b, b0));
            c.elements.push_back(PolRot{ra, kPi / 4});
            c.elements.push_back(PolRot{rb, kPi / 4});
            c.elements.push_back(Pbsc{ra, rb});
            c.elements.push_back(PolRot{ra, kPi / 4});
            c.elements.push_back(PolRot{rb, kPi / 4});
            const int pb = b0 + 1;
            c.detectors = {detector("A.H", Mode{ra, pb, Pol::H}, th), detector("A.V", Mode{ra, pb, Pol::V}, th),
                           detector("B.H", Mode{rb, pb, Pol::H}, th), detector("B.V", Mode{rb, pb, Pol::V}, th)};
            fc.heralds_success = [](const std::vector<int> &r) { return (r[0] || r[1]) && (r[2] || r[3]); };
            break;
        }
    }
    if (is_type1(kind)) {
        c.output[0] = fc.fused_output;
    }
    return fc;
}

namespace {

std::vector<FusionBranch> fuse_raw(FusionKind kind, const EncodedState &joint_in, int qa, int qb) {
    if (qa == qb) {
        throw BadFrame("cannot fuse a qubit with itself");
    }
    const bool lifted = is_pol(kind) && !joint_in.state.has_polarization();
    const EncodedState joint = is_pol(kind) ? lift_polarization(joint_in) : joint_in;
    auto ia = joint.frame.find(qa);
    auto ib = joint.frame.find(qb);
    if (ia == joint.frame.end() || ib == joint.frame.end()) {
        throw BadFrame("fusion qubits must be in the frame");
    }
    const int aux_a = free_rail_above(joint);
    const FusionCircuit fc = build_fusion(kind, ia->second, ib->second, aux_a, aux_a + 1);
    const OpticalCircuit &c = fc.circuit;
    const PhotonicState out = run_elements(c, joint.state);

    QubitFrame rest = joint.frame;
    rest.erase(qa);
    rest.erase(qb);

    auto finish = [&](FusionBranch b) {
        if (lifted) {
            b.post = drop_polarization(b.post);
        }
        return b;
    };

    std::vector<FusionBranch> result;
    for (const auto &branch : detect(out, c.detectors)) {
        std::vector<int> readings;
        for (std::size_t i = 0; i < c.detectors.size(); ++i) {
            readings.push_back(branch.reading(c.detectors, i));
        }
        CircuitBranch cb{readings, branch.mode_counts, branch.probability, {}};
        const std::string label = cb.label(c.detectors);
        const bool success = fc.heralds_success(readings);
        if (success && is_type1(kind)) {
            QubitFrame frame = rest;
            frame[qa] = fc.fused_output;
            result.push_back(finish(FusionBranch{true, label, branch.probability, EncodedState{branch.post, frame}, {}}));
        } else if (!success && !fc.on_failure.empty()) {
            for (const auto &sub : detect(branch.post, fc.on_failure)) {
                std::vector<int> r2;
                for (std::size_t i = 0; i < fc.on_failure.size(); ++i) {
                    r2.push_back(sub.reading(fc.on_failure, i));
                }
                CircuitBranch cb2{r2, {}, 0.0, {}};
                result.push_back(finish(FusionBranch{false, label + " " + cb2.label(fc.on_failure),
                                                     branch.probability * sub.probability,
                                                     EncodedState{sub.post, rest}, {}}));
            }
        } else {
            result.push_back(finish(FusionBranch{success, label, branch.probability, EncodedState{branch.post, rest}, {}}));
        }
    }
    return result;
}

}  // namespace

std::vector<FusionBranch> fuse(FusionKind kind, const EncodedState &joint, int qa, int qb) {
    std::vector<FusionBranch> branches = fuse_raw(kind, joint, qa, qb);
    const ByproductTable &table = byproduct_table();
    for (auto &b : branches) {
        auto it = table.find(ByproductKey{kind, b.outcome});
        if (it != table.end()) {
            b.byproduct = it->second.byproduct;
        }
    }
    return branches;
}

std::vector<FusionBranch> fusion_type1_timebin(const EncodedState &joint, int qa, int qb, bool split_detectors) {
    return fuse(split_detectors ? FusionKind::Type1TimeBinSplit : FusionKind::Type1TimeBin, joint, qa, qb);
}

std::vector<FusionBranch> fusion_type2_timebin(const EncodedState &joint, int qa, int qb) {
    return fuse(FusionKind::Type2TimeBin, joint, qa, qb);
}

std::vector<FusionBranch> fusion_type1_pol(const EncodedState &joint, int qa, int qb) {
    return fuse(FusionKind::Type1Pol, joint, qa, qb);
}

std::vector<FusionBranch> fusion_type2_pol(const EncodedState &joint, int qa, int qb) {
    return fuse(FusionKind::Type2Pol, joint, qa, qb);
}

double success_probability(const std::vector<FusionBranch> &branches) {
    double p = 0.0;
    for (const auto &b : branches) {
        if (b.success) {
            p += b.probability;
        }
    }
    return p;
}

const FusionBranch &sample_branch(const std::vector<FusionBranch> &branches, std::mt19937_64 &rng) {
    if (branches.empty()) {
        throw std::invalid_argument("no branches to sample from");
    }
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    double acc = 0.0;
    for (const auto &b : branches) {
        acc += b.probability;
        if (u < acc) {
            return b;
        }
    }
    return branches.back();
}

// ---------------------------------------------------------------------------
// Byproducts

GraphState canonical_type1_input() { return GraphState::chain({0, 1}).joined(GraphState::chain({2, 3})); }

GraphState canonical_type2_input() {
    const GraphState left = GraphState::chain({0, 1}).with_redundant_copy(1, 2);
    const GraphState right = GraphState::chain({3, 5}).with_redundant_copy(3, 4);
    return left.joined(right);
}

double fusion_oracle_fidelity(FusionKind kind, const GraphState &g, int va, int vb, const FusionBranch &branch) {
    const GraphState h = is_type1(kind) ? fuse1(g, va, vb, branch.success, branch.byproduct)
                                        : fuse2(g, va, vb, branch.success, branch.byproduct);
    const std::vector<int> order(h.vertices().begin(), h.vertices().end());
    for (int v : order) {
        if (!branch.post.frame.contains(v)) {
            return 0.0;
        }
    }
    if (order.size() != branch.post.frame.size()) {
        return 0.0;
    }
    if (order.empty()) {
        return 1.0;
    }
    const Eigen::VectorXcd expected = to_statevector(h, order);
    const Eigen::VectorXcd actual = decode(branch.post, order);
    return vector_fidelity(expected, actual);
}

namespace {

std::vector<FusionRole> roles_for(FusionKind kind, bool success) {
    if (is_type1(kind)) {
        if (success) {
            return {FusionRole::Fused, FusionRole::Neighbors1, FusionRole::Neighbors2};
        }
        return {FusionRole::Neighbors1, FusionRole::Neighbors2};
    }
    return {FusionRole::Partner1, FusionRole::Partner2, FusionRole::Neighbors1, FusionRole::Neighbors2};
}

// Candidate byproducts on `roles` in search order: by weight, then
// lexicographically with earlier roles first and Z < X < Y on each role.
std::vector<Byproduct> candidates(const std::vector<FusionRole> &roles) {
    const int n = static_cast<int>(roles.size());
    // per-role key: 0 = Z, 1 = X, 2 = Y, 3 = identity
    constexpr Pauli kByKey[] = {Pauli::Z, Pauli::X, Pauli::Y, Pauli::I};
    std::vector<std::vector<int>> keys;
    int total = 1;
    for (int k = 0; k < n; ++k) {
        total *= 4;
    }
    for (int code = 0; code < total; ++code) {
        std::vector<int> d(n);
        int c = code;
        for (int k = n - 1; k >= 0; --k) {
            d[k] = c % 4;
            c /= 4;
        }
        keys.push_back(d);
    }
    auto weight = [](const std::vector<int> &d) { return std::count_if(d.begin(), d.end(), [](int x) { return x != 3; }); };
    std::sort(keys.begin(), keys.end(), [&](const auto &a, const auto &b) {
        const auto wa = weight(a);
        const auto wb = weight(b);
        return wa != wb ? wa < wb : a < b;
    });
    std::vector<Byproduct> out;
    for (const auto &d : keys) {
        Byproduct b;
        for (int k = 0; k < n; ++k) {
            if (d[k] != 3) {
                b.paulis[roles[k]] = kByKey[d[k]];
            }
        }
        out.push_back(b);
    }
    return out;
}

}  // namespace

ByproductTable derive_byproduct_table() {
    ByproductTable table;
    for (FusionKind kind : {FusionKind::Type1TimeBin, FusionKind::Type1TimeBinSplit, FusionKind::Type2TimeBin,
                            FusionKind::Type1Pol, FusionKind::Type2Pol}) {
        const bool t1 = is_type1(kind);
        const GraphState g = t1 ? canonical_type1_input() : canonical_type2_input();
        const int va = t1 ? 1 : 2;
        const int vb = t1 ? 2 : 3;
        for (FusionBranch b : fuse_raw(kind, encode_graph(g), va, vb)) {
            if (b.probability < 1e-14) {
                continue;
            }
            const ByproductKey key{kind, b.outcome};
            ByproductEntry best{b.success, {}, -1.0};
            for (const Byproduct &cand : candidates(roles_for(kind, b.success))) {
                b.byproduct = cand;
                const double f = fusion_oracle_fidelity(kind, g, va, vb, b);
                if (f > best.fidelity) {
                    best = ByproductEntry{b.success, cand, f};
                }
                if (f >= 1.0 - kOracleTol) {
                    break;
                }
            }
            // Branches sharing a label must agree; keep the worse fit visible.
            auto it = table.find(key);
            if (it == table.end() || best.fidelity < it->second.fidelity) {
                table[key] = best;
            }
        }
    }
    return table;
}

const ByproductTable &byproduct_table() {
    static const ByproductTable table = derive_byproduct_table();
    return table;
}

std::string format_byproduct_table(const ByproductTable &t) {
    std::ostringstream out;
    out << "fiberloom/1 byproducts\n";
    out << "# gate\toutcome\tstatus\tbyproduct\tfidelity\n";
    for (const auto &[key, e] : t) {
        out << to_string(key.kind) << "\t" << key.outcome << "\t" << (e.success ? "success" : "failure") << "\t"
            << e.byproduct.str() << "\t" << std::setprecision(15) << e.fidelity << "\n";
    }
    return out.str();
}

ByproductTable parse_byproduct_table(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    ByproductTable t;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("fiberloom/", 0) == 0) {
            continue;
        }
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string f;
        while (std::getline(ls, f, '\t')) {
            fields.push_back(f);
        }
        if (fields.size() != 5) {
            throw std::invalid_argument("byproduct table line " + std::to_string(line_no) + ": expected 5 fields");
        }
        ByproductEntry e;
        e.success = fields[2] == "success";
        e.byproduct = Byproduct::parse(fields[3]);
        e.fidelity = std::stod(fields[4]);
        t[ByproductKey{fusion_kind_from_string(fields[0]), fields[1]}] = e;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Catalog

const std::vector<CatalogEntry> &catalog() {
    static const std::vector<CatalogEntry> entries = [] {
        const QubitSlot q = timebin(0, 0);
        const QubitSlot qa = timebin(0, 1);
        const QubitSlot qb = timebin(1, 1);
        auto fusion = [qa, qb](FusionKind k) { return [=] { return build_fusion(k, qa, qb, 2, 3).circuit; }; };
        std::vector<CatalogEntry> e{
            {"rt45", "reconfigurable time-bin gate, phi1 = phi2 = pi: R(45 deg)", [q] { return build_rt45(kPi, kPi, q.rail, 1, q.bin); }},
            {"hadamard_t", "reconfigurable time-bin gate, phi1 = 0, phi2 = pi: Hadamard",
             [q] {
                 OpticalCircuit c = build_rt45(0.0, kPi, q.rail, 1, q.bin);
                 c.name = "hadamard_t";
                 return c;
             }},
            {"fusion1_tb", "type-I fusion on time-bin qubits", fusion(FusionKind::Type1TimeBin)},
            {"fusion2_tb", "type-II fusion on time-bin qubits", fusion(FusionKind::Type2TimeBin)},
            {"fusion1_pol", "type-I fusion through polarization encoding", fusion(FusionKind::Type1Pol)},
            {"fusion2_pol", "type-II fusion through polarization encoding", fusion(FusionKind::Type2Pol)},
            {"tpc", "time-bin to polarization converter", [q] { return tpc(q, 1); }},
            {"ptc", "polarization to time-bin converter", [] { return ptc(polarization(0, 0), 1); }},
            {"measure_tb", "time-bin measurement, Rz(theta) then Hadamard (theta = 0)",
             [q] { return measure_circuit_timebin(0.0, 1, q, 1); }},
            {"measure_pol", "polarization measurement with half-wave plate (theta = 0)",
             [q] { return measure_circuit_pol(0.0, 1, q, 1); }},
            {"bitflip", "bit flip for time-bin qubits", [q] { return bit_flip_circuit(q, 1); }},
            {"phaseflip", "phase flip for time-bin qubits", [q] { return phase_flip_circuit(q); }},
        };
        return e;
    }();
    return entries;
}

OpticalCircuit catalog_circuit(const std::string &name) {
    for (const auto &e : catalog()) {
        if (e.name == name) {
            OpticalCircuit c = e.build();
            c.name = name;
            return c;
        }
    }
    throw std::out_of_range("no circuit named '" + name + "' in the catalog");
}

}  // namespace fiberloom
