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

#include "fiberloom/fock.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fiberloom {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

void check_photons(int n) {
    if (n > kMaxPhotons) {
        throw PhotonBound("photon count " + std::to_string(n) + " exceeds the supported maximum of " +
                          std::to_string(kMaxPhotons));
    }
}

}  // namespace

std::string to_string(Pol p) {
    switch (p) {
        case Pol::H:
            return "H";
        case Pol::V:
            return "V";
        case Pol::None:
            break;
    }
    return "-";
}

std::string Mode::str() const {
    std::ostringstream out;
    out << "r" << rail << "b" << bin;
    if (pol != Pol::None) {
        out << to_string(pol);
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// OccupationState

OccupationState::OccupationState(std::vector<std::pair<Mode, int>> entries) {
    std::sort(entries.begin(), entries.end());
    for (const auto &[m, n] : entries) {
        if (n < 0) {
            throw std::invalid_argument("negative photon count in mode " + m.str());
        }
        if (n == 0) {
            continue;
        }
        if (!entries_.empty() && entries_.back().first == m) {
            entries_.back().second += n;
        } else {
            entries_.emplace_back(m, n);
        }
    }
}

int OccupationState::count(const Mode &m) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), m,
                               [](const std::pair<Mode, int> &e, const Mode &key) { return e.first < key; });
    return (it != entries_.end() && it->first == m) ? it->second : 0;
}

int OccupationState::total() const {
    int t = 0;
    for (const auto &e : entries_) {
        t += e.second;
    }
    return t;
}

OccupationState OccupationState::with_count(const Mode &m, int n) const {
    std::vector<std::pair<Mode, int>> out;
    out.reserve(entries_.size() + 1);
    for (const auto &e : entries_) {
        if (e.first != m) {
            out.push_back(e);
        }
    }
    out.emplace_back(m, n);
    return OccupationState(std::move(out));
}

OccupationState OccupationState::without(std::span<const Mode> modes) const {
    std::vector<std::pair<Mode, int>> out;
    for (const auto &e : entries_) {
        if (std::find(modes.begin(), modes.end(), e.first) == modes.end()) {
            out.push_back(e);
        }
    }
    OccupationState r;
    r.entries_ = std::move(out);
    return r;
}

OccupationState OccupationState::merged(const OccupationState &other) const {
    auto all = entries_;
    all.insert(all.end(), other.entries_.begin(), other.entries_.end());
    return OccupationState(std::move(all));
}

std::string OccupationState::str() const {
    if (entries_.empty()) {
        return "|vac>";
    }
    std::ostringstream out;
    out << "|";
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (k) {
            out << ",";
        }
        out << entries_[k].first.str();
        if (entries_[k].second != 1) {
            out << "^" << entries_[k].second;
        }
    }
    out << ">";
    return out.str();
}

// ---------------------------------------------------------------------------
// ModeUnitary

ModeUnitary::ModeUnitary(std::vector<Mode> m, Eigen::MatrixXcd u) : modes(std::move(m)), matrix(std::move(u)) {
    if (modes.empty() || modes.size() > 2) {
        throw std::invalid_argument("a ModeUnitary couples one or two modes");
    }
    if (modes.size() == 2 && modes[0] == modes[1]) {
        throw std::invalid_argument("ModeUnitary modes must be distinct");
    }
    if (matrix.rows() != static_cast<Eigen::Index>(modes.size()) || matrix.cols() != matrix.rows()) {
        throw std::invalid_argument("ModeUnitary matrix dimension does not match its modes");
    }
    if (unitarity_error() >= 1e-12) {
        throw NonUnitary("matrix on " + modes.front().str() + " is not unitary");
    }
}

double ModeUnitary::unitarity_error() const {
    Eigen::MatrixXcd d = matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols());
    return d.cwiseAbs().maxCoeff();
}

ModeUnitary ModeUnitary::phase(Mode m, double phi) {
    Eigen::MatrixXcd u(1, 1);
    u(0, 0) = std::polar(1.0, phi);
    return ModeUnitary({m}, u);
}

ModeUnitary ModeUnitary::swap(Mode a, Mode b) {
    Eigen::MatrixXcd u(2, 2);
    u << 0, 1, 1, 0;
    return ModeUnitary({a, b}, u);
}

ModeUnitary ModeUnitary::coupler(Mode a, Mode b, double transmission) {
    const double t = std::sqrt(transmission);
    const double r = std::sqrt(1.0 - transmission);
    const cplx i(0, 1);
    Eigen::MatrixXcd u(2, 2);
    u << t, i * r, i * r, t;
    return ModeUnitary({a, b}, u);
}

ModeUnitary compose(const ModeUnitary &u2, const ModeUnitary &u1) {
    if (u2.modes != u1.modes) {
        throw std::invalid_argument("compose requires unitaries on the same ordered modes");
    }
    return ModeUnitary(u1.modes, u2.matrix * u1.matrix);
}

// ---------------------------------------------------------------------------
// PhotonicState

PhotonicState::PhotonicState(Terms terms) : terms_(std::move(terms)) {
    bool first = true;
    std::set<Mode> modes;
    for (const auto &[occ, amp] : terms_) {
        const int n = occ.total();
        check_photons(n);
        if (first) {
            total_photons_ = n;
            first = false;
        } else if (n != total_photons_) {
            throw std::invalid_argument("basis terms carry different photon numbers (" + std::to_string(n) +
                                        " vs " + std::to_string(total_photons_) + ")");
        }
        for (const auto &e : occ.entries()) {
            modes.insert(e.first);
        }
    }
    if (modes.size() > static_cast<std::size_t>(kMaxModes)) {
        throw PhotonBound("state occupies more than " + std::to_string(kMaxModes) + " modes");
    }
}

PhotonicState PhotonicState::vacuum() { return basis(OccupationState{}); }

PhotonicState PhotonicState::basis(const OccupationState &occ, cplx amp) {
    Terms t;
    t.emplace(occ, amp);
    return PhotonicState(std::move(t));
}

PhotonicState PhotonicState::from_terms(const std::vector<std::pair<OccupationState, cplx>> &terms) {
    Terms t;
    for (const auto &[occ, amp] : terms) {
        t[occ] += amp;
    }
    std::erase_if(t, [](const auto &kv) { return std::abs(kv.second) < kPruneEps; });
    return PhotonicState(std::move(t));
}

cplx PhotonicState::amplitude(const OccupationState &occ) const {
    auto it = terms_.find(occ);
    return it == terms_.end() ? cplx{} : it->second;
}

double PhotonicState::norm() const {
    double s = 0;
    for (const auto &kv : terms_) {
        s += std::norm(kv.second);
    }
    return std::sqrt(s);
}

PhotonicState PhotonicState::normalized() const {
    const double n = norm();
    if (n == 0.0) {
        throw EmptyState("cannot normalize an empty state");
    }
    return scaled(1.0 / n);
}

PhotonicState PhotonicState::scaled(cplx factor) const {
    Terms t;
    for (const auto &[occ, amp] : terms_) {
        const cplx a = amp * factor;
        if (std::abs(a) >= kPruneEps) {
            t.emplace(occ, a);
        }
    }
    return PhotonicState(std::move(t));
}

std::set<int> PhotonicState::rails() const {
    std::set<int> r;
    for (const auto &kv : terms_) {
        for (const auto &e : kv.first.entries()) {
            r.insert(e.first.rail);
        }
    }
    return r;
}

std::set<Mode> PhotonicState::occupied_modes() const {
    std::set<Mode> r;
    for (const auto &kv : terms_) {
        for (const auto &e : kv.first.entries()) {
            r.insert(e.first);
        }
    }
    return r;
}

bool PhotonicState::has_polarization() const {
    for (const auto &m : occupied_modes()) {
        if (m.pol != Pol::None) {
            return true;
        }
    }
    return false;
}

PhotonicState PhotonicState::shift_bins(int rail, int k) const {
    Terms t;
    for (const auto &[occ, amp] : terms_) {
        std::vector<std::pair<Mode, int>> e = occ.entries();
        for (auto &[m, n] : e) {
            if (m.rail == rail) {
                m.bin += k;
                if (m.bin < 0) {
                    throw std::out_of_range("bin shift moved a photon before bin 0");
                }
            }
        }
        t.emplace(OccupationState(std::move(e)), amp);
    }
    return PhotonicState(std::move(t));
}

std::string PhotonicState::str() const {
    std::ostringstream out;
    bool first = true;
    for (const auto &[occ, amp] : terms_) {
        if (!first) {
            out << " + ";
        }
        first = false;
        out << "(" << amp.real() << (amp.imag() < 0 ? "-" : "+") << std::abs(amp.imag()) << "i)" << occ.str();
    }
    return first ? std::string("0") : out.str();
}

// ---------------------------------------------------------------------------
// Operations

PhotonicState tensor(const PhotonicState &a, const PhotonicState &b) {
    const auto ra = a.rails();
    const auto rb = b.rails();
    for (int r : ra) {
        if (rb.contains(r)) {
            throw RailCollision("rail " + std::to_string(r) + " is occupied in both factors");
        }
    }
    std::vector<std::pair<OccupationState, cplx>> terms;
    terms.reserve(a.size() * b.size());
    for (const auto &[oa, xa] : a.terms()) {
        for (const auto &[ob, xb] : b.terms()) {
            terms.emplace_back(oa.merged(ob), xa * xb);
        }
    }
    return PhotonicState::from_terms(terms);
}

PhotonicState apply_unitary(const ModeUnitary &u, const PhotonicState &s) {
    if (u.unitarity_error() >= 1e-12) {
        throw NonUnitary("refusing to apply a non-unitary matrix");
    }
    std::vector<std::pair<OccupationState, cplx>> out;
    out.reserve(s.size() * 2);

    if (u.modes.size() == 1) {
        const Mode &m = u.modes[0];
        const cplx g = u.matrix(0, 0);
        for (const auto &[occ, amp] : s.terms()) {
            const int n = occ.count(m);
            out.emplace_back(occ, n == 0 ? amp : amp * std::pow(g, n));
        }
        return PhotonicState::from_terms(out);
    }

    const Mode &m0 = u.modes[0];
    const Mode &m1 = u.modes[1];
    const Eigen::MatrixXcd &U = u.matrix;
    std::vector<cplx> poly;
    std::vector<cplx> next;
    for (const auto &[occ, amp] : s.terms()) {
        const int n0 = occ.count(m0);
        const int n1 = occ.count(m1);
        if (n0 == 0 && n1 == 0) {
            out.emplace_back(occ, amp);
            continue;
        }
        const int n = n0 + n1;
        check_photons(n);
        // poly[k] is the coefficient of (b0†)^k (b1†)^(deg-k).
        poly.assign(1, 1.0);
        auto multiply = [&](cplx alpha, cplx beta) {
            next.assign(poly.size() + 1, 0.0);
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] += alpha * poly[k];
                next[k] += beta * poly[k];
            }
            poly.swap(next);
        };
        for (int j = 0; j < n0; ++j) {
            multiply(U(0, 0), U(1, 0));
        }
        for (int j = 0; j < n1; ++j) {
            multiply(U(0, 1), U(1, 1));
        }
        const double in_norm = std::sqrt(factorial(n0) * factorial(n1));
        const OccupationState rest = occ.with_count(m0, 0).with_count(m1, 0);
        for (int k = 0; k <= n; ++k) {
            if (poly[k] == cplx{}) {
                continue;
            }
            const double out_norm = std::sqrt(factorial(k) * factorial(n - k));
            out.emplace_back(rest.with_count(m0, k).with_count(m1, n - k), amp * poly[k] * out_norm / in_norm);
        }
    }
    return PhotonicState::from_terms(out);
}

cplx inner(const PhotonicState &a, const PhotonicState &b) {
    cplx s{};
    const auto &small = a.size() <= b.size() ? a.terms() : b.terms();
    const bool a_small = a.size() <= b.size();
    for (const auto &[occ, amp] : small) {
        if (a_small) {
            s += std::conj(amp) * b.amplitude(occ);
        } else {
            s += std::conj(a.amplitude(occ)) * amp;
        }
    }
    return s;
}

double fidelity(const PhotonicState &a, const PhotonicState &b) { return std::norm(inner(a, b)); }

int DetectionBranch::reading(std::span<const Detector> detectors, std::size_t i) const {
    if (detectors[i].model == DetectorModel::Threshold) {
        return counts[i] > 0 ? 1 : 0;
    }
    return counts[i];
}

std::vector<DetectionBranch> detect(const PhotonicState &s, std::span<const Detector> detectors) {
    if (s.empty()) {
        throw EmptyState("detect called on a state with no amplitudes");
    }
    if (detectors.empty()) {
        throw std::invalid_argument("detect needs at least one detector");
    }
    std::vector<Mode> all_modes;
    for (const auto &d : detectors) {
        if (d.modes.empty()) {
            throw std::invalid_argument("detector '" + d.name + "' covers no modes");
        }
        all_modes.insert(all_modes.end(), d.modes.begin(), d.modes.end());
    }

    // Photons absorbed in different modes leave orthogonal records even when
    // one detector covers both modes, so branches are keyed per mode.
    std::map<std::vector<int>, std::vector<std::pair<OccupationState, cplx>>> groups;
    for (const auto &[occ, amp] : s.terms()) {
        std::vector<int> key;
        key.reserve(all_modes.size());
        for (const auto &m : all_modes) {
            key.push_back(occ.count(m));
        }
        groups[key].emplace_back(occ.without(all_modes), amp);
    }

    const double total = s.norm() * s.norm();
    std::vector<DetectionBranch> out;
    for (auto &[key, terms] : groups) {
        PhotonicState post = PhotonicState::from_terms(terms);
        if (post.empty()) {
            continue;
        }
        const double p = post.norm() * post.norm() / total;
        std::vector<int> counts;
        std::size_t pos = 0;
        for (const auto &d : detectors) {
            int c = 0;
            for (std::size_t k = 0; k < d.modes.size(); ++k) {
                c += key[pos++];
            }
            counts.push_back(c);
        }
        out.push_back(DetectionBranch{std::move(counts), key, p, post.normalized()});
    }
    return out;
}

std::vector<DetectionBranch> detect(const PhotonicState &s, std::span<const Mode> modes, DetectorModel model) {
    std::vector<Detector> ds;
    ds.reserve(modes.size());
    for (const auto &m : modes) {
        ds.push_back(Detector{m.str(), {m}, model});
    }
    return detect(s, ds);
}

}  // namespace fiberloom
