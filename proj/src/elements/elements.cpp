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

#include "fiberloom/elements.h"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fiberloom {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void require_rail(const ModeUniverse &u, int rail, const char *what) {
    if (!u.rails.contains(rail)) {
        throw FrameMismatch(std::string(what) + " references rail " + std::to_string(rail) +
                            " which is not part of the frame");
    }
}

bool polarized(const ModeUniverse &u) {
    for (Pol p : u.pols) {
        if (p == Pol::None) {
            return false;
        }
    }
    return !u.pols.empty();
}

void require_polarized(const ModeUniverse &u, const char *what) {
    if (!polarized(u)) {
        throw FrameMismatch(std::string(what) + " needs a polarization-resolved frame");
    }
}

ModeUnitary pol_matrix(int rail, int bin, const Eigen::Matrix2cd &m) {
    return ModeUnitary({Mode{rail, bin, Pol::H}, Mode{rail, bin, Pol::V}}, Eigen::MatrixXcd(m));
}

}  // namespace

std::string kind_name(const Element &e) {
    return std::visit(overloaded{
                          [](const Coupler &) { return std::string("coupler"); },
                          [](const Switch &) { return std::string("switch"); },
                          [](const PhaseMod &) { return std::string("phase_mod"); },
                          [](const Delay &) { return std::string("delay"); },
                          [](const PolRot &) { return std::string("pol_rot"); },
                          [](const HalfWave &) { return std::string("half_wave"); },
                          [](const Pbsc &) { return std::string("pbsc"); },
                          [](const Loss &) { return std::string("loss"); },
                      },
                      e);
}

std::string describe(const Element &e) {
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const Coupler &c) {
                       out << "COUPLER r" << c.rail_a << ",r" << c.rail_b << " ratio=" << c.ratio;
                       if (c.phase != 0.0) {
                           out << " phase=" << c.phase;
                       }
                   },
                   [&](const Switch &s) { out << "SWITCH r" << s.rail_a << ",r" << s.rail_b << " " << s.setting; },
                   [&](const PhaseMod &p) {
                       out << (p.active ? "PHASE_MOD r" : "PHASE_TRIM r") << p.rail << " " << p.setting;
                   },
                   [&](const Delay &d) { out << "DELAY r" << d.rail << " +" << d.k_bins; },
                   [&](const PolRot &p) { out << "POL_ROT r" << p.rail << " angle=" << p.angle; },
                   [&](const HalfWave &h) { out << "HALF_WAVE r" << h.rail << " angle=" << h.angle; },
                   [&](const Pbsc &p) { out << "PBSC r" << p.rail_a << ",r" << p.rail_b; },
                   [&](const Loss &l) {
                       out << "LOSS r" << l.rail << " p=" << l.probability << " -> r" << l.reservoir_rail;
                   },
               },
               e);
    return out.str();
}

std::vector<int> rails_of(const Element &e) {
    return std::visit(overloaded{
                          [](const Coupler &c) { return std::vector<int>{c.rail_a, c.rail_b}; },
                          [](const Switch &s) { return std::vector<int>{s.rail_a, s.rail_b}; },
                          [](const PhaseMod &p) { return std::vector<int>{p.rail}; },
                          [](const Delay &d) { return std::vector<int>{d.rail}; },
                          [](const PolRot &p) { return std::vector<int>{p.rail}; },
                          [](const HalfWave &h) { return std::vector<int>{h.rail}; },
                          [](const Pbsc &p) { return std::vector<int>{p.rail_a, p.rail_b}; },
                          [](const Loss &l) { return std::vector<int>{l.rail}; },
                      },
                      e);
}

bool is_active(const Element &e) {
    if (std::holds_alternative<Switch>(e)) {
        return true;
    }
    if (const auto *p = std::get_if<PhaseMod>(&e)) {
        return p->active;
    }
    return false;
}

void validate(const Element &e) {
    std::visit(overloaded{
                   [](const Coupler &c) {
                       if (!(c.ratio > 0.0 && c.ratio < 1.0)) {
                           throw std::invalid_argument("coupler ratio must lie in (0, 1)");
                       }
                       if (c.rail_a == c.rail_b) {
                           throw std::invalid_argument("coupler needs two distinct rails");
                       }
                   },
                   [](const Switch &s) {
                       if (!s.swap_bin) {
                           throw std::invalid_argument("switch needs a bin predicate");
                       }
                       if (s.rail_a == s.rail_b) {
                           throw std::invalid_argument("switch needs two distinct rails");
                       }
                   },
                   [](const PhaseMod &p) {
                       if (!p.phase_of_bin) {
                           throw std::invalid_argument("phase modulator needs a phase profile");
                       }
                   },
                   [](const Delay &d) {
                       if (d.k_bins < 1) {
                           throw std::invalid_argument("delay must be at least one bin");
                       }
                   },
                   [](const PolRot &) {},
                   [](const HalfWave &) {},
                   [](const Pbsc &p) {
                       if (p.rail_a == p.rail_b) {
                           throw std::invalid_argument("PBSC needs two distinct rails");
                       }
                   },
                   [](const Loss &l) {
                       if (!(l.probability >= 0.0 && l.probability < 1.0)) {
                           throw std::invalid_argument("loss probability must lie in [0, 1)");
                       }
                       if (l.reservoir_rail == l.rail) {
                           throw std::invalid_argument("loss reservoir must be a separate rail");
                       }
                   },
               },
               e);
}

ModeUniverse ModeUniverse::of_state(const PhotonicState &s, std::set<int> extra_rails) {
    ModeUniverse u;
    u.rails = std::move(extra_rails);
    std::set<int> bins;
    bool pol = false;
    for (const auto &m : s.occupied_modes()) {
        u.rails.insert(m.rail);
        bins.insert(m.bin);
        pol = pol || m.pol != Pol::None;
    }
    u.bins.assign(bins.begin(), bins.end());
    u.pols = pol ? std::vector<Pol>{Pol::H, Pol::V} : std::vector<Pol>{Pol::None};
    return u;
}

std::vector<CompiledOp> compile(const Element &e, const ModeUniverse &u) {
    validate(e);
    std::vector<CompiledOp> ops;
    std::visit(overloaded{
                   [&](const Coupler &c) {
                       require_rail(u, c.rail_a, "coupler");
                       require_rail(u, c.rail_b, "coupler");
                       const double t = std::sqrt(c.ratio);
                       const double r = std::sqrt(1.0 - c.ratio);
                       const cplx i(0, 1);
                       Eigen::MatrixXcd m(2, 2);
                       m << t, i * std::polar(1.0, c.phase) * r, i * std::polar(1.0, -c.phase) * r, t;
                       for (int b : u.bins) {
                           for (Pol p : u.pols) {
                               ops.emplace_back(ModeUnitary({Mode{c.rail_a, b, p}, Mode{c.rail_b, b, p}}, m));
                           }
                       }
                   },
                   [&](const Switch &s) {
                       require_rail(u, s.rail_a, "switch");
                       require_rail(u, s.rail_b, "switch");
                       for (int b : u.bins) {
                           if (!s.swap_bin(b)) {
                               continue;
                           }
                           for (Pol p : u.pols) {
                               ops.emplace_back(ModeUnitary::swap(Mode{s.rail_a, b, p}, Mode{s.rail_b, b, p}));
                           }
                       }
                   },
                   [&](const PhaseMod &pm) {
                       require_rail(u, pm.rail, "phase modulator");
                       for (int b : u.bins) {
                           const double phi = pm.phase_of_bin(b);
                           if (phi == 0.0) {
                               continue;
                           }
                           for (Pol p : u.pols) {
                               ops.emplace_back(ModeUnitary::phase(Mode{pm.rail, b, p}, phi));
                           }
                       }
                   },
                   [&](const Delay &d) {
                       require_rail(u, d.rail, "delay");
                       ops.emplace_back(BinShift{d.rail, d.k_bins});
                   },
                   [&](const PolRot &pr) {
                       require_rail(u, pr.rail, "polarization controller");
                       require_polarized(u, "polarization controller");
                       const double c = std::cos(pr.angle);
                       const double s = std::sin(pr.angle);
                       Eigen::Matrix2cd m;
                       m << c, -s, s, c;
                       for (int b : u.bins) {
                           ops.emplace_back(pol_matrix(pr.rail, b, m));
                       }
                   },
                   [&](const HalfWave &h) {
                       require_rail(u, h.rail, "half-wave plate");
                       require_polarized(u, "half-wave plate");
                       const double c = std::cos(2 * h.angle);
                       const double s = std::sin(2 * h.angle);
                       Eigen::Matrix2cd m;
                       m << c, s, s, -c;
                       for (int b : u.bins) {
                           ops.emplace_back(pol_matrix(h.rail, b, m));
                       }
                   },
                   [&](const Pbsc &p) {
                       require_rail(u, p.rail_a, "PBSC");
                       require_rail(u, p.rail_b, "PBSC");
                       require_polarized(u, "PBSC");
                       for (int b : u.bins) {
                           ops.emplace_back(ModeUnitary::swap(Mode{p.rail_a, b, Pol::V}, Mode{p.rail_b, b, Pol::V}));
                       }
                   },
                   [&](const Loss &l) {
                       require_rail(u, l.rail, "loss");
                       if (l.probability == 0.0) {
                           return;
                       }
                       for (int b : u.bins) {
                           for (Pol p : u.pols) {
                               ops.emplace_back(ModeUnitary::coupler(Mode{l.rail, b, p}, Mode{l.reservoir_rail, b, p},
                                                                     1.0 - l.probability));
                           }
                       }
                   },
               },
               e);
    return ops;
}

PhotonicState apply(const CompiledOp &op, const PhotonicState &s) {
    if (const auto *u = std::get_if<ModeUnitary>(&op)) {
        return apply_unitary(*u, s);
    }
    const auto &shift = std::get<BinShift>(op);
    return s.shift_bins(shift.rail, shift.k_bins);
}

PhotonicState apply_element(const Element &e, const PhotonicState &s, const std::set<int> &circuit_rails) {
    std::set<int> rails = circuit_rails;
    if (rails.empty()) {
        for (int r : rails_of(e)) {
            rails.insert(r);
        }
        for (int r : s.rails()) {
            rails.insert(r);
        }
    }
    ModeUniverse u = ModeUniverse::of_state(s);
    u.rails = rails;
    PhotonicState out = s;
    for (const auto &op : compile(e, u)) {
        out = fiberloom::apply(op, out);
    }
    return out;
}

}  // namespace fiberloom
