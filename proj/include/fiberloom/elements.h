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

// Fiber-optic components and their compilation to mode-level operations.

#include <functional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fiberloom/fock.h"

namespace fiberloom {

struct FrameMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Variable-ratio fiber coupler between the same bin of two rails.
/// ratio is the power transmission; phase rotates the cross terms:
/// [[t, i e^{i phase} r], [i e^{-i phase} r, t]].
struct Coupler {
    int rail_a = 0;
    int rail_b = 1;
    double ratio = 0.5;
    double phase = 0.0;
};

/// Active electrooptic switch. In bins where swap_bin(bin) holds the two
/// rails exchange their contents, elsewhere both continue straight.
struct Switch {
    int rail_a = 0;
    int rail_b = 1;
    std::function<bool(int)> swap_bin;
    std::string setting;  // human-readable description of swap_bin
};

/// Phase modulator; the applied phase may vary from bin to bin. Fixed phase
/// trims (active = false) do not count as electrooptic components.
struct PhaseMod {
    int rail = 0;
    std::function<double(int)> phase_of_bin;
    bool active = true;
    std::string setting;
};

/// Fiber delay line of k time bins.
struct Delay {
    int rail = 0;
    int k_bins = 1;
};

/// Polarization controller: real rotation [[cos, -sin], [sin, cos]] on (H, V).
struct PolRot {
    int rail = 0;
    double angle = 0.0;
};

/// Half-wave plate with fast axis at `angle`: [[cos 2a, sin 2a], [sin 2a, -cos 2a]].
struct HalfWave {
    int rail = 0;
    double angle = 0.0;
};

/// Polarization beam splitter/combiner: H continues, V changes rail.
struct Pbsc {
    int rail_a = 0;
    int rail_b = 1;
};

/// Photon loss modeled as a coupler into a reservoir rail that is later traced out.
struct Loss {
    int rail = 0;
    double probability = 0.0;
    int reservoir_rail = -1;
};

using Element = std::variant<Coupler, Switch, PhaseMod, Delay, PolRot, HalfWave, Pbsc, Loss>;

std::string kind_name(const Element &e);
std::string describe(const Element &e);
std::vector<int> rails_of(const Element &e);

/// Switches and programmable phase modulators.
bool is_active(const Element &e);

/// Throws std::invalid_argument when parameters violate the element's invariants.
void validate(const Element &e);

/// The set of modes an element may touch when compiled.
struct ModeUniverse {
    std::set<int> rails;
    std::vector<int> bins;
    std::vector<Pol> pols{Pol::None};

    static ModeUniverse of_state(const PhotonicState &s, std::set<int> extra_rails = {});
};

/// Relabels every photon on `rail` to bin + k_bins.
struct BinShift {
    int rail = 0;
    int k_bins = 0;
};

using CompiledOp = std::variant<ModeUnitary, BinShift>;

/// Compiles an element to mode-level operations over `universe`.
/// Identity factors (straight-through switch bins) are omitted.
std::vector<CompiledOp> compile(const Element &e, const ModeUniverse &universe);

PhotonicState apply(const CompiledOp &op, const PhotonicState &s);

/// Compiles against the modes occupied in `s` and applies.
PhotonicState apply_element(const Element &e, const PhotonicState &s, const std::set<int> &circuit_rails = {});

}  // namespace fiberloom
