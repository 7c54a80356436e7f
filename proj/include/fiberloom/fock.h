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

// Exact multi-photon optical states over labeled modes.
//
// A PhotonicState is a sparse superposition of occupation-number basis
// states. Linear optics acts on it through ModeUnitary values, each of which
// couples at most two modes; detection partitions the state by the photon
// content of the detected modes.

#include <complex>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace fiberloom {

using cplx = std::complex<double>;

inline constexpr int kMaxPhotons = 8;
inline constexpr int kMaxModes = 32;
inline constexpr double kPruneEps = 1e-14;

struct RailCollision : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct NonUnitary : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct PhotonBound : std::length_error {
    using std::length_error::length_error;
};
struct EmptyState : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Pol : std::uint8_t { None, H, V };

std::string to_string(Pol p);

/// One optical mode: a fiber rail, a time bin and (optionally) a polarization.
struct Mode {
    int rail = 0;
    int bin = 0;
    Pol pol = Pol::None;

    auto operator<=>(const Mode &) const = default;
    bool operator==(const Mode &) const = default;

    Mode with_pol(Pol p) const { return {rail, bin, p}; }
    std::string str() const;
};

/// Occupation-number basis state. Only nonzero counts are stored, sorted by mode.
class OccupationState {
   public:
    OccupationState() = default;
    explicit OccupationState(std::vector<std::pair<Mode, int>> entries);

    static OccupationState single(Mode m) { return OccupationState({{m, 1}}); }

    int count(const Mode &m) const;
    int total() const;
    const std::vector<std::pair<Mode, int>> &entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    OccupationState with_count(const Mode &m, int n) const;
    OccupationState without(std::span<const Mode> modes) const;
    OccupationState merged(const OccupationState &other) const;

    std::string str() const;

    auto operator<=>(const OccupationState &) const = default;
    bool operator==(const OccupationState &) const = default;

   private:
    std::vector<std::pair<Mode, int>> entries_;
};

/// Unitary acting on the creation operators of one or two modes:
/// a†_i -> sum_j U(j, i) a†_j.
struct ModeUnitary {
    std::vector<Mode> modes;
    Eigen::MatrixXcd matrix;

    ModeUnitary() = default;
    ModeUnitary(std::vector<Mode> modes, Eigen::MatrixXcd matrix);

    static ModeUnitary phase(Mode m, double phi);
    static ModeUnitary swap(Mode a, Mode b);
    /// Two-mode coupler, symmetric convention: [[t, i r], [i r, t]].
    static ModeUnitary coupler(Mode a, Mode b, double transmission = 0.5);

    double unitarity_error() const;
};

/// Product of two unitaries acting on the same ordered mode list (u2 after u1).
ModeUnitary compose(const ModeUnitary &u2, const ModeUnitary &u1);

class PhotonicState {
   public:
    using Terms = std::map<OccupationState, cplx>;

    PhotonicState() = default;

    static PhotonicState vacuum();
    static PhotonicState basis(const OccupationState &occ, cplx amp = 1.0);
    static PhotonicState single_photon(Mode m) { return basis(OccupationState::single(m)); }
    /// Sums duplicate terms and drops amplitudes below the prune threshold.
    static PhotonicState from_terms(const std::vector<std::pair<OccupationState, cplx>> &terms);

    const Terms &terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    int total_photons() const { return total_photons_; }
    cplx amplitude(const OccupationState &occ) const;

    double norm() const;
    PhotonicState normalized() const;
    PhotonicState scaled(cplx factor) const;

    std::set<int> rails() const;
    std::set<Mode> occupied_modes() const;
    bool has_polarization() const;

    /// Moves every photon on `rail` by `k` bins.
    PhotonicState shift_bins(int rail, int k) const;

    std::string str() const;

   private:
    explicit PhotonicState(Terms terms);

    Terms terms_;
    int total_photons_ = 0;
};

PhotonicState tensor(const PhotonicState &a, const PhotonicState &b);
PhotonicState apply_unitary(const ModeUnitary &u, const PhotonicState &s);
cplx inner(const PhotonicState &a, const PhotonicState &b);

/// |<a|b>|^2 for normalized inputs.
double fidelity(const PhotonicState &a, const PhotonicState &b);

enum class DetectorModel { Threshold, NumberResolving };

/// A detector absorbs every photon in its modes. A single detector may cover
/// several modes, e.g. every bin of a rail.
struct Detector {
    std::string name;
    std::vector<Mode> modes;
    DetectorModel model = DetectorModel::NumberResolving;
};

struct DetectionBranch {
    /// Exact absorbed photon count per detector.
    std::vector<int> counts;
    /// Absorbed count per detected mode, in detector order.
    std::vector<int> mode_counts;
    double probability = 0.0;
    /// Remaining state with the detected modes removed, renormalized.
    PhotonicState post;

    /// What detector i reports: the count for number-resolving detectors,
    /// 0/1 (no click / click) for threshold detectors.
    int reading(std::span<const Detector> detectors, std::size_t i) const;
};

/// Partitions `s` by the photon content of the detectors' modes.
///
/// Branches are keyed by the exact absorbed count in every detected mode.
/// Two branches may therefore share the same detector readings (a threshold
/// click from one or two photons, or one photon in either bin of a multi-bin
/// detector); they are mutually incoherent and are returned separately.
std::vector<DetectionBranch> detect(const PhotonicState &s, std::span<const Detector> detectors);

/// One detector per listed mode.
std::vector<DetectionBranch> detect(const PhotonicState &s, std::span<const Mode> modes, DetectorModel model);

}  // namespace fiberloom
