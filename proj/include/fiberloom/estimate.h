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

// Monte-Carlo estimate of how many seed clusters it takes to grow a linear
// cluster of a target length by repeated fusion, with per-component loss.

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

#include "fiberloom/circuits.h"

namespace fiberloom {

struct InvalidTarget : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Strategy {
    /// Type-I fusion of a fresh seed onto the chain end. Success adds one
    /// vertex, failure removes one (the Z-measurement rule); an empty chain
    /// restarts from a seed.
    Type1Greedy,
    /// Type-II fusion on a redundantly encoded chain end. Success adds one
    /// vertex; failure acts as X measurements on the two fused photons and
    /// leaves the chain length unchanged.
    Type2Redundant,
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string &s);

/// Loss probability per element kind (see kind_name). The key "active"
/// applies to every switch and programmable phase modulator without an
/// explicit entry; other elements are lossless unless listed.
struct LossModel {
    std::map<std::string, double> per_kind;

    static LossModel uniform_active(double p);
    double loss_of(const Element &e) const;
    /// Probability that a photon crosses all elements of c.
    double transmission(const OpticalCircuit &c) const;
    void validate() const;
};

struct EstimateConfig {
    int target = 3;
    Strategy strategy = Strategy::Type1Greedy;
    LossModel loss;
    int trials = 1000;
    std::uint64_t seed = 1;
    /// Treat every attempt as heralded; gives the strategy's deterministic
    /// growth (n - 1 seeds for both strategies).
    bool force_success = false;
    /// Attempts after which a trial is abandoned and reported as censored.
    long long max_attempts = 10'000'000;
};

struct EstimateReport {
    std::string circuit;  // catalog fusion gate used per attempt
    int active_components = 0;
    double fusion_success = 0.0;  // exact, lossless
    double transmission = 1.0;
    double heralding_probability = 0.0;
    double expected_seeds = 0.0;
    double stddev = 0.0;
    double std_error = 0.0;
    std::map<int, long long> percentiles;  // 50, 90, 99
    int trials = 0;
    int censored = 0;
};

/// Seeds consumed by one growth run.
long long seeds_for_one_trial(Strategy s, int target, double p, std::mt19937_64 &rng, long long max_attempts,
                              bool *censored = nullptr);

/// Generator for trial `trial` of a run seeded with `seed`; streams are
/// independent of how trials are scheduled.
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

EstimateReport estimate_resources(const EstimateConfig &cfg);

}  // namespace fiberloom
