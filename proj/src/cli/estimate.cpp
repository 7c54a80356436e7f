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

#include "fiberloom/estimate.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace fiberloom {
namespace {

std::string gate_for(Strategy s) { return s == Strategy::Type1Greedy ? "fusion1_tb" : "fusion2_tb"; }

FusionKind kind_for(Strategy s) { return s == Strategy::Type1Greedy ? FusionKind::Type1TimeBin : FusionKind::Type2TimeBin; }

// Exact lossless success probability of the strategy's gate on two seeds.
double seed_fusion_success(Strategy s) {
    const EncodedState a = make_seed_cluster(0, 1, 0, 1);
    const EncodedState b = make_seed_cluster(2, 3, 2, 3);
    EncodedState joint{tensor(a.state, b.state), a.frame};
    joint.frame.insert(b.frame.begin(), b.frame.end());
    return success_probability(fuse(kind_for(s), joint, 1, 2));
}

}  // namespace

std::string to_string(Strategy s) { return s == Strategy::Type1Greedy ? "TYPE1_GREEDY" : "TYPE2_REDUNDANT"; }

Strategy strategy_from_string(const std::string &s) {
    if (s == "TYPE1_GREEDY") {
        return Strategy::Type1Greedy;
    }
    if (s == "TYPE2_REDUNDANT") {
        return Strategy::Type2Redundant;
    }
    throw std::invalid_argument("unknown strategy '" + s + "' (expected TYPE1_GREEDY or TYPE2_REDUNDANT)");
}

LossModel LossModel::uniform_active(double p) {
    LossModel m;
    m.per_kind["active"] = p;
    return m;
}

double LossModel::loss_of(const Element &e) const {
    if (auto it = per_kind.find(kind_name(e)); it != per_kind.end()) {
        return it->second;
    }
    if (is_active(e)) {
        if (auto it = per_kind.find("active"); it != per_kind.end()) {
            return it->second;
        }
    }
    return 0.0;
}

double LossModel::transmission(const OpticalCircuit &c) const {
    double t = 1.0;
    for (const auto &e : c.elements) {
        t *= 1.0 - loss_of(e);
    }
    return t;
}

void LossModel::validate() const {
    for (const auto &[k, p] : per_kind) {
        if (!(p >= 0.0 && p < 1.0)) {
            throw std::invalid_argument("loss for '" + k + "' must lie in [0, 1), got " + std::to_string(p));
        }
    }
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    return std::mt19937_64(seq);
}

long long seeds_for_one_trial(Strategy s, int target, double p, std::mt19937_64 &rng, long long max_attempts,
                              bool *censored) {
    std::bernoulli_distribution herald(p);
    long long seeds = 1;  // the first seed starts the chain
    int length = 2;
    long long attempts = 0;
    if (censored) {
        *censored = false;
    }
    while (length < target) {
        if (attempts++ >= max_attempts) {
            if (censored) {
                *censored = true;
            }
            break;
        }
        if (length == 0) {
            ++seeds;
            length = 2;
            continue;
        }
        ++seeds;
        if (herald(rng)) {
            ++length;
        } else if (s == Strategy::Type1Greedy) {
            --length;
        }
    }
    return seeds;
}

EstimateReport estimate_resources(const EstimateConfig &cfg) {
    if (cfg.target < 2) {
        throw InvalidTarget("target chain length must be at least 2, got " + std::to_string(cfg.target));
    }
    if (cfg.trials < 1) {
        throw std::invalid_argument("trials must be at least 1");
    }
    cfg.loss.validate();

    EstimateReport r;
    r.circuit = gate_for(cfg.strategy);
    const OpticalCircuit gate = catalog_circuit(r.circuit);
    r.active_components = gate.active_count();
    r.fusion_success = seed_fusion_success(cfg.strategy);
    r.transmission = cfg.loss.transmission(gate);
    r.heralding_probability = r.fusion_success * r.transmission;
    r.trials = cfg.trials;

    const double p = cfg.force_success ? 1.0 : r.heralding_probability;
    std::vector<long long> counts(static_cast<std::size_t>(cfg.trials));
    for (int t = 0; t < cfg.trials; ++t) {
        auto rng = trial_rng(cfg.seed, static_cast<std::uint64_t>(t));
        bool cut = false;
        counts[static_cast<std::size_t>(t)] = seeds_for_one_trial(cfg.strategy, cfg.target, p, rng, cfg.max_attempts, &cut);
        r.censored += cut;
    }

    double sum = 0;
    for (long long c : counts) {
        sum += static_cast<double>(c);
    }
    r.expected_seeds = sum / cfg.trials;
    double ss = 0;
    for (long long c : counts) {
        ss += (static_cast<double>(c) - r.expected_seeds) * (static_cast<double>(c) - r.expected_seeds);
    }
    r.stddev = cfg.trials > 1 ? std::sqrt(ss / (cfg.trials - 1)) : 0.0;
    r.std_error = r.stddev / std::sqrt(static_cast<double>(cfg.trials));

    std::sort(counts.begin(), counts.end());
    for (int q : {50, 90, 99}) {
        // nearest-rank percentile
        const auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * cfg.trials));
        r.percentiles[q] = counts[std::max<std::size_t>(rank, 1) - 1];
    }
    return r;
}

}  // namespace fiberloom
