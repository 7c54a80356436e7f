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

#include "support/growth_oracle.h"

#include <stdexcept>

#include <Eigen/Dense>

namespace fiberloom::testing {
namespace {

// E(L) for L = 0..n-1 with E(n) = 0; seeds counted when drawn.
double solve(int n, double p, bool failure_shortens) {
    if (n < 2) {
        throw std::invalid_argument("n must be at least 2");
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
    auto link = [&](int from, int to, double w) {
        if (to < n) {
            a(from, to) -= w;
        }
    };
    link(0, 2, 1.0);
    for (int l = 1; l < n; ++l) {
        link(l, l + 1, p);
        link(l, failure_shortens ? l - 1 : l, 1 - p);
    }
    const Eigen::VectorXd e = a.fullPivLu().solve(b);
    // the process starts with one seed already drawn at length 2
    return n == 2 ? 1.0 : 1.0 + e[2];
}

}  // namespace

double type1_expected_seeds(int n, double p) { return solve(n, p, true); }

double type2_expected_seeds(int n, double p) { return solve(n, p, false); }

}  // namespace fiberloom::testing
