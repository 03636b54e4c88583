// SPDX-License-Identifier: Apache-2.0
//
// mmee - multi-cell massive MIMO energy-efficiency optimization library
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace mmee {

struct WaterfillResult {
    Eigen::VectorXd p;  // shifted powers, >= 0
    double lambda = 0.0; // budget multiplier; 0 iff the budget is slack
    int bisection_iters = 0;
};

// Closed-form water-filling for the per-cell Dinkelbach subproblem:
//
//   max  sum_k ln(a_k + beta_k p_k / sigma2) - t (alpha_amp sum_k w_k p_k + const)
//   s.t. sum_k w_k p_k <= budget,  p >= 0,
//
// whose optimum is p_k = [ 1/(w_k (t alpha_amp + lambda)) - a_k sigma2/beta_k ]+
// with lambda = 0 when that already fits the budget and otherwise chosen by
// bisection so the budget holds with equality (relative tolerance rel_tol).
// Entries with beta_k <= 0 receive zero power.
inline WaterfillResult waterfill(double t, const Eigen::VectorXd& a, const Eigen::VectorXd& beta,
                                 const Eigen::VectorXd& norm_sq, double budget, double alpha_amp, double sigma2,
                                 double rel_tol = 1e-9)
{
    const Eigen::Index k = a.size();
    if (beta.size() != k || norm_sq.size() != k)
        throw std::invalid_argument("waterfill: inconsistent sizes");
    if (!(budget > 0.0) || !(alpha_amp > 0.0) || !(sigma2 > 0.0) || t < 0.0)
        throw std::invalid_argument("waterfill: nonpositive input");

    WaterfillResult res;
    res.p = Eigen::VectorXd::Zero(k);

    auto fill = [&](double lambda, Eigen::VectorXd& p) -> double {
        const double level = t * alpha_amp + lambda;
        double used = 0.0;
        for (Eigen::Index v = 0; v < k; ++v) {
            double pv = 0.0;
            if (beta(v) > 0.0 && level > 0.0) {
                pv = 1.0 / (norm_sq(v) * level) - a(v) * sigma2 / beta(v);
                if (!(pv > 0.0))
                    pv = 0.0;
            }
            p(v) = pv;
            used += norm_sq(v) * pv;
        }
        return used;
    };

    if (t > 0.0) {
        const double used0 = fill(0.0, res.p);
        if (used0 <= budget * (1.0 + rel_tol)) {
            res.lambda = 0.0;
            return res;
        }
    }

    double hi = 1.0;
    Eigen::VectorXd tmp(k);
    while (fill(hi, tmp) > budget) {
        hi *= 2.0;
        if (hi > 1e300)
            throw std::runtime_error("waterfill: bisection bracket overflow");
    }
    double lo = 0.0;
    int iters = 0;
    double lambda = hi;
    for (; iters < 400; ++iters) {
        lambda = 0.5 * (lo + hi);
        const double used = fill(lambda, tmp);
        if (std::fabs(used - budget) <= rel_tol * budget)
            break;
        (used > budget ? lo : hi) = lambda;
        if (hi - lo <= 1e-16 * hi)
            break;
    }
    fill(lambda, res.p);
    res.lambda = lambda;
    res.bisection_iters = iters;
    return res;
}

} // namespace mmee
