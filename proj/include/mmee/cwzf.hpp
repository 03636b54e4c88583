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
#include <vector>

#include "mmee/config.hpp"
#include "mmee/precoding.hpp"
#include "mmee/rates.hpp"
#include "mmee/report.hpp"
#include "mmee/waterfill.hpp"

namespace mmee {

struct CwzfCellResult {
    bool feasible = false;
    Eigen::VectorXd p;            // final direct powers (floor + shift)
    std::vector<double> t_trace;  // Dinkelbach parameter per iteration
    std::vector<double> f_trace;  // subproblem optimal value per iteration
    int iterations = 0;
};

// Path-following Dinkelbach procedure for one cell. The QoS floor
// p_bar = sigma2 (e^rhat - 1)/beta is peeled off; the shifted problem is
// solved in closed form by water-filling for each t, and t is reset to the
// achieved ratio until the subproblem optimum reaches zero.
inline CwzfCellResult cwzf_cell_dinkelbach(const Eigen::VectorXd& norm_sq, const Eigen::VectorXd& beta,
                                           double sigma2, double rhat_nats, double p_max, double alpha_amp,
                                           double circuit_w, double tol = 1e-6, int max_iters = 100)
{
    const Eigen::Index k = beta.size();
    CwzfCellResult res;

    Eigen::VectorXd p_floor(k), a(k);
    double floor_power = 0.0;
    for (Eigen::Index v = 0; v < k; ++v) {
        p_floor(v) = sigma2 * std::expm1(rhat_nats) / beta(v);
        a(v) = 1.0 + beta(v) * p_floor(v) / sigma2;
        floor_power += norm_sq(v) * p_floor(v);
    }
    if (floor_power > p_max)
        return res; // the QoS floor alone exceeds the budget

    const double budget = p_max - floor_power;
    const double base_circuit = alpha_amp * floor_power + circuit_w;

    auto phi = [&](const Eigen::VectorXd& pt) {
        double v = 0.0;
        for (Eigen::Index u = 0; u < k; ++u)
            v += std::log(a(u) + beta(u) * pt(u) / sigma2);
        return v;
    };
    auto pi = [&](const Eigen::VectorXd& pt) {
        return alpha_amp * norm_sq.dot(pt) + base_circuit;
    };

    Eigen::VectorXd pt = Eigen::VectorXd::Zero(k);
    double t;
    if (budget > 1e-14 * p_max) {
        pt = waterfill(0.0, a, beta, norm_sq, budget, alpha_amp, sigma2).p;
        t = phi(pt) / pi(pt);
        int iter = 0;
        for (; iter < max_iters; ++iter) {
            pt = waterfill(t, a, beta, norm_sq, budget, alpha_amp, sigma2).p;
            const double f = phi(pt) - t * pi(pt);
            res.t_trace.push_back(t);
            res.f_trace.push_back(f);
            if (std::fabs(f) <= tol * pi(pt))
                break;
            t = phi(pt) / pi(pt);
        }
        res.iterations = iter + 1;
    } else {
        // floors consume the whole budget; nothing left to allocate
        t = phi(pt) / pi(pt);
        res.t_trace.push_back(t);
        res.f_trace.push_back(0.0);
        res.iterations = 1;
    }

    res.feasible = true;
    res.p = p_floor + pt;
    return res;
}

struct CwzfOptions {
    double fixed_point_tol = 1e-6;
    int max_iters = 100;
};

// Cell-wide ZF energy efficiency: every cell optimizes independently under
// the inflated threshold rhat (intercell interference is ignored inside the
// optimization and compensated by rhat > rbar). The returned report holds
// the real multi-cell performance of the resulting powers; the trace is the
// sum of the per-cell Dinkelbach parameters, padded with final values.
inline EEReport optimize_ee_cwzf(const PrecoderSet& set, const NetworkConfig& config, const CwzfOptions& opts = {})
{
    if (set.mode != BeamMode::Zf)
        throw std::invalid_argument("optimize_ee_cwzf: requires a full-set ZF precoder");
    const int cells = set.cells, users = set.users_per_cell;

    EEReport report;
    report.tf_mode = false;

    std::vector<CwzfCellResult> per_cell(cells);
    for (int i = 0; i < cells; ++i) {
        const BeamGroup& grp = set.groups[i][0];
        Eigen::VectorXd beta(users), norms(users);
        for (int b = 0; b < grp.size(); ++b) {
            beta(grp.users[b]) = grp.alpha(b); // ZF: alpha is beta_iik
            norms(grp.users[b]) = grp.norm_sq(b);
        }
        per_cell[i] = cwzf_cell_dinkelbach(norms, beta, set.sigma2, config.cwzf_qos_nats(),
                                           config.bs_power_budget_w, config.amp_drain_reciprocal,
                                           config.circuit_power_w(), opts.fixed_point_tol, opts.max_iters);
        if (!per_cell[i].feasible) {
            report.status = RunStatus::Infeasible;
            return report;
        }
    }

    size_t longest = 0;
    for (const auto& c : per_cell)
        longest = std::max(longest, c.t_trace.size());
    for (size_t nIt = 0; nIt < longest; ++nIt) {
        double sum = 0.0;
        for (const auto& c : per_cell)
            sum += nIt < c.t_trace.size() ? c.t_trace[nIt] : c.t_trace.back();
        report.ee_trace.push_back(sum);
    }

    report.powers = Eigen::MatrixXd(cells, users);
    int iters = 0;
    for (int i = 0; i < cells; ++i) {
        report.powers.row(i) = per_cell[i].p.transpose();
        iters = std::max(iters, per_cell[i].iterations);
    }
    report.iterations = iters;

    // real performance under the full multi-cell model, checked against the
    // original thresholds
    report.status = RunStatus::Converged;
    report.rates_bps = Eigen::MatrixXd(cells, users);
    const double rbar = config.qos_nats();
    for (int i = 0; i < cells; ++i) {
        for (int k = 0; k < users; ++k) {
            const double r = rate(set, report.powers, i, k);
            report.rates_bps(i, k) = r / ln2;
            if (r < rbar * (1.0 - 1e-6))
                report.status = RunStatus::Infeasible;
        }
    }
    report.tx_power_w = transmit_power(set, report.powers);
    report.ee_bits_per_joule_hz = evaluate_ee(set, config, report.powers);
    return report;
}

} // namespace mmee
