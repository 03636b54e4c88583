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

#include "mmee/bounds.hpp"
#include "mmee/config.hpp"
#include "mmee/convex.hpp"
#include "mmee/lp.hpp"
#include "mmee/precoding.hpp"
#include "mmee/rates.hpp"
#include "mmee/report.hpp"

namespace mmee {

struct InitResult {
    bool feasible = false;
    Eigen::MatrixXd p;      // QoS-feasible direct powers
    double lp_value = 0.0;  // min of max_i chi_i/P_max subject to QoS
};

// Feasibility initialization: minimize the worst relative cell load under
// the linearized QoS constraints. Values above 1 certify that the QoS set
// does not fit the power budget.
inline InitResult init_feasible(const PrecoderSet& set, const NetworkConfig& config)
{
    const int cells = set.cells, users = set.users_per_cell;
    const int n = cells * users; // powers, plus the load variable at index n
    const double pmax = config.bs_power_budget_w;

    InitResult out_early;
    if (!std::isfinite(std::expm1(config.qos_nats())))
        return out_early; // no finite power reaches the threshold

    Eigen::MatrixXd thresholds = Eigen::MatrixXd::Constant(cells, users, config.qos_nats());
    const auto qos = qos_linearize(set, thresholds);

    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(n + 1);
    lp.c(n) = 1.0;
    lp.A = Eigen::MatrixXd::Zero(cells + static_cast<Eigen::Index>(qos.size()), n + 1);
    lp.b = Eigen::VectorXd::Zero(lp.A.rows());
    for (int i = 0; i < cells; ++i) {
        const BeamGroup& grp = set.groups[i][0];
        for (int b = 0; b < grp.size(); ++b)
            lp.A(i, i * users + grp.users[b]) = grp.norm_sq(b) / pmax;
        lp.A(i, n) = -1.0;
    }
    for (size_t r = 0; r < qos.size(); ++r) {
        lp.A.row(cells + r).head(n) = qos[r].a;
        lp.b(cells + r) = qos[r].ub;
    }
    lp.lower = Eigen::VectorXd::Zero(n + 1);
    lp.upper = Eigen::VectorXd::Constant(n + 1, std::numeric_limits<double>::infinity());

    const SolveReport rep = solve_lp(lp);
    InitResult out;
    if (rep.status != SolveStatus::Optimal)
        return out;
    out.lp_value = rep.objective;
    if (out.lp_value > 1.0 + 1e-9)
        return out;
    out.feasible = true;
    out.p = Eigen::MatrixXd(cells, users);
    for (int i = 0; i < cells; ++i)
        for (int k = 0; k < users; ++k)
            out.p(i, k) = std::max(0.0, rep.x(i * users + k));

    // A zero QoS threshold makes the LP return zero power, which is a dead
    // anchor for the tangent surrogates; start from a half power share
    // instead (feasible because the QoS set is vacuous).
    if (config.qos_nats() == 0.0 && out.p.maxCoeff() <= 0.0) {
        for (int i = 0; i < cells; ++i)
            for (int k = 0; k < users; ++k)
                out.p(i, k) = 0.5 * pmax / (users * set.norm_sq(i, k));
    }
    return out;
}

struct DirectEeOptions {
    double rel_tol = 1e-4;
    int max_iters = 100;
    SolveOptions inner{600, 1e-10, 20.0};
};

// Path-following energy-efficiency maximization for full-set ZF/RZF
// beamforming with per-user QoS and per-cell budgets. Each step maximizes a
// tangent minorant of the throughput minus t^(n) times the consumed power
// over the linearized constraint set; accepted iterates have nondecreasing
// true objective.
inline EEReport optimize_ee_direct(const PrecoderSet& set, const NetworkConfig& config,
                                   const DirectEeOptions& opts = {})
{
    if (set.tf())
        throw std::invalid_argument("optimize_ee_direct: direct-power modes only");
    const int cells = set.cells, users = set.users_per_cell;
    const int n = cells * users;
    const double pmax = config.bs_power_budget_w;
    const double sigma2 = set.sigma2;
    const double rbar = config.qos_nats();

    EEReport report;
    report.tf_mode = false;

    const InitResult init = init_feasible(set, config);
    if (!init.feasible) {
        report.status = RunStatus::Infeasible;
        return report;
    }

    Eigen::MatrixXd thresholds = Eigen::MatrixXd::Constant(cells, users, rbar);
    const auto qos = qos_linearize(set, thresholds);

    Eigen::MatrixXd p = init.p;
    double t = total_throughput(set, p) / consumed_power(set, config, p);
    report.ee_trace.push_back(t);

    report.status = RunStatus::MaxIter;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        SeparableConvexProblem sub;
        sub.n = n;
        sub.c = Eigen::VectorXd::Zero(n);
        sub.lower = Eigen::VectorXd::Zero(n);
        sub.upper = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
        sub.start = Eigen::VectorXd(n);
        sub.scale = Eigen::VectorXd(n);

        const double qos_gamma = std::expm1(rbar);
        for (int i = 0; i < cells; ++i) {
            for (int k = 0; k < users; ++k) {
                const int idx = i * users + k;
                const double anchor = p(i, k);
                sub.start(idx) = anchor;
                sub.scale(idx) = std::max(anchor, 1e-30);
                const double floor = std::max(0.5 * qos_gamma * sigma2 / set.alpha(i, k), 1e-12 * anchor);
                sub.lower(idx) = floor;

                const double xb = set.alpha(i, k) * anchor;
                const double yb = interference(set, p, i, k) + sigma2;
                const MinorantCoeffs m = bound_ln_x_over_y(xb, yb);

                // - b / (alpha p): reciprocal term in the maximize direction
                sub.obj_recip.push_back({m.b / set.alpha(i, k), idx, -1});

                // - c (lambda_ik(p) + sigma2): spread lambda onto the powers
                const auto [q, a_slot] = set.slot[i][k];
                const BeamGroup& grp = set.groups[i][q];
                for (int b = 0; b < grp.size(); ++b)
                    sub.c(i * users + grp.users[b]) -= m.c * grp.iui(a_slot, b);
                for (int j = 0; j < cells; ++j) {
                    if (j == i)
                        continue;
                    const double beta = set.ici_beta[j](i, k);
                    const BeamGroup& other = set.groups[j][0];
                    for (int b = 0; b < other.size(); ++b)
                        sub.c(j * users + other.users[b]) -= m.c * beta * other.norm_sq(b);
                }
                sub.c0 += m.a - m.c * sigma2;
            }
        }
        // - t * pi(p)
        for (int i = 0; i < cells; ++i) {
            const BeamGroup& grp = set.groups[i][0];
            for (int b = 0; b < grp.size(); ++b)
                sub.c(i * users + grp.users[b]) -= t * config.amp_drain_reciprocal * grp.norm_sq(b);
        }
        sub.c0 -= t * cells * config.circuit_power_w();

        for (int i = 0; i < cells; ++i) {
            ConvexRow budget;
            budget.a = Eigen::VectorXd::Zero(n);
            const BeamGroup& grp = set.groups[i][0];
            for (int b = 0; b < grp.size(); ++b)
                budget.a(i * users + grp.users[b]) = grp.norm_sq(b) / pmax;
            budget.constant = -1.0;
            sub.rows.push_back(std::move(budget));
        }
        for (const auto& row : qos) {
            ConvexRow r;
            r.a = row.a;
            r.constant = -row.ub;
            sub.rows.push_back(std::move(r));
        }
        // the anchor sits on several of these boundaries (initialization LP
        // vertex, active budget); a relative nudge lets the solver warm-start
        // from it without a feasibility phase
        for (auto& row : sub.rows)
            relax_row_for_anchor(row, sub.start);

        const SolveReport rep = solve_convex(sub, Sense::Maximize, opts.inner);
        if (rep.x.size() != n || !rep.x.allFinite())
            break;

        Eigen::MatrixXd cand(cells, users);
        for (int i = 0; i < cells; ++i)
            for (int k = 0; k < users; ++k)
                cand(i, k) = rep.x(i * users + k);

        const double t_new = total_throughput(set, cand) / consumed_power(set, config, cand);
        if (!(t_new >= t)) // inner-solver noise: keep the anchor and stop
            break;
        p = cand;
        report.ee_trace.push_back(t_new);
        const double rel = (t_new - t) / std::max(t, 1e-300);
        t = t_new;
        if (rel < opts.rel_tol) {
            report.status = RunStatus::Converged;
            ++iter;
            break;
        }
    }
    if (report.status == RunStatus::MaxIter && iter < opts.max_iters)
        report.status = RunStatus::Converged; // stopped by the acceptance guard

    report.iterations = iter;
    report.powers = p;
    report.rates_bps = Eigen::MatrixXd(cells, users);
    for (int i = 0; i < cells; ++i)
        for (int k = 0; k < users; ++k)
            report.rates_bps(i, k) = rate(set, p, i, k) / ln2;
    report.tx_power_w = transmit_power(set, p);
    report.ee_bits_per_joule_hz = t / ln2;

    if (report.status == RunStatus::Converged) {
        for (int i = 0; i < cells; ++i)
            for (int k = 0; k < users; ++k)
                if (rate(set, p, i, k) < rbar * (1.0 - 1e-6))
                    report.status = RunStatus::Infeasible;
    }
    return report;
}

} // namespace mmee
