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
#include <array>
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

struct TfInitResult {
    bool feasible = false;
    Eigen::MatrixXd p_inverse;         // inverse-power start point
    std::array<double, 2> theta{2.0, 2.0};
    double lp_value = 0.0;             // minimized surrogate power
};

// Initialization for the time-fraction pipeline: fix theta, solve a linear
// program in direct powers under the theta-inflated QoS constraints and the
// per-cell budget, then invert elementwise to obtain the inverse-power
// start. Direct powers are capped at 3 P_max / ||f||^2, the image of the
// per-beam power limit, and clamped away from zero before inversion.
inline TfInitResult tf_init(const PrecoderSet& set, const NetworkConfig& config,
                            std::array<double, 2> theta0 = {2.0, 2.0})
{
    if (!set.tf())
        throw std::invalid_argument("tf_init: time-fraction modes only");
    if (!(theta0[0] > 0.0) || !(theta0[1] > 0.0) || 1.0 / theta0[0] + 1.0 / theta0[1] > 1.0 + 1e-12)
        throw std::invalid_argument("tf_init: theta0 admits no time fractions");

    const int cells = set.cells, users = set.users_per_cell;
    const int n = cells * users;
    const double pmax = config.bs_power_budget_w;
    const double sigma2 = set.sigma2;
    const double rbar = config.qos_nats();

    if (!std::isfinite(std::expm1(std::max(theta0[0], theta0[1]) * rbar))) {
        TfInitResult out;
        out.theta = theta0;
        return out; // threshold out of reach at any finite power
    }

    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(n);
    lp.lower = Eigen::VectorXd::Zero(n);
    lp.upper = Eigen::VectorXd(n);
    lp.A = Eigen::MatrixXd::Zero(cells + n, n);
    lp.b = Eigen::VectorXd::Zero(cells + n);

    for (int i = 0; i < cells; ++i) {
        for (int q = 0; q < 2; ++q) {
            const BeamGroup& grp = set.groups[i][q];
            const double weight = q == 0 ? 1.0 - 1.0 / theta0[1] : 1.0;
            for (int a = 0; a < grp.size(); ++a) {
                const int idx = i * users + grp.users[a];
                lp.c(idx) += weight * grp.norm_sq(a);
                lp.A(i, idx) += weight * grp.norm_sq(a) / pmax;
                lp.upper(idx) = 3.0 * pmax / grp.norm_sq(a);
            }
        }
        lp.b(i) = 1.0;
    }
    int row = cells;
    for (int i = 0; i < cells; ++i) {
        for (int q = 0; q < 2; ++q) {
            const BeamGroup& grp = set.groups[i][q];
            const double gamma = std::expm1(theta0[q] * rbar);
            for (int a = 0; a < grp.size(); ++a) {
                const int idx = i * users + grp.users[a];
                lp.A(row, idx) -= set.alpha(i, grp.users[a]);
                for (int b = 0; b < grp.size(); ++b)
                    if (b != a)
                        lp.A(row, i * users + grp.users[b]) += gamma * grp.iui(a, b);
                lp.b(row) = -gamma * sigma2;
                ++row;
            }
        }
    }

    const SolveReport rep = solve_lp(lp);
    TfInitResult out;
    out.theta = theta0;
    if (rep.status != SolveStatus::Optimal)
        return out;
    out.lp_value = rep.objective;
    out.feasible = true;
    out.p_inverse = Eigen::MatrixXd(cells, users);
    for (int i = 0; i < cells; ++i) {
        for (int k = 0; k < users; ++k) {
            const double norm = set.norm_sq(i, k);
            const double direct = std::max(rep.x(i * users + k), 1e-8 * pmax / norm);
            out.p_inverse(i, k) = std::max(1.0 / direct, norm / (3.0 * pmax));
        }
    }
    return out;
}

struct TfEeOptions {
    double rel_tol = 1e-4;
    int max_iters = 100;
    SolveOptions inner{600, 1e-10, 20.0};
};

// Initialization ladder: the symmetric split first, then increasingly
// asymmetric fraction guesses. At high load the initialization LP is often
// feasible only when the busier group is granted most of the slot; the
// optimizer re-balances the fractions afterwards.
inline const std::array<std::array<double, 2>, 7>& tf_theta_ladder()
{
    static const std::array<std::array<double, 2>, 7> ladder{{{2.0, 2.0},
                                                              {1.5, 3.0},
                                                              {3.0, 1.5},
                                                              {1.25, 5.0},
                                                              {5.0, 1.25},
                                                              {1.1112, 10.0},
                                                              {10.0, 1.1112}}};
    return ladder;
}

namespace detail {

// Phi(theta, p) / Pi(theta2, p): the reformulated EE objective in
// nats/Joule/Hz.
inline double tf_objective(const PrecoderSet& set, const NetworkConfig& config, const std::array<double, 2>& theta,
                           const Eigen::MatrixXd& pinv)
{
    double phi = 0.0, power = 0.0;
    for (int i = 0; i < set.cells; ++i) {
        double chi1 = group_power(set, i, 0, pinv);
        double chi2 = group_power(set, i, 1, pinv);
        power += (1.0 - 1.0 / theta[1]) * chi1 + chi2 / theta[1];
        for (int q = 0; q < 2; ++q)
            for (int user : set.groups[i][q].users)
                phi += tf_rate(set, pinv, i, user) / theta[q];
    }
    const double pi = config.amp_drain_reciprocal * power + set.cells * config.circuit_power_w();
    return phi / pi;
}

} // namespace detail

// Path-following energy-efficiency maximization for the time-fraction
// scheme: joint optimization of the two time fractions (through their
// inverses) and the inverse powers, under per-beam power limits, the
// fraction-weighted budget and per-user QoS within each fraction.
inline EEReport optimize_ee_tf(const PrecoderSet& set, const NetworkConfig& config, const TfEeOptions& opts = {})
{
    if (!set.tf())
        throw std::invalid_argument("optimize_ee_tf: time-fraction modes only");
    const int cells = set.cells, users = set.users_per_cell;
    const int n = 2 + cells * users;
    const double pmax = config.bs_power_budget_w;
    const double sigma2 = set.sigma2;
    const double rbar = config.qos_nats();
    const double amp = config.amp_drain_reciprocal;

    EEReport report;
    report.tf_mode = true;

    TfInitResult init;
    for (const auto& theta0 : tf_theta_ladder()) {
        init = tf_init(set, config, theta0);
        if (init.feasible)
            break;
    }
    if (!init.feasible) {
        report.status = RunStatus::Infeasible;
        return report;
    }

    std::array<double, 2> theta = init.theta;
    Eigen::MatrixXd p = init.p_inverse;
    double t = detail::tf_objective(set, config, theta, p);
    report.ee_trace.push_back(t);

    auto idx_of = [users](int i, int k) { return 2 + i * users + k; };

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

        sub.lower(0) = sub.lower(1) = 1.0;
        sub.upper(0) = sub.upper(1) = 1e4; // fractions below 1e-4 are meaningless
        sub.start(0) = theta[0];
        sub.start(1) = theta[1];
        sub.scale(0) = theta[0];
        sub.scale(1) = theta[1];

        for (int i = 0; i < cells; ++i) {
            for (int k = 0; k < users; ++k) {
                const int idx = idx_of(i, k);
                sub.start(idx) = p(i, k);
                sub.scale(idx) = p(i, k);
                sub.lower(idx) = set.norm_sq(i, k) / (3.0 * pmax);
            }
        }

        // objective minorant and QoS rows
        for (int i = 0; i < cells; ++i) {
            for (int q = 0; q < 2; ++q) {
                const BeamGroup& grp = set.groups[i][q];
                for (int a = 0; a < grp.size(); ++a) {
                    const int k = grp.users[a];
                    const int idx = idx_of(i, k);
                    const double alpha = grp.alpha(a);
                    const double xb = p(i, k) / alpha;
                    const double yb = tf_interference(set, p, i, k) + sigma2;

                    const MinorantCoeffs mo = bound_ln_inv_xy_over_t(xb, yb, theta[q]);
                    sub.c(idx) -= mo.b / alpha;
                    sub.c(q) -= mo.d;
                    sub.c0 += mo.a - mo.c * sigma2;
                    for (int b = 0; b < grp.size(); ++b)
                        if (b != a && grp.iui(a, b) != 0.0)
                            sub.obj_recip.push_back({mo.c * grp.iui(a, b), idx_of(i, grp.users[b]), -1});

                    const MinorantCoeffs mq = bound_ln_inv_xy(xb, yb);
                    ConvexRow qos;
                    qos.a = Eigen::VectorXd::Zero(n);
                    qos.a(idx) += mq.b / alpha;
                    qos.a(q) += rbar;
                    qos.constant = mq.c * sigma2 - mq.a;
                    for (int b = 0; b < grp.size(); ++b)
                        if (b != a && grp.iui(a, b) != 0.0)
                            qos.recip.push_back({mq.c * grp.iui(a, b), idx_of(i, grp.users[b]), -1});
                    sub.rows.push_back(std::move(qos));
                }
            }
        }

        // power majorant rows and the -t*amp*Pi^(n) objective part
        for (int i = 0; i < cells; ++i) {
            ConvexRow pw;
            pw.a = Eigen::VectorXd::Zero(n);
            pw.constant = -pmax;
            const BeamGroup& g1 = set.groups[i][0];
            for (int a = 0; a < g1.size(); ++a) {
                const int idx = idx_of(i, g1.users[a]);
                const double norm = g1.norm_sq(a);
                const double pb = p(i, g1.users[a]);
                pw.recip.push_back({norm, idx, -1});
                pw.a(idx) += norm / (pb * pb * theta[1]);
                pw.a(1) += norm / (pb * theta[1] * theta[1]);
                pw.constant -= 3.0 * norm / (pb * theta[1]);
            }
            const BeamGroup& g2 = set.groups[i][1];
            for (int a = 0; a < g2.size(); ++a)
                pw.recip.push_back({g2.norm_sq(a), idx_of(i, g2.users[a]), 1});

            // same expression, scaled by t*amp, subtracted from the objective
            for (const auto& term : pw.recip)
                sub.obj_recip.push_back({t * amp * term.weight, term.i, term.j});
            sub.c -= t * amp * pw.a;
            sub.c0 -= t * amp * (pw.constant + pmax) + t * config.circuit_power_w();

            sub.rows.push_back(std::move(pw));
        }

        // existence of time fractions: 1/theta1 + 1/theta2 <= 1
        {
            ConvexRow tr;
            tr.a = Eigen::VectorXd::Zero(n);
            tr.constant = -1.0;
            tr.recip.push_back({1.0, 0, -1});
            tr.recip.push_back({1.0, 1, -1});
            sub.rows.push_back(std::move(tr));
        }
        // the anchor lies on the surrogate boundaries by tangency (and on the
        // fraction constraint when theta = (2,2)); nudge the rows so it is
        // strictly feasible and the solver can start from it
        for (auto& row : sub.rows)
            relax_row_for_anchor(row, sub.start);

        const SolveReport rep = solve_convex(sub, Sense::Maximize, opts.inner);
        if (rep.x.size() != n || !rep.x.allFinite())
            break;

        std::array<double, 2> theta_new{rep.x(0), rep.x(1)};
        Eigen::MatrixXd cand(cells, users);
        for (int i = 0; i < cells; ++i)
            for (int k = 0; k < users; ++k)
                cand(i, k) = rep.x(idx_of(i, k));

        const double t_new = detail::tf_objective(set, config, theta_new, cand);
        if (!(t_new >= t))
            break;
        theta = theta_new;
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
        report.status = RunStatus::Converged;

    std::array<double, 2> tau{1.0 / theta[0], 1.0 / theta[1]};
    if (tau[0] + tau[1] > 1.0) {
        const double s = tau[0] + tau[1];
        tau[0] /= s;
        tau[1] /= s;
    }

    report.iterations = iter;
    report.powers = p;
    report.tau = tau;
    report.rates_bps = Eigen::MatrixXd(cells, users);
    report.tx_power_w = Eigen::VectorXd(cells);
    for (int i = 0; i < cells; ++i) {
        double tx = 0.0;
        for (int q = 0; q < 2; ++q) {
            tx += tau[q] * group_power(set, i, q, p);
            for (int user : set.groups[i][q].users)
                report.rates_bps(i, user) = tau[q] * tf_rate(set, p, i, user) / ln2;
        }
        report.tx_power_w(i) = tx;
    }
    report.ee_bits_per_joule_hz = evaluate_ee(set, config, p, &tau);

    if (report.status == RunStatus::Converged) {
        for (int i = 0; i < cells; ++i)
            for (int q = 0; q < 2; ++q)
                for (int user : set.groups[i][q].users)
                    if (tau[q] * tf_rate(set, p, i, user) < rbar * (1.0 - 1e-6))
                        report.status = RunStatus::Infeasible;
    }
    return report;
}

} // namespace mmee
