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
#include <limits>
#include <stdexcept>
#include <vector>

#include "mmee/solver_types.hpp"

namespace mmee {

// weight / x_i, or weight / (x_i * x_j) when j >= 0. Weights are
// nonnegative; the term is convex on the positive orthant.
struct ReciprocalTerm {
    double weight = 0.0;
    int i = -1;
    int j = -1;
};

// weight * ln(offset + scale * x_i), weight >= 0; concave.
struct LogTerm {
    double weight = 0.0;
    double offset = 0.0;
    double scale = 1.0;
    int i = -1;
};

// a.x + sum of reciprocal terms + constant <= 0.
struct ConvexRow {
    Eigen::VectorXd a;
    double constant = 0.0;
    std::vector<ReciprocalTerm> recip;
};

// Loosens a row by a small fraction of its magnitude at the given point.
// Successive-approximation subproblems anchor exactly on their surrogate
// boundaries (tangency); the nudge makes the anchor strictly feasible so the
// barrier solver can start from it directly.
struct ConvexRow;
inline void relax_row_for_anchor(ConvexRow& row, const Eigen::VectorXd& anchor, double rel = 1e-9);

// Separable convex program over box-bounded variables:
//
//   minimize   c.x + c0 + sum w/(x_i [x_j]) - sum w ln(off + sc x_i)
//   (maximize  c.x + c0 - sum w/(x_i [x_j]) + sum w ln(off + sc x_i))
//   subject to a.x + sum w/(x_i [x_j]) + const <= 0   per row,
//              lower <= x <= upper.
//
// Reciprocal weights always act in the convex direction and log weights in
// the concave direction, so the problem stays convex under either sense.
// Every variable appearing in a reciprocal denominator needs a strictly
// positive lower bound.
struct SeparableConvexProblem {
    int n = 0;
    Eigen::VectorXd c;
    double c0 = 0.0;
    std::vector<ReciprocalTerm> obj_recip;
    std::vector<LogTerm> obj_log;
    std::vector<ConvexRow> rows;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    Eigen::VectorXd start; // optional warm start (empty = box interior)
    Eigen::VectorXd scale; // optional per-variable magnitudes (empty = auto)
};

struct SolveOptions {
    int max_newton = 200;   // total Newton-step budget, phase 1 included
    double gap_rel = 1e-10; // relative duality-gap target
    double mu = 20.0;       // barrier growth factor
};

inline void relax_row_for_anchor(ConvexRow& row, const Eigen::VectorXd& anchor, double rel)
{
    double mag = std::fabs(row.constant);
    for (Eigen::Index v = 0; v < row.a.size(); ++v)
        mag += std::fabs(row.a(v) * anchor(v));
    for (const auto& t : row.recip)
        mag += t.j < 0 ? t.weight / anchor(t.i) : t.weight / (anchor(t.i) * anchor(t.j));
    row.constant -= rel * mag;
}

namespace detail {

constexpr double inf = std::numeric_limits<double>::infinity();

struct CanonRow {
    Eigen::VectorXd a;
    double k = 0.0;
    std::vector<ReciprocalTerm> recip;
};

// Problem after variable scaling and row equilibration, always a
// minimization.
struct Canon {
    int n = 0;
    Eigen::VectorXd c;
    double c0 = 0.0;
    std::vector<ReciprocalTerm> recip;
    std::vector<LogTerm> logs;
    std::vector<CanonRow> rows;
    Eigen::VectorXd lb, ub;
};

inline double recip_value(const std::vector<ReciprocalTerm>& terms, const Eigen::VectorXd& y)
{
    double v = 0.0;
    for (const auto& t : terms)
        v += t.j < 0 ? t.weight / y(t.i) : t.weight / (y(t.i) * y(t.j));
    return v;
}

inline void recip_grad(const std::vector<ReciprocalTerm>& terms, const Eigen::VectorXd& y, Eigen::VectorXd& g)
{
    for (const auto& t : terms) {
        if (t.j < 0) {
            g(t.i) -= t.weight / (y(t.i) * y(t.i));
        } else {
            const double yi = y(t.i), yj = y(t.j);
            g(t.i) -= t.weight / (yi * yi * yj);
            g(t.j) -= t.weight / (yi * yj * yj);
        }
    }
}

inline void recip_hess(const std::vector<ReciprocalTerm>& terms, const Eigen::VectorXd& y, double coeff,
                       Eigen::MatrixXd& h)
{
    for (const auto& t : terms) {
        if (t.j < 0) {
            const double yi = y(t.i);
            h(t.i, t.i) += coeff * 2.0 * t.weight / (yi * yi * yi);
        } else {
            const double yi = y(t.i), yj = y(t.j);
            h(t.i, t.i) += coeff * 2.0 * t.weight / (yi * yi * yi * yj);
            h(t.j, t.j) += coeff * 2.0 * t.weight / (yi * yj * yj * yj);
            const double cross = coeff * t.weight / (yi * yi * yj * yj);
            h(t.i, t.j) += cross;
            h(t.j, t.i) += cross;
        }
    }
}

inline double row_value(const CanonRow& r, const Eigen::VectorXd& y)
{
    return r.a.dot(y) + r.k + recip_value(r.recip, y);
}

inline double obj_value(const Canon& P, const Eigen::VectorXd& y)
{
    double v = P.c.dot(y) + P.c0 + recip_value(P.recip, y);
    for (const auto& l : P.logs)
        v -= l.weight * std::log(l.offset + l.scale * y(l.i));
    return v;
}

inline void obj_grad(const Canon& P, const Eigen::VectorXd& y, Eigen::VectorXd& g)
{
    g = P.c;
    recip_grad(P.recip, y, g);
    for (const auto& l : P.logs)
        g(l.i) -= l.weight * l.scale / (l.offset + l.scale * y(l.i));
}

inline void obj_hess(const Canon& P, const Eigen::VectorXd& y, double coeff, Eigen::MatrixXd& h)
{
    recip_hess(P.recip, y, coeff, h);
    for (const auto& l : P.logs) {
        const double den = l.offset + l.scale * y(l.i);
        h(l.i, l.i) += coeff * l.weight * l.scale * l.scale / (den * den);
    }
}

// True when y is inside the boxes, every row is strictly negative by at
// least `margin`, and all log arguments are positive.
inline bool strictly_feasible(const Canon& P, const Eigen::VectorXd& y, double margin)
{
    for (int v = 0; v < P.n; ++v)
        if (y(v) <= P.lb(v) || y(v) >= P.ub(v))
            return false;
    for (const auto& l : P.logs)
        if (l.offset + l.scale * y(l.i) <= 0.0)
            return false;
    for (const auto& r : P.rows)
        if (row_value(r, y) >= -margin)
            return false;
    return true;
}

struct BarrierOutcome {
    Eigen::VectorXd y;
    int steps = 0;
    bool early = false;     // early-exit trigger fired
    bool converged = false; // gap target reached
    double kkt = inf;
};

// Log-barrier path following with damped Newton centering. If early_var is
// set, returns as soon as y(early_var) drops below early_value (used by the
// feasibility phase).
inline BarrierOutcome barrier_minimize(const Canon& P, Eigen::VectorXd y, int budget, const SolveOptions& opt,
                                       int early_var = -1, double early_value = 0.0)
{
    const int n = P.n;
    int m_total = static_cast<int>(P.rows.size());
    for (int v = 0; v < n; ++v) {
        if (std::isfinite(P.lb(v)))
            ++m_total;
        if (std::isfinite(P.ub(v)))
            ++m_total;
    }

    BarrierOutcome out;
    out.y = y;

    auto psi = [&](const Eigen::VectorXd& p, double t) -> double {
        for (int v = 0; v < n; ++v) {
            if (std::isfinite(P.lb(v)) && p(v) <= P.lb(v))
                return inf;
            if (std::isfinite(P.ub(v)) && p(v) >= P.ub(v))
                return inf;
        }
        for (const auto& l : P.logs)
            if (l.offset + l.scale * p(l.i) <= 0.0)
                return inf;
        double val = t * obj_value(P, p);
        for (const auto& r : P.rows) {
            const double f = row_value(r, p);
            if (f >= 0.0)
                return inf;
            val -= std::log(-f);
        }
        for (int v = 0; v < n; ++v) {
            if (std::isfinite(P.lb(v)))
                val -= std::log(p(v) - P.lb(v));
            if (std::isfinite(P.ub(v)))
                val -= std::log(P.ub(v) - p(v));
        }
        return val;
    };

    double t = m_total > 0 ? m_total / std::max(1e-6, 1.0 + std::fabs(obj_value(P, y))) : 1.0;

    Eigen::VectorXd g(n), og(n), rg(n), dy(n);
    Eigen::MatrixXd H(n, n);

    int steps = 0;
    while (true) {
        // center at the current t
        double prev_dec = inf;
        for (int inner = 0; inner < 60; ++inner) {
            if (steps >= budget) {
                out.y = y;
                out.steps = steps;
                return out;
            }
            obj_grad(P, y, og);
            g = t * og;
            H.setZero();
            obj_hess(P, y, t, H);
            for (const auto& r : P.rows) {
                const double f = row_value(r, y);
                rg = r.a;
                recip_grad(r.recip, y, rg);
                g += rg / (-f);
                H.selfadjointView<Eigen::Lower>().rankUpdate(rg, 1.0 / (f * f));
                recip_hess(r.recip, y, 1.0 / (-f), H);
            }
            for (int v = 0; v < n; ++v) {
                if (std::isfinite(P.lb(v))) {
                    const double d = y(v) - P.lb(v);
                    g(v) -= 1.0 / d;
                    H(v, v) += 1.0 / (d * d);
                }
                if (std::isfinite(P.ub(v))) {
                    const double d = P.ub(v) - y(v);
                    g(v) += 1.0 / d;
                    H(v, v) += 1.0 / (d * d);
                }
            }
            H.triangularView<Eigen::StrictlyUpper>() = H.transpose().triangularView<Eigen::StrictlyUpper>();

            Eigen::LDLT<Eigen::MatrixXd> ldlt;
            double ridge = 0.0;
            for (int attempt = 0; attempt < 12; ++attempt) {
                ldlt.compute(ridge == 0.0 ? H : Eigen::MatrixXd(H + ridge * Eigen::MatrixXd::Identity(n, n)));
                if (ldlt.info() == Eigen::Success) {
                    dy = ldlt.solve(-g);
                    if (dy.allFinite())
                        break;
                }
                ridge = ridge == 0.0 ? 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff()) : ridge * 100.0;
                dy.setZero();
            }
            ++steps;

            const double decrement2 = -g.dot(dy);
            if (!(decrement2 > 1e-18))
                break; // centered to the numeric floor
            if (decrement2 < 1e-8 && decrement2 > 0.25 * prev_dec)
                break; // no longer gaining precision
            prev_dec = decrement2;

            // step length: stay inside boxes and log domains, then backtrack
            // until the rows stay strictly negative and Armijo holds
            double alpha = 1.0;
            for (int v = 0; v < n; ++v) {
                if (dy(v) < 0.0 && std::isfinite(P.lb(v)))
                    alpha = std::min(alpha, 0.995 * (P.lb(v) - y(v)) / dy(v));
                else if (dy(v) > 0.0 && std::isfinite(P.ub(v)))
                    alpha = std::min(alpha, 0.995 * (P.ub(v) - y(v)) / dy(v));
            }
            for (const auto& l : P.logs) {
                const double dirv = l.scale * dy(l.i);
                if (dirv < 0.0)
                    alpha = std::min(alpha, -0.995 * (l.offset + l.scale * y(l.i)) / dirv);
            }
            // Armijo backtracking only while far from the center; inside the
            // quadratic zone psi differences drown in rounding, so a guarded
            // full step is taken instead.
            const bool damped_phase = decrement2 > 1e-4;
            const double psi0 = damped_phase ? psi(y, t) : 0.0;
            double trial = inf;
            for (int bt = 0; bt < 80 && alpha > 1e-18; ++bt) {
                trial = psi(y + alpha * dy, t);
                if (damped_phase ? trial <= psi0 - 0.01 * alpha * decrement2 : trial < inf)
                    break;
                alpha *= 0.5;
            }
            if (!(trial < inf) || alpha <= 1e-16)
                break;
            y += alpha * dy;

            if (early_var >= 0 && y(early_var) < early_value) {
                out.y = y;
                out.steps = steps;
                out.early = true;
                return out;
            }
        }

        const double fval = obj_value(P, y);
        if (m_total == 0 || m_total / t <= opt.gap_rel * (1.0 + std::fabs(fval))) {
            // Stationarity residual with least-squares multipliers over the
            // numerically active set. Barrier duals 1/(t * slack) identify
            // the actives; fitting the multipliers afresh keeps the measure
            // independent of how far t was pushed.
            obj_grad(P, y, og);
            const double gnorm = 1.0 + og.cwiseAbs().maxCoeff();
            std::vector<Eigen::VectorXd> act;
            for (const auto& r : P.rows) {
                const double f = row_value(r, y);
                if (1.0 / (t * (-f)) > 1e-8 * gnorm) {
                    rg = r.a;
                    recip_grad(r.recip, y, rg);
                    act.push_back(rg);
                }
            }
            for (int v = 0; v < n; ++v) {
                if (std::isfinite(P.lb(v)) && 1.0 / (t * (y(v) - P.lb(v))) > 1e-8 * gnorm) {
                    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
                    e(v) = -1.0;
                    act.push_back(std::move(e));
                }
                if (std::isfinite(P.ub(v)) && 1.0 / (t * (P.ub(v) - y(v))) > 1e-8 * gnorm) {
                    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
                    e(v) = 1.0;
                    act.push_back(std::move(e));
                }
            }
            Eigen::VectorXd resid = og;
            for (int pass = 0; pass < 2 && !act.empty(); ++pass) {
                Eigen::MatrixXd m(n, act.size());
                for (size_t c = 0; c < act.size(); ++c)
                    m.col(c) = act[c];
                Eigen::VectorXd lambda = m.colPivHouseholderQr().solve(-og);
                // negative multipliers mark constraints that are not truly
                // active; drop them and refit once
                std::vector<Eigen::VectorXd> keep;
                for (size_t c = 0; c < act.size(); ++c)
                    if (lambda(c) > 0.0)
                        keep.push_back(act[c]);
                if (keep.size() == act.size() || pass == 1) {
                    lambda = lambda.cwiseMax(0.0);
                    resid = og + m * lambda;
                    break;
                }
                act = std::move(keep);
                resid = og;
                if (act.empty())
                    break;
                Eigen::MatrixXd m2(n, act.size());
                for (size_t c = 0; c < act.size(); ++c)
                    m2.col(c) = act[c];
                Eigen::VectorXd l2 = m2.colPivHouseholderQr().solve(-og).cwiseMax(0.0);
                resid = og + m2 * l2;
            }
            const double gap = m_total > 0 ? m_total / t : 0.0;
            out.kkt = std::max(resid.cwiseAbs().maxCoeff() / gnorm, gap / (1.0 + std::fabs(fval)));
            out.converged = true;
            out.y = y;
            out.steps = steps;
            return out;
        }
        t *= opt.mu;
    }
}

} // namespace detail

// Barrier interior-point solve of a SeparableConvexProblem. Infeasible-start
// phase 1 finds a strictly feasible point first; status Infeasible carries
// the phase-1 optimum as the diagnostic.
inline SolveReport solve_convex(const SeparableConvexProblem& prob, Sense sense = Sense::Minimize,
                                const SolveOptions& opt = {})
{
    using detail::inf;
    const int n = prob.n;
    if (prob.c.size() != n || prob.lower.size() != n || prob.upper.size() != n)
        throw std::invalid_argument("solve_convex: inconsistent sizes");

    std::vector<char> in_recip(n, 0);
    auto mark = [&](const std::vector<ReciprocalTerm>& ts) {
        for (const auto& t : ts) {
            if (t.i < 0 || t.i >= n || t.j >= n)
                throw std::invalid_argument("solve_convex: reciprocal term index out of range");
            if (t.weight < 0.0)
                throw std::invalid_argument("solve_convex: reciprocal weights must be nonnegative");
            in_recip[t.i] = 1;
            if (t.j >= 0)
                in_recip[t.j] = 1;
        }
    };
    mark(prob.obj_recip);
    for (const auto& r : prob.rows) {
        if (r.a.size() != n)
            throw std::invalid_argument("solve_convex: row has wrong size");
        mark(r.recip);
    }
    for (const auto& l : prob.obj_log)
        if (l.i < 0 || l.i >= n || l.weight < 0.0)
            throw std::invalid_argument("solve_convex: bad log term");
    for (int v = 0; v < n; ++v)
        if (in_recip[v] && !(prob.lower(v) > 0.0))
            throw std::invalid_argument("solve_convex: reciprocal variables need positive lower bounds");

    const double dir = sense == Sense::Maximize ? -1.0 : 1.0;

    // variable scaling
    Eigen::VectorXd s(n);
    for (int v = 0; v < n; ++v) {
        double sv = 0.0;
        if (prob.scale.size() == n)
            sv = std::fabs(prob.scale(v));
        if (sv <= 0.0 && prob.start.size() == n)
            sv = std::fabs(prob.start(v));
        if (sv <= 0.0)
            sv = std::max(std::fabs(prob.lower(v)), std::isfinite(prob.upper(v)) ? std::fabs(prob.upper(v)) : 0.0);
        s(v) = sv > 0.0 ? sv : 1.0;
    }

    detail::Canon P;
    P.n = n;
    P.c = dir * prob.c.cwiseProduct(s);
    P.c0 = dir * prob.c0;
    P.lb = prob.lower.cwiseQuotient(s);
    P.ub = prob.upper.cwiseQuotient(s);
    auto scale_terms = [&](const std::vector<ReciprocalTerm>& ts) {
        std::vector<ReciprocalTerm> out = ts;
        for (auto& t : out)
            t.weight /= t.j < 0 ? s(t.i) : s(t.i) * s(t.j);
        return out;
    };
    P.recip = scale_terms(prob.obj_recip);
    for (const auto& l : prob.obj_log)
        P.logs.push_back({l.weight, l.offset, l.scale * s(l.i), l.i});

    Eigen::VectorXd y0(n);
    for (int v = 0; v < n; ++v) {
        double yv = prob.start.size() == n ? prob.start(v) / s(v) : 1.0;
        const double lo = P.lb(v), hi = P.ub(v);
        // nudge into the strict interior without displacing a usable start
        if (std::isfinite(lo))
            yv = std::max(yv, lo + 1e-12 + 1e-9 * std::max(std::fabs(lo), std::fabs(yv)));
        if (std::isfinite(hi))
            yv = std::min(yv, hi - 1e-12 - 1e-9 * std::max(std::fabs(hi), std::fabs(yv)));
        if (!std::isfinite(yv) || (std::isfinite(lo) && std::isfinite(hi) && (yv <= lo || yv >= hi)))
            yv = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi) : (std::isfinite(lo) ? lo + 1.0 : 0.0);
        y0(v) = yv;
    }

    for (const auto& r : prob.rows) {
        detail::CanonRow cr;
        cr.a = r.a.cwiseProduct(s);
        cr.k = r.constant;
        cr.recip = scale_terms(r.recip);
        double mag = std::max(std::fabs(cr.k), cr.a.size() ? cr.a.cwiseAbs().maxCoeff() : 0.0);
        mag = std::max(mag, detail::recip_value(cr.recip, y0));
        const double rho = detail::pow2_scale(mag);
        cr.a *= rho;
        cr.k *= rho;
        for (auto& t : cr.recip)
            t.weight *= rho;
        P.rows.push_back(std::move(cr));
    }

    SolveReport rep;
    rep.status = SolveStatus::MaxIter;

    int budget = opt.max_newton;
    int used = 0;

    Eigen::VectorXd y = y0;
    if (!detail::strictly_feasible(P, y, 0.0)) {
        // phase 1: minimize the worst violation
        detail::Canon P1;
        P1.n = n + 1;
        P1.c = Eigen::VectorXd::Zero(n + 1);
        P1.c(n) = 1.0;
        P1.lb = Eigen::VectorXd(n + 1);
        P1.ub = Eigen::VectorXd(n + 1);
        P1.lb.head(n) = P.lb;
        P1.ub.head(n) = P.ub;
        double smax = 0.0;
        for (const auto& r : P.rows) {
            double f = detail::row_value(r, y);
            if (!std::isfinite(f))
                f = 1e6;
            smax = std::max(smax, f);
        }
        const double s0 = smax + 0.1 * (1.0 + std::fabs(smax));
        P1.lb(n) = -2.0 * (1.0 + std::fabs(s0));
        P1.ub(n) = s0 + 2.0;
        for (const auto& r : P.rows) {
            detail::CanonRow cr;
            cr.a = Eigen::VectorXd::Zero(n + 1);
            cr.a.head(n) = r.a;
            cr.a(n) = -1.0;
            cr.k = r.k;
            cr.recip = r.recip;
            P1.rows.push_back(std::move(cr));
        }
        Eigen::VectorXd z(n + 1);
        z.head(n) = y;
        z(n) = s0;
        auto ph1 = detail::barrier_minimize(P1, z, budget, opt, n, -1e-9);
        used += ph1.steps;
        budget -= ph1.steps;
        if (!ph1.early) {
            // thin interior: accept the phase-1 point if it still clears the
            // rows strictly, otherwise report the certificate
            if (!detail::strictly_feasible(P, ph1.y.head(n), 0.0)) {
                rep.iterations = used;
                if (ph1.converged && ph1.y(n) > -1e-12) {
                    rep.status = SolveStatus::Infeasible;
                    rep.infeasibility = ph1.y(n);
                }
                return rep;
            }
        }
        y = ph1.y.head(n);
    }

    auto main = detail::barrier_minimize(P, y, budget, opt);
    used += main.steps;
    y = main.y;

    rep.x = y.cwiseProduct(s);
    rep.iterations = used;

    // objective in the caller's units and sense
    double obj = prob.c.dot(rep.x) + prob.c0;
    for (const auto& t : prob.obj_recip)
        obj += dir * (t.j < 0 ? t.weight / rep.x(t.i) : t.weight / (rep.x(t.i) * rep.x(t.j)));
    for (const auto& l : prob.obj_log)
        obj -= dir * l.weight * std::log(l.offset + l.scale * rep.x(l.i));
    rep.objective = obj;
    rep.kkt_residual = main.kkt;
    rep.status = (main.converged && main.kkt < 1e-7) ? SolveStatus::Optimal : SolveStatus::MaxIter;
    return rep;
}

} // namespace mmee
