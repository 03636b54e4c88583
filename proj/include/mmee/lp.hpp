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

// min/max c.x subject to A x <= b and lower <= x <= upper. All lower bounds
// must be finite; upper bounds may be +inf.
struct LinearProgram {
    Eigen::VectorXd c;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
};

// Dense two-phase primal simplex. Small problems only (a few hundred rows);
// rows and columns are equilibrated with power-of-two factors, Dantzig
// pricing with a Bland fallback guards against cycling.
inline SolveReport solve_lp(const LinearProgram& lp, Sense sense = Sense::Minimize)
{
    const int n = static_cast<int>(lp.c.size());
    if (lp.A.size() > 0 && lp.A.cols() != n)
        throw std::invalid_argument("solve_lp: A has wrong column count");
    if (lp.A.rows() != lp.b.size())
        throw std::invalid_argument("solve_lp: A and b disagree");
    if (lp.lower.size() != n || lp.upper.size() != n)
        throw std::invalid_argument("solve_lp: bounds have wrong size");
    for (int v = 0; v < n; ++v) {
        if (!std::isfinite(lp.lower(v)))
            throw std::invalid_argument("solve_lp: lower bounds must be finite");
        if (lp.upper(v) < lp.lower(v))
            throw std::invalid_argument("solve_lp: empty box");
    }

    Eigen::VectorXd cost = (sense == Sense::Maximize) ? Eigen::VectorXd(-lp.c) : lp.c;

    // Shift to y = x - lower >= 0 and append finite upper bounds as rows.
    const int m0 = static_cast<int>(lp.A.rows());
    int n_ub = 0;
    for (int v = 0; v < n; ++v)
        if (std::isfinite(lp.upper(v)))
            ++n_ub;
    const int m = m0 + n_ub;

    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd b(m);
    if (m0 > 0) {
        A.topRows(m0) = lp.A;
        b.head(m0) = lp.b - lp.A * lp.lower;
    }
    {
        int r = m0;
        for (int v = 0; v < n; ++v) {
            if (!std::isfinite(lp.upper(v)))
                continue;
            A.row(r).setZero();
            A(r, v) = 1.0;
            b(r) = lp.upper(v) - lp.lower(v);
            ++r;
        }
    }

    // Equilibrate rows then columns.
    Eigen::VectorXd row_scale(m), col_scale(n);
    for (int r = 0; r < m; ++r) {
        row_scale(r) = detail::pow2_scale(A.row(r).cwiseAbs().maxCoeff());
        A.row(r) *= row_scale(r);
        b(r) *= row_scale(r);
    }
    for (int v = 0; v < n; ++v) {
        double mx = m > 0 ? A.col(v).cwiseAbs().maxCoeff() : std::fabs(cost(v));
        col_scale(v) = detail::pow2_scale(mx);
        A.col(v) *= col_scale(v);
    }
    Eigen::VectorXd cs = cost.cwiseProduct(col_scale);
    const double cost_norm = std::max(1.0, cs.cwiseAbs().maxCoeff());

    constexpr double feas_tol = 1e-10;
    constexpr double cost_tol = 1e-10;
    constexpr double pivot_tol = 1e-9;

    // Tableau columns: y (n) | slack (m) | artificial (n_art) | appended at
    // build time. Basis starts as slacks; rows with negative rhs are negated
    // and given an artificial variable.
    std::vector<int> art_rows;
    for (int r = 0; r < m; ++r)
        if (b(r) < 0.0)
            art_rows.push_back(r);
    const int n_art = static_cast<int>(art_rows.size());
    const int ncols = n + m + n_art;

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, ncols);
    Eigen::VectorXd rhs = b;
    std::vector<int> basis(m);
    if (m > 0)
        T.block(0, 0, m, n) = A;
    for (int r = 0; r < m; ++r) {
        T(r, n + r) = 1.0;
        basis[r] = n + r;
    }
    for (int a = 0; a < n_art; ++a) {
        const int r = art_rows[a];
        T.row(r) = -T.row(r);
        rhs(r) = -rhs(r);
        T(r, n + m + a) = 1.0;
        basis[r] = n + m + a;
    }

    SolveReport rep;
    rep.status = SolveStatus::MaxIter;

    const int max_iters = 2000 + 50 * (m + n);
    int iters = 0;

    auto pivot = [&](int r, int col, Eigen::VectorXd& obj, double& objval) {
        const double piv = T(r, col);
        T.row(r) /= piv;
        rhs(r) /= piv;
        for (int rr = 0; rr < m; ++rr) {
            if (rr == r)
                continue;
            const double f = T(rr, col);
            if (f != 0.0) {
                T.row(rr) -= f * T.row(r);
                T(rr, col) = 0.0;
                rhs(rr) -= f * rhs(r);
            }
        }
        const double f = obj(col);
        if (f != 0.0) {
            obj -= f * T.row(r).transpose();
            obj(col) = 0.0;
            objval -= f * rhs(r);
        }
        basis[r] = col;
    };

    // Runs the simplex on the given reduced-cost row. allowed(col) masks
    // columns (artificials are banned in phase 2). Returns false on
    // iteration exhaustion.
    auto optimize = [&](Eigen::VectorXd& obj, double& objval, int banned_from) -> bool {
        int stall = 0;
        double last = std::numeric_limits<double>::infinity();
        while (true) {
            if (++iters > max_iters)
                return false;
            const bool bland = stall > m + n + 10;
            int col = -1;
            double best = -cost_tol * std::max(1.0, cost_norm);
            for (int j = 0; j < ncols; ++j) {
                if (j >= banned_from)
                    break;
                if (obj(j) < best) {
                    col = j;
                    if (bland)
                        break;
                    best = obj(j);
                }
            }
            if (col < 0)
                return true; // optimal
            int row = -1;
            double ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < m; ++r) {
                const double a = T(r, col);
                if (a > pivot_tol) {
                    const double q = rhs(r) / a;
                    if (q < ratio - 1e-12 || (q < ratio + 1e-12 && (row < 0 || basis[r] < basis[row]))) {
                        ratio = q;
                        row = r;
                    }
                }
            }
            if (row < 0)
                throw std::runtime_error("solve_lp: problem is unbounded");
            pivot(row, col, obj, objval);
            if (objval < last - 1e-13 * std::max(1.0, std::fabs(last)))
                stall = 0;
            else
                ++stall;
            last = objval;
        }
    };

    // Phase 1: drive the artificials to zero.
    if (n_art > 0) {
        Eigen::VectorXd obj1 = Eigen::VectorXd::Zero(ncols);
        double val1 = 0.0;
        for (int r : art_rows) {
            obj1 -= T.row(r).transpose();
            val1 -= rhs(r);
        }
        for (int a = 0; a < n_art; ++a)
            obj1(n + m + a) = 0.0;
        if (!optimize(obj1, val1, n + m)) {
            rep.iterations = iters;
            return rep;
        }
        const double infeas = -val1; // = sum of artificials
        if (infeas > 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff())) {
            rep.status = SolveStatus::Infeasible;
            rep.infeasibility = infeas;
            rep.iterations = iters;
            return rep;
        }
        // Pivot leftover artificials out of the basis when possible.
        for (int r = 0; r < m; ++r) {
            if (basis[r] < n + m)
                continue;
            int col = -1;
            for (int j = 0; j < n + m; ++j) {
                if (std::fabs(T(r, j)) > pivot_tol) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                Eigen::VectorXd dummy = Eigen::VectorXd::Zero(ncols);
                double dv = 0.0;
                pivot(r, col, dummy, dv);
            } else {
                rhs(r) = 0.0; // redundant row
            }
        }
    }

    // Phase 2.
    Eigen::VectorXd obj2 = Eigen::VectorXd::Zero(ncols);
    obj2.head(n) = cs;
    double val2 = 0.0;
    for (int r = 0; r < m; ++r) {
        const int j = basis[r];
        const double f = obj2(j);
        if (f != 0.0) {
            obj2 -= f * T.row(r).transpose();
            obj2(j) = 0.0;
            val2 -= f * rhs(r);
        }
    }
    if (!optimize(obj2, val2, n + m)) {
        rep.iterations = iters;
        return rep;
    }

    // Recover x in original units.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < m; ++r)
        if (basis[r] < n)
            y(basis[r]) = std::max(0.0, rhs(r));
    Eigen::VectorXd x = lp.lower + y.cwiseProduct(col_scale);

    rep.x = x;
    rep.objective = lp.c.dot(x);
    rep.iterations = iters;

    double viol = 0.0;
    if (m0 > 0) {
        Eigen::VectorXd slack = lp.A * x - lp.b;
        for (int r = 0; r < m0; ++r)
            viol = std::max(viol, slack(r) / std::max(1.0, std::fabs(lp.b(r))));
    }
    for (int v = 0; v < n; ++v) {
        viol = std::max(viol, (lp.lower(v) - x(v)) / std::max(1.0, std::fabs(lp.lower(v))));
        if (std::isfinite(lp.upper(v)))
            viol = std::max(viol, (x(v) - lp.upper(v)) / std::max(1.0, std::fabs(lp.upper(v))));
    }
    double dual_res = 0.0;
    for (int j = 0; j < n + m; ++j)
        dual_res = std::max(dual_res, -obj2(j) / cost_norm);

    rep.kkt_residual = std::max(std::max(viol, 0.0), dual_res);
    rep.status = (rep.kkt_residual < 1e-7 && viol < feas_tol * 100.0) ? SolveStatus::Optimal : SolveStatus::MaxIter;
    return rep;
}

} // namespace mmee
