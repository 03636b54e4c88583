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

#include <cmath>
#include <stdexcept>

namespace mmee {

// Tangent minorants of the convex functions driving the successive convex
// approximation steps. Each constructor returns the coefficients of the
// first-order expansion at a strictly positive anchor; the bound touches the
// function at the anchor and lies below it everywhere on the positive
// orthant. All coefficients are strictly positive.
enum class BoundKind {
    LnInvXyOverT, // ln(1 + 1/(x y)) / t      >= a - b x - c y - d t
    LnInvXy,      // ln(1 + 1/(x y))          >= a - b x - c y
    LnXOverY,     // ln(1 + x/y)              >= a - b/x - c y
    InvZt,        // 1 / (z t)                >= a - b z - c t
};

struct MinorantCoeffs {
    BoundKind kind;
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0; // only LnInvXyOverT
    double x_anchor = 0.0;
    double y_anchor = 0.0;
    double t_anchor = 0.0; // only the t-bearing kinds

    // Evaluates the bound at (x, y[, t]); for InvZt the arguments are (z, t).
    double value(double x, double y, double t = 0.0) const
    {
        switch (kind) {
        case BoundKind::LnInvXyOverT:
            return a - b * x - c * y - d * t;
        case BoundKind::LnInvXy:
            return a - b * x - c * y;
        case BoundKind::LnXOverY:
            return a - b / x - c * y;
        case BoundKind::InvZt:
            return a - b * x - c * y;
        }
        return 0.0;
    }
};

namespace detail {
inline void require_positive_anchor(bool ok)
{
    if (!ok)
        throw std::invalid_argument("minorant bound: anchor must be strictly positive");
}
} // namespace detail

// ln(1 + 1/(x y))/t >= a - b x - c y - d t, tangent at (xb, yb, tb).
inline MinorantCoeffs bound_ln_inv_xy_over_t(double xb, double yb, double tb)
{
    detail::require_positive_anchor(xb > 0.0 && yb > 0.0 && tb > 0.0);
    const double xy = xb * yb;
    const double r = std::log1p(1.0 / xy);
    MinorantCoeffs m;
    m.kind = BoundKind::LnInvXyOverT;
    m.a = 2.0 * r / tb + 2.0 / (tb * (xy + 1.0));
    m.b = 1.0 / ((xy + 1.0) * xb * tb);
    m.c = 1.0 / ((xy + 1.0) * yb * tb);
    m.d = r / (tb * tb);
    m.x_anchor = xb;
    m.y_anchor = yb;
    m.t_anchor = tb;
    return m;
}

// ln(1 + 1/(x y)) >= a - b x - c y, tangent at (xb, yb).
inline MinorantCoeffs bound_ln_inv_xy(double xb, double yb)
{
    detail::require_positive_anchor(xb > 0.0 && yb > 0.0);
    const double xy = xb * yb;
    MinorantCoeffs m;
    m.kind = BoundKind::LnInvXy;
    m.a = std::log1p(1.0 / xy) + 2.0 / (xy + 1.0);
    m.b = 1.0 / ((xy + 1.0) * xb);
    m.c = 1.0 / ((xy + 1.0) * yb);
    m.x_anchor = xb;
    m.y_anchor = yb;
    return m;
}

// ln(1 + x/y) >= a - b/x - c y, tangent at (xb, yb). This is the previous
// bound under the substitution x -> 1/x.
inline MinorantCoeffs bound_ln_x_over_y(double xb, double yb)
{
    detail::require_positive_anchor(xb > 0.0 && yb > 0.0);
    MinorantCoeffs m;
    m.kind = BoundKind::LnXOverY;
    m.a = std::log1p(xb / yb) + 2.0 * xb / (xb + yb);
    m.b = xb * xb / (xb + yb);
    m.c = xb / ((xb + yb) * yb);
    m.x_anchor = xb;
    m.y_anchor = yb;
    return m;
}

// 1/(z t) >= a - b z - c t, tangent at (zb, tb). A lower bound on the
// reciprocal product; callers flip its sign to build affine upper bounds on
// -1/(z t) terms.
inline MinorantCoeffs bound_inv_zt(double zb, double tb)
{
    detail::require_positive_anchor(zb > 0.0 && tb > 0.0);
    MinorantCoeffs m;
    m.kind = BoundKind::InvZt;
    m.a = 3.0 / (zb * tb);
    m.b = 1.0 / (zb * zb * tb);
    m.c = 1.0 / (zb * tb * tb);
    m.x_anchor = zb;
    m.y_anchor = tb;
    return m;
}

} // namespace mmee
