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

#include <catch2/catch.hpp>
#include <cmath>

#include "mmee/bounds.hpp"
#include "mmee/rng.hpp"

using namespace mmee;

namespace {
double f_ln_inv_xy_over_t(double x, double y, double t) { return std::log1p(1.0 / (x * y)) / t; }
double f_ln_inv_xy(double x, double y) { return std::log1p(1.0 / (x * y)); }
double f_ln_x_over_y(double x, double y) { return std::log1p(x / y); }
double f_inv_zt(double z, double t) { return 1.0 / (z * t); }
} // namespace

TEST_CASE("hand-derived coefficients at the unit anchor", "[bounds]")
{
    const auto m3 = bound_ln_inv_xy_over_t(1.0, 1.0, 1.0);
    CHECK(m3.a == Approx(2.0 * std::log(2.0) + 1.0).epsilon(1e-14));
    CHECK(m3.b == Approx(0.5).epsilon(1e-14));
    CHECK(m3.c == Approx(0.5).epsilon(1e-14));
    CHECK(m3.d == Approx(std::log(2.0)).epsilon(1e-14));

    const auto m4 = bound_ln_inv_xy(1.0, 1.0);
    CHECK(m4.a == Approx(std::log(2.0) + 1.0).epsilon(1e-14));
    CHECK(m4.b == Approx(0.5).epsilon(1e-14));
    CHECK(m4.c == Approx(0.5).epsilon(1e-14));

    const auto m4a = bound_ln_x_over_y(1.0, 1.0);
    CHECK(m4a.a == Approx(std::log(2.0) + 1.0).epsilon(1e-14));
    CHECK(m4a.b == Approx(0.5).epsilon(1e-14));
    CHECK(m4a.c == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("reciprocal-product bound matches hand arithmetic", "[bounds]")
{
    const auto m = bound_inv_zt(1.0, 1.0);
    // at (2,2) the bound gives 3 - (2 + 2) = -1, below the true 1/4
    CHECK(m.value(2.0, 2.0) == Approx(-1.0).epsilon(1e-14));
    CHECK(m.value(2.0, 2.0) <= f_inv_zt(2.0, 2.0));
    CHECK(m.value(1.0, 1.0) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tangency at the anchor", "[bounds]")
{
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        const double x = 0.02 + rng.uniform() * 5.0;
        const double y = 0.02 + rng.uniform() * 5.0;
        const double t = 0.02 + rng.uniform() * 5.0;

        CHECK(bound_ln_inv_xy_over_t(x, y, t).value(x, y, t) ==
              Approx(f_ln_inv_xy_over_t(x, y, t)).epsilon(1e-9));
        CHECK(bound_ln_inv_xy(x, y).value(x, y) == Approx(f_ln_inv_xy(x, y)).epsilon(1e-9));
        CHECK(bound_ln_x_over_y(x, y).value(x, y) == Approx(f_ln_x_over_y(x, y)).epsilon(1e-9));
        CHECK(bound_inv_zt(x, t).value(x, t) == Approx(f_inv_zt(x, t)).epsilon(1e-9));
    }
}

TEST_CASE("global minorant property", "[bounds]")
{
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const double xb = 0.05 + rng.uniform() * 4.0;
        const double yb = 0.05 + rng.uniform() * 4.0;
        const double tb = 0.05 + rng.uniform() * 4.0;
        const auto m3 = bound_ln_inv_xy_over_t(xb, yb, tb);
        const auto m4 = bound_ln_inv_xy(xb, yb);
        const auto m4a = bound_ln_x_over_y(xb, yb);
        const auto m5 = bound_inv_zt(xb, tb);
        for (int probe = 0; probe < 100; ++probe) {
            const double x = 0.01 + rng.uniform() * 8.0;
            const double y = 0.01 + rng.uniform() * 8.0;
            const double t = 0.01 + rng.uniform() * 8.0;
            REQUIRE(m3.value(x, y, t) <= f_ln_inv_xy_over_t(x, y, t) + 1e-12);
            REQUIRE(m4.value(x, y) <= f_ln_inv_xy(x, y) + 1e-12);
            REQUIRE(m4a.value(x, y) <= f_ln_x_over_y(x, y) + 1e-12);
            REQUIRE(m5.value(x, t) <= f_inv_zt(x, t) + 1e-12);
        }
    }
}

TEST_CASE("all coefficients strictly positive", "[bounds]")
{
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double x = 0.05 + rng.uniform() * 3.0;
        const double y = 0.05 + rng.uniform() * 3.0;
        const double t = 0.05 + rng.uniform() * 3.0;
        const auto m3 = bound_ln_inv_xy_over_t(x, y, t);
        CHECK(m3.a > 0.0);
        CHECK(m3.b > 0.0);
        CHECK(m3.c > 0.0);
        CHECK(m3.d > 0.0);
        const auto m4a = bound_ln_x_over_y(x, y);
        CHECK(m4a.a > 0.0);
        CHECK(m4a.b > 0.0);
        CHECK(m4a.c > 0.0);
    }
}

TEST_CASE("nonpositive anchors are rejected", "[bounds]")
{
    CHECK_THROWS_AS(bound_ln_inv_xy_over_t(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_ln_inv_xy(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_ln_x_over_y(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bound_inv_zt(1.0, 0.0), std::invalid_argument);
}
