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

#include "mmee/ee_direct.hpp"
#include "oracle_utils.hpp"

using namespace mmee;

namespace {
struct Fixture {
    NetworkConfig cfg;
    Geometry geo;
    ChannelRealization real;
    Fixture(int cells, int users, int near, unsigned seed, double qos = 0.4, int rows = 4, int cols = 4)
    {
        cfg.cell_count = cells;
        cfg.users_per_cell = users;
        cfg.near_count = near;
        cfg.far_count = users - near;
        cfg.antenna_rows = rows;
        cfg.antenna_cols = cols;
        cfg.qos_bps_hz = qos;
        cfg.cwzf_qos_bps_hz = default_cwzf_threshold(qos, cells);
        cfg.rng_seed = seed;
        Rng rng(seed);
        geo = place_users(cfg, rng);
        real = build_realization(cfg, geo, rng);
    }
};
} // namespace

TEST_CASE("rate evaluation", "[ee-direct]")
{
    Fixture fx(1, 3, 1, 51);
    const auto set = make_precoders(fx.real, BeamMode::Zf, fx.cfg);

    SECTION("zero power means zero rate and zero EE over the circuit floor")
    {
        const Eigen::MatrixXd p = Eigen::MatrixXd::Zero(1, 3);
        for (int k = 0; k < 3; ++k)
            CHECK(rate(set, p, 0, k) == 0.0);
        CHECK(evaluate_ee(set, fx.cfg, p) == 0.0);
        CHECK(consumed_power(set, fx.cfg, p) == Approx(fx.cfg.circuit_power_w()).epsilon(1e-12));
    }

    SECTION("single-cell ZF reduces to ln(1 + beta p / sigma2)")
    {
        Eigen::MatrixXd p = Eigen::MatrixXd::Constant(1, 3, 0.05);
        for (int k = 0; k < 3; ++k) {
            const double expect = std::log1p(set.alpha(0, k) * p(0, k) / set.sigma2);
            CHECK(rate(set, p, 0, k) == Approx(expect).epsilon(1e-9));
            // and alpha is the large-scale gain itself under ZF
            CHECK(set.alpha(0, k) == Approx(fx.real.beta[0](0, k)).epsilon(1e-9));
        }
    }
}

TEST_CASE("two-cell RZF rate matches a from-scratch SINR", "[ee-direct]")
{
    Fixture fx(2, 4, 2, 53);
    const auto set = make_precoders(fx.real, BeamMode::Rzf, fx.cfg);
    Rng rng(99);
    Eigen::MatrixXd p(2, 4);
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 4; ++k)
            p(i, k) = rng.uniform(0.01, 0.8);

    for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 4; ++k) {
            // recompute every term from the raw channel vectors and beams
            const auto& grp = set.groups[i][0];
            const Eigen::RowVectorXcd cross = fx.real.h[i][i].col(k).adjoint() * grp.fbar;
            const double beta = fx.real.beta[i](i, k);
            const double sig = beta * std::norm(cross(k)) * p(i, k);
            double iui = 0.0;
            for (int l = 0; l < 4; ++l)
                if (l != k)
                    iui += beta * std::norm(cross(l)) * p(i, l);
            double ici = 0.0;
            const int j = 1 - i;
            double chi = 0.0;
            for (int l = 0; l < 4; ++l)
                chi += set.groups[j][0].fbar.col(l).squaredNorm() * p(j, l);
            ici = fx.real.beta[j](i, k) * chi;
            const double sinr = sig / (iui + ici + fx.real.noise_power_w);
            CHECK(rate(set, p, i, k) == Approx(std::log1p(sinr)).epsilon(1e-6));
        }
    }
}

TEST_CASE("QoS linearization", "[ee-direct]")
{
    Fixture fx(1, 3, 1, 55);
    const auto set = make_precoders(fx.real, BeamMode::Zf, fx.cfg);

    SECTION("zero threshold is vacuous")
    {
        const auto rows = qos_linearize(set, Eigen::MatrixXd::Zero(1, 3));
        for (const auto& r : rows) {
            CHECK(r.ub == 0.0);
            // -alpha p <= 0 holds for any nonnegative p
            CHECK(r.a.maxCoeff() <= 0.0);
        }
    }

    SECTION("single-cell ZF row is the power floor")
    {
        const double rbar = 0.7;
        const auto rows = qos_linearize(set, Eigen::MatrixXd::Constant(1, 3, rbar));
        for (int k = 0; k < 3; ++k) {
            const double floor = set.sigma2 * std::expm1(rbar) / set.alpha(0, k);
            // row reads -alpha p <= -(e^r - 1) sigma2 up to nulled iui terms
            CHECK(rows[k].ub / rows[k].a(k) == Approx(floor).epsilon(1e-6));
        }
    }

    SECTION("linearized and logarithmic forms agree on satisfaction")
    {
        Fixture two(2, 3, 1, 57);
        const auto rzf = make_precoders(two.real, BeamMode::Rzf, two.cfg);
        const double rbar = two.cfg.qos_nats();
        const auto rows = qos_linearize(rzf, Eigen::MatrixXd::Constant(2, 3, rbar));
        Rng rng(5);
        for (int sample = 0; sample < 50; ++sample) {
            Eigen::MatrixXd p(2, 3);
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 3; ++k)
                    p(i, k) = rng.uniform(0.0, 1.0);
            Eigen::VectorXd flat(6);
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 3; ++k)
                    flat(i * 3 + k) = p(i, k);
            for (int i = 0; i < 2; ++i) {
                for (int k = 0; k < 3; ++k) {
                    const bool lin_ok = rows[i * 3 + k].a.dot(flat) <= rows[i * 3 + k].ub + 1e-18;
                    const bool log_ok = rate(rzf, p, i, k) >= rbar - 1e-12;
                    CHECK(lin_ok == log_ok);
                }
            }
        }
    }
}

TEST_CASE("feasibility initialization", "[ee-direct]")
{
    SECTION("zero thresholds are always feasible")
    {
        Fixture fx(1, 3, 1, 59, 0.0);
        const auto set = make_precoders(fx.real, BeamMode::Zf, fx.cfg);
        const auto init = init_feasible(set, fx.cfg);
        REQUIRE(init.feasible);
        CHECK(init.lp_value == Approx(0.0).margin(1e-12));
        CHECK(init.p.minCoeff() > 0.0); // nudged away from the dead anchor
    }

    SECTION("single-user closed form")
    {
        Fixture fx(1, 1, 1, 61, 0.4);
        fx.cfg.far_count = 0;
        const auto set = make_precoders(fx.real, BeamMode::Zf, fx.cfg);
        const auto init = init_feasible(set, fx.cfg);
        REQUIRE(init.feasible);
        const double expect = set.norm_sq(0, 0) * set.sigma2 * std::expm1(fx.cfg.qos_nats()) /
                              (set.alpha(0, 0) * fx.cfg.bs_power_budget_w);
        CHECK(init.lp_value == Approx(expect).epsilon(1e-6));
    }

    SECTION("absurd threshold reports infeasible")
    {
        Fixture fx(1, 3, 1, 63, 1000.0 / ln2); // one thousand nats
        const auto set = make_precoders(fx.real, BeamMode::Zf, fx.cfg);
        CHECK_FALSE(init_feasible(set, fx.cfg).feasible);
    }
}

TEST_CASE("path-following direct EE", "[ee-direct]")
{
    SECTION("trace is nondecreasing and QoS holds, ZF and RZF, 1-2 cells")
    {
        for (unsigned seed : {71u, 72u, 73u}) {
            for (int cells : {1, 2}) {
                for (BeamMode mode : {BeamMode::Zf, BeamMode::Rzf}) {
                    Fixture fx(cells, 4, 2, seed);
                    const auto set = make_precoders(fx.real, mode, fx.cfg);
                    const auto rep = optimize_ee_direct(set, fx.cfg);
                    if (rep.status == RunStatus::Infeasible)
                        continue;
                    REQUIRE(rep.status == RunStatus::Converged);
                    for (size_t n = 1; n < rep.ee_trace.size(); ++n)
                        CHECK(rep.ee_trace[n] >= rep.ee_trace[n - 1] - 1e-9);
                    const double rbar = fx.cfg.qos_nats();
                    for (int i = 0; i < cells; ++i)
                        for (int k = 0; k < 4; ++k)
                            CHECK(rate(set, rep.powers, i, k) >= rbar * (1.0 - 1e-6));
                    const auto tx = transmit_power(set, rep.powers);
                    for (int i = 0; i < cells; ++i)
                        CHECK(tx(i) <= fx.cfg.bs_power_budget_w * (1.0 + 1e-8));
                    // the reported EE equals the last trace entry
                    CHECK(rep.ee_bits_per_joule_hz == Approx(rep.ee_trace.back() / ln2).epsilon(1e-12));
                }
            }
        }
    }

    SECTION("two-user instance matches a dense grid search")
    {
        for (BeamMode mode : {BeamMode::Zf, BeamMode::Rzf}) {
            Fixture fx(1, 2, 1, 81);
            const auto set = make_precoders(fx.real, mode, fx.cfg);
            const auto rep = optimize_ee_direct(set, fx.cfg);
            REQUIRE(rep.status == RunStatus::Converged);

            const double pmax = fx.cfg.bs_power_budget_w;
            const double rbar = fx.cfg.qos_nats();
            Eigen::VectorXd lo = Eigen::VectorXd::Constant(2, 0.0);
            Eigen::VectorXd hi(2);
            hi << pmax / set.norm_sq(0, 0), pmax / set.norm_sq(0, 1);
            auto as_matrix = [](const Eigen::VectorXd& x) {
                Eigen::MatrixXd p(1, 2);
                p(0, 0) = x(0);
                p(0, 1) = x(1);
                return p;
            };
            auto feas = [&](const Eigen::VectorXd& x) {
                const Eigen::MatrixXd p = as_matrix(x);
                if (transmit_power(set, p)(0) > pmax)
                    return false;
                return rate(set, p, 0, 0) >= rbar && rate(set, p, 0, 1) >= rbar;
            };
            auto negative_ee = [&](const Eigen::VectorXd& x) {
                const Eigen::MatrixXd p = as_matrix(x);
                return -total_throughput(set, p) / consumed_power(set, fx.cfg, p);
            };
            const auto grid = oracle::grid_minimize(negative_ee, feas, lo, hi, 11, 45, 41);
            REQUIRE(grid.found);
            const double best = -grid.value / ln2;
            CHECK(rep.ee_bits_per_joule_hz == Approx(best).epsilon(1e-3));
        }
    }
}
