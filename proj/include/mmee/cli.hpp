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

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mmee/config_file.hpp"
#include "mmee/mmee.hpp"

namespace mmee {

namespace cli_detail {

inline int run_sweep_command(const std::string& config_path, const std::string& out_dir,
                             std::optional<long long> seed, std::optional<int> workers,
                             std::optional<int> trials)
{
    SweepSpec spec = load_sweep_config(config_path);
    if (seed)
        spec.base_seed = static_cast<std::uint64_t>(*seed);
    if (workers)
        spec.workers = *workers;
    if (trials)
        spec.trials = *trials;
    spec.validate();

    std::filesystem::create_directories(out_dir);
    const SweepResult result = run_sweep(spec);
    write_summary_csv(result, out_dir + "/summary.csv");
    write_trials_csv(result, out_dir + "/trials.csv");

    bool any_feasible = false;
    for (const auto& c : result.cells)
        any_feasible = any_feasible || c.feasible_count > 0;
    std::cout << "sweep: " << result.cells.size() << " grid cells, " << spec.trials
              << " trials each -> " << out_dir << "/summary.csv\n";
    return any_feasible ? 0 : 1;
}

inline int run_trace_command(const std::string& config_path, const std::string& out_dir,
                             std::optional<long long> seed)
{
    SweepSpec spec = load_sweep_config(config_path);
    if (seed)
        spec.base_seed = static_cast<std::uint64_t>(*seed);
    std::filesystem::create_directories(out_dir);

    NetworkConfig cfg = trial_config(spec, spec.user_counts.front(), spec.rho_values.front(),
                                     spec.thresholds_bps.front(), 0);
    cfg.validate();

    bool any = false;
    for (const SweepMode mode : spec.modes) {
        Rng rng(cfg.rng_seed);
        const Geometry geo = place_users(cfg, rng);
        const ChannelRealization real = build_realization(cfg, geo, rng);
        EEReport rep;
        try {
            switch (mode) {
            case SweepMode::Cwzf:
                rep = optimize_ee_cwzf(make_precoders(real, BeamMode::Zf, cfg), cfg);
                break;
            case SweepMode::Rzf:
                rep = optimize_ee_direct(make_precoders(real, BeamMode::Rzf, cfg), cfg);
                break;
            case SweepMode::TfZf:
                rep = optimize_ee_tf(make_precoders(real, BeamMode::TfZf, cfg), cfg);
                break;
            case SweepMode::TfRzf:
                rep = optimize_ee_tf(make_precoders(real, BeamMode::TfRzf, cfg), cfg);
                break;
            }
        } catch (const std::exception& e) {
            std::cout << to_string(mode) << ": infeasible (" << e.what() << ")\n";
            continue;
        }
        const std::string path = out_dir + "/trace_" + to_string(mode) + ".csv";
        write_trace_csv(rep, path);
        std::cout << to_string(mode) << ": " << to_string(rep.status) << ", "
                  << rep.ee_trace.size() << " iterations -> " << path << "\n";
        any = any || rep.status == RunStatus::Converged;
    }
    return any ? 0 : 1;
}

// Randomized invariant sweep: beam identities, bound tangency/minorant
// checks, water-filling slackness, correlation sanity. Returns the number
// of violations.
inline int run_validate_command(std::uint64_t seed, int rounds)
{
    Rng rng(seed);
    int bad = 0;
    auto expect = [&bad](bool ok, const char* what) {
        if (!ok) {
            ++bad;
            std::cout << "FAIL: " << what << "\n";
        }
    };

    for (int round = 0; round < rounds; ++round) {
        // beams
        const int n = 16, k = 4 + static_cast<int>(rng.uniform() * 8);
        Eigen::MatrixXcd h(n, k);
        for (int c = 0; c < k; ++c)
            for (int r = 0; r < n; ++r)
                h(r, c) = rng.complex_gaussian();
        const Eigen::MatrixXcd f = zf_precoder(h);
        expect((h.adjoint() * f - Eigen::MatrixXcd::Identity(k, k)).norm() < 1e-8, "ZF right-inverse identity");
        const double eta = 0.2 + rng.uniform();
        const auto [fr, g] = rzf_precoder(h, eta);
        expect((h.adjoint() * fr - (Eigen::MatrixXcd::Identity(k, k) - eta * g)).norm() < 1e-8,
               "RZF identity H^H F = I - eta G");

        // bounds
        const double xb = 0.1 + rng.uniform() * 3, yb = 0.1 + rng.uniform() * 3, tb = 0.1 + rng.uniform() * 3;
        const auto m3 = bound_ln_inv_xy_over_t(xb, yb, tb);
        const auto m4 = bound_ln_inv_xy(xb, yb);
        const auto m4a = bound_ln_x_over_y(xb, yb);
        const auto m5 = bound_inv_zt(xb, tb);
        for (int probe = 0; probe < 20; ++probe) {
            const double x = 0.05 + rng.uniform() * 4, y = 0.05 + rng.uniform() * 4,
                         t = 0.05 + rng.uniform() * 4;
            expect(m3.value(x, y, t) <= std::log1p(1.0 / (x * y)) / t + 1e-12, "ln(1+1/xy)/t minorant");
            expect(m4.value(x, y) <= std::log1p(1.0 / (x * y)) + 1e-12, "ln(1+1/xy) minorant");
            expect(m4a.value(x, y) <= std::log1p(x / y) + 1e-12, "ln(1+x/y) minorant");
            expect(m5.value(x, t) <= 1.0 / (x * t) + 1e-12, "1/(zt) minorant");
        }

        // water-filling
        const int users = 3 + static_cast<int>(rng.uniform() * 5);
        Eigen::VectorXd a(users), beta(users), norms(users);
        for (int u = 0; u < users; ++u) {
            a(u) = 1.0 + rng.uniform() * 2;
            beta(u) = std::pow(10.0, -12.0 - rng.uniform());
            norms(u) = 0.2 + rng.uniform();
        }
        const double budget = 1.0 + rng.uniform() * 20;
        const auto wf = waterfill(0.3 + rng.uniform(), a, beta, norms, budget, 1.0 / 0.388, 3.16e-13);
        const double used = norms.dot(wf.p);
        expect(used <= budget * (1.0 + 1e-9), "water-filling budget");
        if (wf.lambda > 0.0)
            expect(std::fabs(used - budget) <= 1e-9 * budget * 10.0, "water-filling complementary slackness");
    }
    std::cout << (bad == 0 ? "validate: all invariant checks passed\n" : "validate: violations found\n");
    return bad == 0 ? 0 : 1;
}

} // namespace cli_detail

// Entry point behind the mmee binary: subcommands sweep, trace, validate.
// Exit codes: 0 success, 1 infeasible-only results or validation failure,
// 2 usage/config errors.
inline int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"multi-cell massive MIMO energy-efficiency optimization harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::optional<long long> seed;
    std::optional<int> workers, trials;

    CLI::App* sweep = app.add_subcommand("sweep", "run a Monte-Carlo sweep and write CSV results");
    sweep->add_option("--config", config_path, "sweep configuration file")->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--seed", seed, "override the base seed");
    sweep->add_option("--workers", workers, "worker threads per grid point");
    sweep->add_option("--trials", trials, "override the Monte-Carlo trial count");

    CLI::App* trace = app.add_subcommand("trace", "single run per mode with convergence traces");
    trace->add_option("--config", config_path, "configuration file")->required();
    trace->add_option("--out", out_dir, "output directory");
    trace->add_option("--seed", seed, "override the seed");

    std::uint64_t vseed = 1;
    int vrounds = 25;
    CLI::App* validate = app.add_subcommand("validate", "run the randomized invariant suite");
    validate->add_option("--seed", vseed, "random seed");
    validate->add_option("--rounds", vrounds, "number of random rounds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sweep->parsed())
            return cli_detail::run_sweep_command(config_path, out_dir, seed, workers, trials);
        if (trace->parsed())
            return cli_detail::run_trace_command(config_path, out_dir, seed);
        return cli_detail::run_validate_command(vseed, vrounds);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace mmee
