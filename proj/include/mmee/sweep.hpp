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

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mmee/channel.hpp"
#include "mmee/config.hpp"
#include "mmee/cwzf.hpp"
#include "mmee/ee_direct.hpp"
#include "mmee/ee_tf.hpp"
#include "mmee/geometry.hpp"
#include "mmee/precoding.hpp"
#include "mmee/report.hpp"

namespace mmee {

// The four schemes compared in the experiments.
enum class SweepMode { Cwzf, Rzf, TfZf, TfRzf };

inline const char* to_string(SweepMode m)
{
    switch (m) {
    case SweepMode::Cwzf:
        return "cwzf";
    case SweepMode::Rzf:
        return "rzf";
    case SweepMode::TfZf:
        return "tf-zf";
    case SweepMode::TfRzf:
        return "tf-rzf";
    }
    return "?";
}

inline std::optional<SweepMode> parse_sweep_mode(const std::string& s)
{
    if (s == "cwzf")
        return SweepMode::Cwzf;
    if (s == "rzf")
        return SweepMode::Rzf;
    if (s == "tf-zf" || s == "tfzf")
        return SweepMode::TfZf;
    if (s == "tf-rzf" || s == "tfrzf")
        return SweepMode::TfRzf;
    return std::nullopt;
}

struct SweepSpec {
    int cell_count = 1;
    std::vector<SweepMode> modes;
    std::vector<int> user_counts;
    std::vector<double> rho_values;
    std::vector<double> thresholds_bps;
    int trials = 20;
    std::uint64_t base_seed = 1;
    int workers = 1;
    NetworkConfig base;                       // physics template (Table-like defaults)
    std::optional<double> cwzf_threshold_bps; // pinned compensation threshold

    void validate() const
    {
        if (modes.empty() || user_counts.empty() || rho_values.empty() || thresholds_bps.empty())
            throw std::invalid_argument("SweepSpec: empty grid axis");
        if (trials < 1)
            throw std::invalid_argument("SweepSpec: trials must be >= 1");
        if (workers < 1)
            throw std::invalid_argument("SweepSpec: workers must be >= 1");
        if (cell_count < 1 || cell_count > 3)
            throw std::invalid_argument("SweepSpec: cell_count must be 1, 2 or 3");
    }
};

struct TrialOutcome {
    int trial = 0;
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::Infeasible;
    double ee_bpj_hz = 0.0;
    double tx_power_w = 0.0;
    double tau1 = 0.0, tau2 = 0.0;
    double near_far_power_ratio = std::numeric_limits<double>::quiet_NaN();
    int iterations = 0;
};

struct GridCell {
    SweepMode mode = SweepMode::Rzf;
    int n_ue = 0;
    double rho = 0.0;
    double qos_bps_hz = 0.0;
    double cwzf_qos_bps_hz = 0.0;
    std::vector<TrialOutcome> trials;

    int feasible_count = 0;
    double feasibility = 0.0;
    double ee_mean = 0.0, ee_std = 0.0;
    double tx_mean = 0.0;
    double tau_ratio_mean = std::numeric_limits<double>::quiet_NaN();
    double near_far_mean = std::numeric_limits<double>::quiet_NaN();
    double iterations_mean = 0.0;
};

struct SweepResult {
    int cell_count = 0;
    int trials = 0;
    std::uint64_t base_seed = 0;
    std::vector<GridCell> cells;
};

inline NetworkConfig trial_config(const SweepSpec& spec, int n_ue, double rho, double r_bps, int trial)
{
    NetworkConfig cfg = spec.base;
    cfg.cell_count = spec.cell_count;
    cfg.users_per_cell = n_ue;
    cfg.near_count = n_ue / 2;
    cfg.far_count = n_ue - cfg.near_count;
    cfg.correlation_rho = rho;
    cfg.qos_bps_hz = r_bps;
    cfg.cwzf_qos_bps_hz = spec.cwzf_threshold_bps.value_or(default_cwzf_threshold(r_bps, spec.cell_count));
    cfg.rng_seed = spec.base_seed + static_cast<std::uint64_t>(trial);
    return cfg;
}

// One Monte-Carlo trial of one grid point. Any solver failure is reported
// as an infeasible outcome; the sweep never aborts.
inline TrialOutcome run_trial(const SweepSpec& spec, SweepMode mode, int n_ue, double rho, double r_bps, int trial)
{
    TrialOutcome out;
    out.trial = trial;
    out.seed = spec.base_seed + static_cast<std::uint64_t>(trial);
    try {
        const NetworkConfig cfg = trial_config(spec, n_ue, rho, r_bps, trial);
        cfg.validate();
        Rng rng(cfg.rng_seed);
        const Geometry geo = place_users(cfg, rng);
        const ChannelRealization real = build_realization(cfg, geo, rng);

        EEReport rep;
        const PrecoderSet* set_for_ratio = nullptr;
        PrecoderSet set;
        switch (mode) {
        case SweepMode::Cwzf:
            set = make_precoders(real, BeamMode::Zf, cfg);
            rep = optimize_ee_cwzf(set, cfg);
            break;
        case SweepMode::Rzf:
            set = make_precoders(real, BeamMode::Rzf, cfg);
            rep = optimize_ee_direct(set, cfg);
            break;
        case SweepMode::TfZf:
            set = make_precoders(real, BeamMode::TfZf, cfg);
            rep = optimize_ee_tf(set, cfg);
            set_for_ratio = &set;
            break;
        case SweepMode::TfRzf:
            set = make_precoders(real, BeamMode::TfRzf, cfg);
            rep = optimize_ee_tf(set, cfg);
            set_for_ratio = &set;
            break;
        }

        out.status = rep.status;
        out.iterations = rep.iterations;
        if (rep.status == RunStatus::Converged) {
            out.ee_bpj_hz = rep.ee_bits_per_joule_hz;
            out.tx_power_w = rep.tx_power_w.sum();
            out.tau1 = rep.tau[0];
            out.tau2 = rep.tau[1];
            if (set_for_ratio != nullptr) {
                double near_w = 0.0, far_w = 0.0;
                for (int i = 0; i < set.cells; ++i) {
                    for (int q = 0; q < 2; ++q) {
                        const double w = rep.tau[q] * group_power(set, i, q, rep.powers);
                        const bool near_group =
                            !set.groups[i][q].users.empty() && set.groups[i][q].users.front() < cfg.near_count;
                        (near_group ? near_w : far_w) += w;
                    }
                }
                out.near_far_power_ratio = far_w > 0.0 ? near_w / far_w : std::numeric_limits<double>::quiet_NaN();
            }
        }
    } catch (const std::exception&) {
        out.status = RunStatus::Infeasible;
    }
    return out;
}

// Full experiment grid: for every (mode, user count, rho, threshold) cell,
// `trials` independent realizations with seeds base_seed + trial. Trials run
// on up to `workers` threads; aggregation is an index-ordered reduction, so
// the result is deterministic regardless of the worker count.
inline SweepResult run_sweep(const SweepSpec& spec)
{
    spec.validate();
    SweepResult result;
    result.cell_count = spec.cell_count;
    result.trials = spec.trials;
    result.base_seed = spec.base_seed;

    for (const SweepMode mode : spec.modes) {
        for (const int n_ue : spec.user_counts) {
            for (const double rho : spec.rho_values) {
                for (const double r_bps : spec.thresholds_bps) {
                    GridCell cell;
                    cell.mode = mode;
                    cell.n_ue = n_ue;
                    cell.rho = rho;
                    cell.qos_bps_hz = r_bps;
                    cell.cwzf_qos_bps_hz = spec.cwzf_threshold_bps.value_or(default_cwzf_threshold(r_bps, spec.cell_count));
                    cell.trials.resize(spec.trials);

                    std::atomic<int> next{0};
                    auto work = [&]() {
                        for (int i = next.fetch_add(1); i < spec.trials; i = next.fetch_add(1))
                            cell.trials[i] = run_trial(spec, mode, n_ue, rho, r_bps, i);
                    };
                    const int nw = std::min(spec.workers, spec.trials);
                    if (nw <= 1) {
                        work();
                    } else {
                        std::vector<std::thread> pool;
                        pool.reserve(nw);
                        for (int w = 0; w < nw; ++w)
                            pool.emplace_back(work);
                        for (auto& th : pool)
                            th.join();
                    }

                    // aggregate over feasible trials, in trial order
                    double ee_sum = 0.0, ee_sq = 0.0, tx_sum = 0.0, it_sum = 0.0;
                    double tau_sum = 0.0, nf_sum = 0.0;
                    int nf_count = 0;
                    for (const auto& tr : cell.trials) {
                        if (tr.status != RunStatus::Converged)
                            continue;
                        ++cell.feasible_count;
                        ee_sum += tr.ee_bpj_hz;
                        ee_sq += tr.ee_bpj_hz * tr.ee_bpj_hz;
                        tx_sum += tr.tx_power_w;
                        it_sum += tr.iterations;
                        if (tr.tau2 > 0.0) {
                            tau_sum += tr.tau1 / tr.tau2;
                            if (std::isfinite(tr.near_far_power_ratio)) {
                                nf_sum += tr.near_far_power_ratio;
                                ++nf_count;
                            }
                        }
                    }
                    const int f = cell.feasible_count;
                    cell.feasibility = static_cast<double>(f) / spec.trials;
                    if (f > 0) {
                        cell.ee_mean = ee_sum / f;
                        cell.ee_std = f > 1 ? std::sqrt(std::max(0.0, (ee_sq - f * cell.ee_mean * cell.ee_mean) / (f - 1)))
                                            : 0.0;
                        cell.tx_mean = tx_sum / f;
                        cell.iterations_mean = it_sum / f;
                        const bool tf = mode == SweepMode::TfZf || mode == SweepMode::TfRzf;
                        if (tf) {
                            cell.tau_ratio_mean = tau_sum / f;
                            cell.near_far_mean = nf_count > 0 ? nf_sum / nf_count
                                                              : std::numeric_limits<double>::quiet_NaN();
                        }
                    }
                    result.cells.push_back(std::move(cell));
                }
            }
        }
    }
    return result;
}

namespace detail {

inline std::string fmt9(double v)
{
    if (std::isnan(v))
        return ""; // empty marker for columns that do not apply
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

} // namespace detail

// One row per grid cell. TF-only columns carry empty markers for the other
// modes. Deterministic byte-for-byte for a fixed spec.
inline void write_summary_csv(const SweepResult& result, const std::string& path)
{
    auto out = detail::open_out(path);
    out << "mode,cells,n_ue,rho,qos_bps_hz,cwzf_qos_bps_hz,trials,feasible_trials,feasibility,"
           "ee_mean_bpj_hz,ee_std_bpj_hz,tx_power_mean_w,tau_ratio_mean,near_far_power_ratio_mean,"
           "iterations_mean\n";
    for (const auto& c : result.cells) {
        out << to_string(c.mode) << ',' << result.cell_count << ',' << c.n_ue << ',' << detail::fmt9(c.rho) << ','
            << detail::fmt9(c.qos_bps_hz) << ',' << detail::fmt9(c.cwzf_qos_bps_hz) << ',' << result.trials << ','
            << c.feasible_count << ',' << detail::fmt9(c.feasibility) << ',' << detail::fmt9(c.ee_mean) << ','
            << detail::fmt9(c.ee_std) << ',' << detail::fmt9(c.tx_mean) << ',' << detail::fmt9(c.tau_ratio_mean)
            << ',' << detail::fmt9(c.near_far_mean) << ',' << detail::fmt9(c.iterations_mean) << '\n';
    }
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

// Companion per-trial log from which every aggregate is recomputable.
inline void write_trials_csv(const SweepResult& result, const std::string& path)
{
    auto out = detail::open_out(path);
    out << "mode,cells,n_ue,rho,qos_bps_hz,trial,seed,status,ee_bpj_hz,tx_power_w,tau1,tau2,"
           "near_far_power_ratio,iterations\n";
    for (const auto& c : result.cells) {
        for (const auto& tr : c.trials) {
            out << to_string(c.mode) << ',' << result.cell_count << ',' << c.n_ue << ',' << detail::fmt9(c.rho)
                << ',' << detail::fmt9(c.qos_bps_hz) << ',' << tr.trial << ',' << tr.seed << ','
                << to_string(tr.status) << ',' << detail::fmt9(tr.ee_bpj_hz) << ',' << detail::fmt9(tr.tx_power_w)
                << ',' << detail::fmt9(tr.tau1) << ',' << detail::fmt9(tr.tau2) << ','
                << detail::fmt9(tr.near_far_power_ratio) << ',' << tr.iterations << '\n';
        }
    }
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

// Convergence trajectory of a single run, in bits/Joule/Hz.
inline void write_trace_csv(const EEReport& report, const std::string& path)
{
    auto out = detail::open_out(path);
    out << "iteration,ee_bits_per_joule_hz\n";
    for (size_t n = 0; n < report.ee_trace.size(); ++n)
        out << n << ',' << detail::fmt9(report.ee_trace[n] / ln2) << '\n';
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

} // namespace mmee
