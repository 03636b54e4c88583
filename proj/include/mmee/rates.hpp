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
#include <stdexcept>
#include <vector>

#include "mmee/config.hpp"
#include "mmee/precoding.hpp"

namespace mmee {

// ---- direct-power semantics (full-set ZF / RZF) ----

// Inter-user interference at UE (i,k) for direct powers p.
inline double intracell_interference(const PrecoderSet& set, const Eigen::MatrixXd& p, int i, int k)
{
    const auto [q, a] = set.slot[i][k];
    const BeamGroup& grp = set.groups[i][q];
    double v = 0.0;
    for (int b = 0; b < grp.size(); ++b)
        v += grp.iui(a, b) * p(i, grp.users[b]);
    return v;
}

// Inter-cell interference at UE (i,k): each neighbour contributes its whole
// transmit power weighted by the cross large-scale gain.
inline double intercell_interference(const PrecoderSet& set, const Eigen::MatrixXd& p, int i, int k)
{
    double v = 0.0;
    for (int j = 0; j < set.cells; ++j) {
        if (j == i)
            continue;
        double chi = 0.0;
        for (size_t q = 0; q < set.groups[j].size(); ++q)
            for (int b = 0; b < set.groups[j][q].size(); ++b)
                chi += set.groups[j][q].norm_sq(b) * p(j, set.groups[j][q].users[b]);
        v += set.ici_beta[j](i, k) * chi;
    }
    return v;
}

inline double interference(const PrecoderSet& set, const Eigen::MatrixXd& p, int i, int k)
{
    return intracell_interference(set, p, i, k) + intercell_interference(set, p, i, k);
}

// Throughput of UE (i,k) in nats/s/Hz for direct powers.
inline double rate(const PrecoderSet& set, const Eigen::MatrixXd& p, int i, int k)
{
    const double lam = interference(set, p, i, k);
    return std::log1p(set.alpha(i, k) * p(i, k) / (lam + set.sigma2));
}

inline double total_throughput(const PrecoderSet& set, const Eigen::MatrixXd& p)
{
    double v = 0.0;
    for (int i = 0; i < set.cells; ++i)
        for (int k = 0; k < set.users_per_cell; ++k)
            v += rate(set, p, i, k);
    return v;
}

// Total consumed power: amplifier-scaled transmit power plus per-antenna and
// static circuit power, summed over cells.
inline double consumed_power(const PrecoderSet& set, const NetworkConfig& config, const Eigen::MatrixXd& p)
{
    const Eigen::VectorXd chi = transmit_power(set, p);
    return config.amp_drain_reciprocal * chi.sum() + set.cells * config.circuit_power_w();
}

// ---- time-fraction semantics (inverse powers) ----

// In-group interference at UE (i,k) for inverse powers.
inline double tf_interference(const PrecoderSet& set, const Eigen::MatrixXd& pinv, int i, int k)
{
    const auto [q, a] = set.slot[i][k];
    const BeamGroup& grp = set.groups[i][q];
    double v = 0.0;
    for (int b = 0; b < grp.size(); ++b) {
        if (b == a || grp.iui(a, b) == 0.0)
            continue;
        v += grp.iui(a, b) / pinv(i, grp.users[b]);
    }
    return v;
}

// Per-fraction throughput of UE (i,k) in nats/s/Hz (not yet weighted by the
// time fraction).
inline double tf_rate(const PrecoderSet& set, const Eigen::MatrixXd& pinv, int i, int k)
{
    const double sig = tf_interference(set, pinv, i, k);
    return std::log1p(set.alpha(i, k) / pinv(i, k) / (sig + set.sigma2));
}

// ---- QoS linearization (direct powers) ----

struct AffineConstraint {
    Eigen::VectorXd a; // over p flattened as i*users_per_cell + k
    double ub = 0.0;   // a.p <= ub
};

// The throughput constraint r_ik(p) >= threshold rewritten as one affine
// inequality per user: alpha p >= (e^r - 1)(lambda(p) + sigma2).
inline std::vector<AffineConstraint> qos_linearize(const PrecoderSet& set, const Eigen::MatrixXd& thresholds_nats)
{
    if (set.tf())
        throw std::invalid_argument("qos_linearize: direct-power modes only");
    const int cells = set.cells, users = set.users_per_cell;
    std::vector<AffineConstraint> rows;
    rows.reserve(cells * users);
    for (int i = 0; i < cells; ++i) {
        for (int k = 0; k < users; ++k) {
            const double gamma = std::expm1(thresholds_nats(i, k));
            AffineConstraint row;
            row.a = Eigen::VectorXd::Zero(cells * users);
            row.a(i * users + k) -= set.alpha(i, k);
            const auto [q, a_slot] = set.slot[i][k];
            const BeamGroup& grp = set.groups[i][q];
            for (int b = 0; b < grp.size(); ++b)
                row.a(i * users + grp.users[b]) += gamma * grp.iui(a_slot, b);
            for (int j = 0; j < cells; ++j) {
                if (j == i)
                    continue;
                const double beta = set.ici_beta[j](i, k);
                for (size_t qq = 0; qq < set.groups[j].size(); ++qq) {
                    const BeamGroup& other = set.groups[j][qq];
                    for (int b = 0; b < other.size(); ++b)
                        row.a(j * users + other.users[b]) += gamma * beta * other.norm_sq(b);
                }
            }
            row.ub = -gamma * set.sigma2;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

// ---- energy efficiency ----

// EE in bits/Joule/Hz. For TF modes, tau carries the two time fractions and
// powers are inverse powers; otherwise tau is ignored.
inline double evaluate_ee(const PrecoderSet& set, const NetworkConfig& config, const Eigen::MatrixXd& powers,
                          const std::array<double, 2>* tau = nullptr)
{
    if (!set.tf()) {
        const double phi = total_throughput(set, powers);
        return phi / consumed_power(set, config, powers) / ln2;
    }
    if (tau == nullptr)
        throw std::invalid_argument("evaluate_ee: TF mode needs time fractions");
    double phi = 0.0;
    double tx = 0.0;
    for (int i = 0; i < set.cells; ++i) {
        for (int q = 0; q < 2; ++q) {
            const BeamGroup& grp = set.groups[i][q];
            double sum = 0.0;
            for (int a = 0; a < grp.size(); ++a)
                sum += tf_rate(set, powers, i, grp.users[a]);
            phi += (*tau)[q] * sum;
            tx += (*tau)[q] * group_power(set, i, q, powers);
        }
    }
    const double pi = config.amp_drain_reciprocal * tx + set.cells * config.circuit_power_w();
    return phi / pi / ln2;
}

} // namespace mmee
