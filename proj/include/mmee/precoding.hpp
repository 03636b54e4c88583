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
#include <stdexcept>
#include <utility>
#include <vector>

#include "mmee/channel.hpp"
#include "mmee/config.hpp"

namespace mmee {

// Thrown when a channel matrix cannot support zero-forcing: more users than
// antennas, or a Gram matrix whose condition number exceeds the limit. This
// is the mechanism by which plain ZF stops serving large user counts.
struct IllConditionedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class BeamMode { Zf, Rzf, TfZf, TfRzf };

inline bool is_tf(BeamMode m) { return m == BeamMode::TfZf || m == BeamMode::TfRzf; }
inline bool is_rzf(BeamMode m) { return m == BeamMode::Rzf || m == BeamMode::TfRzf; }

inline const char* to_string(BeamMode m)
{
    switch (m) {
    case BeamMode::Zf:
        return "zf";
    case BeamMode::Rzf:
        return "rzf";
    case BeamMode::TfZf:
        return "tf-zf";
    case BeamMode::TfRzf:
        return "tf-rzf";
    }
    return "?";
}

// Right inverse of H^H: F = H (H^H H)^-1, so that H^H F = I. Requires the
// Gram matrix condition number below cond_limit.
inline Eigen::MatrixXcd zf_precoder(const Eigen::MatrixXcd& H, double cond_limit = 1e12)
{
    const Eigen::Index k = H.cols();
    if (k > H.rows())
        throw IllConditionedError("zf_precoder: more users than antennas");
    const Eigen::MatrixXcd gram = H.adjoint() * H;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    if (!(lmin > 0.0) || lmax / lmin > cond_limit)
        throw IllConditionedError("zf_precoder: Gram matrix is ill-conditioned");
    return H * gram.ldlt().solve(Eigen::MatrixXcd::Identity(k, k));
}

// Regularized right inverse: F = H G with G = (H^H H + eta I)^-1. The
// identity H^H F = I - eta G holds. Returns (F, G).
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> rzf_precoder(const Eigen::MatrixXcd& H, double eta)
{
    if (!(eta > 0.0))
        throw std::invalid_argument("rzf_precoder: eta must be positive");
    const Eigen::Index k = H.cols();
    Eigen::MatrixXcd gram = H.adjoint() * H;
    gram.diagonal().array() += eta;
    Eigen::MatrixXcd g = gram.ldlt().solve(Eigen::MatrixXcd::Identity(k, k));
    return {H * g, std::move(g)};
}

// eta = (simultaneously served users) * sigma^2 / P_max.
inline double regularization_eta(int group_size, double sigma2, double p_max)
{
    if (group_size <= 0 || !(sigma2 > 0.0) || !(p_max > 0.0))
        throw std::invalid_argument("regularization_eta: nonpositive input");
    return group_size * sigma2 / p_max;
}

// Harmonic mean of the serving-link large-scale gains of a user group. The
// regularization loading is referred through this gain: the noise the
// precoder balances against is what the weakest links see, so the effective
// noise fed to regularization_eta is sigma^2 / beta_harm. With the raw
// wattage instead, eta would sit ~14 orders of magnitude below the Gram
// scale and regularized ZF would never depart from plain ZF.
inline double harmonic_mean_gain(const ChannelRealization& real, int cell, const std::vector<int>& users)
{
    double inv = 0.0;
    for (int k : users)
        inv += 1.0 / real.beta[cell](cell, k);
    return users.size() / inv;
}

// Time-fraction service groups per cell. Near UEs are indices
// 0..near_count-1. Cell 1 serves near UEs in the first fraction and far UEs
// in the second; every other cell does the opposite, so cell-edge UEs are
// served while the neighbours serve their near UEs.
inline std::vector<std::array<std::vector<int>, 2>> tf_partition(const NetworkConfig& config)
{
    if (config.cell_count < 1 || config.cell_count > 3)
        throw std::invalid_argument("tf_partition: cell_count must be 1, 2 or 3");
    std::vector<int> near, far;
    for (int k = 0; k < config.near_count; ++k)
        near.push_back(k);
    for (int k = config.near_count; k < config.users_per_cell; ++k)
        far.push_back(k);

    std::vector<std::array<std::vector<int>, 2>> part(config.cell_count);
    part[0] = {near, far};
    for (int i = 1; i < config.cell_count; ++i)
        part[i] = {far, near};
    return part;
}

// One simultaneously served user group and everything the optimizers need
// about it: fixed beam directions plus the scalar coefficients they induce.
struct BeamGroup {
    std::vector<int> users;  // user indices within the cell
    Eigen::MatrixXcd fbar;   // N x |users| beam directions
    Eigen::MatrixXcd g;      // (H^H H + eta I)^-1, RZF only
    double eta = 0.0;        // RZF only
    Eigen::VectorXd alpha;   // effective direct gain beta |h^H f|^2 per slot
    Eigen::VectorXd norm_sq; // ||f||^2 per slot
    // iui(a,b): interference coefficient at served user a caused by beam b;
    // multiplies p_b in direct modes and 1/p_b in TF modes. Zero diagonal.
    Eigen::MatrixXd iui;

    int size() const { return static_cast<int>(users.size()); }
};

struct PrecoderSet {
    BeamMode mode = BeamMode::Zf;
    int cells = 0;
    int users_per_cell = 0;
    double sigma2 = 0.0;
    std::vector<std::vector<BeamGroup>> groups; // [cell][group]; one group in
                                                // direct modes, two in TF
    std::vector<Eigen::MatrixXd> ici_beta;      // [j](i,k) = beta_{j,i,k}
    // (group, position) of user (i,k)
    std::vector<std::vector<std::pair<int, int>>> slot;

    bool tf() const { return is_tf(mode); }

    double alpha(int i, int k) const
    {
        const auto [q, a] = slot[i][k];
        return groups[i][q].alpha(a);
    }
    double norm_sq(int i, int k) const
    {
        const auto [q, a] = slot[i][k];
        return groups[i][q].norm_sq(a);
    }
    int group_of(int i, int k) const { return slot[i][k].first; }
};

// Fills beam directions (fbar, g, eta, users) for the requested mode; the
// derived scalar coefficients are left empty.
inline PrecoderSet build_beam_directions(const ChannelRealization& real, BeamMode mode, const NetworkConfig& config)
{
    PrecoderSet set;
    set.mode = mode;
    set.cells = real.cells;
    set.users_per_cell = real.users;
    set.groups.resize(real.cells);

    std::vector<std::array<std::vector<int>, 2>> part;
    if (is_tf(mode))
        part = tf_partition(config);

    for (int i = 0; i < real.cells; ++i) {
        std::vector<std::vector<int>> user_sets;
        if (is_tf(mode)) {
            if (config.near_count < 1 || config.far_count < 1)
                throw std::invalid_argument("time-fraction modes need at least one near and one far user");
            user_sets = {part[i][0], part[i][1]};
        } else {
            std::vector<int> all(real.users);
            for (int k = 0; k < real.users; ++k)
                all[k] = k;
            user_sets = {all};
        }

        for (const auto& users : user_sets) {
            BeamGroup grp;
            grp.users = users;
            Eigen::MatrixXcd h(real.h[i][i].rows(), users.size());
            for (size_t a = 0; a < users.size(); ++a)
                h.col(a) = real.h[i][i].col(users[a]);
            if (is_rzf(mode)) {
                const double noise_eff = real.noise_power_w / harmonic_mean_gain(real, i, users);
                grp.eta = regularization_eta(grp.size(), noise_eff, config.bs_power_budget_w);
                auto [f, g] = rzf_precoder(h, grp.eta);
                grp.fbar = std::move(f);
                grp.g = std::move(g);
            } else {
                grp.fbar = zf_precoder(h);
            }
            set.groups[i].push_back(std::move(grp));
        }
    }
    return set;
}

// Computes alpha, beam norms, inter-user coefficients and the intercell
// large-scale table for an already built set of beam directions.
inline void derive_coefficients(const ChannelRealization& real, PrecoderSet& set)
{
    if (static_cast<int>(set.groups.size()) != real.cells)
        throw std::invalid_argument("derive_coefficients: set does not match the realization");
    set.sigma2 = real.noise_power_w;
    set.ici_beta.assign(real.cells, Eigen::MatrixXd());
    for (int j = 0; j < real.cells; ++j)
        set.ici_beta[j] = real.beta[j];

    set.slot.assign(real.cells, std::vector<std::pair<int, int>>(real.users, {-1, -1}));
    for (int i = 0; i < real.cells; ++i) {
        for (size_t q = 0; q < set.groups[i].size(); ++q) {
            BeamGroup& grp = set.groups[i][q];
            const int sz = grp.size();
            if (grp.fbar.rows() != real.h[i][i].rows() || grp.fbar.cols() != sz)
                throw std::invalid_argument("derive_coefficients: beam/mode mismatch");
            grp.alpha.resize(sz);
            grp.norm_sq.resize(sz);
            grp.iui = Eigen::MatrixXd::Zero(sz, sz);
            for (int b = 0; b < sz; ++b)
                grp.norm_sq(b) = grp.fbar.col(b).squaredNorm();
            for (int a = 0; a < sz; ++a) {
                const int k = grp.users[a];
                set.slot[i][k] = {static_cast<int>(q), a};
                const double beta = real.beta[i](i, k);
                const Eigen::RowVectorXcd cross = real.h[i][i].col(k).adjoint() * grp.fbar;
                grp.alpha(a) = beta * std::norm(cross(a));
                if (is_rzf(set.mode)) {
                    // alpha = beta (1 - eta g_aa)^2 must stay positive
                    const double diag = 1.0 - grp.eta * grp.g(a, a).real();
                    if (!(diag > 0.0))
                        throw std::runtime_error("derive_coefficients: RZF diagonal 1 - eta g_kk not positive");
                    // inter-user coefficients collapse to eta^2 beta |g_ab|^2
                    for (int b = 0; b < sz; ++b)
                        if (b != a)
                            grp.iui(a, b) = grp.eta * grp.eta * beta * std::norm(grp.g(a, b));
                } else {
                    for (int b = 0; b < sz; ++b)
                        if (b != a)
                            grp.iui(a, b) = beta * std::norm(cross(b));
                }
            }
        }
    }
}

inline PrecoderSet make_precoders(const ChannelRealization& real, BeamMode mode, const NetworkConfig& config)
{
    PrecoderSet set = build_beam_directions(real, mode, config);
    derive_coefficients(real, set);
    return set;
}

// chi for one service group: sum ||f||^2 p in direct modes, sum ||f||^2 / p
// in TF modes (p then being inverse-power variables).
inline double group_power(const PrecoderSet& set, int i, int q, const Eigen::MatrixXd& powers)
{
    const BeamGroup& grp = set.groups[i][q];
    double total = 0.0;
    for (int a = 0; a < grp.size(); ++a) {
        const double p = powers(i, grp.users[a]);
        if (set.tf()) {
            if (!(p > 0.0))
                throw std::invalid_argument("group_power: inverse-power entries must be positive");
            total += grp.norm_sq(a) / p;
        } else {
            total += grp.norm_sq(a) * p;
        }
    }
    return total;
}

// Per-cell transmit power function. Direct modes: chi_i(p). TF modes: the
// unweighted sum of the two group terms; callers weight by the time
// fractions where those are known.
inline Eigen::VectorXd transmit_power(const PrecoderSet& set, const Eigen::MatrixXd& powers)
{
    Eigen::VectorXd out(set.cells);
    for (int i = 0; i < set.cells; ++i) {
        double total = 0.0;
        for (size_t q = 0; q < set.groups[i].size(); ++q)
            total += group_power(set, i, static_cast<int>(q), powers);
        out(i) = total;
    }
    return out;
}

} // namespace mmee
