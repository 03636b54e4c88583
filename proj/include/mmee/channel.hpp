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
#include <stdexcept>
#include <vector>

#include "mmee/config.hpp"
#include "mmee/geometry.hpp"
#include "mmee/rng.hpp"

namespace mmee {

// Linear-scale large-scale gain for one link: fixed + slope*log10(R[km]) dB
// path loss plus a shadowing term in dB.
inline double large_scale_gain(double distance_km, double shadow_db, const NetworkConfig& config)
{
    if (!(distance_km > 0.0))
        throw std::invalid_argument("large_scale_gain: distance must be positive");
    const double loss_db = config.pathloss_fixed_db + config.pathloss_slope_db * std::log10(distance_km) + shadow_db;
    return std::pow(10.0, -loss_db / 10.0);
}

// Exponential correlation for a rows x cols planar array: the entry for
// antennas (p,q) and (m,n) is rho^(|p-m|+|q-n|). Antennas are indexed
// row-major. The result is real symmetric positive definite (a Kronecker
// product of two one-dimensional exponential correlation matrices) with unit
// diagonal; it is returned as a complex Hermitian matrix.
inline Eigen::MatrixXcd correlation_matrix(double rho, int rows, int cols)
{
    if (!(rho > 0.0) || !(rho < 1.0))
        throw std::invalid_argument("correlation_matrix: rho must lie in (0,1)");
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("correlation_matrix: array dimensions must be positive");
    const int n = rows * cols;
    Eigen::MatrixXcd theta(n, n);
    for (int a = 0; a < n; ++a) {
        const int pa = a / cols, qa = a % cols;
        for (int b = 0; b < n; ++b) {
            const int pb = b / cols, qb = b % cols;
            theta(a, b) = std::pow(rho, std::abs(pa - pb) + std::abs(qa - qb));
        }
    }
    return theta;
}

// Hermitian PSD square root by eigendecomposition. Eigenvalues below zero by
// more than a 1e-10 relative tolerance are rejected; small negative values
// from rounding are clamped to zero.
inline Eigen::MatrixXcd correlation_root(const Eigen::MatrixXcd& theta)
{
    if (theta.rows() != theta.cols())
        throw std::invalid_argument("correlation_root: matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(theta);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("correlation_root: eigendecomposition failed");
    Eigen::VectorXd ev = eig.eigenvalues();
    const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (ev.minCoeff() < -1e-10 * scale)
        throw std::invalid_argument("correlation_root: matrix is not positive semidefinite");
    Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

// One correlated small-scale channel vector: Theta^(1/2) w with w standard
// circularly symmetric complex Gaussian.
inline Eigen::VectorXcd draw_channel_given_root(const Eigen::MatrixXcd& root, Rng& rng)
{
    Eigen::VectorXcd w(root.cols());
    for (Eigen::Index v = 0; v < w.size(); ++v)
        w(v) = rng.complex_gaussian();
    return root * w;
}

inline Eigen::VectorXcd draw_channel(const Eigen::MatrixXcd& theta, Rng& rng)
{
    return draw_channel_given_root(correlation_root(theta), rng);
}

// Large- and small-scale state of the whole network for one Monte-Carlo
// trial. Immutable after construction; safe to share across threads.
struct ChannelRealization {
    int cells = 0;
    int users = 0; // per cell
    std::vector<Eigen::MatrixXcd> theta; // [bs], N x N
    // beta[j](i,k): linear large-scale gain from BS j to UE (i,k)
    std::vector<Eigen::MatrixXd> beta;
    // h[j][i]: N x users matrix, column k is the small-scale vector from BS j
    // to UE (i,k)
    std::vector<std::vector<Eigen::MatrixXcd>> h;
    double noise_power_w = 0.0;
};

// Assembles a realization: path loss plus lognormal shadowing per link, and
// correlated small-scale vectors drawn with the transmitting BS's
// correlation root. Draw order is fixed (BS-major, then cell, then user) so
// a seed reproduces the realization exactly.
inline ChannelRealization build_realization(const NetworkConfig& config, const Geometry& geo, Rng& rng)
{
    config.validate();
    const int n = config.antennas();

    ChannelRealization real;
    real.cells = config.cell_count;
    real.users = config.users_per_cell;
    real.noise_power_w = config.noise_power_w();

    const Eigen::MatrixXcd theta = correlation_matrix(config.correlation_rho, config.antenna_rows, config.antenna_cols);
    const Eigen::MatrixXcd root = correlation_root(theta);
    real.theta.assign(real.cells, theta);

    real.beta.assign(real.cells, Eigen::MatrixXd(real.cells, real.users));
    real.h.assign(real.cells, std::vector<Eigen::MatrixXcd>(real.cells, Eigen::MatrixXcd(n, real.users)));

    for (int j = 0; j < real.cells; ++j) {
        for (int i = 0; i < real.cells; ++i) {
            for (int k = 0; k < real.users; ++k) {
                const double dist = (geo.ue_positions[i][k] - geo.bs_positions[j]).norm();
                const double shadow = config.shadowing_std_db * rng.gaussian();
                real.beta[j](i, k) = large_scale_gain(dist, shadow, config);
                real.h[j][i].col(k) = draw_channel_given_root(root, rng);
            }
        }
    }
    return real;
}

} // namespace mmee
