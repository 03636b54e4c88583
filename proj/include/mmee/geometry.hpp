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
#include "mmee/rng.hpp"

namespace mmee {

// Ring bounds for user placement, as fractions of the cell radius. Near UEs
// sit on an inner ring; cell-edge UEs sit just inside the hexagon boundary.
inline constexpr double near_ring_lo = 0.10;
inline constexpr double near_ring_hi = 0.40;
inline constexpr double far_ring_lo = 0.80;
inline constexpr double far_ring_hi = 0.95;

// Hexagon with circumradius R centered at the origin, edge normals at
// 0, 60, ..., 300 degrees (apothem sqrt(3)/2 * R). Adjacent cells then sit
// sqrt(3)*R apart and share an edge; three cells share the vertex at 30
// degrees.
inline double hexagon_apothem(double radius) { return 0.8660254037844386 * radius; }

// Distance from the center to the hexagon boundary along direction phi.
inline double hexagon_boundary(double radius, double phi)
{
    const double sector = 1.0471975511965976; // 60 degrees
    double d = std::fmod(std::fabs(phi), sector);
    if (d > sector / 2.0)
        d = sector - d;
    return hexagon_apothem(radius) / std::cos(d);
}

inline bool inside_hexagon(const Eigen::Vector2d& p, double radius)
{
    const double a = hexagon_apothem(radius) * (1.0 + 1e-12);
    for (int k = 0; k < 3; ++k) {
        const double phi = k * 1.0471975511965976;
        if (std::fabs(p.x() * std::cos(phi) + p.y() * std::sin(phi)) > a)
            return false;
    }
    return true;
}

struct Geometry {
    std::vector<Eigen::Vector2d> bs_positions;              // km
    std::vector<std::vector<Eigen::Vector2d>> ue_positions; // [cell][user], km
    std::vector<std::vector<bool>> near_mask;               // [cell][user]
};

inline std::vector<Eigen::Vector2d> bs_layout(int cell_count, double radius)
{
    const double d = std::sqrt(3.0) * radius;
    switch (cell_count) {
    case 1:
        return {{0.0, 0.0}};
    case 2:
        return {{0.0, 0.0}, {d, 0.0}};
    case 3:
        return {{0.0, 0.0}, {d, 0.0}, {d / 2.0, 1.5 * radius}};
    default:
        throw std::invalid_argument("bs_layout: cell_count must be 1, 2 or 3");
    }
}

// Drops near UEs on an inner ring and cell-edge UEs just inside the hexagon
// boundary, with uniform angular spacing jittered per seed. Near UEs occupy
// indices 0..near_count-1 in every cell. Deterministic for a given seed.
inline Geometry place_users(const NetworkConfig& config, Rng& rng)
{
    config.validate();
    const double radius = config.cell_radius_km;

    Geometry geo;
    geo.bs_positions = bs_layout(config.cell_count, radius);
    geo.ue_positions.resize(config.cell_count);
    geo.near_mask.resize(config.cell_count);

    for (int i = 0; i < config.cell_count; ++i) {
        auto& ues = geo.ue_positions[i];
        auto& mask = geo.near_mask[i];
        ues.reserve(config.users_per_cell);

        auto ring = [&](int count, bool near) {
            for (int m = 0; m < count; ++m) {
                const double jitter = rng.uniform(-0.15, 0.15);
                const double angle = 2.0 * M_PI * (m + 0.5 + jitter) / count;
                double r;
                if (near) {
                    r = rng.uniform(near_ring_lo, near_ring_hi) * radius;
                } else {
                    // measured against the hexagon boundary so the UE stays
                    // inside the cell at every angle
                    r = rng.uniform(far_ring_lo, far_ring_hi) * hexagon_boundary(radius, angle);
                }
                ues.push_back(geo.bs_positions[i] + r * Eigen::Vector2d(std::cos(angle), std::sin(angle)));
                mask.push_back(near);
            }
        };
        ring(config.near_count, true);
        ring(config.far_count, false);
    }
    return geo;
}

} // namespace mmee
