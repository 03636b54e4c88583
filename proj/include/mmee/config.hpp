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
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mmee {

inline constexpr double ln2 = 0.69314718055994530941723212145818;

// Scenario geometry, radio physics and optimization thresholds for one run.
// Defaults are the standard urban-macro setup: hexagonal cells of 1 km
// radius, an 8x8 uniform planar array per base station, 46 dBm transmit
// budget, 10 MHz bandwidth, -174 dBm/Hz noise density with a 9 dB noise
// figure, 8 dB lognormal shadowing and 128.1 + 37.6 log10(R[km]) dB path
// loss.
struct NetworkConfig {
    int cell_count = 1; // 1, 2 or 3
    int antenna_rows = 8;
    int antenna_cols = 8;
    int users_per_cell = 40;
    int near_count = 20; // UEs close to their BS; indices 0..near_count-1
    int far_count = 20;  // cell-edge UEs; the remaining indices
    double cell_radius_km = 1.0;
    double correlation_rho = 0.9; // exponential antenna correlation, in (0,1)
    double carrier_ghz = 2.0;
    double bandwidth_hz = 10e6;
    double pathloss_fixed_db = 128.1;
    double pathloss_slope_db = 37.6; // per decade of distance in km
    double shadowing_std_db = 8.0;
    double noise_density_dbm_hz = -174.0;
    double noise_figure_db = 9.0;
    double amp_drain_reciprocal = 1.0 / 0.388; // transmit power multiplier
    double antenna_circuit_power_w = 0.189;    // 189 mW per antenna
    double static_power_w = 10.0;              // 40 dBm non-transmission power
    double bs_power_budget_w = 39.810717055349734; // 46 dBm
    double qos_bps_hz = 0.4;      // per-user throughput threshold
    double cwzf_qos_bps_hz = 0.6; // inflated threshold used by cell-wide ZF
    std::uint64_t rng_seed = 1;

    int antennas() const { return antenna_rows * antenna_cols; }

    // Receiver noise power over the full bandwidth, in watts.
    double noise_power_w() const
    {
        const double dbm_hz = noise_density_dbm_hz + noise_figure_db;
        return std::pow(10.0, dbm_hz / 10.0) * 1e-3 * bandwidth_hz;
    }

    // Per-BS power drawn regardless of transmission: N*Pa + Pc, watts.
    double circuit_power_w() const
    {
        return antennas() * antenna_circuit_power_w + static_power_w;
    }

    double qos_nats() const { return qos_bps_hz * ln2; }
    double cwzf_qos_nats() const { return cwzf_qos_bps_hz * ln2; }

    // Throws std::invalid_argument naming the offending field.
    void validate() const
    {
        auto fail = [](const std::string& what) { throw std::invalid_argument("NetworkConfig: " + what); };
        if (cell_count < 1 || cell_count > 3)
            fail("cell_count must be 1, 2 or 3");
        if (antenna_rows < 1 || antenna_cols < 1)
            fail("antenna_rows/antenna_cols must be positive");
        if (users_per_cell < 1)
            fail("users_per_cell must be positive");
        if (near_count < 0 || far_count < 0 || near_count + far_count != users_per_cell)
            fail("near_count + far_count must equal users_per_cell");
        if (!(cell_radius_km > 0.0))
            fail("cell_radius_km must be positive");
        if (!(correlation_rho > 0.0) || !(correlation_rho < 1.0))
            fail("correlation_rho must lie in (0,1)");
        if (!(bandwidth_hz > 0.0))
            fail("bandwidth_hz must be positive");
        if (!(amp_drain_reciprocal >= 1.0))
            fail("amp_drain_reciprocal must be >= 1");
        if (!(antenna_circuit_power_w > 0.0) || !(static_power_w > 0.0) || !(bs_power_budget_w > 0.0))
            fail("powers must be strictly positive");
        if (!(shadowing_std_db >= 0.0))
            fail("shadowing_std_db must be nonnegative");
        if (qos_bps_hz < 0.0)
            fail("qos_bps_hz must be nonnegative");
        if (cwzf_qos_bps_hz < qos_bps_hz)
            fail("cwzf_qos_bps_hz must be >= qos_bps_hz");
    }
};

// Compensation rule for the cell-wide ZF threshold when none is pinned:
// +0.2 bps/Hz for thresholds up to 0.7 bps/Hz, +0.4 above. The inflation
// covers the inter-cell interference the cell-wide scheme ignores; a
// single-cell network has none, so nothing is added there.
inline double default_cwzf_threshold(double qos_bps_hz, int cell_count = 3)
{
    if (cell_count <= 1)
        return qos_bps_hz;
    return qos_bps_hz + (qos_bps_hz <= 0.7 ? 0.2 : 0.4);
}

} // namespace mmee
