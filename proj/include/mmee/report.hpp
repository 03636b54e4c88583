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
#include <vector>

namespace mmee {

enum class RunStatus { Converged, Infeasible, MaxIter };

inline const char* to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::Converged:
        return "converged";
    case RunStatus::Infeasible:
        return "infeasible";
    case RunStatus::MaxIter:
        return "max-iter";
    }
    return "?";
}

// Outcome of one optimization pipeline run.
struct EEReport {
    RunStatus status = RunStatus::Infeasible;
    int iterations = 0;
    // Objective trajectory t^(n) in nats/Joule/Hz; nondecreasing for
    // path-following runs.
    std::vector<double> ee_trace;
    // Decision variables: direct watts-scale powers, or inverse powers for
    // the time-fraction pipelines.
    Eigen::MatrixXd powers;
    std::array<double, 2> tau{1.0, 0.0}; // time fractions (TF only)
    bool tf_mode = false;
    Eigen::MatrixXd rates_bps;  // effective per-user throughput, bps/Hz
    Eigen::VectorXd tx_power_w; // per-cell transmit power (fraction-weighted)
    double ee_bits_per_joule_hz = 0.0;
};

} // namespace mmee
