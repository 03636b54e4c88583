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

namespace mmee {

namespace detail {

// Nearest power-of-two reciprocal, so equilibration scaling is exact in
// floating point: v * pow2_scale(v) lies in [1, 2).
inline double pow2_scale(double v)
{
    if (!(v > 0.0) || !std::isfinite(v))
        return 1.0;
    int e = 0;
    std::frexp(v, &e);
    return std::ldexp(1.0, -e + 1);
}

} // namespace detail

enum class Sense { Minimize, Maximize };

enum class SolveStatus { Optimal, Infeasible, MaxIter };

struct SolveReport {
    Eigen::VectorXd x;
    double objective = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIter;
    // Phase-1 optimum when status == Infeasible: how far the constraint set
    // is from admitting a point (positive means provably empty interior).
    double infeasibility = 0.0;
};

} // namespace mmee
