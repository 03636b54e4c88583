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

#include "mmee/bounds.hpp"
#include "mmee/channel.hpp"
#include "mmee/config.hpp"
#include "mmee/convex.hpp"
#include "mmee/cwzf.hpp"
#include "mmee/ee_direct.hpp"
#include "mmee/ee_tf.hpp"
#include "mmee/geometry.hpp"
#include "mmee/lp.hpp"
#include "mmee/precoding.hpp"
#include "mmee/rates.hpp"
#include "mmee/report.hpp"
#include "mmee/rng.hpp"
#include "mmee/solver_types.hpp"
#include "mmee/sweep.hpp"
#include "mmee/waterfill.hpp"
