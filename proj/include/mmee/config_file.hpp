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
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmee/sweep.hpp"

namespace mmee {

// Parse failure with the offending line and field.
struct ConfigError : std::runtime_error {
    int line;
    std::string field;
    ConfigError(int line_, std::string field_, const std::string& what)
        : std::runtime_error("config line " + std::to_string(line_) + ", field '" + field_ + "': " + what),
          line(line_), field(std::move(field_))
    {
    }
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty())
                out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty())
        out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& v, int line, const std::string& field)
{
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(line, field, "expected a number, got '" + v + "'");
    }
}

inline long long parse_int(const std::string& v, int line, const std::string& field)
{
    try {
        size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size())
            throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(line, field, "expected an integer, got '" + v + "'");
    }
}

} // namespace detail

// Flat key-value configuration with a [sweep] section for the grid. Every
// physics key has the standard default, so a minimal file only names the
// sweep axes. Unknown keys are rejected with their line number.
//
//   # physics
//   cell_count = 1
//   antenna_rows = 8
//   ...
//   [sweep]
//   modes = cwzf, rzf, tf-zf, tf-rzf
//   user_counts = 20, 40, 60
//   rho_values = 0.9
//   thresholds_bps = 0.4
//   trials = 10
inline SweepSpec parse_sweep_config(std::istream& in)
{
    SweepSpec spec;
    spec.modes = {SweepMode::Cwzf, SweepMode::Rzf, SweepMode::TfZf, SweepMode::TfRzf};
    spec.user_counts = {20, 40};
    spec.rho_values = {0.9};
    spec.thresholds_bps = {0.4};

    std::string section;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = detail::trim(raw);
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = detail::trim(line.substr(0, hash));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(lineno, line, "unterminated section header");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "sweep" && section != "network")
                throw ConfigError(lineno, section, "unknown section (expected [network] or [sweep])");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, line, "expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError(lineno, key, "empty key or value");

        NetworkConfig& net = spec.base;
        if (section == "sweep") {
            if (key == "modes") {
                spec.modes.clear();
                for (const auto& tok : detail::split_list(value)) {
                    const auto m = parse_sweep_mode(tok);
                    if (!m)
                        throw ConfigError(lineno, key, "unknown mode '" + tok + "'");
                    spec.modes.push_back(*m);
                }
            } else if (key == "user_counts") {
                spec.user_counts.clear();
                for (const auto& tok : detail::split_list(value))
                    spec.user_counts.push_back(static_cast<int>(detail::parse_int(tok, lineno, key)));
            } else if (key == "rho_values") {
                spec.rho_values.clear();
                for (const auto& tok : detail::split_list(value))
                    spec.rho_values.push_back(detail::parse_double(tok, lineno, key));
            } else if (key == "thresholds_bps") {
                spec.thresholds_bps.clear();
                for (const auto& tok : detail::split_list(value))
                    spec.thresholds_bps.push_back(detail::parse_double(tok, lineno, key));
            } else if (key == "trials") {
                spec.trials = static_cast<int>(detail::parse_int(value, lineno, key));
            } else if (key == "base_seed") {
                spec.base_seed = static_cast<std::uint64_t>(detail::parse_int(value, lineno, key));
            } else if (key == "workers") {
                spec.workers = static_cast<int>(detail::parse_int(value, lineno, key));
            } else if (key == "cwzf_qos_bps_hz") {
                spec.cwzf_threshold_bps = detail::parse_double(value, lineno, key);
            } else {
                throw ConfigError(lineno, key, "unknown sweep key");
            }
            continue;
        }
        if (key == "cell_count" || key == "scenario") {
            if (key == "scenario") {
                if (value == "single")
                    spec.cell_count = 1;
                else if (value == "two")
                    spec.cell_count = 2;
                else if (value == "three")
                    spec.cell_count = 3;
                else
                    throw ConfigError(lineno, key, "expected single, two or three");
            } else {
                spec.cell_count = static_cast<int>(detail::parse_int(value, lineno, key));
            }
            net.cell_count = spec.cell_count;
        } else if (key == "antenna_rows") {
            net.antenna_rows = static_cast<int>(detail::parse_int(value, lineno, key));
        } else if (key == "antenna_cols") {
            net.antenna_cols = static_cast<int>(detail::parse_int(value, lineno, key));
        } else if (key == "users_per_cell") {
            net.users_per_cell = static_cast<int>(detail::parse_int(value, lineno, key));
            net.near_count = net.users_per_cell / 2;
            net.far_count = net.users_per_cell - net.near_count;
        } else if (key == "cell_radius_km") {
            net.cell_radius_km = detail::parse_double(value, lineno, key);
        } else if (key == "correlation_rho") {
            net.correlation_rho = detail::parse_double(value, lineno, key);
        } else if (key == "carrier_ghz") {
            net.carrier_ghz = detail::parse_double(value, lineno, key);
        } else if (key == "bandwidth_mhz") {
            net.bandwidth_hz = detail::parse_double(value, lineno, key) * 1e6;
        } else if (key == "pathloss_fixed_db") {
            net.pathloss_fixed_db = detail::parse_double(value, lineno, key);
        } else if (key == "pathloss_slope_db") {
            net.pathloss_slope_db = detail::parse_double(value, lineno, key);
        } else if (key == "shadowing_std_db") {
            net.shadowing_std_db = detail::parse_double(value, lineno, key);
        } else if (key == "noise_density_dbm_hz") {
            net.noise_density_dbm_hz = detail::parse_double(value, lineno, key);
        } else if (key == "noise_figure_db") {
            net.noise_figure_db = detail::parse_double(value, lineno, key);
        } else if (key == "drain_efficiency") {
            const double eff = detail::parse_double(value, lineno, key);
            if (!(eff > 0.0) || eff > 1.0)
                throw ConfigError(lineno, key, "drain efficiency must lie in (0,1]");
            net.amp_drain_reciprocal = 1.0 / eff;
        } else if (key == "antenna_circuit_power_mw") {
            net.antenna_circuit_power_w = detail::parse_double(value, lineno, key) * 1e-3;
        } else if (key == "static_power_dbm") {
            net.static_power_w = std::pow(10.0, detail::parse_double(value, lineno, key) / 10.0) * 1e-3;
        } else if (key == "bs_power_dbm") {
            net.bs_power_budget_w = std::pow(10.0, detail::parse_double(value, lineno, key) / 10.0) * 1e-3;
        } else if (key == "qos_bps_hz") {
            net.qos_bps_hz = detail::parse_double(value, lineno, key);
        } else if (key == "rng_seed") {
            spec.base_seed = static_cast<std::uint64_t>(detail::parse_int(value, lineno, key));
        } else {
            throw ConfigError(lineno, key, "unknown key");
        }
    }
    return spec;
}

inline SweepSpec load_sweep_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    return parse_sweep_config(in);
}

} // namespace mmee
