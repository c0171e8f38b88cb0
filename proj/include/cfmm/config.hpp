// SPDX-License-Identifier: Apache-2.0
//
// cfmm: system-level simulator for cell-free mmWave massive MIMO networks
// Copyright (C) 2026 The cfmm authors
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
// ------------------------------------------------------------------------

#ifndef CFMM_CONFIG_HPP
#define CFMM_CONFIG_HPP

#include "cfmm/types.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>

namespace cfmm
{
    enum class PilotStrategy
    {
        rpa,  // pure random
        brpa, // balanced (cyclic) random
        dcpa  // dissimilarity-cluster
    };

    std::string to_string(PilotStrategy s);
    PilotStrategy pilot_strategy_from_string(const std::string &s);

    struct SystemParams
    {
        double carrier_frequency_hz = 28e9;
        double bandwidth_hz = 20e6;
        double area_side_m = 200.0; // D
        double ap_height_m = 15.0;
        double ms_height_m = 1.65;
        std::size_t num_aps = 16;         // M
        std::size_t num_users = 20;       // K
        std::size_t num_antennas = 16;    // N
        std::size_t num_rf_chains = 4;    // L
        std::size_t coherence_length = 200; // tau_c, samples
        std::size_t pilot_length = 15;    // tau_p, samples
    };

    struct PowerParams
    {
        double ap_power_w = 0.2;    // P_m (per AP average)
        double ms_power_w = 0.1;    // P_u
        double pilot_power_w = 0.1; // P_p
    };

    struct NoiseParams
    {
        double ms_noise_figure_db = 9.0;
        double lna_noise_figure_db = 1.6;
        double lna_gain_db = 22.0;
        double phase_shifter_loss_db = 3.0; // L_PS
        double combiner_loss_db = 3.0;      // L_PC,in (per input)
        double rf_noise_figure_db = 7.0;
    };

    struct FronthaulParams
    {
        double capacity_dl = 64.0; // bit/s/Hz
        double capacity_ul = 64.0; // bit/s/Hz
    };

    // Floating-intercept path loss fit for one propagation condition.
    struct PathLossFit
    {
        double alpha_db;
        double beta;
        double shadow_std_db;
    };

    // 28 GHz constants of the clustered mmWave model.
    struct ChannelParams
    {
        double outage_length_m = 30.0; // 1/a_out
        double outage_offset = 5.2;    // b_out
        double los_length_m = 67.1;    // 1/a_LOS
        PathLossFit los{61.4, 2.0, 5.8};
        PathLossFit nlos{72.0, 2.92, 8.7};
        double mean_clusters = 1.8;          // sigma_C
        double delay_spread_factor = 2.8;    // r_tau
        double cluster_power_std_db = 4.0;   // zeta
        double azimuth_spread_deg = 10.2;    // mean rms azimuth spread at the AP
        double elevation_spread_deg = 0.0;   // mean rms elevation spread at the AP
        std::size_t paths_per_cluster = 10;  // P_mk
    };

    struct ShadowingParams
    {
        double decorrelation_m = 50.0;
        double ap_share = 0.5; // delta: weight of the AP-side component
    };

    struct SimulationParams
    {
        std::uint64_t seed = 1;
        std::size_t num_drops = 20;
        std::size_t mc_realizations = 50;
        std::size_t mc_min_realizations = 10;
        PilotStrategy pilot_strategy = PilotStrategy::dcpa;
        bool perfect_csi = false;
    };

    struct SolverParams
    {
        std::size_t bcd_max_iterations = 50;
        double bcd_tolerance = 1e-3;       // relative min-rate change
        double bisection_tolerance = 1e-4; // relative bracket width
        double root_tolerance = 1e-9;      // absolute, in bit/s/Hz
        std::size_t root_max_iterations = 200;
        double sigma2_min = 1e-18;         // quantization noise floor, W
        double fronthaul_tolerance = 1e-3; // relative of 2^C
    };

    struct SimConfig
    {
        SystemParams system;
        PowerParams power;
        NoiseParams noise;
        FronthaulParams fronthaul;
        ChannelParams channel;
        ShadowingParams shadowing;
        SimulationParams simulation;
        SolverParams solver;

        std::size_t M() const { return system.num_aps; }
        std::size_t K() const { return system.num_users; }
        std::size_t N() const { return system.num_antennas; }
        std::size_t L() const { return system.num_rf_chains; }
        // Active RF chains per AP.
        std::size_t active_rf_chains() const { return std::min(system.num_users, system.num_rf_chains); }

        // Throws ConfigError on the first violated invariant.
        void validate() const;
    };

    nlohmann::json to_json(const SimConfig &cfg);

    // Missing keys keep their defaults; unknown keys are rejected.
    SimConfig config_from_json(const nlohmann::json &j);
    SimConfig load_config(const std::string &path);

    // Sets a dotted key such as "fronthaul.capacity_dl" and revalidates.
    SimConfig with_override(const SimConfig &cfg, const std::string &dotted_key, const nlohmann::json &value);

    // Large-network profile: M=100, N=64, L=8, K=25, 100 Monte Carlo realizations.
    SimConfig full_profile();
}

#endif
