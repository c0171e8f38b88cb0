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

#ifndef CFMM_RATES_HPP
#define CFMM_RATES_HPP

#include "cfmm/context.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace cfmm
{
    struct ZfFilters
    {
        std::size_t active_chains = 0;
        CMatrix precoder; // W_d = G_hat^* (G_hat^T G_hat^*)^-1, (M L_A) x K
        CMatrix combiner; // W_u = W_d^T

        auto block(std::size_t m) const
        {
            return precoder.middleRows(static_cast<Eigen::Index>(m * active_chains),
                                       static_cast<Eigen::Index>(active_chains));
        }
    };

    // Throws SingularChannelError when the stacked estimate is rank deficient.
    ZfFilters build_zf(const CMatrix &estimate, std::size_t active_chains);

    // One joint draw of small-scale fading and pilot noise.
    struct Realization
    {
        CMatrix channel;  // true stacked equivalent channel G, (M L_A) x K
        CMatrix estimate; // G_hat, zero rows for unserved (m, k) unless CSI is perfect
        ZfFilters zf;

        CMatrix error() const { return channel - estimate; }
    };

    // Realization i of a drop. Fading of link (m, k) and pilot noise at AP m
    // come from substreams keyed by (i, m, k) and (i, m).
    Realization draw_realization(const DropContext &ctx, std::uint64_t seed, std::size_t index);

    struct ExpectationSet
    {
        std::size_t num_aps = 0;
        std::size_t num_users = 0;
        std::size_t active_chains = 0;
        std::size_t samples = 0;
        std::size_t failures = 0;

        RMatrix interference;             // K x K, E|g_err_k^T w_k'|^2
        RMatrix combiner_norm;            // M x K, E|w_dmk|^2
        RMatrix precoder_power;           // M x K, E|W_m^RF w_dmk|^2
        RMatrix equivalent_trace;         // M x K, tr(R^RF_mk)
        std::vector<CMatrix> precoder_cov; // per link, E{w_dmk w_dmk^H}, AP-major

        // Uplink interference matrix; it is the transpose of the downlink one.
        RMatrix ul_interference() const { return interference.transpose(); }
        const CMatrix &precoder_cov_at(std::size_t m, std::size_t k) const { return precoder_cov[m * num_users + k]; }
    };

    // Sample means over realizations 0..n-1. Singular realizations are skipped;
    // fewer than min_samples successes throws InsufficientSamplesError.
    ExpectationSet estimate_expectations(const DropContext &ctx, std::size_t realizations, std::uint64_t seed,
                                         std::size_t min_samples = 1);

    nlohmann::json to_json(const ExpectationSet &e);
    ExpectationSet expectations_from_json(const nlohmann::json &j);

    // Per-user noise constants of the SINR denominators.
    RVector dl_noise_terms(const ExpectationSet &e, const RVector &quant_noise, double thermal_noise);
    RVector ul_noise_terms(const ExpectationSet &e, const RVector &quant_noise, double thermal_noise);

    double sinr_dl(std::size_t k, const RVector &power, const RMatrix &interference, double noise);
    double sinr_ul(std::size_t k, const RVector &power, const RMatrix &ul_interference, double noise, double tx_power);
    RVector sinr_dl_all(const RVector &power, const RMatrix &interference, const RVector &noise);
    RVector sinr_ul_all(const RVector &power, const RMatrix &ul_interference, const RVector &noise, double tx_power);

    double rate(double sinr);

    // sum_k weight_k C_mk over the K matrices of AP m in an AP-major list.
    CMatrix weighted_sum(const std::vector<CMatrix> &covs, std::size_t m, const RVector &weights);

    // log2 det(sum_k power_k R^BB_mk / sigma2 + I).
    double fronthaul_dl_bound(const std::vector<CMatrix> &precoder_cov, std::size_t m, const RVector &power,
                              double quant_noise);
    // log2 det(tx_power / sigma2 sum_k power_k R^RF_mk + (1 + thermal / sigma2) I).
    double fronthaul_ul_bound(const std::vector<CMatrix> &equivalent_cov, std::size_t m, const RVector &power,
                              double quant_noise, double tx_power, double thermal_noise);
}

#endif
