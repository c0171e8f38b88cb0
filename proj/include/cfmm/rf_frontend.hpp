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

#ifndef CFMM_RF_FRONTEND_HPP
#define CFMM_RF_FRONTEND_HPP

#include "cfmm/channel.hpp"

#include <vector>

namespace cfmm
{
    // Phase-only column matched to the dominant eigenvector of R:
    // w_n = exp(-j arg u_n). The eigenvector gauge is fixed by making its
    // largest-magnitude entry real positive. Throws DomainError for R = 0.
    CVector rf_column(const CMatrix &covariance);

    // w^T R w^*, the average energy of the equivalent channel w^T h.
    double link_weight(const CVector &column, const CMatrix &covariance);

    // R^RF = W^T R W^*.
    CMatrix equivalent_covariance(const CMatrix &rf_matrix, const CMatrix &covariance);

    struct UserSelection
    {
        std::vector<std::vector<std::size_t>> served; // per AP, ascending MS indices
        std::size_t removals = 0;
    };

    // Reverse-delete selection on the complete AP-MS graph with weights xi
    // (M x K). Each step removes, among edges at APs with degree > L, the edge
    // whose removal leaves the largest minimum per-MS energy sum. Ties go to
    // the smaller weight, then the lower AP index, then the lower MS index.
    UserSelection select_users(const RMatrix &weights, std::size_t rf_chains);

    // Receiver noise power after the RF chains, in watts.
    double uplink_noise_temperature(std::size_t num_antennas, const NoiseParams &noise);
    double uplink_noise_variance(std::size_t num_antennas, const SimConfig &cfg);
    double downlink_noise_variance(const SimConfig &cfg);

    struct RfPlan
    {
        std::size_t num_aps = 0;
        std::size_t num_users = 0;
        std::size_t num_antennas = 0;
        std::size_t active_chains = 0; // L_A = min(K, L)

        RMatrix weights; // xi, M x K
        std::vector<std::vector<std::size_t>> served;
        std::vector<CMatrix> rf;                   // per AP, N x L_A, unit modulus
        std::vector<CMatrix> equivalent;           // per link, L_A x L_A, AP-major
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> served_mask; // M x K

        const CMatrix &equivalent_at(std::size_t m, std::size_t k) const { return equivalent[m * num_users + k]; }
        bool is_served(std::size_t m, std::size_t k) const { return served_mask(m, k); }
        // Position of MS k among the served MSs of AP m.
        std::size_t chain_of(std::size_t m, std::size_t k) const;
    };

    // Computes xi for every link from its own eigen-column, selects users and
    // assembles W^RF and R^RF. An AP whose links are all in outage keeps
    // all-ones columns.
    RfPlan build_rf_plan(const LinkTable &links, const SimConfig &cfg);
}

#endif
