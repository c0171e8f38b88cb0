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

#ifndef CFMM_ESTIMATION_HPP
#define CFMM_ESTIMATION_HPP

#include "cfmm/pilots.hpp"
#include "cfmm/random.hpp"
#include "cfmm/rf_frontend.hpp"

#include <vector>

namespace cfmm
{
    // Y = sqrt(tau_p P_p) G Phi^T + noise, with G the L_A x K equivalent
    // channels at one AP and noise i.i.d. CN(0, noise_variance).
    CMatrix synthesize_pilot_rx(const CMatrix &channels, const PilotAssignment &pilots, double pilot_energy,
                                double noise_variance, RandomStream &rng);

    // Column t is Y phi_t^*.
    CMatrix project_pilots(const CMatrix &rx, const PilotAssignment &pilots);

    struct MmseFilter
    {
        CMatrix gain;           // D = sqrt(E) R Q^-1
        CMatrix estimate_cov;   // E R Q^-1 R^H
        CMatrix error_cov;      // R - estimate_cov
    };

    // Filter for one link given its equivalent covariance and the pilot
    // observation covariance Q. pilot_energy is tau_p P_p.
    MmseFilter mmse_filter(const CMatrix &covariance, const CMatrix &observation_cov, double pilot_energy);

    struct MmseSet
    {
        std::size_t num_aps = 0;
        std::size_t num_users = 0;
        double pilot_energy = 0.0;
        std::vector<MmseFilter> filters; // AP-major

        const MmseFilter &at(std::size_t m, std::size_t k) const { return filters[m * num_users + k]; }
    };

    // Q_mk = tau_p P_p sum over MSs sharing k's pilot of R^RF + noise I.
    MmseSet mmse_matrices(const PilotAssignment &pilots, const RfPlan &plan, const SimConfig &cfg,
                          double noise_variance);

    // L_A x K estimates at AP m: g_hat_mk = D_mk Y phi_k^*.
    CMatrix estimate_channels(const CMatrix &rx, const MmseSet &mmse, std::size_t m, const PilotAssignment &pilots);
}

#endif
