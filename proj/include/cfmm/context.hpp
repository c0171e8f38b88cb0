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

#ifndef CFMM_CONTEXT_HPP
#define CFMM_CONTEXT_HPP

#include "cfmm/estimation.hpp"

#include <cstdint>

namespace cfmm
{
    // Everything that stays fixed over one large-scale interval.
    struct DropContext
    {
        SimConfig cfg;
        std::uint64_t seed = 0;
        NetworkScenario scenario;
        LinkTable links;
        RfPlan plan;
        PilotAssignment pilots;
        MmseSet mmse;
        double ul_noise = 0.0; // sigma_u^2(N), W
        double dl_noise = 0.0; // sigma_d^2, W

        RMatrix equivalent_trace;          // tr(R^RF_mk), M x K
        std::vector<CMatrix> fading_basis; // per link, W_m^T A diag(path std): g = basis * alpha

        std::size_t M() const { return plan.num_aps; }
        std::size_t K() const { return plan.num_users; }
        std::size_t LA() const { return plan.active_chains; }
    };

    // Large-scale pipeline for a given scenario: links, RF plan, pilots, MMSE.
    DropContext build_context(const SimConfig &cfg, NetworkScenario scenario, std::uint64_t seed);
}

#endif
