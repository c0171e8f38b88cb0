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

#include "cfmm/context.hpp"

namespace cfmm
{
    DropContext build_context(const SimConfig &cfg, NetworkScenario scenario, std::uint64_t seed)
    {
        cfg.validate();
        if (scenario.M() != cfg.M() || scenario.K() != cfg.K())
            throw ConfigError("scenario size does not match the configuration");

        DropContext ctx;
        ctx.cfg = cfg;
        ctx.seed = seed;
        ctx.scenario = std::move(scenario);
        ctx.links = build_large_scale(cfg, ctx.scenario, seed);
        ctx.plan = build_rf_plan(ctx.links, cfg);
        ctx.pilots = assign_pilots(cfg.simulation.pilot_strategy, ctx.plan.weights, cfg.system.pilot_length, seed);
        ctx.ul_noise = uplink_noise_variance(cfg.N(), cfg);
        ctx.dl_noise = downlink_noise_variance(cfg);
        ctx.mmse = mmse_matrices(ctx.pilots, ctx.plan, cfg, ctx.ul_noise);

        const std::size_t M = ctx.M(), K = ctx.K();
        ctx.equivalent_trace.resize(M, K);
        ctx.fading_basis.resize(M * K);
        for (std::size_t m = 0; m < M; ++m)
        {
            const CMatrix wt = ctx.plan.rf[m].transpose();
            for (std::size_t k = 0; k < K; ++k)
            {
                const auto &link = ctx.links.at(m, k);
                ctx.equivalent_trace(m, k) = ctx.plan.equivalent_at(m, k).trace().real();
                ctx.fading_basis[m * K + k] = wt * link.steering * link.path_std.asDiagonal();
            }
        }
        return ctx;
    }
}
