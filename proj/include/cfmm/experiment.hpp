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

#ifndef CFMM_EXPERIMENT_HPP
#define CFMM_EXPERIMENT_HPP

#include "cfmm/optimizer.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace cfmm
{
    struct DropResult
    {
        std::size_t point = 0; // sweep point index
        std::size_t drop = 0;
        std::uint64_t seed = 0;
        bool ok = false;
        std::string error; // reason for a discarded drop

        double dl_min_rate = 0.0;
        double ul_min_rate = 0.0;
        RVector dl_rates;
        RVector ul_rates;
        SolveStatus dl_status = SolveStatus::infeasible;
        SolveStatus ul_status = SolveStatus::infeasible;
        std::size_t dl_iterations = 0;
        std::size_t ul_iterations = 0;
        double dl_fronthaul_use = 0.0; // max over APs of bound / capacity
        double ul_fronthaul_use = 0.0;
        std::size_t mc_samples = 0;
        std::vector<std::size_t> pilots;
        double seconds = 0.0; // wall time; not part of the per-drop CSV
    };

    std::uint64_t drop_seed(std::uint64_t campaign_seed, std::size_t drop);
    std::uint64_t realization_seed(std::uint64_t drop_seed);

    // Scenario and large-scale pipeline of one drop.
    DropContext prepare_drop(const SimConfig &cfg, std::uint64_t seed);
    ExpectationSet drop_expectations(const DropContext &ctx);

    // Both optimizers on a prepared drop. Solver errors are not caught here.
    AllocationState solve_allocation(const DropContext &ctx, const ExpectationSet &e);
    DropResult summarize_drop(const DropContext &ctx, const ExpectationSet &e, const AllocationState &alloc);

    // Full pipeline. Failures are recorded in the result rather than thrown.
    DropResult run_drop(const SimConfig &cfg, std::uint64_t seed);

    // Every key receives the same value at a sweep point.
    struct SweepSpec
    {
        std::vector<std::string> keys;
        std::vector<nlohmann::json> values;

        std::size_t size() const { return keys.empty() ? 1 : values.size(); }
    };

    struct RateStats
    {
        double mean = 0.0;
        double std_error = 0.0;
        double median = 0.0;
        double p5 = 0.0;
    };

    struct Aggregate
    {
        std::size_t used = 0;
        std::size_t discarded = 0;
        RateStats dl;
        RateStats ul;
    };

    struct SweepPoint
    {
        nlohmann::json value; // null without a sweep
        SimConfig cfg;
        std::vector<DropResult> drops;
        Aggregate aggregate;
    };

    struct CampaignReport
    {
        SimConfig base;
        SweepSpec sweep;
        std::size_t num_drops = 0;
        std::size_t threads = 1;
        double seconds = 0.0;
        std::vector<SweepPoint> points;
    };

    // Linear interpolation between order statistics, p in [0, 100].
    double percentile(std::vector<double> values, double p);
    RateStats summarize(const std::vector<double> &values);
    Aggregate aggregate(const std::vector<DropResult> &drops);

    // Drop d uses drop_seed(campaign seed, d) at every sweep point, so points
    // share geometry. Results do not depend on the thread count.
    CampaignReport run_campaign(const SimConfig &cfg, const SweepSpec &sweep, std::size_t num_drops,
                                std::size_t threads = 1);

    std::string format_real(double x);

    void write_drops_csv(const CampaignReport &report, const std::string &path);
    void write_cdf_csv(const CampaignReport &report, const std::string &path);
    nlohmann::json to_json(const CampaignReport &report);
    nlohmann::json output_schema();

    // Writes drops.csv, report.json, cdf.csv and schema.json into dir.
    void write_campaign_outputs(const CampaignReport &report, const std::string &dir);

    // Rows of a per-drop CSV, grouped by sweep point index.
    std::vector<std::vector<DropResult>> read_drops_csv(const std::string &path);
}

#endif
