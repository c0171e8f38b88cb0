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

#include "cfmm/experiment.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cfmm;

namespace
{
    SimConfig load(const std::string &path, const std::string &profile)
    {
        SimConfig cfg = profile == "full" ? full_profile() : SimConfig{};
        if (!path.empty())
        {
            auto j = to_json(cfg);
            std::ifstream in(path);
            if (!in)
                throw ConfigError("cannot open configuration file '" + path + "'");
            j.merge_patch(nlohmann::json::parse(in, nullptr, true, true));
            cfg = config_from_json(j);
        }
        return cfg;
    }

    std::string env_or(const char *name, const std::string &fallback)
    {
        const char *v = std::getenv(name);
        return v && *v ? std::string(v) : fallback;
    }

    std::vector<nlohmann::json> parse_values(const std::string &list)
    {
        std::vector<nlohmann::json> out;
        std::stringstream ss(list);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            if (item.empty())
                continue;
            try
            {
                out.push_back(nlohmann::json::parse(item));
            }
            catch (const nlohmann::json::parse_error &)
            {
                out.emplace_back(item);
            }
        }
        return out;
    }

    void print_allocation(const char *name, const LinkAllocation &a)
    {
        std::cout << name << ": status=" << to_string(a.status) << " iterations=" << a.iterations
                  << " min_rate=" << format_real(a.min_rate) << "\n  trace:";
        for (double r : a.trace)
            std::cout << ' ' << format_real(r);
        std::cout << "\n  rates:";
        for (Eigen::Index k = 0; k < a.rates.size(); ++k)
            std::cout << ' ' << format_real(a.rates(k));
        std::cout << "\n";
    }

    int run_single(const SimConfig &cfg, std::uint64_t seed, const std::string &out_dir)
    {
        const auto ctx = prepare_drop(cfg, seed);
        const auto e = drop_expectations(ctx);
        const auto alloc = solve_allocation(ctx, e);
        std::cout << "drop seed " << seed << ": M=" << ctx.M() << " K=" << ctx.K() << " N=" << cfg.N()
                  << " L_A=" << ctx.LA() << " samples=" << e.samples << " failures=" << e.failures << "\n";
        std::cout << "pilots:";
        for (auto p : ctx.pilots.pilot_of)
            std::cout << ' ' << p;
        std::cout << "\n";
        print_allocation("downlink", alloc.downlink);
        print_allocation("uplink", alloc.uplink);
        if (!out_dir.empty())
        {
            std::filesystem::create_directories(out_dir);
            write_link_csv(ctx.links, (std::filesystem::path(out_dir) / "links.csv").string());
            std::ofstream(std::filesystem::path(out_dir) / "expectations.json") << to_json(e).dump() << "\n";
        }
        return 0;
    }

    // Checks constraint and identity invariants on a few drops.
    int run_validate(const SimConfig &cfg, std::size_t drops)
    {
        int failures = 0;
        auto check = [&](bool ok, const std::string &what) {
            std::cout << (ok ? "[PASS] " : "[FAIL] ") << what << "\n";
            failures += ok ? 0 : 1;
        };
        for (std::size_t d = 0; d < drops; ++d)
        {
            const auto seed = drop_seed(cfg.simulation.seed, d);
            DropContext ctx;
            try
            {
                ctx = prepare_drop(cfg, seed);
            }
            catch (const DomainError &ex)
            {
                std::cout << "[SKIP] drop " << d << ": " << ex.what() << "\n";
                continue;
            }
            const std::string tag = "drop " + std::to_string(d) + ": ";

            double herm = 0.0;
            for (const auto &l : ctx.links.links)
                herm = std::max(herm, (l.covariance - l.covariance.adjoint()).cwiseAbs().maxCoeff());
            check(herm < 1e-12, tag + "covariances Hermitian");

            bool phase_only = true;
            for (const auto &w : ctx.plan.rf)
                phase_only = phase_only && ((w.cwiseAbs().array() - 1.0).abs() < 1e-15).all();
            check(phase_only, tag + "RF matrices phase-only");

            try
            {
                const auto r = draw_realization(ctx, realization_seed(seed), 0);
                const CMatrix id = r.estimate.transpose() * r.zf.precoder;
                const double err = (id - CMatrix::Identity(ctx.K(), ctx.K())).cwiseAbs().rowwise().sum().maxCoeff();
                check(err < 1e-8, tag + "zero-forcing identity");
            }
            catch (const SingularChannelError &ex)
            {
                std::cout << "[SKIP] " << tag << ex.what() << "\n";
                continue;
            }

            const auto e = drop_expectations(ctx);
            const auto a = solve_allocation(ctx, e);
            const auto &dl = a.downlink;
            if (dl.status != SolveStatus::infeasible)
            {
                const RVector use = dl_power_usage(e, dl.power, dl.quant_noise, cfg.N());
                check((use.array() <= cfg.power.ap_power_w * (1.0 + 1e-9)).all(), tag + "downlink power budget");
                double worst = 0.0;
                for (std::size_t m = 0; m < ctx.M(); ++m)
                    if (!dl.clamped[m])
                        worst = std::max(worst, std::abs(std::exp2(fronthaul_dl_bound(e.precoder_cov, m, dl.power,
                                                                                      dl.quant_noise(m)) -
                                                                   cfg.fronthaul.capacity_dl) -
                                                         1.0));
                check(worst < 1e-3, tag + "downlink fronthaul equality");
            }
            const auto &ul = a.uplink;
            check((ul.power.array() >= 0.0).all() && (ul.power.array() <= 1.0).all(), tag + "uplink power box");
        }
        std::cout << (failures ? "validation failed" : "validation passed") << "\n";
        return failures ? 1 : 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"cfmm: cell-free mmWave massive MIMO system-level simulator"};
    app.require_subcommand(1);

    std::string config_path, profile = "desk";
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto *drop = app.add_subcommand("drop", "run one drop and print the optimizer traces");
    std::string drop_out;
    drop->add_option("-c,--config", config_path, "JSON configuration file");
    drop->add_option("--profile", profile, "desk or full")->check(CLI::IsMember({"desk", "full"}));
    drop->add_option("-s,--seed", seed, "drop seed")->each([&](const std::string &) { seed_set = true; });
    drop->add_option("-o,--output", drop_out, "directory for link and expectation dumps");

    auto *campaign = app.add_subcommand("campaign", "run a Monte Carlo campaign with an optional sweep");
    std::string out_dir = "cfmm_out";
    std::size_t threads = 1, drops = 0;
    std::vector<std::string> sweep_keys;
    std::string sweep_values;
    campaign->add_option("-c,--config", config_path, "JSON configuration file");
    campaign->add_option("--profile", profile, "desk or full")->check(CLI::IsMember({"desk", "full"}));
    campaign->add_option("-s,--seed", seed, "campaign seed")->each([&](const std::string &) { seed_set = true; });
    campaign->add_option("-n,--drops", drops, "drops per sweep point (default: simulation.num_drops)");
    campaign->add_option("-j,--threads", threads, "worker threads");
    campaign->add_option("-o,--output", out_dir, "output directory");
    campaign->add_option("--sweep-key", sweep_keys, "dotted configuration key; repeat to sweep keys together");
    campaign->add_option("--sweep-values", sweep_values, "comma separated values");

    auto *validate = app.add_subcommand("validate", "check invariants on a few drops");
    std::size_t validate_drops = 3;
    validate->add_option("-c,--config", config_path, "JSON configuration file");
    validate->add_option("--profile", profile, "desk or full")->check(CLI::IsMember({"desk", "full"}));
    validate->add_option("-n,--drops", validate_drops, "number of drops");

    CLI11_PARSE(app, argc, argv);

    try
    {
        SimConfig cfg = load(config_path, profile);
        if (seed_set)
            cfg.simulation.seed = seed;

        if (*drop)
            return run_single(cfg, seed_set ? seed : cfg.simulation.seed, drop_out);
        if (*validate)
            return run_validate(cfg, validate_drops);

        out_dir = env_or("CFMM_OUTPUT_DIR", out_dir);
        threads = std::stoul(env_or("CFMM_THREADS", std::to_string(threads)));
        SweepSpec sweep;
        sweep.keys = sweep_keys;
        if (!sweep_keys.empty())
        {
            sweep.values = parse_values(sweep_values);
            if (sweep.values.empty())
                throw ConfigError("--sweep-key needs --sweep-values");
        }
        const auto report = run_campaign(cfg, sweep, drops ? drops : cfg.simulation.num_drops, threads);
        write_campaign_outputs(report, out_dir);
        for (std::size_t p = 0; p < report.points.size(); ++p)
        {
            const auto &pt = report.points[p];
            const auto &a = pt.aggregate;
            std::cout << "point " << p << (pt.value.is_null() ? "" : " (" + pt.value.dump() + ")") << ": used "
                      << a.used << ", discarded " << a.discarded << ", DL mean " << format_real(a.dl.mean) << " +/- "
                      << format_real(a.dl.std_error) << ", UL mean " << format_real(a.ul.mean) << " +/- "
                      << format_real(a.ul.std_error) << "\n";
        }
        std::cout << "outputs written to " << out_dir << "\n";
    }
    catch (const ConfigError &ex)
    {
        std::cerr << "configuration error: " << ex.what() << "\n";
        return 2;
    }
    catch (const std::exception &ex)
    {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
