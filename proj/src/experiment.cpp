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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

namespace cfmm
{
    std::uint64_t drop_seed(std::uint64_t campaign_seed, std::size_t drop)
    {
        return derive_seed(campaign_seed, Stream::drop, {drop});
    }

    std::uint64_t realization_seed(std::uint64_t seed) { return derive_seed(seed, Stream::fading); }

    DropContext prepare_drop(const SimConfig &cfg, std::uint64_t seed)
    {
        return build_context(cfg, generate_scenario(cfg, seed), seed);
    }

    ExpectationSet drop_expectations(const DropContext &ctx)
    {
        const auto &sim = ctx.cfg.simulation;
        return estimate_expectations(ctx, sim.mc_realizations, realization_seed(ctx.seed), sim.mc_min_realizations);
    }

    AllocationState solve_allocation(const DropContext &ctx, const ExpectationSet &e)
    {
        AllocationState a;
        a.downlink = bcd_dl(e, ctx.cfg, ctx.dl_noise);
        a.uplink = bcd_ul(e, ctx.plan.equivalent, ctx.cfg, ctx.ul_noise);
        return a;
    }

    DropResult summarize_drop(const DropContext &ctx, const ExpectationSet &e, const AllocationState &alloc)
    {
        const auto &cfg = ctx.cfg;
        DropResult r;
        r.seed = ctx.seed;
        r.ok = true;
        r.mc_samples = e.samples;
        r.pilots = ctx.pilots.pilot_of;

        const auto &dl = alloc.downlink;
        const auto &ul = alloc.uplink;
        r.dl_min_rate = std::max(0.0, dl.min_rate);
        r.ul_min_rate = std::max(0.0, ul.min_rate);
        r.dl_rates = dl.rates;
        r.ul_rates = ul.rates;
        r.dl_status = dl.status;
        r.ul_status = ul.status;
        r.dl_iterations = dl.iterations;
        r.ul_iterations = ul.iterations;

        for (std::size_t m = 0; m < ctx.M(); ++m)
        {
            if (dl.status != SolveStatus::infeasible && dl.quant_noise.size())
                r.dl_fronthaul_use = std::max(r.dl_fronthaul_use,
                                              fronthaul_dl_bound(e.precoder_cov, m, dl.power, dl.quant_noise(m)) /
                                                  cfg.fronthaul.capacity_dl);
            if (ul.quant_noise.size())
                r.ul_fronthaul_use =
                    std::max(r.ul_fronthaul_use, fronthaul_ul_bound(ctx.plan.equivalent, m, ul.power, ul.quant_noise(m),
                                                                    cfg.power.ms_power_w, ctx.ul_noise) /
                                                     cfg.fronthaul.capacity_ul);
        }
        return r;
    }

    DropResult run_drop(const SimConfig &cfg, std::uint64_t seed)
    {
        const auto start = std::chrono::steady_clock::now();
        DropResult r;
        try
        {
            const auto ctx = prepare_drop(cfg, seed);
            const auto e = drop_expectations(ctx);
            r = summarize_drop(ctx, e, solve_allocation(ctx, e));
        }
        catch (const ConfigError &)
        {
            throw;
        }
        catch (const std::exception &ex)
        {
            r = DropResult{};
            r.seed = seed;
            r.ok = false;
            r.error = ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    }

    double percentile(std::vector<double> values, double p)
    {
        if (values.empty())
            throw std::invalid_argument("percentile of an empty sample");
        if (!(p >= 0.0 && p <= 100.0))
            throw DomainError("percentile must lie in [0, 100]");
        std::sort(values.begin(), values.end());
        const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    }

    RateStats summarize(const std::vector<double> &values)
    {
        RateStats s;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (values.empty())
            return {nan, nan, nan, nan};
        const double n = static_cast<double>(values.size());
        double sum = 0.0;
        for (double v : values)
            sum += v;
        s.mean = sum / n;
        double ss = 0.0;
        for (double v : values)
            ss += (v - s.mean) * (v - s.mean);
        s.std_error = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
        s.median = percentile(values, 50.0);
        s.p5 = percentile(values, 5.0);
        return s;
    }

    Aggregate aggregate(const std::vector<DropResult> &drops)
    {
        Aggregate a;
        std::vector<double> dl, ul;
        for (const auto &d : drops)
        {
            if (!d.ok)
            {
                ++a.discarded;
                continue;
            }
            dl.push_back(d.dl_min_rate);
            ul.push_back(d.ul_min_rate);
        }
        a.used = dl.size();
        a.dl = summarize(dl);
        a.ul = summarize(ul);
        return a;
    }

    CampaignReport run_campaign(const SimConfig &cfg, const SweepSpec &sweep, std::size_t num_drops,
                                std::size_t threads)
    {
        const auto start = std::chrono::steady_clock::now();
        CampaignReport report;
        report.base = cfg;
        report.sweep = sweep;
        report.num_drops = num_drops;
        report.threads = std::max<std::size_t>(1, threads);

        for (std::size_t p = 0; p < sweep.size(); ++p)
        {
            SweepPoint pt;
            pt.cfg = cfg;
            if (!sweep.keys.empty())
            {
                pt.value = sweep.values[p];
                for (const auto &key : sweep.keys)
                    pt.cfg = with_override(pt.cfg, key, pt.value);
            }
            pt.drops.resize(num_drops);
            report.points.push_back(std::move(pt));
        }

        const std::size_t jobs = report.points.size() * num_drops;
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t j = next++; j < jobs; j = next++)
            {
                const std::size_t p = j / num_drops, d = j % num_drops;
                auto &pt = report.points[p];
                DropResult r = run_drop(pt.cfg, drop_seed(cfg.simulation.seed, d));
                r.point = p;
                r.drop = d;
                pt.drops[d] = std::move(r);
            }
        };
        const std::size_t n_threads = std::min(report.threads, std::max<std::size_t>(jobs, 1));
        if (n_threads <= 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < n_threads; ++t)
                pool.emplace_back(worker);
            for (auto &t : pool)
                t.join();
        }

        for (auto &pt : report.points)
            pt.aggregate = aggregate(pt.drops);
        report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    }

    std::string format_real(double x)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", x);
        return buf;
    }

    namespace
    {
        std::string join_reals(const RVector &v)
        {
            std::string s;
            for (Eigen::Index i = 0; i < v.size(); ++i)
                s += (i ? ";" : "") + format_real(v(i));
            return s;
        }

        std::string join_indices(const std::vector<std::size_t> &v)
        {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += (i ? ";" : "") + std::to_string(v[i]);
            return s;
        }

        std::string clean_field(std::string s)
        {
            std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r' || c == '"'; },
                            ' ');
            return s;
        }

        std::string sweep_label(const nlohmann::json &v)
        {
            if (v.is_null())
                return "";
            return clean_field(v.is_string() ? v.get<std::string>() : v.dump());
        }

        std::ofstream open_out(const std::string &path)
        {
            std::ofstream out(path);
            if (!out)
                throw std::runtime_error("cannot write '" + path + "'");
            return out;
        }

        nlohmann::json real_or_null(double x) { return std::isfinite(x) ? nlohmann::json(std::stod(format_real(x))) : nlohmann::json(); }

        nlohmann::json stats_json(const RateStats &s)
        {
            return {{"mean", real_or_null(s.mean)},
                    {"std_error", real_or_null(s.std_error)},
                    {"median", real_or_null(s.median)},
                    {"p5", real_or_null(s.p5)}};
        }

        const char *kDropColumns[] = {"point",          "sweep_value",   "drop",          "seed",
                                      "ok",             "error",         "dl_min_rate",   "ul_min_rate",
                                      "dl_status",      "ul_status",     "dl_iterations", "ul_iterations",
                                      "dl_fronthaul_use", "ul_fronthaul_use", "mc_samples", "dl_rates",
                                      "ul_rates",       "pilots"};
    }

    void write_drops_csv(const CampaignReport &report, const std::string &path)
    {
        auto out = open_out(path);
        bool first = true;
        for (const char *c : kDropColumns)
        {
            out << (first ? "" : ",") << c;
            first = false;
        }
        out << "\n";
        for (const auto &pt : report.points)
        {
            const std::string label = sweep_label(pt.value);
            for (const auto &d : pt.drops)
            {
                out << d.point << ',' << label << ',' << d.drop << ',' << d.seed << ',' << (d.ok ? 1 : 0) << ','
                    << clean_field(d.error) << ',' << format_real(d.dl_min_rate) << ','
                    << format_real(d.ul_min_rate) << ',' << to_string(d.dl_status) << ',' << to_string(d.ul_status)
                    << ',' << d.dl_iterations << ',' << d.ul_iterations << ',' << format_real(d.dl_fronthaul_use)
                    << ',' << format_real(d.ul_fronthaul_use) << ',' << d.mc_samples << ',' << join_reals(d.dl_rates)
                    << ',' << join_reals(d.ul_rates) << ',' << join_indices(d.pilots) << "\n";
            }
        }
    }

    void write_cdf_csv(const CampaignReport &report, const std::string &path)
    {
        auto out = open_out(path);
        out << "point,sweep_value,link,rank,min_rate,cdf\n";
        for (std::size_t p = 0; p < report.points.size(); ++p)
        {
            const auto &pt = report.points[p];
            for (const char *link : {"dl", "ul"})
            {
                std::vector<double> v;
                for (const auto &d : pt.drops)
                    if (d.ok)
                        v.push_back(link[0] == 'd' ? d.dl_min_rate : d.ul_min_rate);
                std::sort(v.begin(), v.end());
                for (std::size_t i = 0; i < v.size(); ++i)
                    out << p << ',' << sweep_label(pt.value) << ',' << link << ',' << i + 1 << ',' << format_real(v[i])
                        << ',' << format_real(static_cast<double>(i + 1) / static_cast<double>(v.size())) << "\n";
            }
        }
    }

    nlohmann::json to_json(const CampaignReport &report)
    {
        nlohmann::json j;
        j["config"] = to_json(report.base);
        j["sweep"] = {{"keys", report.sweep.keys}, {"values", report.sweep.values}};
        j["num_drops"] = report.num_drops;
        j["threads"] = report.threads;
        j["seconds"] = real_or_null(report.seconds);
        auto points = nlohmann::json::array();
        for (const auto &pt : report.points)
        {
            double busy = 0.0;
            for (const auto &d : pt.drops)
                busy += d.seconds;
            points.push_back({{"value", pt.value},
                              {"used_drops", pt.aggregate.used},
                              {"discarded_drops", pt.aggregate.discarded},
                              {"dl_min_rate", stats_json(pt.aggregate.dl)},
                              {"ul_min_rate", stats_json(pt.aggregate.ul)},
                              {"mean_drop_seconds",
                               real_or_null(pt.drops.empty() ? 0.0 : busy / static_cast<double>(pt.drops.size()))}});
        }
        j["points"] = points;
        return j;
    }

    nlohmann::json output_schema()
    {
        nlohmann::json drops = nlohmann::json::object();
        drops["point"] = "sweep point index";
        drops["sweep_value"] = "value assigned to the sweep keys at this point (empty without a sweep)";
        drops["drop"] = "drop index within the point";
        drops["seed"] = "drop seed (shared by all sweep points)";
        drops["ok"] = "1 if the drop was used, 0 if discarded";
        drops["error"] = "reason a drop was discarded";
        drops["dl_min_rate"] = "downlink max-min rate, bit/s/Hz";
        drops["ul_min_rate"] = "uplink max-min rate, bit/s/Hz";
        drops["dl_status"] = "converged | max_iters | infeasible";
        drops["ul_status"] = "converged | max_iters | infeasible";
        drops["dl_iterations"] = "block coordinate descent iterations, downlink";
        drops["ul_iterations"] = "block coordinate descent iterations, uplink";
        drops["dl_fronthaul_use"] = "largest per-AP downlink fronthaul bound divided by capacity";
        drops["ul_fronthaul_use"] = "largest per-AP uplink fronthaul bound divided by capacity";
        drops["mc_samples"] = "usable Monte Carlo realizations";
        drops["dl_rates"] = "per-user downlink rates, ';' separated";
        drops["ul_rates"] = "per-user uplink rates, ';' separated";
        drops["pilots"] = "pilot index of each MS, ';' separated";

        return {{"drops.csv", {{"description", "one row per drop"}, {"columns", drops}}},
                {"cdf.csv",
                 {{"description", "empirical CDF of per-drop min-rates over used drops"},
                  {"columns",
                   {{"point", "sweep point index"},
                    {"sweep_value", "value of the sweep keys"},
                    {"link", "dl | ul"},
                    {"rank", "1-based rank in ascending order"},
                    {"min_rate", "bit/s/Hz"},
                    {"cdf", "rank / used drops"}}}}},
                {"report.json",
                 {{"description", "configuration snapshot and per-point aggregates"},
                  {"fields",
                   {{"mean", "mean of the min-rate over used drops"},
                    {"std_error", "standard error of the mean"},
                    {"median", "50th percentile"},
                    {"p5", "5th percentile (95%-likely rate)"}}}}},
                {"float_format", "9 significant digits"}};
    }

    void write_campaign_outputs(const CampaignReport &report, const std::string &dir)
    {
        std::filesystem::create_directories(dir);
        const std::filesystem::path base(dir);
        write_drops_csv(report, (base / "drops.csv").string());
        write_cdf_csv(report, (base / "cdf.csv").string());
        open_out((base / "report.json").string()) << to_json(report).dump(2) << "\n";
        open_out((base / "schema.json").string()) << output_schema().dump(2) << "\n";
    }

    namespace
    {
        std::vector<std::string> split(const std::string &s, char sep)
        {
            std::vector<std::string> out;
            std::string cur;
            std::istringstream in(s);
            while (std::getline(in, cur, sep))
                out.push_back(cur);
            if (!s.empty() && s.back() == sep)
                out.emplace_back();
            return out;
        }

        RVector parse_reals(const std::string &s)
        {
            if (s.empty())
                return RVector(0);
            const auto parts = split(s, ';');
            RVector v(parts.size());
            for (std::size_t i = 0; i < parts.size(); ++i)
                v(i) = std::stod(parts[i]);
            return v;
        }

        SolveStatus parse_status(const std::string &s)
        {
            if (s == "converged")
                return SolveStatus::converged;
            if (s == "max_iters")
                return SolveStatus::max_iters;
            return SolveStatus::infeasible;
        }
    }

    std::vector<std::vector<DropResult>> read_drops_csv(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot read '" + path + "'");
        std::string line;
        std::getline(in, line);
        std::map<std::size_t, std::vector<DropResult>> points;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            const auto f = split(line, ',');
            if (f.size() != std::size(kDropColumns))
                throw std::runtime_error("malformed row in '" + path + "'");
            DropResult d;
            d.point = std::stoul(f[0]);
            d.drop = std::stoul(f[2]);
            d.seed = std::stoull(f[3]);
            d.ok = f[4] == "1";
            d.error = f[5];
            d.dl_min_rate = std::stod(f[6]);
            d.ul_min_rate = std::stod(f[7]);
            d.dl_status = parse_status(f[8]);
            d.ul_status = parse_status(f[9]);
            d.dl_iterations = std::stoul(f[10]);
            d.ul_iterations = std::stoul(f[11]);
            d.dl_fronthaul_use = std::stod(f[12]);
            d.ul_fronthaul_use = std::stod(f[13]);
            d.mc_samples = std::stoul(f[14]);
            d.dl_rates = parse_reals(f[15]);
            d.ul_rates = parse_reals(f[16]);
            for (const auto &p : split(f[17], ';'))
                if (!p.empty())
                    d.pilots.push_back(std::stoul(p));
            points[d.point].push_back(std::move(d));
        }
        std::vector<std::vector<DropResult>> out;
        for (auto &[p, v] : points)
        {
            if (out.size() <= p)
                out.resize(p + 1);
            out[p] = std::move(v);
        }
        return out;
    }
}
