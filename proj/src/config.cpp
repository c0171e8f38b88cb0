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

#include "cfmm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace cfmm
{
    std::string to_string(PilotStrategy s)
    {
        switch (s)
        {
        case PilotStrategy::rpa:
            return "rpa";
        case PilotStrategy::brpa:
            return "brpa";
        case PilotStrategy::dcpa:
            return "dcpa";
        }
        return "unknown";
    }

    PilotStrategy pilot_strategy_from_string(const std::string &s)
    {
        if (s == "rpa" || s == "RPA")
            return PilotStrategy::rpa;
        if (s == "brpa" || s == "BRPA")
            return PilotStrategy::brpa;
        if (s == "dcpa" || s == "DCPA")
            return PilotStrategy::dcpa;
        throw ConfigError("unknown pilot strategy '" + s + "' (expected rpa, brpa or dcpa)");
    }

    namespace
    {
        void require(bool ok, const std::string &what)
        {
            if (!ok)
                throw ConfigError("invalid configuration: " + what);
        }

        bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

        nlohmann::json fit_to_json(const PathLossFit &f)
        {
            return {{"alpha_db", f.alpha_db}, {"beta", f.beta}, {"shadow_std_db", f.shadow_std_db}};
        }

        // Reads the keys of one JSON object into fields, rejecting unknown keys.
        class SectionReader
        {
        public:
            SectionReader(const nlohmann::json &j, std::string name) : j_(j), name_(std::move(name))
            {
                if (!j_.is_object())
                    throw ConfigError("configuration section '" + name_ + "' must be an object");
            }

            template <class T>
            SectionReader &field(const char *key, T &out)
            {
                known_.insert(key);
                if (auto it = j_.find(key); it != j_.end())
                {
                    try
                    {
                        out = it->template get<T>();
                    }
                    catch (const nlohmann::json::exception &e)
                    {
                        throw ConfigError("configuration key '" + name_ + "." + key + "': " + e.what());
                    }
                }
                return *this;
            }

            SectionReader &fit(const char *key, PathLossFit &out)
            {
                known_.insert(key);
                if (auto it = j_.find(key); it != j_.end())
                {
                    SectionReader(*it, name_ + "." + key)
                        .field("alpha_db", out.alpha_db)
                        .field("beta", out.beta)
                        .field("shadow_std_db", out.shadow_std_db)
                        .finish();
                }
                return *this;
            }

            SectionReader &strategy(const char *key, PilotStrategy &out)
            {
                known_.insert(key);
                if (auto it = j_.find(key); it != j_.end())
                {
                    if (!it->is_string())
                        throw ConfigError("configuration key '" + name_ + "." + key + "' must be a string");
                    out = pilot_strategy_from_string(it->get<std::string>());
                }
                return *this;
            }

            void finish() const
            {
                for (auto it = j_.begin(); it != j_.end(); ++it)
                    if (!known_.count(it.key()))
                        throw ConfigError("unknown configuration key '" + name_ + "." + it.key() + "'");
            }

        private:
            const nlohmann::json &j_;
            std::string name_;
            std::set<std::string> known_;
        };

        const nlohmann::json &section(const nlohmann::json &j, const char *name)
        {
            static const nlohmann::json empty = nlohmann::json::object();
            auto it = j.find(name);
            return it == j.end() ? empty : *it;
        }
    }

    void SimConfig::validate() const
    {
        const auto &s = system;
        require(s.num_aps >= 1, "system.num_aps (M) must be >= 1");
        require(s.num_users >= 1, "system.num_users (K) must be >= 1");
        require(s.num_antennas >= 1, "system.num_antennas (N) must be >= 1");
        require(s.num_rf_chains >= 1, "system.num_rf_chains (L) must be >= 1");
        require(s.num_rf_chains <= s.num_antennas, "system.num_rf_chains (L) must not exceed num_antennas (N)");
        require(s.pilot_length >= 1, "system.pilot_length must be >= 1");
        require(s.pilot_length <= s.coherence_length, "system.pilot_length must not exceed coherence_length");
        require(positive_finite(s.area_side_m), "system.area_side_m must be > 0");
        require(positive_finite(s.bandwidth_hz), "system.bandwidth_hz must be > 0");
        require(positive_finite(s.carrier_frequency_hz), "system.carrier_frequency_hz must be > 0");
        require(std::isfinite(s.ap_height_m) && s.ap_height_m >= 0.0, "system.ap_height_m must be >= 0");
        require(std::isfinite(s.ms_height_m) && s.ms_height_m >= 0.0, "system.ms_height_m must be >= 0");

        require(positive_finite(power.ap_power_w), "power.ap_power_w must be > 0");
        require(positive_finite(power.ms_power_w), "power.ms_power_w must be > 0");
        require(positive_finite(power.pilot_power_w), "power.pilot_power_w must be > 0");

        require(std::isfinite(noise.lna_gain_db), "noise.lna_gain_db must be finite");
        require(std::isfinite(noise.phase_shifter_loss_db) && noise.phase_shifter_loss_db >= 0.0,
                "noise.phase_shifter_loss_db must be >= 0");
        require(std::isfinite(noise.combiner_loss_db) && noise.combiner_loss_db >= 0.0,
                "noise.combiner_loss_db must be >= 0");
        require(std::isfinite(noise.ms_noise_figure_db) && noise.ms_noise_figure_db >= 0.0,
                "noise.ms_noise_figure_db must be >= 0");
        require(std::isfinite(noise.lna_noise_figure_db) && noise.lna_noise_figure_db >= 0.0,
                "noise.lna_noise_figure_db must be >= 0");
        require(std::isfinite(noise.rf_noise_figure_db) && noise.rf_noise_figure_db >= 0.0,
                "noise.rf_noise_figure_db must be >= 0");

        require(positive_finite(fronthaul.capacity_dl), "fronthaul.capacity_dl must be > 0");
        require(positive_finite(fronthaul.capacity_ul), "fronthaul.capacity_ul must be > 0");

        const auto &c = channel;
        require(positive_finite(c.outage_length_m), "channel.outage_length_m must be > 0");
        require(positive_finite(c.los_length_m), "channel.los_length_m must be > 0");
        require(std::isfinite(c.outage_offset), "channel.outage_offset must be finite");
        for (const auto *f : {&c.los, &c.nlos})
            require(std::isfinite(f->alpha_db) && std::isfinite(f->beta) && std::isfinite(f->shadow_std_db) &&
                        f->shadow_std_db >= 0.0,
                    "channel path loss fits must be finite with shadow_std_db >= 0");
        require(std::isfinite(c.mean_clusters) && c.mean_clusters >= 0.0, "channel.mean_clusters must be >= 0");
        require(std::isfinite(c.delay_spread_factor), "channel.delay_spread_factor must be finite");
        require(std::isfinite(c.cluster_power_std_db) && c.cluster_power_std_db >= 0.0,
                "channel.cluster_power_std_db must be >= 0");
        require(std::isfinite(c.azimuth_spread_deg) && c.azimuth_spread_deg >= 0.0,
                "channel.azimuth_spread_deg must be >= 0");
        require(std::isfinite(c.elevation_spread_deg) && c.elevation_spread_deg >= 0.0,
                "channel.elevation_spread_deg must be >= 0");
        require(c.paths_per_cluster >= 1, "channel.paths_per_cluster must be >= 1");

        require(positive_finite(shadowing.decorrelation_m), "shadowing.decorrelation_m must be > 0");
        require(shadowing.ap_share >= 0.0 && shadowing.ap_share <= 1.0, "shadowing.ap_share must lie in [0, 1]");

        require(simulation.mc_realizations >= 1, "simulation.mc_realizations must be >= 1");
        require(simulation.mc_min_realizations >= 1 && simulation.mc_min_realizations <= simulation.mc_realizations,
                "simulation.mc_min_realizations must lie in [1, mc_realizations]");

        require(solver.bcd_max_iterations >= 1, "solver.bcd_max_iterations must be >= 1");
        require(positive_finite(solver.bcd_tolerance), "solver.bcd_tolerance must be > 0");
        require(positive_finite(solver.bisection_tolerance), "solver.bisection_tolerance must be > 0");
        require(positive_finite(solver.root_tolerance), "solver.root_tolerance must be > 0");
        require(solver.root_max_iterations >= 1, "solver.root_max_iterations must be >= 1");
        require(positive_finite(solver.sigma2_min), "solver.sigma2_min must be > 0");
        require(positive_finite(solver.fronthaul_tolerance), "solver.fronthaul_tolerance must be > 0");
    }

    nlohmann::json to_json(const SimConfig &cfg)
    {
        const auto &s = cfg.system;
        const auto &c = cfg.channel;
        nlohmann::json j;
        j["system"] = {{"carrier_frequency_hz", s.carrier_frequency_hz},
                       {"bandwidth_hz", s.bandwidth_hz},
                       {"area_side_m", s.area_side_m},
                       {"ap_height_m", s.ap_height_m},
                       {"ms_height_m", s.ms_height_m},
                       {"num_aps", s.num_aps},
                       {"num_users", s.num_users},
                       {"num_antennas", s.num_antennas},
                       {"num_rf_chains", s.num_rf_chains},
                       {"coherence_length", s.coherence_length},
                       {"pilot_length", s.pilot_length}};
        j["power"] = {{"ap_power_w", cfg.power.ap_power_w},
                      {"ms_power_w", cfg.power.ms_power_w},
                      {"pilot_power_w", cfg.power.pilot_power_w}};
        j["noise"] = {{"ms_noise_figure_db", cfg.noise.ms_noise_figure_db},
                      {"lna_noise_figure_db", cfg.noise.lna_noise_figure_db},
                      {"lna_gain_db", cfg.noise.lna_gain_db},
                      {"phase_shifter_loss_db", cfg.noise.phase_shifter_loss_db},
                      {"combiner_loss_db", cfg.noise.combiner_loss_db},
                      {"rf_noise_figure_db", cfg.noise.rf_noise_figure_db}};
        j["fronthaul"] = {{"capacity_dl", cfg.fronthaul.capacity_dl}, {"capacity_ul", cfg.fronthaul.capacity_ul}};
        j["channel"] = {{"outage_length_m", c.outage_length_m},
                        {"outage_offset", c.outage_offset},
                        {"los_length_m", c.los_length_m},
                        {"los", fit_to_json(c.los)},
                        {"nlos", fit_to_json(c.nlos)},
                        {"mean_clusters", c.mean_clusters},
                        {"delay_spread_factor", c.delay_spread_factor},
                        {"cluster_power_std_db", c.cluster_power_std_db},
                        {"azimuth_spread_deg", c.azimuth_spread_deg},
                        {"elevation_spread_deg", c.elevation_spread_deg},
                        {"paths_per_cluster", c.paths_per_cluster}};
        j["shadowing"] = {{"decorrelation_m", cfg.shadowing.decorrelation_m}, {"ap_share", cfg.shadowing.ap_share}};
        j["simulation"] = {{"seed", cfg.simulation.seed},
                           {"num_drops", cfg.simulation.num_drops},
                           {"mc_realizations", cfg.simulation.mc_realizations},
                           {"mc_min_realizations", cfg.simulation.mc_min_realizations},
                           {"pilot_strategy", to_string(cfg.simulation.pilot_strategy)},
                           {"perfect_csi", cfg.simulation.perfect_csi}};
        j["solver"] = {{"bcd_max_iterations", cfg.solver.bcd_max_iterations},
                       {"bcd_tolerance", cfg.solver.bcd_tolerance},
                       {"bisection_tolerance", cfg.solver.bisection_tolerance},
                       {"root_tolerance", cfg.solver.root_tolerance},
                       {"root_max_iterations", cfg.solver.root_max_iterations},
                       {"sigma2_min", cfg.solver.sigma2_min},
                       {"fronthaul_tolerance", cfg.solver.fronthaul_tolerance}};
        return j;
    }

    SimConfig config_from_json(const nlohmann::json &j)
    {
        if (!j.is_object())
            throw ConfigError("configuration root must be an object");
        for (auto it = j.begin(); it != j.end(); ++it)
        {
            static const std::set<std::string> sections{"system",   "power",     "noise",      "fronthaul",
                                                        "channel",  "shadowing", "simulation", "solver"};
            if (!sections.count(it.key()))
                throw ConfigError("unknown configuration section '" + it.key() + "'");
        }

        SimConfig cfg;
        auto &s = cfg.system;
        SectionReader(section(j, "system"), "system")
            .field("carrier_frequency_hz", s.carrier_frequency_hz)
            .field("bandwidth_hz", s.bandwidth_hz)
            .field("area_side_m", s.area_side_m)
            .field("ap_height_m", s.ap_height_m)
            .field("ms_height_m", s.ms_height_m)
            .field("num_aps", s.num_aps)
            .field("num_users", s.num_users)
            .field("num_antennas", s.num_antennas)
            .field("num_rf_chains", s.num_rf_chains)
            .field("coherence_length", s.coherence_length)
            .field("pilot_length", s.pilot_length)
            .finish();
        SectionReader(section(j, "power"), "power")
            .field("ap_power_w", cfg.power.ap_power_w)
            .field("ms_power_w", cfg.power.ms_power_w)
            .field("pilot_power_w", cfg.power.pilot_power_w)
            .finish();
        SectionReader(section(j, "noise"), "noise")
            .field("ms_noise_figure_db", cfg.noise.ms_noise_figure_db)
            .field("lna_noise_figure_db", cfg.noise.lna_noise_figure_db)
            .field("lna_gain_db", cfg.noise.lna_gain_db)
            .field("phase_shifter_loss_db", cfg.noise.phase_shifter_loss_db)
            .field("combiner_loss_db", cfg.noise.combiner_loss_db)
            .field("rf_noise_figure_db", cfg.noise.rf_noise_figure_db)
            .finish();
        SectionReader(section(j, "fronthaul"), "fronthaul")
            .field("capacity_dl", cfg.fronthaul.capacity_dl)
            .field("capacity_ul", cfg.fronthaul.capacity_ul)
            .finish();
        auto &c = cfg.channel;
        SectionReader(section(j, "channel"), "channel")
            .field("outage_length_m", c.outage_length_m)
            .field("outage_offset", c.outage_offset)
            .field("los_length_m", c.los_length_m)
            .fit("los", c.los)
            .fit("nlos", c.nlos)
            .field("mean_clusters", c.mean_clusters)
            .field("delay_spread_factor", c.delay_spread_factor)
            .field("cluster_power_std_db", c.cluster_power_std_db)
            .field("azimuth_spread_deg", c.azimuth_spread_deg)
            .field("elevation_spread_deg", c.elevation_spread_deg)
            .field("paths_per_cluster", c.paths_per_cluster)
            .finish();
        SectionReader(section(j, "shadowing"), "shadowing")
            .field("decorrelation_m", cfg.shadowing.decorrelation_m)
            .field("ap_share", cfg.shadowing.ap_share)
            .finish();
        SectionReader(section(j, "simulation"), "simulation")
            .field("seed", cfg.simulation.seed)
            .field("num_drops", cfg.simulation.num_drops)
            .field("mc_realizations", cfg.simulation.mc_realizations)
            .field("mc_min_realizations", cfg.simulation.mc_min_realizations)
            .strategy("pilot_strategy", cfg.simulation.pilot_strategy)
            .field("perfect_csi", cfg.simulation.perfect_csi)
            .finish();
        SectionReader(section(j, "solver"), "solver")
            .field("bcd_max_iterations", cfg.solver.bcd_max_iterations)
            .field("bcd_tolerance", cfg.solver.bcd_tolerance)
            .field("bisection_tolerance", cfg.solver.bisection_tolerance)
            .field("root_tolerance", cfg.solver.root_tolerance)
            .field("root_max_iterations", cfg.solver.root_max_iterations)
            .field("sigma2_min", cfg.solver.sigma2_min)
            .field("fronthaul_tolerance", cfg.solver.fronthaul_tolerance)
            .finish();

        cfg.validate();
        return cfg;
    }

    SimConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open configuration file '" + path + "'");
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw ConfigError("cannot parse configuration file '" + path + "': " + e.what());
        }
        return config_from_json(j);
    }

    SimConfig with_override(const SimConfig &cfg, const std::string &dotted_key, const nlohmann::json &value)
    {
        auto j = to_json(cfg);
        nlohmann::json *node = &j;
        std::stringstream ss(dotted_key);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, '.'))
            parts.push_back(part);
        if (parts.empty())
            throw ConfigError("empty configuration key");
        for (std::size_t i = 0; i + 1 < parts.size(); ++i)
        {
            if (!node->contains(parts[i]))
                throw ConfigError("unknown configuration key '" + dotted_key + "'");
            node = &(*node)[parts[i]];
        }
        if (!node->is_object() || !node->contains(parts.back()))
            throw ConfigError("unknown configuration key '" + dotted_key + "'");
        auto &leaf = (*node)[parts.back()];
        // Sweep values often arrive as strings from the command line.
        if (value.is_string() && (leaf.is_number() || leaf.is_boolean()))
        {
            try
            {
                leaf = nlohmann::json::parse(value.get<std::string>());
            }
            catch (const nlohmann::json::parse_error &)
            {
                throw ConfigError("value '" + value.get<std::string>() + "' is not valid for '" + dotted_key + "'");
            }
        }
        else
            leaf = value;
        return config_from_json(j);
    }

    SimConfig full_profile()
    {
        SimConfig cfg;
        cfg.system.num_aps = 100;
        cfg.system.num_users = 25;
        cfg.system.num_antennas = 64;
        cfg.system.num_rf_chains = 8;
        cfg.simulation.mc_realizations = 100;
        cfg.simulation.num_drops = 100;
        return cfg;
    }
}
