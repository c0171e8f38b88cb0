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

#include "cfmm/channel.hpp"

#include <cstdio>
#include <fstream>

namespace cfmm
{
    std::string to_string(LinkState s)
    {
        switch (s)
        {
        case LinkState::outage:
            return "outage";
        case LinkState::los:
            return "los";
        case LinkState::nlos:
            return "nlos";
        }
        return "unknown";
    }

    LinkStateProbabilities link_state_probs(double d, const ChannelParams &params)
    {
        if (!(d > 0.0) || !std::isfinite(d))
            throw DomainError("link distance must be positive and finite");
        LinkStateProbabilities p;
        p.outage = std::max(0.0, 1.0 - std::exp(-d / params.outage_length_m + params.outage_offset));
        p.los = (1.0 - p.outage) * std::exp(-d / params.los_length_m);
        p.nlos = std::max(0.0, 1.0 - p.outage - p.los);
        return p;
    }

    LinkState draw_link_state(double d, const ChannelParams &params, RandomStream &rng)
    {
        const auto p = link_state_probs(d, params);
        const double u = rng.uniform();
        if (u < p.outage)
            return LinkState::outage;
        if (u < p.outage + p.los)
            return LinkState::los;
        return LinkState::nlos;
    }

    double path_loss_db(double d, LinkState state, double shadow_db, const ChannelParams &params)
    {
        if (!(d > 0.0))
            throw DomainError("link distance must be positive");
        if (state == LinkState::outage)
            return kOutageLossDb;
        const auto &fit = state == LinkState::los ? params.los : params.nlos;
        return fit.alpha_db + 10.0 * fit.beta * std::log10(d) + shadow_db;
    }

    RMatrix ShadowField::scaled(double std_db) const
    {
        RMatrix out(ap_component.size(), ms_component.size());
        for (Eigen::Index m = 0; m < out.rows(); ++m)
            for (Eigen::Index k = 0; k < out.cols(); ++k)
                out(m, k) = std_db * unit(m, k);
        return out;
    }

    RVector correlated_field(const RMatrix &distances, double decorrelation_m, RandomStream &rng)
    {
        const Eigen::Index n = distances.rows();
        RMatrix corr(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                corr(i, j) = std::exp2(-distances(i, j) / decorrelation_m);

        // Coincident points make the kernel singular; a tiny ridge keeps the
        // factorization defined without visibly changing the correlation.
        Eigen::LLT<RMatrix> llt(corr);
        double ridge = 1e-12;
        while (llt.info() != Eigen::Success && ridge < 1e-3)
        {
            RMatrix c = corr;
            c.diagonal().array() += ridge;
            llt.compute(c);
            ridge *= 10.0;
        }
        if (llt.info() != Eigen::Success)
            throw SolverError("shadowing correlation matrix is not positive definite");

        RVector z(n);
        for (Eigen::Index i = 0; i < n; ++i)
            z(i) = rng.normal();
        return llt.matrixL() * z;
    }

    ShadowField draw_shadow_field(const NetworkScenario &scenario, const ShadowingParams &params, std::uint64_t seed)
    {
        RandomStream ap_rng(seed, Stream::shadowing, {0});
        RandomStream ms_rng(seed, Stream::shadowing, {1});
        ShadowField f;
        f.ap_share = params.ap_share;
        f.ap_component = correlated_field(scenario.ap_distance, params.decorrelation_m, ap_rng);
        f.ms_component = correlated_field(scenario.ms_distance, params.decorrelation_m, ms_rng);
        return f;
    }

    namespace
    {
        double wrap_angle(double x) { return std::remainder(x, 2.0 * kPi); }
        double deg_to_rad(double d) { return d * kPi / 180.0; }
    }

    ClusterGeometry draw_cluster_geometry(double los_elevation, std::size_t num_antennas, const ChannelParams &params,
                                          RandomStream &rng)
    {
        ClusterGeometry g;
        g.paths_per_cluster = params.paths_per_cluster;
        const std::size_t count = static_cast<std::size_t>(std::max(1L, rng.poisson(params.mean_clusters)));

        std::vector<double> raw(count);
        double total = 0.0;
        for (auto &r : raw)
        {
            const double u = 1.0 - rng.uniform(); // (0, 1]
            const double z = rng.normal(0.0, params.cluster_power_std_db);
            r = std::pow(u, params.delay_spread_factor - 1.0) * std::pow(10.0, z / 10.0);
            total += r;
        }

        const double mean_az_spread = deg_to_rad(params.azimuth_spread_deg);
        const double mean_el_spread = deg_to_rad(params.elevation_spread_deg);
        g.clusters.resize(count);
        for (std::size_t c = 0; c < count; ++c)
        {
            auto &cl = g.clusters[c];
            cl.power = static_cast<double>(num_antennas) * raw[c] /
                       (static_cast<double>(params.paths_per_cluster) * total);
            cl.azimuth = rng.uniform(-kPi, kPi);
            cl.elevation = los_elevation;
            cl.azimuth_spread = rng.exponential(mean_az_spread);
            cl.elevation_spread = rng.exponential(mean_el_spread);
            cl.path_azimuths.resize(params.paths_per_cluster);
            cl.path_elevations.resize(params.paths_per_cluster);
            for (std::size_t p = 0; p < params.paths_per_cluster; ++p)
            {
                cl.path_azimuths[p] = wrap_angle(rng.normal(cl.azimuth, cl.azimuth_spread));
                cl.path_elevations[p] = wrap_angle(rng.normal(cl.elevation, cl.elevation_spread));
            }
        }
        return g;
    }

    CVector array_response(double azimuth, double /*elevation*/, std::size_t num_antennas)
    {
        CVector a(num_antennas);
        const double phase = kPi * std::sin(azimuth);
        const double scale = 1.0 / std::sqrt(static_cast<double>(num_antennas));
        for (std::size_t n = 0; n < num_antennas; ++n)
            a(n) = std::polar(scale, phase * static_cast<double>(n));
        return a;
    }

    CMatrix steering_matrix(const ClusterGeometry &geometry, std::size_t num_antennas)
    {
        CMatrix a(num_antennas, geometry.num_paths());
        Eigen::Index col = 0;
        for (const auto &cl : geometry.clusters)
            for (std::size_t p = 0; p < geometry.paths_per_cluster; ++p)
                a.col(col++) = array_response(cl.path_azimuths[p], cl.path_elevations[p], num_antennas);
        return a;
    }

    namespace
    {
        RVector path_gain_std(const ClusterGeometry &geometry, double pl_db)
        {
            const double gain = std::pow(10.0, -pl_db / 10.0);
            RVector s(geometry.num_paths());
            Eigen::Index i = 0;
            for (const auto &cl : geometry.clusters)
                for (std::size_t p = 0; p < geometry.paths_per_cluster; ++p)
                    s(i++) = std::sqrt(cl.power * gain);
            return s;
        }
    }

    CMatrix build_covariance(const ClusterGeometry &geometry, double pl_db, std::size_t num_antennas)
    {
        if (!std::isfinite(pl_db) || geometry.clusters.empty())
            return CMatrix::Zero(num_antennas, num_antennas);
        const CMatrix a = steering_matrix(geometry, num_antennas);
        const RVector s = path_gain_std(geometry, pl_db);
        const CMatrix weighted = a * s.asDiagonal();
        CMatrix r = weighted * weighted.adjoint();
        return 0.5 * (r + r.adjoint());
    }

    LinkLargeScale make_link(LinkState state, double distance_m, double shadow_db, ClusterGeometry geometry,
                             std::size_t num_antennas, const ChannelParams &params)
    {
        LinkLargeScale link;
        link.state = state;
        link.distance_m = distance_m;
        if (state == LinkState::outage)
        {
            link.covariance = CMatrix::Zero(num_antennas, num_antennas);
            link.steering = CMatrix(num_antennas, 0);
            link.path_std = RVector(0);
            return link;
        }
        link.shadow_db = shadow_db;
        link.pl_db = path_loss_db(distance_m, state, shadow_db, params);
        link.clusters = std::move(geometry);
        link.steering = steering_matrix(link.clusters, num_antennas);
        link.path_std = path_gain_std(link.clusters, link.pl_db);
        link.covariance = build_covariance(link.clusters, link.pl_db, num_antennas);
        return link;
    }

    CVector draw_small_scale(const LinkLargeScale &link, RandomStream &rng)
    {
        const Eigen::Index n = link.steering.rows();
        if (link.in_outage())
            return CVector::Zero(n);
        CVector alpha(link.path_std.size());
        for (Eigen::Index p = 0; p < alpha.size(); ++p)
            alpha(p) = link.path_std(p) * rng.complex_normal();
        return link.steering * alpha;
    }

    LinkTable build_large_scale(const SimConfig &cfg, const NetworkScenario &scenario, std::uint64_t seed)
    {
        LinkTable t;
        t.num_aps = scenario.M();
        t.num_users = scenario.K();
        t.num_antennas = cfg.N();
        t.links.resize(t.num_aps * t.num_users);

        const auto field = draw_shadow_field(scenario, cfg.shadowing, seed);
        for (std::size_t m = 0; m < t.num_aps; ++m)
        {
            for (std::size_t k = 0; k < t.num_users; ++k)
            {
                const double d = scenario.distance(m, k);
                RandomStream state_rng(seed, Stream::link_state, {m, k});
                const LinkState state = draw_link_state(d, cfg.channel, state_rng);
                if (state == LinkState::outage)
                {
                    t.at(m, k) = make_link(state, d, 0.0, {}, t.num_antennas, cfg.channel);
                    continue;
                }
                const auto &ap = scenario.ap_positions[m];
                const auto &ms = scenario.ms_positions[k];
                const double horizontal = std::hypot(ap.x - ms.x, ap.y - ms.y);
                const double elevation = std::atan2(ms.z - ap.z, horizontal);

                const double sigma = state == LinkState::los ? cfg.channel.los.shadow_std_db
                                                             : cfg.channel.nlos.shadow_std_db;
                RandomStream cluster_rng(seed, Stream::clusters, {m, k});
                auto geometry = draw_cluster_geometry(elevation, t.num_antennas, cfg.channel, cluster_rng);
                t.at(m, k) = make_link(state, d, sigma * field.unit(m, k), std::move(geometry), t.num_antennas,
                                       cfg.channel);
            }
        }
        return t;
    }

    void write_link_csv(const LinkTable &table, const std::string &path)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write '" + path + "'");
        out << "ap,ms,state,distance_m,shadow_db,path_loss_db,trace_covariance,clusters\n";
        char buf[256];
        for (std::size_t m = 0; m < table.num_aps; ++m)
        {
            for (std::size_t k = 0; k < table.num_users; ++k)
            {
                const auto &l = table.at(m, k);
                std::snprintf(buf, sizeof buf, "%zu,%zu,%s,%.9g,%.9g,%.9g,%.9g,%zu\n", m, k, to_string(l.state).c_str(),
                              l.distance_m, l.shadow_db, l.pl_db, l.covariance.trace().real(),
                              l.clusters.clusters.size());
                out << buf;
            }
        }
    }
}
