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

#ifndef CFMM_CHANNEL_HPP
#define CFMM_CHANNEL_HPP

#include "cfmm/config.hpp"
#include "cfmm/random.hpp"
#include "cfmm/scenario.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace cfmm
{
    enum class LinkState
    {
        outage,
        los,
        nlos
    };

    std::string to_string(LinkState s);

    struct LinkStateProbabilities
    {
        double outage = 0.0;
        double los = 0.0;
        double nlos = 0.0;
    };

    // Throws DomainError for d <= 0.
    LinkStateProbabilities link_state_probs(double d, const ChannelParams &params);
    LinkState draw_link_state(double d, const ChannelParams &params, RandomStream &rng);

    inline constexpr double kOutageLossDb = std::numeric_limits<double>::infinity();

    // alpha + 10 beta log10(d) + shadow_db; +inf for outage links.
    double path_loss_db(double d, LinkState state, double shadow_db, const ChannelParams &params);

    // Unit-variance two-component shadowing field. The dB value for a link
    // is the state's shadowing deviation times unit(m, k).
    struct ShadowField
    {
        RVector ap_component; // M, correlation 2^(-d / d_decorr) over AP distances
        RVector ms_component; // K, same over MS distances
        double ap_share = 0.5;

        double unit(std::size_t m, std::size_t k) const
        {
            return std::sqrt(ap_share) * ap_component(m) + std::sqrt(1.0 - ap_share) * ms_component(k);
        }

        // M x K matrix of shadowing values in dB for a uniform deviation.
        RMatrix scaled(double std_db) const;
    };

    // Zero-mean unit-variance Gaussian vector with correlation 2^(-d / d_decorr).
    // Draws are sequential through a lower Cholesky factor, so a prefix of
    // the points always receives the same values.
    RVector correlated_field(const RMatrix &distances, double decorrelation_m, RandomStream &rng);

    ShadowField draw_shadow_field(const NetworkScenario &scenario, const ShadowingParams &params, std::uint64_t seed);

    struct Cluster
    {
        double power = 0.0; // normalized so that sum(power) * paths = N
        double azimuth = 0.0;
        double elevation = 0.0;
        double azimuth_spread = 0.0;
        double elevation_spread = 0.0;
        std::vector<double> path_azimuths;
        std::vector<double> path_elevations;
    };

    struct ClusterGeometry
    {
        std::vector<Cluster> clusters;
        std::size_t paths_per_cluster = 0;

        std::size_t num_paths() const { return clusters.size() * paths_per_cluster; }
    };

    // los_elevation is the elevation of the direct AP-to-MS ray in radians.
    ClusterGeometry draw_cluster_geometry(double los_elevation, std::size_t num_antennas, const ChannelParams &params,
                                          RandomStream &rng);

    // Half-wavelength ULA response; the elevation does not enter.
    CVector array_response(double azimuth, double elevation, std::size_t num_antennas);

    // Steering vectors of all paths, one column per path.
    CMatrix steering_matrix(const ClusterGeometry &geometry, std::size_t num_antennas);

    // sum_c gamma_c sum_p a a^H scaled by 10^(-pl_db / 10). Zero for infinite loss.
    CMatrix build_covariance(const ClusterGeometry &geometry, double pl_db, std::size_t num_antennas);

    struct LinkLargeScale
    {
        LinkState state = LinkState::outage;
        double distance_m = 0.0;
        double shadow_db = 0.0;
        double pl_db = kOutageLossDb;
        ClusterGeometry clusters;
        CMatrix covariance; // N x N
        CMatrix steering;   // N x paths
        RVector path_std;   // per-path gain standard deviation

        bool in_outage() const { return state == LinkState::outage; }
        double large_scale_gain() const { return in_outage() ? 0.0 : std::pow(10.0, -pl_db / 10.0); }
    };

    // Builds a link record, including covariance and the per-path fading factors.
    LinkLargeScale make_link(LinkState state, double distance_m, double shadow_db, ClusterGeometry geometry,
                             std::size_t num_antennas, const ChannelParams &params);

    // h = sum over paths of alpha_p a_p with alpha_p ~ CN(0, gamma_c 10^(-PL/10)).
    CVector draw_small_scale(const LinkLargeScale &link, RandomStream &rng);

    // All M x K links of a drop, stored AP-major.
    struct LinkTable
    {
        std::size_t num_aps = 0;
        std::size_t num_users = 0;
        std::size_t num_antennas = 0;
        std::vector<LinkLargeScale> links;

        const LinkLargeScale &at(std::size_t m, std::size_t k) const { return links[m * num_users + k]; }
        LinkLargeScale &at(std::size_t m, std::size_t k) { return links[m * num_users + k]; }
    };

    // Draws link states, shadowing and cluster geometry for every link.
    // Every link uses its own substream keyed by (m, k).
    LinkTable build_large_scale(const SimConfig &cfg, const NetworkScenario &scenario, std::uint64_t seed);

    // Debug dump: one row per link with state, distance, path loss and trace(R).
    void write_link_csv(const LinkTable &table, const std::string &path);
}

#endif
