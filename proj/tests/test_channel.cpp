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

#include "catch_amalgamated.hpp"

#include "cfmm/channel.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace cfmm;
using Catch::Approx;

namespace
{
    ChannelParams params() { return ChannelParams{}; }

    CMatrix empirical_covariance(const LinkLargeScale &link, std::size_t draws, std::uint64_t seed)
    {
        RandomStream rng(seed);
        const auto n = link.covariance.rows();
        CMatrix acc = CMatrix::Zero(n, n);
        for (std::size_t i = 0; i < draws; ++i)
        {
            const CVector h = draw_small_scale(link, rng);
            acc.noalias() += h * h.adjoint();
        }
        return acc / static_cast<double>(draws);
    }
}

TEST_CASE("channel: link-state probabilities at reference distances")
{
    const auto p = params();
    // Hand-evaluated with 1/a_out = 30 m, b_out = 5.2, 1/a_LOS = 67.1 m.
    const auto at100 = link_state_probs(100.0, p);
    CHECK(at100.outage == 0.0);
    CHECK(at100.los == Approx(0.22530213265959573).epsilon(1e-12));

    const auto at156 = link_state_probs(156.0, p);
    CHECK(at156.outage == 0.0);

    const auto at200 = link_state_probs(200.0, p);
    CHECK(at200.outage == Approx(0.7693068177450372).epsilon(1e-12));
    CHECK(at200.los == Approx(0.011710228385404543).epsilon(1e-10));
    CHECK(at200.nlos == Approx(0.2189829538695583).epsilon(1e-10));

    CHECK_THROWS_AS(link_state_probs(0.0, p), DomainError);
    CHECK_THROWS_AS(link_state_probs(-1.0, p), DomainError);
}

TEST_CASE("channel: link-state probabilities sum to one")
{
    const auto p = params();
    for (double d = 0.5; d <= 2000.0; d *= 1.07)
    {
        const auto s = link_state_probs(d, p);
        CHECK(s.outage >= 0.0);
        CHECK(s.los >= 0.0);
        CHECK(s.nlos >= -1e-15);
        CHECK(s.outage + s.los + s.nlos == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("channel: empirical link-state frequencies")
{
    const auto p = params();
    RandomStream rng(42);
    for (double d : {50.0, 150.0, 250.0})
    {
        const auto ref = link_state_probs(d, p);
        const int n = 100000;
        int out = 0, los = 0, nlos = 0;
        for (int i = 0; i < n; ++i)
        {
            switch (draw_link_state(d, p, rng))
            {
            case LinkState::outage: ++out; break;
            case LinkState::los: ++los; break;
            case LinkState::nlos: ++nlos; break;
            }
        }
        CHECK(std::abs(out / double(n) - ref.outage) < 0.01);
        CHECK(std::abs(los / double(n) - ref.los) < 0.01);
        CHECK(std::abs(nlos / double(n) - ref.nlos) < 0.01);
    }
}

TEST_CASE("channel: path loss plug-in values")
{
    const auto p = params();
    CHECK(path_loss_db(1.0, LinkState::los, 0.0, p) == Approx(61.4).epsilon(1e-14));
    CHECK(path_loss_db(10.0, LinkState::los, 0.0, p) == Approx(81.4).epsilon(1e-14));
    CHECK(path_loss_db(100.0, LinkState::nlos, 3.0, p) == Approx(72.0 + 58.4 + 3.0).epsilon(1e-14));
    CHECK(std::isinf(path_loss_db(100.0, LinkState::outage, 0.0, p)));
}

TEST_CASE("channel: correlated field kernel")
{
    RMatrix d(2, 2);
    d << 0.0, 50.0, 50.0, 0.0;
    RandomStream rng(7);
    const int n = 20000;
    double s01 = 0.0, s00 = 0.0, s11 = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const RVector f = correlated_field(d, 50.0, rng);
        s00 += f(0) * f(0);
        s11 += f(1) * f(1);
        s01 += f(0) * f(1);
    }
    CHECK(std::abs(s00 / n - 1.0) < 0.05);
    CHECK(std::abs(s11 / n - 1.0) < 0.05);
    CHECK(std::abs(s01 / std::sqrt(s00 * s11) - 0.5) < 0.03);

    RMatrix zero = RMatrix::Zero(2, 2);
    const RVector f = correlated_field(zero, 50.0, rng);
    CHECK(f(0) == Approx(f(1)).margin(1e-4));
}

TEST_CASE("channel: correlated field is prefix consistent")
{
    RMatrix d3(3, 3);
    d3 << 0, 40, 90, 40, 0, 60, 90, 60, 0;
    const RMatrix d2 = d3.topLeftCorner(2, 2);
    RandomStream a(99), b(99);
    const RVector f3 = correlated_field(d3, 50.0, a);
    const RVector f2 = correlated_field(d2, 50.0, b);
    CHECK(f3(0) == f2(0));
    CHECK(f3(1) == Approx(f2(1)).epsilon(1e-12));
}

TEST_CASE("channel: shadow field variance and limiting share")
{
    SimConfig cfg = testing::small_config(4, 3, 8, 2, 3);
    const auto scenario = generate_scenario(cfg, 1);
    ShadowingParams sp;
    const int n = 10000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const auto f = draw_shadow_field(scenario, sp, static_cast<std::uint64_t>(i));
        const double v = f.scaled(8.7)(1, 2);
        acc += v * v;
    }
    CHECK(std::abs(acc / n / (8.7 * 8.7) - 1.0) < 0.05);

    sp.ap_share = 0.0;
    const auto f = draw_shadow_field(scenario, sp, 5);
    const RMatrix s = f.scaled(5.8);
    for (Eigen::Index k = 0; k < s.cols(); ++k)
        for (Eigen::Index m = 1; m < s.rows(); ++m)
            CHECK(s(m, k) == s(0, k));
}

TEST_CASE("channel: cluster normalization")
{
    ChannelParams p = params();
    p.mean_clusters = 0.0;
    p.paths_per_cluster = 4;
    RandomStream rng(3);
    const auto g = draw_cluster_geometry(0.1, 8, p, rng);
    REQUIRE(g.clusters.size() == 1);
    CHECK(g.clusters[0].power == Approx(2.0).epsilon(1e-14));

    const auto q = params();
    for (int i = 0; i < 200; ++i)
    {
        const auto geo = draw_cluster_geometry(0.0, 16, q, rng);
        CHECK(geo.clusters.size() >= 1);
        double sum = 0.0;
        for (const auto &c : geo.clusters)
        {
            CHECK(c.power > 0.0);
            CHECK(c.path_azimuths.size() == q.paths_per_cluster);
            for (double a : c.path_azimuths)
            {
                CHECK(a >= -kPi);
                CHECK(a <= kPi);
            }
            sum += c.power;
        }
        CHECK(sum * static_cast<double>(q.paths_per_cluster) == Approx(16.0).epsilon(1e-12));
    }
}

TEST_CASE("channel: array response")
{
    const CVector a0 = array_response(0.0, 0.3, 8);
    for (Eigen::Index n = 0; n < a0.size(); ++n)
        CHECK(std::abs(a0(n) - cplx(1.0 / std::sqrt(8.0), 0.0)) < 1e-15);

    const CVector a2 = array_response(kPi / 2.0, 0.0, 2);
    CHECK(std::abs(a2(0) - cplx(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    CHECK(std::abs(a2(1) - cplx(-1.0 / std::sqrt(2.0), 0.0)) < 1e-15);

    RandomStream rng(8);
    for (int i = 0; i < 100; ++i)
        CHECK(array_response(rng.uniform(-kPi, kPi), 0.0, 16).norm() == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("channel: covariance structure")
{
    ChannelParams p = params();
    p.mean_clusters = 0.0;
    p.paths_per_cluster = 1;
    RandomStream rng(4);
    const auto single = draw_cluster_geometry(0.0, 8, p, rng);
    const CMatrix r1 = build_covariance(single, 0.0, 8);
    const CVector a = array_response(single.clusters[0].path_azimuths[0], 0.0, 8);
    CHECK((r1 - single.clusters[0].power * a * a.adjoint()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(r1);
    CHECK(es.eigenvalues()(6) < 1e-12);

    const auto q = params();
    for (int i = 0; i < 50; ++i)
    {
        const auto geo = draw_cluster_geometry(0.0, 16, q, rng);
        const double pl = 60.0 + 40.0 * rng.uniform();
        const CMatrix r = build_covariance(geo, pl, 16);
        CHECK(r.trace().real() == Approx(16.0 * std::pow(10.0, -pl / 10.0)).epsilon(1e-10));
        CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * r.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<CMatrix> e(r);
        CHECK(e.eigenvalues().minCoeff() >= -1e-12 * e.eigenvalues().maxCoeff());
    }
    CHECK(build_covariance(single, kOutageLossDb, 8).norm() == 0.0);
}

TEST_CASE("channel: small-scale draws reproduce the covariance")
{
    const auto p = params();
    RandomStream rng(12);
    for (int i = 0; i < 5; ++i)
    {
        auto geo = draw_cluster_geometry(0.05, 16, p, rng);
        const auto link = make_link(i % 2 ? LinkState::los : LinkState::nlos, 80.0, 2.0, std::move(geo), 16, p);
        const CMatrix emp = empirical_covariance(link, 10000, 100 + i);
        CHECK(testing::relative_frobenius(emp, link.covariance) < 0.05);
    }
}

TEST_CASE("channel: small-scale draws have zero mean")
{
    const auto p = params();
    RandomStream rng(13);
    auto geo = draw_cluster_geometry(0.0, 8, p, rng);
    const auto link = make_link(LinkState::los, 60.0, 0.0, std::move(geo), 8, p);
    const int n = 10000;
    CVector mean = CVector::Zero(8);
    for (int i = 0; i < n; ++i)
        mean += draw_small_scale(link, rng);
    mean /= n;
    for (Eigen::Index a = 0; a < 8; ++a)
    {
        const double sigma = std::sqrt(link.covariance(a, a).real());
        CHECK(std::abs(mean(a)) < 3.0 * sigma / std::sqrt(double(n)) * std::sqrt(2.0));
    }
}

TEST_CASE("channel: outage links")
{
    const auto p = params();
    RandomStream rng(14);
    const auto link = make_link(LinkState::outage, 300.0, 0.0, draw_cluster_geometry(0.0, 8, p, rng), 8, p);
    CHECK(link.in_outage());
    CHECK(link.large_scale_gain() == 0.0);
    CHECK(link.covariance.norm() == 0.0);
    const CVector h = draw_small_scale(link, rng);
    CHECK(h.size() == 8);
    CHECK(h.norm() == 0.0);
}

TEST_CASE("channel: large-scale table is deterministic")
{
    const SimConfig cfg = testing::small_config(6, 5, 8, 2, 5);
    const auto s = generate_scenario(cfg, 21);
    const auto a = build_large_scale(cfg, s, 21);
    const auto b = build_large_scale(cfg, s, 21);
    for (std::size_t i = 0; i < a.links.size(); ++i)
    {
        CHECK(a.links[i].state == b.links[i].state);
        CHECK(a.links[i].covariance == b.links[i].covariance);
    }
}
