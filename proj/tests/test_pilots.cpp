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

#include "cfmm/pilots.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace cfmm;
using Catch::Approx;

namespace
{
    std::size_t load_spread(const std::vector<std::size_t> &pilot_of, std::size_t tau)
    {
        std::vector<std::size_t> load(tau, 0);
        for (auto p : pilot_of)
            ++load[p];
        const auto [lo, hi] = std::minmax_element(load.begin(), load.end());
        return *hi - *lo;
    }

    RMatrix random_fingerprints(std::size_t M, std::size_t K, RandomStream &rng)
    {
        RMatrix f(M, K);
        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t k = 0; k < K; ++k)
                f(m, k) = std::pow(10.0, -4.0 * rng.uniform());
        return f;
    }
}

TEST_CASE("pilots: book is unitary")
{
    const CMatrix b1 = make_pilot_book(1);
    CHECK(b1.rows() == 1);
    CHECK(std::abs(b1(0, 0) - cplx(1.0, 0.0)) < 1e-15);
    for (std::size_t tau : {2u, 3u, 7u, 15u, 16u})
    {
        const CMatrix b = make_pilot_book(tau);
        CHECK((b.adjoint() * b - CMatrix::Identity(tau, tau)).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS(make_pilot_book(0));
}

TEST_CASE("pilots: random assignment")
{
    const auto single = assign_rpa(6, 1, 3);
    CHECK(std::all_of(single.begin(), single.end(), [](std::size_t p) { return p == 0; }));
    CHECK(assign_rpa(20, 5, 77) == assign_rpa(20, 5, 77));

    // Multinomial frequencies: each count within 3 standard deviations.
    const std::size_t tau = 5, draws = 10000;
    std::vector<double> count(tau, 0.0);
    for (std::size_t i = 0; i < draws; ++i)
        ++count[assign_rpa(1, tau, i)[0]];
    const double p = 1.0 / tau;
    const double sd = std::sqrt(draws * p * (1.0 - p));
    for (double c : count)
        CHECK(std::abs(c - draws * p) < 3.0 * sd);
}

TEST_CASE("pilots: balanced assignment")
{
    CHECK(assign_brpa(5, 2) == std::vector<std::size_t>{0, 1, 0, 1, 0});
    const auto few = assign_brpa(4, 6);
    CHECK(std::set<std::size_t>(few.begin(), few.end()).size() == 4);
    for (std::size_t K = 1; K < 40; ++K)
        CHECK(load_spread(assign_brpa(K, 7), 7) <= 1);
}

TEST_CASE("pilots: cosine similarity")
{
    RVector x(3);
    x << 0.2, 1.5, 0.7;
    CHECK(cosine_similarity(x, x) == Approx(1.0).epsilon(1e-15));
    RVector e1 = RVector::Zero(2), e2 = RVector::Zero(2);
    e1(0) = 1.0;
    e2(1) = 1.0;
    CHECK(cosine_similarity(e1, e2) == 0.0);
    RVector a(2), b(2);
    a << 1.0, 1.0;
    b << 1.0, 0.0;
    CHECK(cosine_similarity(a, b) == Approx(0.7071067811865476).epsilon(1e-15));
    CHECK_THROWS_AS(cosine_similarity(RVector::Zero(2), b), DomainError);

    RandomStream rng(41);
    for (int i = 0; i < 100; ++i)
    {
        const RMatrix f = random_fingerprints(6, 2, rng);
        const double s = cosine_similarity(f.col(0), f.col(1));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0 + 1e-15);
        CHECK(s == Approx(cosine_similarity(f.col(1), f.col(0))).epsilon(1e-15));
        CHECK(s == Approx(cosine_similarity(3.7 * f.col(0), f.col(1))).epsilon(1e-14));
    }
}

TEST_CASE("pilots: dissimilarity clusters use stride tau_p")
{
    // Fingerprints built so that the similarity order is 4, 1, 3, 2, 0.
    RMatrix f(2, 5);
    f << 1.0, 1.0, 1.0, 1.0, 1.0,
         0.6, 0.9, 0.4, 0.7, 0.1;
    const auto order = dcpa_order(f);
    const RVector c = f.rowwise().mean();
    for (std::size_t i = 1; i < order.size(); ++i)
        CHECK(cosine_similarity(f.col(order[i - 1]), c) <= cosine_similarity(f.col(order[i]), c));

    const auto pilots = assign_dcpa(f, 2);
    for (std::size_t i = 0; i < order.size(); ++i)
        CHECK(pilots[order[i]] == i % 2);
    CHECK(pilots[order[0]] == pilots[order[2]]);
    CHECK(pilots[order[2]] == pilots[order[4]]);
    CHECK(pilots[order[1]] == pilots[order[3]]);
    CHECK(pilots[order[0]] != pilots[order[1]]);
}

TEST_CASE("pilots: identical fingerprints never share a pilot")
{
    RandomStream rng(42);
    for (int trial = 0; trial < 50; ++trial)
    {
        RMatrix f = random_fingerprints(5, 9, rng);
        const std::size_t a = rng.uniform_index(9);
        std::size_t b = rng.uniform_index(9);
        if (b == a)
            b = (a + 1) % 9;
        f.col(b) = f.col(a);
        const auto pilots = assign_dcpa(f, 3);
        CHECK(pilots[a] != pilots[b]);
    }
}

TEST_CASE("pilots: dissimilarity assignment properties")
{
    RandomStream rng(43);
    for (int trial = 0; trial < 50; ++trial)
    {
        const std::size_t K = 1 + rng.uniform_index(30);
        const std::size_t tau = 1 + rng.uniform_index(10);
        const RMatrix f = random_fingerprints(4, K, rng);
        const auto pilots = assign_dcpa(f, tau);
        CHECK(pilots.size() == K);
        CHECK(load_spread(pilots, tau) <= 1);
        if (K <= tau)
            CHECK(std::set<std::size_t>(pilots.begin(), pilots.end()).size() == K);
        CHECK(dcpa_order(f) == dcpa_order(std::ldexp(1.0, 20) * f));
        CHECK(dcpa_order(f) == dcpa_order(0.37 * f));
    }
    RMatrix bad = RMatrix::Ones(3, 4);
    bad.col(2).setZero();
    CHECK_THROWS_AS(assign_dcpa(bad, 2), DomainError);
}

TEST_CASE("pilots: DCPA and BRPA coincide up to relabeling when K <= tau_p")
{
    RandomStream rng(44);
    for (int trial = 0; trial < 20; ++trial)
    {
        const std::size_t tau = 15, K = 1 + rng.uniform_index(tau);
        const RMatrix f = random_fingerprints(8, K, rng);
        const auto d = assign_pilots(PilotStrategy::dcpa, f, tau, 1);
        const auto b = assign_pilots(PilotStrategy::brpa, f, tau, 1);
        std::map<std::size_t, std::size_t> relabel;
        bool consistent = true;
        for (std::size_t k = 0; k < K; ++k)
        {
            const auto [it, fresh] = relabel.emplace(d.pilot_of[k], b.pilot_of[k]);
            consistent = consistent && (fresh || it->second == b.pilot_of[k]);
        }
        CHECK(consistent);
        for (std::size_t a = 0; a < K; ++a)
            for (std::size_t c = 0; c < K; ++c)
                CHECK(d.share_pilot(a, c) == b.share_pilot(a, c));
    }
}

TEST_CASE("pilots: assignment record")
{
    RMatrix f = RMatrix::Ones(2, 5);
    const auto a = assign_pilots(PilotStrategy::brpa, f, 2, 0);
    CHECK(a.pilot_length() == 2);
    CHECK(a.num_users() == 5);
    CHECK(a.users_of(0) == std::vector<std::size_t>{0, 2, 4});
    CHECK(a.users_of(1) == std::vector<std::size_t>{1, 3});
    CHECK(a.share_pilot(0, 4));
    CHECK_FALSE(a.share_pilot(0, 1));
}
