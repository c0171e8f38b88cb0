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

#include "cfmm/pilots.hpp"

#include "cfmm/random.hpp"

#include <algorithm>
#include <numeric>

namespace cfmm
{
    CMatrix make_pilot_book(std::size_t pilot_length)
    {
        if (pilot_length == 0)
            throw std::invalid_argument("pilot length must be at least 1");
        const double n = static_cast<double>(pilot_length);
        CMatrix book(pilot_length, pilot_length);
        for (std::size_t i = 0; i < pilot_length; ++i)
            for (std::size_t t = 0; t < pilot_length; ++t)
            {
                // Reduce the exponent first so the phase stays small and exact.
                const double e = static_cast<double>((i * t) % pilot_length);
                book(i, t) = std::polar(1.0 / std::sqrt(n), -2.0 * kPi * e / n);
            }
        return book;
    }

    std::vector<std::size_t> assign_rpa(std::size_t num_users, std::size_t pilot_length, std::uint64_t seed)
    {
        if (pilot_length == 0)
            throw std::invalid_argument("pilot length must be at least 1");
        RandomStream rng(seed, Stream::pilot_assignment);
        std::vector<std::size_t> out(num_users);
        for (auto &p : out)
            p = rng.uniform_index(pilot_length);
        return out;
    }

    std::vector<std::size_t> assign_brpa(std::size_t num_users, std::size_t pilot_length)
    {
        if (pilot_length == 0)
            throw std::invalid_argument("pilot length must be at least 1");
        std::vector<std::size_t> out(num_users);
        for (std::size_t k = 0; k < num_users; ++k)
            out[k] = k % pilot_length;
        return out;
    }

    double cosine_similarity(const RVector &a, const RVector &b)
    {
        if (a.size() != b.size())
            throw std::invalid_argument("cosine_similarity: size mismatch");
        const double na = a.norm();
        const double nb = b.norm();
        if (na == 0.0 || nb == 0.0)
            throw DomainError("cosine_similarity: zero vector");
        return a.dot(b) / (na * nb);
    }

    std::vector<std::size_t> dcpa_order(const RMatrix &fingerprints)
    {
        const std::size_t K = fingerprints.cols();
        if (K == 0)
            throw std::invalid_argument("dcpa_order: no users");
        for (std::size_t k = 0; k < K; ++k)
            if (fingerprints.col(k).norm() == 0.0)
                throw DomainError("MS " + std::to_string(k) + " has an all-zero fingerprint");

        const RVector centroid = fingerprints.rowwise().mean();
        std::vector<double> sim(K);
        for (std::size_t k = 0; k < K; ++k)
            sim[k] = cosine_similarity(fingerprints.col(k), centroid);

        std::vector<std::size_t> order(K);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sim[a] < sim[b]; });
        return order;
    }

    std::vector<std::size_t> assign_dcpa(const RMatrix &fingerprints, std::size_t pilot_length)
    {
        if (pilot_length == 0)
            throw std::invalid_argument("pilot length must be at least 1");
        const auto order = dcpa_order(fingerprints);
        std::vector<std::size_t> out(order.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            out[order[i]] = i % pilot_length;
        return out;
    }

    std::vector<std::size_t> PilotAssignment::users_of(std::size_t pilot) const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < pilot_of.size(); ++k)
            if (pilot_of[k] == pilot)
                out.push_back(k);
        return out;
    }

    PilotAssignment assign_pilots(PilotStrategy strategy, const RMatrix &weights, std::size_t pilot_length,
                                  std::uint64_t seed)
    {
        PilotAssignment a;
        a.book = make_pilot_book(pilot_length);
        a.strategy = strategy;
        const std::size_t K = weights.cols();
        switch (strategy)
        {
        case PilotStrategy::rpa:
            a.pilot_of = assign_rpa(K, pilot_length, seed);
            break;
        case PilotStrategy::brpa:
            a.pilot_of = assign_brpa(K, pilot_length);
            break;
        case PilotStrategy::dcpa:
            a.pilot_of = assign_dcpa(weights, pilot_length);
            break;
        }
        return a;
    }
}
