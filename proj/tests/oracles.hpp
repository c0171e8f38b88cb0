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

// Reference implementations and generators shared by the test binaries.
// Nothing here calls into the solver code it is compared against.

#ifndef CFMM_TESTS_ORACLES_HPP
#define CFMM_TESTS_ORACLES_HPP

#include "cfmm/config.hpp"
#include "cfmm/random.hpp"
#include "cfmm/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace cfmm::testing
{
    inline SimConfig small_config(std::size_t M, std::size_t K, std::size_t N, std::size_t L, std::size_t tau_p)
    {
        SimConfig cfg;
        cfg.system.num_aps = M;
        cfg.system.num_users = K;
        cfg.system.num_antennas = N;
        cfg.system.num_rf_chains = L;
        cfg.system.pilot_length = tau_p;
        cfg.validate();
        return cfg;
    }

    // Random Hermitian PSD matrix of the given rank, scaled to unit trace.
    inline CMatrix random_psd(std::size_t n, std::size_t rank, RandomStream &rng)
    {
        CMatrix b(n, rank);
        for (Eigen::Index i = 0; i < b.rows(); ++i)
            for (Eigen::Index j = 0; j < b.cols(); ++j)
                b(i, j) = rng.complex_normal();
        CMatrix r = b * b.adjoint();
        r /= r.trace().real();
        return 0.5 * (r + r.adjoint());
    }

    inline CMatrix random_complex(std::size_t rows, std::size_t cols, RandomStream &rng)
    {
        CMatrix a(rows, cols);
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j)
                a(i, j) = rng.complex_normal();
        return a;
    }

    inline double relative_frobenius(const CMatrix &a, const CMatrix &ref) { return (a - ref).norm() / ref.norm(); }

    // Plain max-min SINR instance: x >= 0, A x <= b,
    // sinr_k = x_k / (coupling_k . x + noise_k).
    struct MaxMinInstance
    {
        RMatrix coupling;
        RVector noise;
        RMatrix constraints;
        RVector budget;
    };

    inline double min_sinr(const MaxMinInstance &p, const RVector &x)
    {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < x.size(); ++k)
            best = std::min(best, x(k) / (p.coupling.row(k).dot(x) + p.noise(k)));
        return best;
    }

    // Largest c with A (c d) <= b.
    inline double max_scale(const MaxMinInstance &p, const RVector &d)
    {
        const RVector load = p.constraints * d;
        double c = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < load.size(); ++i)
            if (load(i) > 0.0)
                c = std::min(c, p.budget(i) / load(i));
        return c;
    }

    // Brute-force oracle for K <= 3. Every SINR grows when the allocation is
    // scaled up, so the best point on a ray from the origin sits on the
    // boundary. Directions are enumerated on a simplex grid, then the grid is
    // refined around the best direction.
    inline double grid_maxmin(const MaxMinInstance &p, std::size_t steps = 200, std::size_t levels = 4)
    {
        const auto K = static_cast<std::size_t>(p.noise.size());
        RVector center = RVector::Constant(static_cast<Eigen::Index>(K), 1.0 / static_cast<double>(K));
        double half_width = 0.5;
        double best = 0.0;
        RVector best_dir = center;

        auto visit = [&](const RVector &d) {
            if ((d.array() < 0.0).any() || d.sum() <= 0.0)
                return;
            const double c = max_scale(p, d);
            if (!std::isfinite(c))
                return;
            const double v = min_sinr(p, c * d);
            if (v > best)
            {
                best = v;
                best_dir = d;
            }
        };

        for (std::size_t level = 0; level < levels; ++level)
        {
            const double h = 2.0 * half_width / static_cast<double>(steps);
            if (K == 1)
                visit(RVector::Ones(1));
            else if (K == 2)
            {
                for (std::size_t i = 0; i <= steps; ++i)
                {
                    RVector d(2);
                    d(0) = center(0) - half_width + h * static_cast<double>(i);
                    d(1) = 1.0 - d(0);
                    visit(d);
                }
            }
            else
            {
                for (std::size_t i = 0; i <= steps; ++i)
                    for (std::size_t j = 0; j <= steps; ++j)
                    {
                        RVector d(3);
                        d(0) = center(0) - half_width + h * static_cast<double>(i);
                        d(1) = center(1) - half_width + h * static_cast<double>(j);
                        d(2) = 1.0 - d(0) - d(1);
                        visit(d);
                    }
            }
            center = best_dir;
            half_width = 4.0 * h;
        }
        return best;
    }

    inline MaxMinInstance random_instance(std::size_t K, std::size_t num_constraints, RandomStream &rng)
    {
        MaxMinInstance p;
        p.coupling = RMatrix::Zero(K, K);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t j = 0; j < K; ++j)
                p.coupling(i, j) = 0.3 * rng.uniform();
        p.noise = RVector(K);
        for (std::size_t k = 0; k < K; ++k)
            p.noise(k) = 0.05 + rng.uniform();
        p.constraints = RMatrix(num_constraints, K);
        for (std::size_t i = 0; i < num_constraints; ++i)
            for (std::size_t k = 0; k < K; ++k)
                p.constraints(i, k) = 0.1 + rng.uniform();
        p.budget = RVector(num_constraints);
        for (std::size_t i = 0; i < num_constraints; ++i)
            p.budget(i) = 0.5 + 2.0 * rng.uniform();
        return p;
    }

    struct PairedStats
    {
        double mean = 0.0;
        double std_error = 0.0;
        std::size_t count = 0;
    };

    // Mean and standard error of a - b over indices where both are present.
    inline PairedStats paired_difference(const std::vector<double> &a, const std::vector<double> &b,
                                         const std::vector<bool> &usable)
    {
        std::vector<double> d;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (usable[i])
                d.push_back(a[i] - b[i]);
        PairedStats s;
        s.count = d.size();
        if (d.empty())
            return s;
        for (double v : d)
            s.mean += v;
        s.mean /= static_cast<double>(d.size());
        if (d.size() > 1)
        {
            double ss = 0.0;
            for (double v : d)
                ss += (v - s.mean) * (v - s.mean);
            s.std_error = std::sqrt(ss / static_cast<double>(d.size() - 1) / static_cast<double>(d.size()));
        }
        return s;
    }
}

#endif
