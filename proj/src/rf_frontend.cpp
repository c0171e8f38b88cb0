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

#include "cfmm/rf_frontend.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfmm
{
    namespace
    {
        // exp(j phase) with |z| == 1 exactly in double arithmetic.
        cplx unit_phasor(double phase)
        {
            double c = std::cos(phase), s = std::sin(phase);
            for (int i = 0; i < 8; ++i)
            {
                const double a = std::hypot(c, s);
                if (a == 1.0)
                    break;
                double &big = std::abs(c) >= std::abs(s) ? c : s;
                big = std::nextafter(big, a > 1.0 ? 0.0 : std::copysign(2.0, big));
            }
            return {c, s};
        }
    }

    CVector rf_column(const CMatrix &covariance)
    {
        if (covariance.rows() == 0 || covariance.cwiseAbs().maxCoeff() == 0.0)
            throw DomainError("rf_column needs a nonzero covariance matrix");
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(covariance);
        if (eig.info() != Eigen::Success)
            throw SolverError("eigendecomposition of a link covariance failed");
        CVector u = eig.eigenvectors().col(covariance.rows() - 1);

        // First entry within rounding of the largest magnitude.
        const double peak = u.cwiseAbs().maxCoeff();
        Eigen::Index pivot = 0;
        while (std::abs(u(pivot)) < (1.0 - 1e-9) * peak)
            ++pivot;
        u *= std::conj(u(pivot)) / std::abs(u(pivot));

        CVector w(u.size());
        for (Eigen::Index n = 0; n < u.size(); ++n)
            w(n) = n == pivot ? cplx(1.0, 0.0) : unit_phasor(-std::arg(u(n)));
        return w;
    }

    double link_weight(const CVector &column, const CMatrix &covariance)
    {
        if (column.size() != covariance.rows() || covariance.rows() != covariance.cols())
            throw std::invalid_argument("link_weight: shape mismatch");
        const cplx v = column.transpose() * covariance * column.conjugate();
        return std::max(0.0, v.real());
    }

    CMatrix equivalent_covariance(const CMatrix &rf_matrix, const CMatrix &covariance)
    {
        if (rf_matrix.rows() != covariance.rows())
            throw std::invalid_argument("equivalent_covariance: shape mismatch");
        CMatrix r = rf_matrix.transpose() * covariance * rf_matrix.conjugate();
        return 0.5 * (r + r.adjoint());
    }

    UserSelection select_users(const RMatrix &weights, std::size_t rf_chains)
    {
        const std::size_t M = weights.rows();
        const std::size_t K = weights.cols();
        if (rf_chains == 0)
            throw std::invalid_argument("select_users: at least one RF chain is required");
        if ((weights.array() < 0.0).any() || !weights.allFinite())
            throw DomainError("select_users: weights must be finite and nonnegative");

        UserSelection sel;
        sel.served.assign(M, {});
        if (K <= rf_chains)
        {
            for (auto &s : sel.served)
                for (std::size_t k = 0; k < K; ++k)
                    s.push_back(k);
            return sel;
        }

        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> present =
            Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(M, K, true);
        std::vector<std::size_t> degree(M, K);
        RVector energy = weights.colwise().sum().transpose();
        const double tol = 1e-12 * (M * K > 0 ? weights.maxCoeff() : 0.0);
        const std::size_t total = M * (K - rf_chains);

        for (std::size_t step = 0; step < total; ++step)
        {
            std::size_t lowest = 0;
            double min1 = std::numeric_limits<double>::infinity();
            double min2 = min1;
            for (std::size_t k = 0; k < K; ++k)
            {
                if (energy(k) < min1)
                {
                    min2 = min1;
                    min1 = energy(k);
                    lowest = k;
                }
                else if (energy(k) < min2)
                    min2 = energy(k);
            }

            bool found = false;
            std::size_t best_m = 0, best_k = 0;
            double best_post = 0.0, best_w = 0.0;
            for (std::size_t m = 0; m < M; ++m)
            {
                if (degree[m] <= rf_chains)
                    continue;
                for (std::size_t k = 0; k < K; ++k)
                {
                    if (!present(m, k))
                        continue;
                    const double w = weights(m, k);
                    const double post = std::min(energy(k) - w, k == lowest ? min2 : min1);
                    // Scan order already yields the lowest (m, k) among exact ties.
                    const bool better = !found || post > best_post + tol ||
                                        (std::abs(post - best_post) <= tol && w < best_w - tol);
                    if (better)
                    {
                        found = true;
                        best_m = m;
                        best_k = k;
                        best_post = post;
                        best_w = w;
                    }
                }
            }
            present(best_m, best_k) = false;
            --degree[best_m];
            energy(best_k) -= weights(best_m, best_k);
            ++sel.removals;
        }

        for (std::size_t m = 0; m < M; ++m)
            for (std::size_t k = 0; k < K; ++k)
                if (present(m, k))
                    sel.served[m].push_back(k);
        return sel;
    }

    double uplink_noise_temperature(std::size_t num_antennas, const NoiseParams &noise)
    {
        const double gain = db_to_linear(noise.lna_gain_db);
        if (!(gain > 0.0) || !std::isfinite(gain))
            throw ConfigError("LNA gain must be positive");
        const double t_lna = kT0 * (db_to_linear(noise.lna_noise_figure_db) - 1.0);
        const double t_rf = kT0 * (db_to_linear(noise.rf_noise_figure_db) - 1.0);
        const double losses = db_to_linear(noise.phase_shifter_loss_db) * db_to_linear(noise.combiner_loss_db);
        const double per_antenna = kT0 + t_lna + kT0 * (losses - 1.0) / gain + t_rf * losses / gain;
        return static_cast<double>(num_antennas) * per_antenna;
    }

    double uplink_noise_variance(std::size_t num_antennas, const SimConfig &cfg)
    {
        return kBoltzmann * uplink_noise_temperature(num_antennas, cfg.noise) * cfg.system.bandwidth_hz;
    }

    double downlink_noise_variance(const SimConfig &cfg)
    {
        return kBoltzmann * kT0 * cfg.system.bandwidth_hz * db_to_linear(cfg.noise.ms_noise_figure_db);
    }

    std::size_t RfPlan::chain_of(std::size_t m, std::size_t k) const
    {
        const auto &s = served[m];
        const auto it = std::lower_bound(s.begin(), s.end(), k);
        if (it == s.end() || *it != k)
            throw std::out_of_range("MS is not served by this AP");
        return static_cast<std::size_t>(it - s.begin());
    }

    RfPlan build_rf_plan(const LinkTable &links, const SimConfig &cfg)
    {
        RfPlan plan;
        plan.num_aps = links.num_aps;
        plan.num_users = links.num_users;
        plan.num_antennas = links.num_antennas;
        plan.active_chains = std::min(links.num_users, cfg.L());
        const std::size_t M = plan.num_aps, K = plan.num_users, N = plan.num_antennas;

        std::vector<CVector> columns(M * K);
        plan.weights = RMatrix::Zero(M, K);
        for (std::size_t m = 0; m < M; ++m)
        {
            for (std::size_t k = 0; k < K; ++k)
            {
                const auto &link = links.at(m, k);
                if (link.in_outage())
                {
                    columns[m * K + k] = CVector::Ones(N);
                    continue;
                }
                columns[m * K + k] = rf_column(link.covariance);
                plan.weights(m, k) = link_weight(columns[m * K + k], link.covariance);
            }
        }

        auto sel = select_users(plan.weights, cfg.L());
        plan.served = std::move(sel.served);
        plan.served_mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(M, K, false);
        plan.rf.resize(M);
        plan.equivalent.resize(M * K);
        for (std::size_t m = 0; m < M; ++m)
        {
            CMatrix w(N, plan.active_chains);
            for (std::size_t i = 0; i < plan.served[m].size(); ++i)
            {
                const std::size_t k = plan.served[m][i];
                w.col(i) = columns[m * K + k];
                plan.served_mask(m, k) = true;
            }
            plan.rf[m] = std::move(w);
            for (std::size_t k = 0; k < K; ++k)
                plan.equivalent[m * K + k] = equivalent_covariance(plan.rf[m], links.at(m, k).covariance);
        }
        return plan;
    }
}
