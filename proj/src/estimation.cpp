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

#include "cfmm/estimation.hpp"

namespace cfmm
{
    CMatrix synthesize_pilot_rx(const CMatrix &channels, const PilotAssignment &pilots, double pilot_energy,
                                double noise_variance, RandomStream &rng)
    {
        const Eigen::Index rows = channels.rows();
        const Eigen::Index tau = static_cast<Eigen::Index>(pilots.pilot_length());
        if (static_cast<std::size_t>(channels.cols()) != pilots.num_users())
            throw std::invalid_argument("synthesize_pilot_rx: channel count does not match the assignment");

        CMatrix rx = CMatrix::Zero(rows, tau);
        for (std::size_t k = 0; k < pilots.num_users(); ++k)
            rx.noalias() += channels.col(k) * pilots.book.col(pilots.pilot_of[k]).transpose();
        rx *= std::sqrt(pilot_energy);
        if (noise_variance > 0.0)
            for (Eigen::Index j = 0; j < tau; ++j)
                for (Eigen::Index i = 0; i < rows; ++i)
                    rx(i, j) += rng.complex_normal(noise_variance);
        return rx;
    }

    CMatrix project_pilots(const CMatrix &rx, const PilotAssignment &pilots) { return rx * pilots.book.conjugate(); }

    MmseFilter mmse_filter(const CMatrix &covariance, const CMatrix &observation_cov, double pilot_energy)
    {
        Eigen::LLT<CMatrix> llt(observation_cov);
        if (llt.info() != Eigen::Success)
            throw SolverError("pilot observation covariance is not positive definite");
        // R Q^-1 = (Q^-1 R)^H because both are Hermitian.
        const CMatrix rq = llt.solve(covariance).adjoint();
        MmseFilter f;
        f.gain = std::sqrt(pilot_energy) * rq;
        CMatrix est = pilot_energy * rq * covariance.adjoint();
        f.estimate_cov = 0.5 * (est + est.adjoint());
        f.error_cov = covariance - f.estimate_cov;
        return f;
    }

    MmseSet mmse_matrices(const PilotAssignment &pilots, const RfPlan &plan, const SimConfig &cfg,
                          double noise_variance)
    {
        MmseSet set;
        set.num_aps = plan.num_aps;
        set.num_users = plan.num_users;
        set.pilot_energy = static_cast<double>(pilots.pilot_length()) * cfg.power.pilot_power_w;
        set.filters.resize(plan.num_aps * plan.num_users);
        const std::size_t la = plan.active_chains;
        const std::size_t tau = pilots.pilot_length();

        for (std::size_t m = 0; m < plan.num_aps; ++m)
        {
            std::vector<CMatrix> q(tau, noise_variance * CMatrix::Identity(la, la));
            for (std::size_t k = 0; k < plan.num_users; ++k)
                q[pilots.pilot_of[k]] += set.pilot_energy * plan.equivalent_at(m, k);
            for (std::size_t k = 0; k < plan.num_users; ++k)
                set.filters[m * plan.num_users + k] =
                    mmse_filter(plan.equivalent_at(m, k), q[pilots.pilot_of[k]], set.pilot_energy);
        }
        return set;
    }

    CMatrix estimate_channels(const CMatrix &rx, const MmseSet &mmse, std::size_t m, const PilotAssignment &pilots)
    {
        const CMatrix projected = project_pilots(rx, pilots);
        CMatrix out(rx.rows(), mmse.num_users);
        for (std::size_t k = 0; k < mmse.num_users; ++k)
            out.col(k) = mmse.at(m, k).gain * projected.col(pilots.pilot_of[k]);
        return out;
    }
}
