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

#include "cfmm/rates.hpp"

namespace cfmm
{
    ZfFilters build_zf(const CMatrix &estimate, std::size_t active_chains)
    {
        const Eigen::Index rows = estimate.rows();
        const Eigen::Index K = estimate.cols();
        if (K == 0)
            throw std::invalid_argument("build_zf: no users");
        if (K > rows)
            throw SingularChannelError("more users than stacked RF chains");

        // Column equilibration before QR keeps weak users from looking rank deficient.
        CMatrix a = estimate.conjugate();
        RVector scale(K);
        for (Eigen::Index k = 0; k < K; ++k)
        {
            const double n = a.col(k).norm();
            if (!(n > 0.0) || !std::isfinite(n))
                throw SingularChannelError("MS " + std::to_string(k) + " has no channel estimate at any AP");
            scale(k) = 1.0 / n;
            a.col(k) *= scale(k);
        }

        Eigen::HouseholderQR<CMatrix> qr(a);
        const CMatrix r = qr.matrixQR().topRows(K).triangularView<Eigen::Upper>();
        const RVector diag = r.diagonal().cwiseAbs();
        if (!(diag.minCoeff() > 1e-10 * diag.maxCoeff()))
            throw SingularChannelError("stacked channel estimate is rank deficient");
        const CMatrix q = qr.householderQ() * CMatrix::Identity(rows, K);

        // W = Q R^-H S.
        const CMatrix x = r.triangularView<Eigen::Upper>().solve(q.adjoint());
        ZfFilters zf;
        zf.active_chains = active_chains;
        zf.precoder = x.adjoint() * scale.asDiagonal();
        zf.combiner = zf.precoder.transpose();
        return zf;
    }

    Realization draw_realization(const DropContext &ctx, std::uint64_t seed, std::size_t index)
    {
        const std::size_t M = ctx.M(), K = ctx.K(), LA = ctx.LA();
        const bool perfect = ctx.cfg.simulation.perfect_csi;
        Realization r;
        r.channel = CMatrix::Zero(M * LA, K);
        r.estimate = CMatrix::Zero(M * LA, K);

        CMatrix gm(LA, K);
        for (std::size_t m = 0; m < M; ++m)
        {
            for (std::size_t k = 0; k < K; ++k)
            {
                const CMatrix &basis = ctx.fading_basis[m * K + k];
                RandomStream rng(seed, Stream::fading, {index, m, k});
                CVector alpha(basis.cols());
                for (Eigen::Index p = 0; p < alpha.size(); ++p)
                    alpha(p) = rng.complex_normal();
                gm.col(k) = basis * alpha;
            }

            CMatrix est;
            if (perfect)
                est = gm;
            else
            {
                RandomStream noise_rng(seed, Stream::pilot_noise, {index, m});
                const CMatrix rx = synthesize_pilot_rx(gm, ctx.pilots, ctx.mmse.pilot_energy, ctx.ul_noise, noise_rng);
                est = estimate_channels(rx, ctx.mmse, m, ctx.pilots);
                for (std::size_t k = 0; k < K; ++k)
                    if (!ctx.plan.is_served(m, k))
                        est.col(k).setZero();
            }

            const auto row = static_cast<Eigen::Index>(m * LA);
            r.channel.middleRows(row, LA) = gm;
            r.estimate.middleRows(row, LA) = est;
        }
        r.zf = build_zf(r.estimate, LA);
        return r;
    }

    ExpectationSet estimate_expectations(const DropContext &ctx, std::size_t realizations, std::uint64_t seed,
                                         std::size_t min_samples)
    {
        const std::size_t M = ctx.M(), K = ctx.K(), LA = ctx.LA();
        ExpectationSet e;
        e.num_aps = M;
        e.num_users = K;
        e.active_chains = LA;
        e.interference = RMatrix::Zero(K, K);
        e.combiner_norm = RMatrix::Zero(M, K);
        e.precoder_power = RMatrix::Zero(M, K);
        e.equivalent_trace = ctx.equivalent_trace;
        e.precoder_cov.assign(M * K, CMatrix::Zero(LA, LA));

        for (std::size_t i = 0; i < realizations; ++i)
        {
            Realization r;
            try
            {
                r = draw_realization(ctx, seed, i);
            }
            catch (const SingularChannelError &)
            {
                ++e.failures;
                continue;
            }
            ++e.samples;
            const CMatrix leak = r.error().transpose() * r.zf.precoder;
            e.interference += leak.cwiseAbs2();
            for (std::size_t m = 0; m < M; ++m)
            {
                const auto blk = r.zf.block(m);
                for (std::size_t k = 0; k < K; ++k)
                {
                    const CVector w = blk.col(k);
                    e.combiner_norm(m, k) += w.squaredNorm();
                    e.precoder_cov[m * K + k].noalias() += w * w.adjoint();
                }
            }
        }

        if (e.samples < std::max<std::size_t>(min_samples, 1))
            throw InsufficientSamplesError("only " + std::to_string(e.samples) + " of " +
                                           std::to_string(realizations) + " realizations were usable");

        const double inv = 1.0 / static_cast<double>(e.samples);
        e.interference *= inv;
        e.combiner_norm *= inv;
        for (std::size_t m = 0; m < M; ++m)
        {
            const CMatrix gram = ctx.plan.rf[m].adjoint() * ctx.plan.rf[m];
            for (std::size_t k = 0; k < K; ++k)
            {
                auto &c = e.precoder_cov[m * K + k];
                c *= inv;
                c = 0.5 * (c + c.adjoint()).eval();
                e.precoder_power(m, k) = std::max(0.0, (gram * c).trace().real());
            }
        }
        return e;
    }

    namespace
    {
        nlohmann::json real_to_json(const RMatrix &a)
        {
            auto j = nlohmann::json::array();
            for (Eigen::Index i = 0; i < a.rows(); ++i)
            {
                auto row = nlohmann::json::array();
                for (Eigen::Index c = 0; c < a.cols(); ++c)
                    row.push_back(a(i, c));
                j.push_back(row);
            }
            return j;
        }

        RMatrix real_from_json(const nlohmann::json &j, std::size_t rows, std::size_t cols)
        {
            RMatrix a(rows, cols);
            if (j.size() != rows)
                throw std::invalid_argument("expectation dump: wrong row count");
            for (std::size_t i = 0; i < rows; ++i)
            {
                if (j[i].size() != cols)
                    throw std::invalid_argument("expectation dump: wrong column count");
                for (std::size_t c = 0; c < cols; ++c)
                    a(i, c) = j[i][c].get<double>();
            }
            return a;
        }
    }

    nlohmann::json to_json(const ExpectationSet &e)
    {
        nlohmann::json j;
        j["num_aps"] = e.num_aps;
        j["num_users"] = e.num_users;
        j["active_chains"] = e.active_chains;
        j["samples"] = e.samples;
        j["failures"] = e.failures;
        j["interference"] = real_to_json(e.interference);
        j["combiner_norm"] = real_to_json(e.combiner_norm);
        j["precoder_power"] = real_to_json(e.precoder_power);
        j["equivalent_trace"] = real_to_json(e.equivalent_trace);
        auto covs = nlohmann::json::array();
        for (const auto &c : e.precoder_cov)
            covs.push_back({{"re", real_to_json(c.real())}, {"im", real_to_json(c.imag())}});
        j["precoder_cov"] = covs;
        return j;
    }

    ExpectationSet expectations_from_json(const nlohmann::json &j)
    {
        ExpectationSet e;
        e.num_aps = j.at("num_aps").get<std::size_t>();
        e.num_users = j.at("num_users").get<std::size_t>();
        e.active_chains = j.at("active_chains").get<std::size_t>();
        e.samples = j.at("samples").get<std::size_t>();
        e.failures = j.at("failures").get<std::size_t>();
        const auto M = e.num_aps, K = e.num_users, LA = e.active_chains;
        e.interference = real_from_json(j.at("interference"), K, K);
        e.combiner_norm = real_from_json(j.at("combiner_norm"), M, K);
        e.precoder_power = real_from_json(j.at("precoder_power"), M, K);
        e.equivalent_trace = real_from_json(j.at("equivalent_trace"), M, K);
        const auto &covs = j.at("precoder_cov");
        if (covs.size() != M * K)
            throw std::invalid_argument("expectation dump: wrong covariance count");
        for (const auto &c : covs)
        {
            CMatrix m(LA, LA);
            m.real() = real_from_json(c.at("re"), LA, LA);
            m.imag() = real_from_json(c.at("im"), LA, LA);
            e.precoder_cov.push_back(std::move(m));
        }
        return e;
    }

    RVector dl_noise_terms(const ExpectationSet &e, const RVector &quant_noise, double thermal_noise)
    {
        return (e.equivalent_trace.transpose() * quant_noise).array() + thermal_noise;
    }

    RVector ul_noise_terms(const ExpectationSet &e, const RVector &quant_noise, double thermal_noise)
    {
        return e.combiner_norm.transpose() * (quant_noise.array() + thermal_noise).matrix();
    }

    double sinr_dl(std::size_t k, const RVector &power, const RMatrix &interference, double noise)
    {
        if (power(k) <= 0.0)
            return 0.0;
        return power(k) / (interference.row(k).dot(power) + noise);
    }

    double sinr_ul(std::size_t k, const RVector &power, const RMatrix &ul_interference, double noise, double tx_power)
    {
        if (power(k) <= 0.0)
            return 0.0;
        return tx_power * power(k) / (tx_power * ul_interference.row(k).dot(power) + noise);
    }

    RVector sinr_dl_all(const RVector &power, const RMatrix &interference, const RVector &noise)
    {
        RVector s(power.size());
        for (Eigen::Index k = 0; k < s.size(); ++k)
            s(k) = sinr_dl(k, power, interference, noise(k));
        return s;
    }

    RVector sinr_ul_all(const RVector &power, const RMatrix &ul_interference, const RVector &noise, double tx_power)
    {
        RVector s(power.size());
        for (Eigen::Index k = 0; k < s.size(); ++k)
            s(k) = sinr_ul(k, power, ul_interference, noise(k), tx_power);
        return s;
    }

    double rate(double sinr) { return std::log2(1.0 + sinr); }

    CMatrix weighted_sum(const std::vector<CMatrix> &covs, std::size_t m, const RVector &weights)
    {
        const std::size_t K = weights.size();
        if (covs.size() < (m + 1) * K)
            throw std::invalid_argument("weighted_sum: covariance list too short");
        CMatrix s = CMatrix::Zero(covs[m * K].rows(), covs[m * K].cols());
        for (std::size_t k = 0; k < K; ++k)
            if (weights(k) != 0.0)
                s += weights(k) * covs[m * K + k];
        return 0.5 * (s + s.adjoint());
    }

    namespace
    {
        double log2det_shifted(const RVector &mu, double quant_noise)
        {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < mu.size(); ++i)
                acc += std::log1p(std::max(0.0, mu(i)) / quant_noise);
            return acc / std::log(2.0);
        }
    }

    double fronthaul_dl_bound(const std::vector<CMatrix> &precoder_cov, std::size_t m, const RVector &power,
                              double quant_noise)
    {
        if (!(quant_noise > 0.0))
            throw DomainError("quantization noise variance must be positive");
        const CMatrix s = weighted_sum(precoder_cov, m, power);
        return log2det_shifted(Eigen::SelfAdjointEigenSolver<CMatrix>(s, Eigen::EigenvaluesOnly).eigenvalues(),
                               quant_noise);
    }

    double fronthaul_ul_bound(const std::vector<CMatrix> &equivalent_cov, std::size_t m, const RVector &power,
                              double quant_noise, double tx_power, double thermal_noise)
    {
        if (!(quant_noise > 0.0))
            throw DomainError("quantization noise variance must be positive");
        const CMatrix s = weighted_sum(equivalent_cov, m, power);
        RVector mu = Eigen::SelfAdjointEigenSolver<CMatrix>(s, Eigen::EigenvaluesOnly).eigenvalues();
        mu = (tx_power * mu.cwiseMax(0.0)).array() + thermal_noise;
        return log2det_shifted(mu, quant_noise);
    }
}
