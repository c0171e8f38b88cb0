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

#include "cfmm/optimizer.hpp"

#include <algorithm>
#include <limits>

namespace cfmm
{
    std::string to_string(SolveStatus s)
    {
        switch (s)
        {
        case SolveStatus::converged:
            return "converged";
        case SolveStatus::max_iters:
            return "max_iters";
        case SolveStatus::infeasible:
            return "infeasible";
        }
        return "unknown";
    }

    namespace
    {
        // log(2^x - 1) for x > 0 without overflow.
        double log_pow2_minus_one(double bits)
        {
            const double x = bits * std::log(2.0);
            return x > 30.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
        }

        struct LogDetEval
        {
            double value; // nats minus target
            double slope; // d/ds, s = log x
        };

        LogDetEval eval_log_det(const RVector &mu, double s, double target_nats)
        {
            LogDetEval r{-target_nats, 0.0};
            const double inv = std::exp(-s);
            for (Eigen::Index i = 0; i < mu.size(); ++i)
            {
                const double x = mu(i) * inv;
                r.value += std::log1p(x);
                r.slope -= x / (1.0 + x);
            }
            return r;
        }
    }

    double solve_log_det_root(const RVector &mu_in, double capacity, const SolverParams &solver, bool &clamped)
    {
        if (!(capacity > 0.0))
            throw DomainError("fronthaul capacity must be positive for a quantization root to exist");
        const RVector mu = mu_in.cwiseMax(0.0);
        const double floor = solver.sigma2_min;
        clamped = false;
        const Eigen::Index dims = (mu.array() > 0.0).count();
        if (dims == 0)
        {
            clamped = true;
            return floor;
        }
        const double target = capacity * std::log(2.0);
        const double tol = solver.root_tolerance * std::log(2.0);
        const double log_mu_max = std::log(mu.maxCoeff());

        // The bound at the floor already fits the capacity: the root lies below it.
        const double log_floor = std::log(floor);
        if (eval_log_det(mu, log_floor, target).value <= 0.0)
        {
            clamped = true;
            return floor;
        }

        double lo = log_mu_max - log_pow2_minus_one(capacity);
        double hi = log_mu_max - log_pow2_minus_one(capacity / static_cast<double>(dims));
        const auto at_lo = eval_log_det(mu, lo, target);
        const auto at_hi = eval_log_det(mu, hi, target);
        const double slack = 1e-9 * target + tol;
        if (at_lo.value < -slack || at_hi.value > slack)
            throw SolverError("quantization root is not bracketed");
        lo = std::max(lo, log_floor);

        double s = 0.5 * (lo + hi);
        for (std::size_t it = 0; it < solver.root_max_iterations; ++it)
        {
            const auto f = eval_log_det(mu, s, target);
            if (std::abs(f.value) <= tol)
                return std::exp(s);
            if (f.value > 0.0)
                lo = s;
            else
                hi = s;
            if (hi - lo <= 1e-15 * std::max(1.0, std::abs(s)))
                return std::exp(0.5 * (lo + hi));
            double next = f.slope < 0.0 ? s - f.value / f.slope : 0.5 * (lo + hi);
            if (!(next > lo && next < hi))
                next = 0.5 * (lo + hi);
            s = next;
        }
        throw SolverError("quantization root solver did not converge");
    }

    namespace
    {
        RVector eigenvalues_of(const CMatrix &a)
        {
            return Eigen::SelfAdjointEigenSolver<CMatrix>(a, Eigen::EigenvaluesOnly).eigenvalues();
        }
    }

    QuantSolution solve_quant_dl(const RVector &power, const std::vector<CMatrix> &precoder_cov, std::size_t num_aps,
                                 double capacity, const SolverParams &solver)
    {
        if ((power.array() < 0.0).any())
            throw DomainError("powers must be nonnegative");
        QuantSolution q;
        q.noise.resize(num_aps);
        q.clamped.assign(num_aps, false);
        for (std::size_t m = 0; m < num_aps; ++m)
        {
            bool clamped = false;
            q.noise(m) = solve_log_det_root(eigenvalues_of(weighted_sum(precoder_cov, m, power)), capacity, solver,
                                            clamped);
            q.clamped[m] = clamped;
        }
        return q;
    }

    QuantSolution solve_quant_ul(const RVector &power, const std::vector<CMatrix> &equivalent_cov,
                                 std::size_t num_aps, double tx_power, double thermal_noise, double capacity,
                                 const SolverParams &solver)
    {
        if ((power.array() < 0.0).any())
            throw DomainError("power coefficients must be nonnegative");
        QuantSolution q;
        q.noise.resize(num_aps);
        q.clamped.assign(num_aps, false);
        for (std::size_t m = 0; m < num_aps; ++m)
        {
            const RVector lambda = eigenvalues_of(weighted_sum(equivalent_cov, m, power)).cwiseMax(0.0);
            const RVector mu = (tx_power * lambda).array() + thermal_noise;
            bool clamped = false;
            q.noise(m) = solve_log_det_root(mu, capacity, solver, clamped);
            q.clamped[m] = clamped;
        }
        return q;
    }

    namespace
    {
        bool equal_sinr_point(const RMatrix &coupling, const RVector &noise, const RMatrix &a, const RVector &b,
                              double t, RVector &out)
        {
            const Eigen::Index K = noise.size();
            const RMatrix sys = RMatrix::Identity(K, K) - t * coupling;
            out = sys.partialPivLu().solve(t * noise);
            if (!out.allFinite() || (out.array() < 0.0).any())
                return false;
            const RVector used = a * out;
            for (Eigen::Index m = 0; m < b.size(); ++m)
                if (used(m) > b(m) * (1.0 + 1e-12))
                    return false;
            return true;
        }

        RVector sinr_of(const RMatrix &coupling, const RVector &noise, const RVector &x)
        {
            RVector s(x.size());
            for (Eigen::Index k = 0; k < x.size(); ++k)
                s(k) = x(k) > 0.0 ? x(k) / (coupling.row(k).dot(x) + noise(k)) : 0.0;
            return s;
        }
    }

    MaxMinResult maxmin_sinr(const RMatrix &coupling, const RVector &noise, const RMatrix &constraints,
                             const RVector &budget, double relative_tolerance)
    {
        const Eigen::Index K = noise.size();
        if (coupling.rows() != K || coupling.cols() != K || constraints.cols() != K ||
            constraints.rows() != budget.size())
            throw std::invalid_argument("maxmin_sinr: shape mismatch");
        if ((coupling.array() < 0.0).any() || (constraints.array() < 0.0).any() || (noise.array() <= 0.0).any())
            throw DomainError("maxmin_sinr: coupling and constraints must be nonnegative, noise positive");

        MaxMinResult res;
        res.power = RVector::Zero(K);
        res.sinr = RVector::Zero(K);
        if ((budget.array() <= 0.0).any())
            return res;

        // Upper bound from each user's largest admissible power alone.
        double hi = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < K; ++k)
        {
            double cap = std::numeric_limits<double>::infinity();
            for (Eigen::Index m = 0; m < constraints.rows(); ++m)
                if (constraints(m, k) > 0.0)
                    cap = std::min(cap, budget(m) / constraints(m, k));
            const double bound = std::isfinite(cap) ? cap / (coupling(k, k) * cap + noise(k))
                                                    : (coupling(k, k) > 0.0 ? 1.0 / coupling(k, k)
                                                                            : std::numeric_limits<double>::infinity());
            hi = std::min(hi, bound);
        }

        RVector x;
        double lo = 0.0;
        RVector best = RVector::Zero(K);
        if (!std::isfinite(hi))
        {
            hi = 1.0;
            while (equal_sinr_point(coupling, noise, constraints, budget, hi, x) && hi < 1e300)
            {
                lo = hi;
                best = x;
                hi *= 2.0;
            }
        }
        else if (equal_sinr_point(coupling, noise, constraints, budget, hi, x))
        {
            lo = hi;
            best = x;
        }

        std::size_t it = 0;
        while (lo < hi && hi - lo > relative_tolerance * hi && it < 400)
        {
            const double mid = 0.5 * (lo + hi);
            if (equal_sinr_point(coupling, noise, constraints, budget, mid, x))
            {
                lo = mid;
                best = x;
            }
            else
                hi = mid;
            ++it;
        }

        // Every SINR grows along the ray through the solution, so push it
        // onto the nearest constraint.
        const RVector load = constraints * best;
        double grow = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < load.size(); ++i)
            if (load(i) > 0.0)
                grow = std::min(grow, budget(i) / load(i));
        if (std::isfinite(grow) && grow > 1.0)
            best *= grow;

        res.iterations = it;
        res.target = lo;
        res.feasible = lo > 0.0;
        res.power = best;
        res.sinr = sinr_of(coupling, noise, best);
        return res;
    }

    namespace
    {
        RVector dl_budget(const ExpectationSet &e, const RVector &quant_noise, const SimConfig &cfg)
        {
            const double per_ap = static_cast<double>(e.active_chains * cfg.N());
            return (cfg.power.ap_power_w - quant_noise.array() * per_ap).matrix();
        }
    }

    RVector dl_power_usage(const ExpectationSet &e, const RVector &power, const RVector &quant_noise,
                           std::size_t num_antennas)
    {
        return e.precoder_power * power + quant_noise * static_cast<double>(e.active_chains * num_antennas);
    }

    MaxMinResult maxmin_power_dl(const ExpectationSet &e, const RVector &quant_noise, double thermal_noise,
                                 const SimConfig &cfg)
    {
        const RVector budget = dl_budget(e, quant_noise, cfg);
        if ((budget.array() <= 0.0).any())
            throw DomainError("quantization noise exhausts the power budget of an AP");
        return maxmin_sinr(e.interference, dl_noise_terms(e, quant_noise, thermal_noise), e.precoder_power, budget,
                           cfg.solver.bisection_tolerance);
    }

    MaxMinResult maxmin_power_ul(const ExpectationSet &e, const RVector &quant_noise, double thermal_noise,
                                 const SimConfig &cfg)
    {
        const Eigen::Index K = static_cast<Eigen::Index>(e.num_users);
        const RVector noise = ul_noise_terms(e, quant_noise, thermal_noise) / cfg.power.ms_power_w;
        return maxmin_sinr(e.ul_interference(), noise, RMatrix::Identity(K, K), RVector::Ones(K),
                           cfg.solver.bisection_tolerance);
    }

    namespace
    {
        void finish_rates(LinkAllocation &a)
        {
            a.rates = a.sinr.unaryExpr([](double s) { return rate(s); });
            a.min_rate = a.rates.size() ? a.rates.minCoeff() : 0.0;
        }

        bool settled(double now, double before, double tol)
        {
            return std::abs(now - before) <= tol * std::max(std::abs(before), 1e-12);
        }
    }

    LinkAllocation bcd_dl(const ExpectationSet &e, const SimConfig &cfg, double thermal_noise, DlStart start)
    {
        const std::size_t M = e.num_aps, K = e.num_users;
        const double budget = cfg.power.ap_power_w;
        const double per_ap = static_cast<double>(e.active_chains * cfg.N());
        const auto &solver = cfg.solver;

        RVector power = RVector::Zero(K);
        if (start == DlStart::uniform)
        {
            const double load = e.precoder_power.rowwise().sum().maxCoeff();
            power.setConstant(load > 0.0 ? budget / load : budget);
        }
        else
        {
            const double load = e.precoder_power.col(0).maxCoeff();
            power(0) = load > 0.0 ? budget / load : budget;
        }

        LinkAllocation best;
        best.power = RVector::Zero(K);
        best.sinr = RVector::Zero(K);
        best.min_rate = -1.0;
        double previous = 0.0;
        bool converged = false;
        std::vector<double> trace;
        std::size_t it = 0;

        for (it = 1; it <= solver.bcd_max_iterations; ++it)
        {
            const auto quant = solve_quant_dl(power, e.precoder_cov, M, cfg.fronthaul.capacity_dl, solver);
            if ((quant.noise.array() * per_ap >= budget).any())
            {
                if (it == 1)
                {
                    best.quant_noise = quant.noise;
                    best.clamped = quant.clamped;
                }
                break;
            }
            const auto mm = maxmin_power_dl(e, quant.noise, thermal_noise, cfg);

            // Consistent iterate: noise from the new powers, then a joint
            // rescale that keeps the fronthaul equality and fits the budget.
            auto polished = solve_quant_dl(mm.power, e.precoder_cov, M, cfg.fronthaul.capacity_dl, solver);
            const RVector usage = dl_power_usage(e, mm.power, polished.noise, cfg.N());
            double scale = 1.0;
            for (std::size_t m = 0; m < M; ++m)
                if (usage(m) > budget)
                    scale = std::min(scale, budget / usage(m));
            LinkAllocation cand;
            cand.power = scale * mm.power;
            cand.quant_noise = polished.noise;
            for (std::size_t m = 0; m < M; ++m)
                if (!polished.clamped[m])
                    cand.quant_noise(m) *= scale;
            cand.clamped = polished.clamped;
            cand.sinr = sinr_dl_all(cand.power, e.interference, dl_noise_terms(e, cand.quant_noise, thermal_noise));
            finish_rates(cand);
            trace.push_back(cand.min_rate);

            if (cand.min_rate > best.min_rate)
                best = cand;
            if (it > 1 && settled(cand.min_rate, previous, solver.bcd_tolerance))
            {
                converged = true;
                break;
            }
            previous = cand.min_rate;
            power = mm.feasible ? cand.power : power;
        }

        best.trace = std::move(trace);
        best.iterations = std::min(it, solver.bcd_max_iterations);
        if (best.trace.empty())
        {
            best.status = SolveStatus::infeasible;
            best.power = RVector::Zero(K);
            best.sinr = RVector::Zero(K);
            finish_rates(best);
            return best;
        }
        best.status = converged ? SolveStatus::converged : SolveStatus::max_iters;
        return best;
    }

    LinkAllocation bcd_ul(const ExpectationSet &e, const std::vector<CMatrix> &equivalent_cov, const SimConfig &cfg,
                          double thermal_noise)
    {
        const std::size_t M = e.num_aps, K = e.num_users;
        const double tx = cfg.power.ms_power_w;
        const auto &solver = cfg.solver;
        const RMatrix coupling = e.ul_interference();

        RVector power = RVector::Ones(K);
        LinkAllocation best;
        best.min_rate = -1.0;
        double previous = 0.0;
        bool converged = false;
        std::vector<double> trace;
        std::size_t it = 0;

        for (it = 1; it <= solver.bcd_max_iterations; ++it)
        {
            const auto quant = solve_quant_ul(power, equivalent_cov, M, tx, thermal_noise, cfg.fronthaul.capacity_ul,
                                              solver);
            const auto mm = maxmin_power_ul(e, quant.noise, thermal_noise, cfg);

            LinkAllocation cand;
            cand.power = mm.power;
            const auto polished =
                solve_quant_ul(cand.power, equivalent_cov, M, tx, thermal_noise, cfg.fronthaul.capacity_ul, solver);
            cand.quant_noise = polished.noise;
            cand.clamped = polished.clamped;
            cand.sinr = sinr_ul_all(cand.power, coupling, ul_noise_terms(e, cand.quant_noise, thermal_noise), tx);
            finish_rates(cand);
            trace.push_back(cand.min_rate);

            if (cand.min_rate > best.min_rate)
                best = cand;
            if (it > 1 && settled(cand.min_rate, previous, solver.bcd_tolerance))
            {
                converged = true;
                break;
            }
            previous = cand.min_rate;
            if (mm.feasible)
                power = cand.power;
        }

        best.trace = std::move(trace);
        best.iterations = std::min(it, solver.bcd_max_iterations);
        best.status = converged ? SolveStatus::converged : SolveStatus::max_iters;
        return best;
    }
}
