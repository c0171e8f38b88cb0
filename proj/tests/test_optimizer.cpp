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

#include "cfmm/context.hpp"
#include "cfmm/experiment.hpp"
#include "cfmm/optimizer.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace cfmm;
using Catch::Approx;

namespace
{
    // Synthetic expectation set with M APs, K users and L_A chains.
    ExpectationSet synthetic(std::size_t M, std::size_t K, std::size_t LA)
    {
        ExpectationSet e;
        e.num_aps = M;
        e.num_users = K;
        e.active_chains = LA;
        e.samples = 1;
        e.interference = RMatrix::Zero(K, K);
        e.combiner_norm = RMatrix::Ones(M, K);
        e.precoder_power = RMatrix::Ones(M, K);
        e.equivalent_trace = RMatrix::Ones(M, K);
        e.precoder_cov.assign(M * K, CMatrix::Identity(LA, LA));
        return e;
    }

    double log_det_sum(const RVector &mu, double x)
    {
        double s = 0.0;
        for (Eigen::Index i = 0; i < mu.size(); ++i)
            s += std::log2(1.0 + mu(i) / x);
        return s;
    }

    SimConfig desk(std::size_t K)
    {
        SimConfig cfg = testing::small_config(8, K, 8, 3, 6);
        cfg.system.area_side_m = 120.0;
        cfg.simulation.mc_realizations = 30;
        cfg.simulation.mc_min_realizations = 5;
        return cfg;
    }
}

TEST_CASE("optimizer: log-det root closed forms")
{
    SolverParams s;
    bool clamped = false;
    RVector mu = RVector::Ones(2);
    CHECK(solve_log_det_root(mu, 2.0, s, clamped) == Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(clamped);
    CHECK(solve_log_det_root(mu, 4.0, s, clamped) == Approx(1.0 / 3.0).epsilon(1e-6));
    CHECK(solve_log_det_root(RVector::Zero(2), 4.0, s, clamped) == s.sigma2_min);
    CHECK(clamped);
    CHECK(solve_log_det_root(mu, 1e6, s, clamped) == s.sigma2_min);
    CHECK(clamped);
    CHECK_THROWS_AS(solve_log_det_root(mu, 0.0, s, clamped), DomainError);
}

TEST_CASE("optimizer: log-det root on random spectra")
{
    SolverParams s;
    RandomStream rng(71);
    for (int i = 0; i < 200; ++i)
    {
        const std::size_t n = 1 + rng.uniform_index(8);
        RVector mu(n);
        for (std::size_t j = 0; j < n; ++j)
            mu(j) = std::pow(10.0, -12.0 + 6.0 * rng.uniform());
        const double cap = 1.0 + 40.0 * rng.uniform();
        bool clamped = false;
        const double x = solve_log_det_root(mu, cap, s, clamped);
        if (!clamped)
            CHECK(std::abs(log_det_sum(mu, x) - cap) < 1e-6);
        else
            CHECK(log_det_sum(mu, s.sigma2_min) <= cap + 1e-6);
    }
}

TEST_CASE("optimizer: quantization solves")
{
    SolverParams s;
    const RVector one = RVector::Ones(1);
    std::vector<CMatrix> eye{CMatrix::Identity(2, 2)};
    CHECK(solve_quant_dl(one, eye, 1, 2.0, s).noise(0) == Approx(1.0).epsilon(1e-6));
    CHECK(solve_quant_dl(one, eye, 1, 4.0, s).noise(0) == Approx(1.0 / 3.0).epsilon(1e-6));
    const auto zero = solve_quant_dl(RVector::Zero(1), eye, 1, 4.0, s);
    CHECK(zero.noise(0) == s.sigma2_min);
    CHECK(zero.clamped[0]);

    CHECK(solve_quant_ul(RVector::Zero(1), eye, 1, 0.1, 1.0, 2.0, s).noise(0) == Approx(1.0).epsilon(1e-6));
    const double lo = solve_quant_ul(one, eye, 1, 0.1, 1.0, 6.0, s).noise(0);
    const double hi = solve_quant_ul(one, eye, 1, 0.2, 1.0, 6.0, s).noise(0);
    CHECK(hi > lo);
    const auto inf = solve_quant_ul(one, eye, 1, 0.1, 1e-12, 1e6, s);
    CHECK(inf.noise(0) == s.sigma2_min);
    CHECK(inf.clamped[0]);
}

TEST_CASE("optimizer: max-min plug-in cases")
{
    // Two symmetric users at one AP, unit noise, budget 2.
    testing::MaxMinInstance p;
    p.coupling = RMatrix::Zero(2, 2);
    p.noise = RVector::Ones(2);
    p.constraints = RMatrix::Ones(1, 2);
    p.budget = RVector::Constant(1, 2.0);
    const auto r = maxmin_sinr(p.coupling, p.noise, p.constraints, p.budget, 1e-9);
    CHECK(r.feasible);
    CHECK(r.power(0) == Approx(1.0).epsilon(1e-6));
    CHECK(r.power(1) == Approx(1.0).epsilon(1e-6));
    CHECK(rate(r.sinr.minCoeff()) == Approx(1.0).epsilon(1e-6));

    const auto single = maxmin_sinr(RMatrix::Zero(1, 1), RVector::Constant(1, 0.25), RMatrix::Ones(1, 1),
                                    RVector::Constant(1, 3.0), 1e-9);
    CHECK(single.power(0) == Approx(3.0).epsilon(1e-6));
    CHECK(single.sinr(0) == Approx(12.0).epsilon(1e-6));

    // Uplink box: one user with no interference runs at full power.
    auto e = synthetic(1, 1, 1);
    SimConfig cfg;
    const auto ul = maxmin_power_ul(e, RVector::Zero(1), 0.05, cfg);
    CHECK(ul.power(0) == Approx(1.0).epsilon(1e-6));
    CHECK(ul.sinr(0) == Approx(cfg.power.ms_power_w / 0.05).epsilon(1e-6));

    // Symmetric interference-limited pair: both at full power.
    auto e2 = synthetic(1, 2, 2);
    e2.interference << 0.5, 2.0, 2.0, 0.5;
    const auto sym = maxmin_power_ul(e2, RVector::Zero(1), 1e-4, cfg);
    CHECK(sym.power(0) == Approx(1.0).epsilon(1e-4));
    CHECK(sym.power(1) == Approx(1.0).epsilon(1e-4));

    // Downlink with a symmetric budget split.
    auto e3 = synthetic(1, 2, 2);
    SimConfig dl_cfg;
    dl_cfg.power.ap_power_w = 2.0;
    const auto dl = maxmin_power_dl(e3, RVector::Zero(1), 1.0, dl_cfg);
    CHECK(dl.power(0) == Approx(1.0).epsilon(1e-4));
    CHECK(dl.sinr.minCoeff() == Approx(1.0).epsilon(1e-4));

    dl_cfg.power.ap_power_w = 1e-3;
    CHECK_THROWS_AS(maxmin_power_dl(e3, RVector::Constant(1, 1.0), 1.0, dl_cfg), DomainError);
}

TEST_CASE("optimizer: bisection matches the grid oracle")
{
    RandomStream rng(72);
    for (int trial = 0; trial < 20; ++trial)
    {
        const std::size_t K = 1 + trial % 3;
        const auto p = testing::random_instance(K, 1 + rng.uniform_index(3), rng);
        const auto r = maxmin_sinr(p.coupling, p.noise, p.constraints, p.budget, 1e-7);
        const double oracle = testing::grid_maxmin(p);
        CHECK(r.sinr.minCoeff() == Approx(oracle).epsilon(1e-3));
        CHECK(((p.constraints * r.power).array() <= p.budget.array() * (1.0 + 1e-9)).all());
        CHECK((r.power.array() >= 0.0).all());
        // Equal SINR at the optimum.
        CHECK(r.sinr.maxCoeff() / r.sinr.minCoeff() - 1.0 < 1e-3);
    }
}

TEST_CASE("optimizer: box-constrained bisection matches the grid oracle")
{
    RandomStream rng(73);
    for (int trial = 0; trial < 20; ++trial)
    {
        const std::size_t K = 2;
        auto p = testing::random_instance(K, K, rng);
        p.constraints = RMatrix::Identity(2, 2);
        p.budget = RVector::Ones(2);
        const auto r = maxmin_sinr(p.coupling, p.noise, p.constraints, p.budget, 1e-7);
        CHECK(r.sinr.minCoeff() == Approx(testing::grid_maxmin(p)).epsilon(1e-3));
        CHECK(r.power.maxCoeff() <= 1.0 + 1e-9);
    }
}

TEST_CASE("optimizer: max-min optimum survives random perturbations")
{
    RandomStream rng(74);
    for (int trial = 0; trial < 5; ++trial)
    {
        const auto p = testing::random_instance(3, 2, rng);
        const auto r = maxmin_sinr(p.coupling, p.noise, p.constraints, p.budget, 1e-8);
        const double base = testing::min_sinr(p, r.power);
        for (int i = 0; i < 10000; ++i)
        {
            RVector x = r.power;
            for (Eigen::Index k = 0; k < x.size(); ++k)
                x(k) = std::max(0.0, x(k) * (1.0 + 0.02 * (rng.uniform() - 0.5)));
            if (((p.constraints * x).array() > p.budget.array()).any())
                continue;
            CHECK(testing::min_sinr(p, x) <= base * (1.0 + 1e-3));
        }
    }
}

TEST_CASE("optimizer: block coordinate descent on a drop")
{
    const SimConfig cfg = desk(10);
    std::size_t checked = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed)
    {
        DropContext ctx;
        ExpectationSet e;
        try
        {
            ctx = prepare_drop(cfg, seed);
            e = drop_expectations(ctx);
        }
        catch (const InsufficientSamplesError &)
        {
            continue;
        }
        ++checked;
        const auto dl = bcd_dl(e, cfg, ctx.dl_noise);
        const auto ul = bcd_ul(e, ctx.plan.equivalent, cfg, ctx.ul_noise);
        REQUIRE(dl.status != SolveStatus::infeasible);
        CHECK(dl.min_rate > 0.0);
        CHECK(ul.min_rate > 0.0);
        CHECK(dl.iterations <= cfg.solver.bcd_max_iterations);

        // Power budget and fronthaul equality.
        const RVector use = dl_power_usage(e, dl.power, dl.quant_noise, cfg.N());
        CHECK(use.maxCoeff() <= cfg.power.ap_power_w * (1.0 + 1e-9));
        CHECK(ul.power.maxCoeff() <= 1.0 + 1e-9);
        CHECK(ul.power.minCoeff() >= 0.0);
        for (std::size_t m = 0; m < ctx.M(); ++m)
        {
            if (!dl.clamped[m])
            {
                const double c = fronthaul_dl_bound(e.precoder_cov, m, dl.power, dl.quant_noise(m));
                CHECK(std::abs(std::exp2(c - cfg.fronthaul.capacity_dl) - 1.0) < 1e-3);
            }
            if (!ul.clamped[m])
            {
                const double c = fronthaul_ul_bound(ctx.plan.equivalent, m, ul.power, ul.quant_noise(m),
                                                    cfg.power.ms_power_w, ctx.ul_noise);
                CHECK(std::abs(std::exp2(c - cfg.fronthaul.capacity_ul) - 1.0) < 1e-3);
            }
        }

        // Alternative initialization reaches the same min-rate.
        const auto alt = bcd_dl(e, cfg, ctx.dl_noise, DlStart::single_user);
        CHECK(std::abs(alt.min_rate - dl.min_rate) < 1e-2);

        // Reported rates are consistent with the reported allocation.
        const RVector s = sinr_dl_all(dl.power, e.interference, dl_noise_terms(e, dl.quant_noise, ctx.dl_noise));
        CHECK(rate(s.minCoeff()) == Approx(dl.min_rate).epsilon(1e-9));
    }
    CHECK(checked >= 4);
}

TEST_CASE("optimizer: unlimited fronthaul reduces to plain max-min")
{
    SimConfig cfg = desk(8);
    cfg.fronthaul.capacity_dl = 1e6;
    cfg.fronthaul.capacity_ul = 1e6;
    const auto ctx = prepare_drop(cfg, 3);
    const auto e = drop_expectations(ctx);
    const auto dl = bcd_dl(e, cfg, ctx.dl_noise);
    const auto ul = bcd_ul(e, ctx.plan.equivalent, cfg, ctx.ul_noise);
    CHECK(dl.quant_noise.maxCoeff() == cfg.solver.sigma2_min);
    const RVector floor = RVector::Constant(ctx.M(), cfg.solver.sigma2_min);
    const auto plain_dl = maxmin_power_dl(e, floor, ctx.dl_noise, cfg);
    const auto plain_ul = maxmin_power_ul(e, floor, ctx.ul_noise, cfg);
    CHECK(dl.min_rate == Approx(rate(plain_dl.sinr.minCoeff())).epsilon(1e-3));
    CHECK(ul.min_rate == Approx(rate(plain_ul.sinr.minCoeff())).epsilon(1e-3));
}

TEST_CASE("optimizer: min-rate grows with fronthaul capacity on a fixed drop")
{
    SimConfig cfg = desk(10);
    const auto ctx = prepare_drop(cfg, 4);
    const auto e = drop_expectations(ctx);
    double prev_dl = 0.0, prev_ul = 0.0;
    for (double c : {16.0, 32.0, 64.0, 256.0})
    {
        cfg.fronthaul.capacity_dl = c;
        cfg.fronthaul.capacity_ul = c;
        const double dl = bcd_dl(e, cfg, ctx.dl_noise).min_rate;
        const double ul = bcd_ul(e, ctx.plan.equivalent, cfg, ctx.ul_noise).min_rate;
        CHECK(dl >= prev_dl - 1e-3);
        CHECK(ul >= prev_ul - 1e-3);
        prev_dl = dl;
        prev_ul = ul;
    }
}

TEST_CASE("optimizer: quantization noise that exhausts the budget is infeasible")
{
    SimConfig cfg = desk(6);
    cfg.fronthaul.capacity_dl = 0.01;
    const auto ctx = prepare_drop(cfg, 2);
    const auto e = drop_expectations(ctx);
    const auto dl = bcd_dl(e, cfg, ctx.dl_noise);
    CHECK(dl.status == SolveStatus::infeasible);
    CHECK(dl.min_rate == 0.0);
    CHECK(to_string(SolveStatus::infeasible) == "infeasible");
}
