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

#ifndef CFMM_OPTIMIZER_HPP
#define CFMM_OPTIMIZER_HPP

#include "cfmm/rates.hpp"

#include <string>
#include <vector>

namespace cfmm
{
    enum class SolveStatus
    {
        converged,
        max_iters,
        infeasible
    };

    std::string to_string(SolveStatus s);

    // Solves sum_i log2(1 + mu_i / x) = capacity for x > 0 (Newton with a
    // bisection safeguard in log x). Returns floor and sets clamped when the
    // root lies below floor or every mu_i is zero.
    double solve_log_det_root(const RVector &mu, double capacity, const SolverParams &solver, bool &clamped);

    struct QuantSolution
    {
        RVector noise; // per AP
        std::vector<bool> clamped;
    };

    // Downlink: log2 det(sum_k power_k R^BB_mk / x + I) = capacity per AP.
    QuantSolution solve_quant_dl(const RVector &power, const std::vector<CMatrix> &precoder_cov, std::size_t num_aps,
                                 double capacity, const SolverParams &solver);

    // Uplink: log2 det(tx_power / x sum_k power_k R^RF_mk + (1 + thermal / x) I) = capacity per AP.
    QuantSolution solve_quant_ul(const RVector &power, const std::vector<CMatrix> &equivalent_cov,
                                 std::size_t num_aps, double tx_power, double thermal_noise, double capacity,
                                 const SolverParams &solver);

    struct MaxMinResult
    {
        RVector power;
        RVector sinr;
        double target = 0.0;   // largest feasible common SINR found
        bool feasible = false; // false when only the zero allocation was feasible
        std::size_t iterations = 0;
    };

    // max_x min_k x_k / (coupling_k . x + noise_k)  s.t.  x >= 0, A x <= b.
    // Bisection on the common target t; each test solves (I - t C) x = t n,
    // whose solution is the smallest allocation reaching t whenever one exists.
    MaxMinResult maxmin_sinr(const RMatrix &coupling, const RVector &noise, const RMatrix &constraints,
                             const RVector &budget, double relative_tolerance);

    // Throws DomainError if some AP has no budget left after quantization noise.
    MaxMinResult maxmin_power_dl(const ExpectationSet &e, const RVector &quant_noise, double thermal_noise,
                                 const SimConfig &cfg);
    MaxMinResult maxmin_power_ul(const ExpectationSet &e, const RVector &quant_noise, double thermal_noise,
                                 const SimConfig &cfg);

    struct LinkAllocation
    {
        RVector power;       // upsilon (DL, watts) or omega (UL, in [0, 1])
        RVector quant_noise; // per AP
        std::vector<bool> clamped;
        RVector sinr;
        RVector rates;
        double min_rate = 0.0;
        std::vector<double> trace; // min-rate of each iterate
        SolveStatus status = SolveStatus::infeasible;
        std::size_t iterations = 0;
    };

    struct AllocationState
    {
        LinkAllocation downlink;
        LinkAllocation uplink;
    };

    enum class DlStart
    {
        uniform,   // equal powers, most loaded AP at its budget
        single_user // whole budget on the first MS
    };

    // Alternates the quantization solve (previous powers) with the max-min
    // power solve. Each iterate is made consistent by recomputing the noise
    // for the new powers and, in the downlink, jointly rescaling powers and
    // noise into the power budget. The best iterate is returned.
    LinkAllocation bcd_dl(const ExpectationSet &e, const SimConfig &cfg, double thermal_noise,
                          DlStart start = DlStart::uniform);
    LinkAllocation bcd_ul(const ExpectationSet &e, const std::vector<CMatrix> &equivalent_cov, const SimConfig &cfg,
                          double thermal_noise);

    // Per-AP transmit power sum_k power_k theta_mk + noise_m L_A N.
    RVector dl_power_usage(const ExpectationSet &e, const RVector &power, const RVector &quant_noise,
                           std::size_t num_antennas);
}

#endif
