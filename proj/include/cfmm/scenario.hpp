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

#ifndef CFMM_SCENARIO_HPP
#define CFMM_SCENARIO_HPP

#include "cfmm/config.hpp"

#include <cstdint>
#include <vector>

namespace cfmm
{
    struct Point3
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;
    };

    double distance(const Point3 &a, const Point3 &b);

    // One random network drop. Immutable after construction.
    struct NetworkScenario
    {
        std::vector<Point3> ap_positions;
        std::vector<Point3> ms_positions;
        RMatrix distance;    // M x K, 3-D link distances in meters
        RMatrix ap_distance; // M x M
        RMatrix ms_distance; // K x K

        std::size_t M() const { return ap_positions.size(); }
        std::size_t K() const { return ms_positions.size(); }
    };

    // Builds a scenario from explicit positions.
    NetworkScenario make_scenario(std::vector<Point3> aps, std::vector<Point3> users);

    // Draws AP and MS positions uniformly on the square [0, D]^2.
    // APs and users use separate sequential streams, so the first K users of
    // a drop do not change when K grows (and likewise for APs).
    NetworkScenario generate_scenario(const SimConfig &cfg, std::uint64_t seed);
}

#endif
