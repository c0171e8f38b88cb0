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

#include "cfmm/scenario.hpp"

#include "cfmm/random.hpp"

namespace cfmm
{
    double distance(const Point3 &a, const Point3 &b)
    {
        const double dx = a.x - b.x;
        const double dy = a.y - b.y;
        const double dz = a.z - b.z;
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }

    namespace
    {
        RMatrix pairwise(const std::vector<Point3> &a, const std::vector<Point3> &b)
        {
            RMatrix d(a.size(), b.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                for (std::size_t j = 0; j < b.size(); ++j)
                    d(i, j) = distance(a[i], b[j]);
            return d;
        }

        std::vector<Point3> draw_points(std::size_t count, double side, double height, RandomStream &rng)
        {
            std::vector<Point3> pts(count);
            for (auto &p : pts)
            {
                p.x = rng.uniform(0.0, side);
                p.y = rng.uniform(0.0, side);
                p.z = height;
            }
            return pts;
        }
    }

    NetworkScenario make_scenario(std::vector<Point3> aps, std::vector<Point3> users)
    {
        if (aps.empty() || users.empty())
            throw ConfigError("a scenario needs at least one AP and one MS");
        NetworkScenario s;
        s.ap_positions = std::move(aps);
        s.ms_positions = std::move(users);
        s.distance = pairwise(s.ap_positions, s.ms_positions);
        s.ap_distance = pairwise(s.ap_positions, s.ap_positions);
        s.ms_distance = pairwise(s.ms_positions, s.ms_positions);
        return s;
    }

    NetworkScenario generate_scenario(const SimConfig &cfg, std::uint64_t seed)
    {
        cfg.validate();
        RandomStream ap_rng(seed, Stream::placement, {0});
        RandomStream ms_rng(seed, Stream::placement, {1});
        auto aps = draw_points(cfg.M(), cfg.system.area_side_m, cfg.system.ap_height_m, ap_rng);
        auto users = draw_points(cfg.K(), cfg.system.area_side_m, cfg.system.ms_height_m, ms_rng);
        return make_scenario(std::move(aps), std::move(users));
    }
}
