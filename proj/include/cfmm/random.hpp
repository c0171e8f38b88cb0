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

#ifndef CFMM_RANDOM_HPP
#define CFMM_RANDOM_HPP

#include "cfmm/types.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cfmm
{
    // Purpose tags used to split one drop seed into independent streams.
    // A stream is identified by (parent seed, tag, indices...), so any
    // sub-experiment can be replayed without drawing the others first.
    enum class Stream : std::uint64_t
    {
        placement = 1,
        link_state = 2,
        shadowing = 3,
        clusters = 4,
        fading = 5,
        pilot_noise = 6,
        pilot_assignment = 7,
        symbols = 8,
        drop = 9
    };

    // SplitMix64 finalizer.
    constexpr std::uint64_t mix64(std::uint64_t x)
    {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    inline std::uint64_t derive_seed(std::uint64_t parent, Stream tag, std::initializer_list<std::uint64_t> path = {})
    {
        std::uint64_t h = mix64(parent ^ mix64(static_cast<std::uint64_t>(tag)));
        for (auto v : path)
            h = mix64(h ^ mix64(v + 0x632be59bd9b4e019ULL));
        return h;
    }

    class RandomStream
    {
    public:
        explicit RandomStream(std::uint64_t seed) : engine_(seed) {}
        RandomStream(std::uint64_t parent, Stream tag, std::initializer_list<std::uint64_t> path = {})
            : engine_(derive_seed(parent, tag, path)) {}

        double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
        double normal(double mean = 0.0, double stddev = 1.0) { return mean + stddev * unit_normal_(engine_); }
        double exponential(double mean) { return mean > 0.0 ? std::exponential_distribution<double>(1.0 / mean)(engine_) : 0.0; }
        long poisson(double mean) { return mean > 0.0 ? std::poisson_distribution<long>(mean)(engine_) : 0L; }
        std::size_t uniform_index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

        // Circularly symmetric complex Gaussian with E|z|^2 = variance.
        cplx complex_normal(double variance = 1.0)
        {
            const double s = std::sqrt(0.5 * variance);
            const double re = unit_normal_(engine_);
            const double im = unit_normal_(engine_);
            return {s * re, s * im};
        }

        std::mt19937_64 &engine() { return engine_; }

    private:
        std::mt19937_64 engine_;
        std::normal_distribution<double> unit_normal_{0.0, 1.0};
    };
}

#endif
