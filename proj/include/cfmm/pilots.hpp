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

#ifndef CFMM_PILOTS_HPP
#define CFMM_PILOTS_HPP

#include "cfmm/config.hpp"

#include <cstdint>
#include <vector>

namespace cfmm
{
    // tau_p x tau_p unitary DFT matrix; column t is pilot sequence t.
    CMatrix make_pilot_book(std::size_t pilot_length);

    // Pilot indices are 0-based.
    std::vector<std::size_t> assign_rpa(std::size_t num_users, std::size_t pilot_length, std::uint64_t seed);
    std::vector<std::size_t> assign_brpa(std::size_t num_users, std::size_t pilot_length);

    // a^T b / (|a| |b|). Throws DomainError if either vector is zero.
    double cosine_similarity(const RVector &a, const RVector &b);

    // MS indices sorted by ascending similarity to the centroid fingerprint,
    // ties broken by MS index. Fingerprints are the columns of a (M x K) matrix.
    std::vector<std::size_t> dcpa_order(const RMatrix &fingerprints);

    // The MS at position i of dcpa_order gets pilot i mod tau_p.
    std::vector<std::size_t> assign_dcpa(const RMatrix &fingerprints, std::size_t pilot_length);

    struct PilotAssignment
    {
        CMatrix book;
        std::vector<std::size_t> pilot_of;
        PilotStrategy strategy = PilotStrategy::brpa;

        std::size_t pilot_length() const { return static_cast<std::size_t>(book.cols()); }
        std::size_t num_users() const { return pilot_of.size(); }
        bool share_pilot(std::size_t a, std::size_t b) const { return pilot_of[a] == pilot_of[b]; }
        std::vector<std::size_t> users_of(std::size_t pilot) const;
    };

    // weights: the M x K link weights from the RF plan (fingerprints for DCPA).
    PilotAssignment assign_pilots(PilotStrategy strategy, const RMatrix &weights, std::size_t pilot_length,
                                  std::uint64_t seed);
}

#endif
