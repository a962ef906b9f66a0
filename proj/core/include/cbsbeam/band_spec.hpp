// SPDX-License-Identifier: Apache-2.0
//
// cbsbeam: convolutional beamspace processing for multi-user MIMO receivers
// Copyright (C) 2026 The cbsbeam authors
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
#ifndef CBSBEAM_BAND_SPEC_HPP
#define CBSBEAM_BAND_SPEC_HPP

#include <string>

namespace cbs
{
    // Passband / transition / stopband description for a near-field spatial filter.
    // Angles are spatial frequencies in rad (|omega| <= pi); the bands are symmetric in +-omega.
    // r_c1 == r_c2 (and r_s1 == r_s2) selects the fixed-distance design.
    struct BandSpec
    {
        int n_elements = 65;
        int filter_length = 48;
        double carrier_hz = 3e9;
        double beta0 = 1.0;

        double r_c1 = 10.0, r_c2 = 10.0;
        double omega_c1 = 0.0, omega_c2 = 0.0;
        double r_s1 = 10.0, r_s2 = 10.0;
        double omega_s1 = 0.0, omega_s2 = 0.0;

        double eps1 = 1.0; // passband floor on ||s||
        double eps2 = 0.1; // transition ceiling on ||s||

        bool fixed_distance() const { return r_c1 == r_c2 && r_s1 == r_s2; }
        double reference_distance() const { return 0.5 * (r_c1 + r_c2); }

        // Throws std::invalid_argument when the band nesting or threshold ordering is broken.
        void validate() const;
    };
}

#endif
