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
#ifndef CBSBEAM_METRICS_HPP
#define CBSBEAM_METRICS_HPP

#include "cbsbeam/array_model.hpp"
#include "cbsbeam/beamformers.hpp"
#include "cbsbeam/spatial_filter.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cbs
{
    enum class NoiseModel
    {
        white,   // noise power v^H v
        post_cbs // noise power v^H T T^H v for the combiner's observation chain T
    };

    // Per-user SINR, NaN for users the beamformer does not serve. powers must be finite.
    RVector sinr(const Beamformer &bf, const ChannelMatrix &channel, const PowerProfile &powers,
                 NoiseModel noise = NoiseModel::post_cbs);

    // sum log2(1 + gamma); NaN entries are skipped, negative entries rejected.
    double sum_rate(const RVector &sinrs);

    // Empirical SINR from detected outputs and the transmitted symbols (regression on x_k).
    RVector sample_sinr(const Beamformer &bf, const CMatrix &Y, const CMatrix &X);

    // |v^H a(w)| / sqrt(N) with unit-amplitude far-field steering vectors of length v.size().
    RVector beam_pattern_mrc(const CVector &v, const RVector &omega);
    // Same for (r, theta) points under a chosen model; normalized by sqrt(N) * element amplitude.
    RVector beam_pattern_mrc(const CVector &v, const ArrayGeometry &geom, const std::vector<UserLocation> &points,
                             ChannelModel model, double beta0 = 1.0);

    struct CbsPattern
    {
        RVector product;
        RVector array_factor;  // (N-L+1)-element MRC pattern
        RVector filter_factor; // |H(e^{jw}) / H(e^{jw_k})|
    };

    CbsPattern beam_pattern_cbs(const CVector &v, const FirFilter &filter, double omega_k, const RVector &omega);

    // Gamma(r, theta) = |a(r_e,theta_e)^H a(r,theta)|^2 under the second-order model.
    // Rows follow r_grid, columns theta_grid.
    RMatrix correlation_map(const ArrayGeometry &geom, const UserLocation &reference, const RVector &r_grid,
                            const RVector &theta_grid, bool normalize = true, double beta0 = 1.0);

    namespace complexity
    {
        std::uint64_t mrc(std::uint64_t K, std::uint64_t N);
        std::uint64_t zf(std::uint64_t K, std::uint64_t N);
        std::uint64_t mmse(std::uint64_t K, std::uint64_t N);
        std::uint64_t cbs_mrc(std::uint64_t K, std::uint64_t N, std::uint64_t L);
        // Exact integer per-segment counts K_m. N_d = 1 is the undecimated row; otherwise J = ceil((N-L+1)/N_d).
        std::uint64_t cbs_mmse(const std::vector<std::uint64_t> &K_m, std::uint64_t N, std::uint64_t L,
                               std::uint64_t N_d = 1);
        // Uniform approximation K_m = K/M and (N-L+1)/N_d, as tabulated.
        double cbs_mmse_uniform(double K, double M, double N, double L, double N_d = 1.0);
        std::uint64_t whitening(std::uint64_t N, std::uint64_t L);
    }

    struct ComplexityEntry
    {
        std::string family;
        std::uint64_t exact = 0;
        double uniform = 0.0; // tabulated uniform-split value, equals exact where no split is involved
    };

    struct ScenarioDims
    {
        std::uint64_t N = 0, K = 0, L = 0, M = 1, N_d = 1;
        std::vector<std::uint64_t> K_m; // empty: split K as evenly as possible
    };

    std::vector<ComplexityEntry> complexity_counts(const ScenarioDims &dims);

    // Analytic per-family count used in reports.
    std::uint64_t analytic_count(Family f, const ScenarioDims &dims);

    struct MetricsReport
    {
        RVector sinr;
        RVector sinr_db;
        double sum_rate = 0.0;
        std::uint64_t multiply_analytic = 0;
        std::uint64_t multiply_measured = 0;
        std::uint64_t seed = 0;
        std::string config_hash;
    };

    MetricsReport make_report(const RVector &sinrs);
    double to_db(double x);
    double from_db(double x);
}

#endif
