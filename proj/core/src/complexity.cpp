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
#include "cbsbeam/metrics.hpp"

#include <stdexcept>

namespace cbs
{
    namespace complexity
    {
        std::uint64_t mrc(std::uint64_t K, std::uint64_t N) { return K * N; }

        std::uint64_t zf(std::uint64_t K, std::uint64_t N) { return K * K * N + K * K * K + K * N + K * K; }

        std::uint64_t mmse(std::uint64_t K, std::uint64_t N) { return zf(K, N); }

        std::uint64_t cbs_mrc(std::uint64_t K, std::uint64_t N, std::uint64_t L)
        {
            if (L > N)
                throw std::invalid_argument("complexity: L exceeds N");
            return (K + L) * (N - L + 1);
        }

        std::uint64_t cbs_mmse(const std::vector<std::uint64_t> &K_m, std::uint64_t N, std::uint64_t L,
                               std::uint64_t N_d)
        {
            if (L > N || N_d < 1)
                throw std::invalid_argument("complexity: need L <= N and N_d >= 1");
            const std::uint64_t P = N - L + 1;
            const std::uint64_t J = (P + N_d - 1) / N_d;
            std::uint64_t c = L * P;
            for (std::uint64_t k : K_m)
                c += k * k * J + k * k * k + k * J + k * k;
            return c;
        }

        double cbs_mmse_uniform(double K, double M, double N, double L, double N_d)
        {
            const double P = N - L + 1.0, k = K / M, J = P / N_d;
            return L * P + M * (k * k * J + k * k * k + k * J + k * k);
        }

        std::uint64_t whitening(std::uint64_t N, std::uint64_t L)
        {
            if (L > N)
                throw std::invalid_argument("complexity: L exceeds N");
            const std::uint64_t P = N - L + 1;
            return L * (L + 1) / 2 + P * P;
        }
    }

    namespace
    {
        std::vector<std::uint64_t> split(const ScenarioDims &d)
        {
            if (!d.K_m.empty())
                return d.K_m;
            std::vector<std::uint64_t> k(d.M, d.K / d.M);
            for (std::uint64_t m = 0; m < d.K % d.M; ++m)
                ++k[m];
            return k;
        }
    }

    std::uint64_t analytic_count(Family f, const ScenarioDims &d)
    {
        switch (f)
        {
        case Family::mrc:
            return complexity::mrc(d.K, d.N);
        case Family::zf:
            return complexity::zf(d.K, d.N);
        case Family::mmse:
            return complexity::mmse(d.K, d.N);
        case Family::cbs_mrc:
        case Family::nf_cbs_mrc:
            return complexity::cbs_mrc(d.K, d.N, d.L);
        case Family::cbs_mrc_whitened:
            return complexity::cbs_mrc(d.K, d.N, d.L) + complexity::whitening(d.N, d.L);
        case Family::cbs_mmse:
        case Family::nf_cbs_mmse:
            return complexity::cbs_mmse(split(d), d.N, d.L, 1);
        case Family::cbs_mmse_decimated:
            return complexity::cbs_mmse(split(d), d.N, d.L, d.N_d);
        case Family::cbs_mmse_whitened:
            return complexity::cbs_mmse(split(d), d.N, d.L, 1) + complexity::whitening(d.N, d.L);
        }
        return 0;
    }

    std::vector<ComplexityEntry> complexity_counts(const ScenarioDims &d)
    {
        const double K = static_cast<double>(d.K), M = static_cast<double>(d.M), N = static_cast<double>(d.N),
                     L = static_cast<double>(d.L), Nd = static_cast<double>(d.N_d);
        std::vector<ComplexityEntry> t;
        auto add = [&](Family f, double uniform)
        { t.push_back({to_string(f), analytic_count(f, d), uniform}); };
        add(Family::mrc, static_cast<double>(complexity::mrc(d.K, d.N)));
        add(Family::zf, static_cast<double>(complexity::zf(d.K, d.N)));
        add(Family::mmse, static_cast<double>(complexity::mmse(d.K, d.N)));
        add(Family::cbs_mrc, static_cast<double>(complexity::cbs_mrc(d.K, d.N, d.L)));
        add(Family::cbs_mmse, complexity::cbs_mmse_uniform(K, M, N, L, 1.0));
        add(Family::cbs_mmse_decimated, complexity::cbs_mmse_uniform(K, M, N, L, Nd));
        const double w = static_cast<double>(complexity::whitening(d.N, d.L));
        add(Family::cbs_mrc_whitened, static_cast<double>(complexity::cbs_mrc(d.K, d.N, d.L)) + w);
        add(Family::cbs_mmse_whitened, complexity::cbs_mmse_uniform(K, M, N, L, 1.0) + w);
        return t;
    }
}
