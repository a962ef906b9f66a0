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
#ifndef CBSBEAM_SPATIAL_FILTER_HPP
#define CBSBEAM_SPATIAL_FILTER_HPP

#include "cbsbeam/band_spec.hpp"
#include "cbsbeam/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cbs
{
    enum class FilterMethod
    {
        window,
        nearfield_optimized,
        custom
    };

    std::string to_string(FilterMethod m);
    FilterMethod filter_method_from_string(const std::string &s);

    struct FirFilter
    {
        CVector taps; // h(0) ... h(L-1)
        double omega_c1 = 0.0;
        double omega_c2 = 0.0;
        FilterMethod method = FilterMethod::custom;
        std::optional<BandSpec> band;

        int length() const { return static_cast<int>(taps.size()); }
        static FirFilter identity();
        static FirFilter from_taps(CVector taps);
    };

    // Truncated-sinc bandpass. Even L uses the fractional delay (L-1)/2.
    FirFilter design_window_bandpass(int L, double omega_c1, double omega_c2, bool hamming = false);

    // H(e^{jw}) = sum_l h(l) e^{-j w l}
    cplx freq_response(const FirFilter &filter, double omega);

    // (N-L+1) x N banded Toeplitz operator, row p = reversed taps at column offset p:
    // H[p, p+k] = h(L-1-k).
    class CbsOperator
    {
    public:
        CbsOperator(FirFilter filter, int n_elements);

        const FirFilter &filter() const { return filter_; }
        int input_dim() const { return n_; }
        int output_dim() const { return n_ - filter_.length() + 1; }
        int filter_length() const { return filter_.length(); }

        // Valid-region convolution. Counts L*(N-L+1) multiplications per column.
        CVector apply(const CVector &y) const;
        CMatrix apply(const CMatrix &Y) const;
        CVector apply_adjoint(const CVector &x) const; // H_c^H x, not counted

        CMatrix dense() const;

    private:
        FirFilter filter_;
        int n_;
    };

    CbsOperator build_operator(const FirFilter &filter, int N);
    CVector apply_cbs(const CbsOperator &op, const CVector &y);

    // g(j) = sum_l h(l) h*(l-j), j = 0 ... N-L.
    // G_c = H_c H_c^H is Toeplitz with first row [g(0), g*(1), ..., g*(N-L)].
    CVector autocorr_first_row(const FirFilter &filter, int N);
    CMatrix autocorr_toeplitz(const CVector &g);

    struct WhiteningOperator
    {
        CMatrix W;           // G_c^{-1/2}
        CMatrix G;           // H_c H_c^H
        RVector eigenvalues; // of G, ascending

        int dim() const { return static_cast<int>(W.rows()); }
        CMatrix inverse() const; // G_c^{1/2}
    };

    // Throws SingularError if any eigenvalue of G_c is below 1e-12 * lambda_max.
    WhiteningOperator build_whitener(const CbsOperator &op);

    struct FilterBank
    {
        std::vector<FirFilter> filters;
        double delta_omega = pi;

        int size() const { return static_cast<int>(filters.size()); }
        // Segment m in [0, M) covers |omega| in [m*dw, (m+1)*dw); the last segment includes pi.
        int segment_of(double omega) const;
    };

    FilterBank build_filter_bank(int M, int L, bool hamming = false);

    // Exchange format: header "L omega_c1 omega_c2 method", then one "re im" line per tap.
    void write_filter(std::ostream &os, const FirFilter &f);
    FirFilter read_filter(std::istream &is);
    void save_filter(const std::string &path, const FirFilter &f);
    FirFilter load_filter(const std::string &path);
}

#endif
