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
#include "cbsbeam/spatial_filter.hpp"
#include "cbsbeam/counter.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cbs
{
    std::string to_string(FilterMethod m)
    {
        switch (m)
        {
        case FilterMethod::window:
            return "window";
        case FilterMethod::nearfield_optimized:
            return "nearfield-optimized";
        case FilterMethod::custom:
            return "custom";
        }
        return "?";
    }

    FilterMethod filter_method_from_string(const std::string &s)
    {
        if (s == "window")
            return FilterMethod::window;
        if (s == "nearfield-optimized")
            return FilterMethod::nearfield_optimized;
        if (s == "custom")
            return FilterMethod::custom;
        throw std::invalid_argument("unknown filter method '" + s + "'");
    }

    FirFilter FirFilter::identity()
    {
        FirFilter f;
        f.taps = CVector::Ones(1);
        f.omega_c1 = 0.0;
        f.omega_c2 = pi;
        return f;
    }

    FirFilter FirFilter::from_taps(CVector taps)
    {
        if (taps.size() == 0)
            throw std::invalid_argument("FirFilter: empty tap vector");
        FirFilter f;
        f.taps = std::move(taps);
        return f;
    }

    FirFilter design_window_bandpass(int L, double omega_c1, double omega_c2, bool hamming)
    {
        if (L < 1)
            throw std::invalid_argument("design_window_bandpass: L must be positive");
        if (!(0.0 <= omega_c1 && omega_c1 < omega_c2 && omega_c2 <= pi))
            throw std::invalid_argument("design_window_bandpass: need 0 <= omega_c1 < omega_c2 <= pi");
        const double M = 0.5 * (L - 1);
        FirFilter f;
        f.taps.resize(L);
        for (int l = 0; l < L; ++l)
        {
            // Pair l with L-1-l so both see the same |l - M| and the taps are exactly symmetric.
            double x = std::abs(l - M);
            double v = x == 0.0 ? (omega_c2 - omega_c1) / pi
                                : (std::sin(omega_c2 * x) - std::sin(omega_c1 * x)) / (pi * x);
            if (hamming && L > 1)
                v *= 0.54 - 0.46 * std::cos(2.0 * pi * std::min(l, L - 1 - l) / (L - 1));
            f.taps(l) = v;
        }
        f.omega_c1 = omega_c1;
        f.omega_c2 = omega_c2;
        f.method = FilterMethod::window;
        return f;
    }

    cplx freq_response(const FirFilter &filter, double omega)
    {
        cplx H = 0.0;
        for (int l = 0; l < filter.length(); ++l)
            H += filter.taps(l) * std::polar(1.0, -omega * l);
        return H;
    }

    CbsOperator::CbsOperator(FirFilter filter, int n_elements) : filter_(std::move(filter)), n_(n_elements)
    {
        if (filter_.length() < 1)
            throw std::invalid_argument("CbsOperator: empty filter");
        if (filter_.length() > n_)
            throw std::invalid_argument("CbsOperator: filter length exceeds array size");
    }

    CVector CbsOperator::apply(const CVector &y) const
    {
        if (y.size() != n_)
            throw std::invalid_argument("apply_cbs: input length must equal the array size");
        const int L = filter_length(), P = output_dim();
        const CVector &h = filter_.taps;
        CVector out = CVector::Zero(P);
        for (int k = 0; k < L; ++k)
            out += h(L - 1 - k) * y.segment(k, P);
        count_multiplies(static_cast<std::uint64_t>(L) * P);
        return out;
    }

    CMatrix CbsOperator::apply(const CMatrix &Y) const
    {
        if (Y.rows() != n_)
            throw std::invalid_argument("apply_cbs: input rows must equal the array size");
        const int L = filter_length(), P = output_dim();
        const CVector &h = filter_.taps;
        CMatrix out = CMatrix::Zero(P, Y.cols());
        for (int k = 0; k < L; ++k)
            out += h(L - 1 - k) * Y.middleRows(k, P);
        count_multiplies(static_cast<std::uint64_t>(L) * P * Y.cols());
        return out;
    }

    CVector CbsOperator::apply_adjoint(const CVector &x) const
    {
        if (x.size() != output_dim())
            throw std::invalid_argument("CbsOperator::apply_adjoint: length mismatch");
        const int L = filter_length(), P = output_dim();
        const CVector &h = filter_.taps;
        CVector out = CVector::Zero(n_);
        for (int k = 0; k < L; ++k)
            out.segment(k, P) += std::conj(h(L - 1 - k)) * x;
        return out;
    }

    CMatrix CbsOperator::dense() const
    {
        const int L = filter_length(), P = output_dim();
        CMatrix H = CMatrix::Zero(P, n_);
        for (int p = 0; p < P; ++p)
            for (int k = 0; k < L; ++k)
                H(p, p + k) = filter_.taps(L - 1 - k);
        return H;
    }

    CbsOperator build_operator(const FirFilter &filter, int N) { return CbsOperator(filter, N); }

    CVector apply_cbs(const CbsOperator &op, const CVector &y) { return op.apply(y); }

    CVector autocorr_first_row(const FirFilter &filter, int N)
    {
        const int L = filter.length();
        if (L > N)
            throw std::invalid_argument("autocorr_first_row: filter length exceeds array size");
        const int P = N - L + 1;
        const CVector &h = filter.taps;
        CVector g = CVector::Zero(P);
        for (int j = 0; j < std::min(P, L); ++j)
            for (int l = j; l < L; ++l)
                g(j) += h(l) * std::conj(h(l - j));
        return g;
    }

    CMatrix autocorr_toeplitz(const CVector &g)
    {
        const Eigen::Index P = g.size();
        CMatrix G(P, P);
        for (Eigen::Index i = 0; i < P; ++i)
            for (Eigen::Index k = 0; k < P; ++k)
                G(i, k) = k >= i ? std::conj(g(k - i)) : g(i - k);
        return G;
    }

    CMatrix WhiteningOperator::inverse() const { return W * G; }

    WhiteningOperator build_whitener(const CbsOperator &op)
    {
        WhiteningOperator w;
        w.G = autocorr_toeplitz(autocorr_first_row(op.filter(), op.input_dim()));
        Eigen::SelfAdjointEigenSolver<CMatrix> es(w.G);
        if (es.info() != Eigen::Success)
            throw SingularError("build_whitener: eigendecomposition failed");
        w.eigenvalues = es.eigenvalues();
        const double lmax = w.eigenvalues.maxCoeff();
        if (!(lmax > 0.0) || w.eigenvalues.minCoeff() < 1e-12 * lmax)
            throw SingularError("build_whitener: autocorrelation matrix is numerically singular");
        RVector s = w.eigenvalues.array().rsqrt();
        w.W = es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
        w.W = 0.5 * (w.W + w.W.adjoint()).eval();
        return w;
    }

    int FilterBank::segment_of(double omega) const
    {
        int m = static_cast<int>(std::floor(std::abs(omega) / delta_omega));
        return std::clamp(m, 0, size() - 1);
    }

    FilterBank build_filter_bank(int M, int L, bool hamming)
    {
        if (M < 1)
            throw std::invalid_argument("build_filter_bank: M must be positive");
        FilterBank bank;
        bank.delta_omega = pi / M;
        for (int m = 0; m < M; ++m)
            bank.filters.push_back(design_window_bandpass(L, m * bank.delta_omega,
                                                          m + 1 == M ? pi : (m + 1) * bank.delta_omega, hamming));
        return bank;
    }

    void write_filter(std::ostream &os, const FirFilter &f)
    {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g ", f.length(), f.omega_c1, f.omega_c2);
        os << buf << to_string(f.method) << '\n';
        for (int l = 0; l < f.length(); ++l)
        {
            std::snprintf(buf, sizeof buf, "%.17g %.17g\n", f.taps(l).real(), f.taps(l).imag());
            os << buf;
        }
    }

    FirFilter read_filter(std::istream &is)
    {
        std::string line;
        if (!std::getline(is, line))
            throw std::runtime_error("read_filter: missing header");
        std::istringstream hs(line);
        int L = 0;
        std::string method;
        FirFilter f;
        if (!(hs >> L >> f.omega_c1 >> f.omega_c2 >> method) || L < 1)
            throw std::runtime_error("read_filter: malformed header");
        f.method = filter_method_from_string(method);
        f.taps.resize(L);
        for (int l = 0; l < L; ++l)
        {
            double re = 0.0, im = 0.0;
            if (!std::getline(is, line))
                throw std::runtime_error("read_filter: expected " + std::to_string(L) + " taps");
            std::istringstream ts(line);
            if (!(ts >> re >> im))
                throw std::runtime_error("read_filter: malformed tap line " + std::to_string(l + 2));
            f.taps(l) = {re, im};
        }
        return f;
    }

    void save_filter(const std::string &path, const FirFilter &f)
    {
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot write " + path);
        write_filter(os, f);
    }

    FirFilter load_filter(const std::string &path)
    {
        std::ifstream is(path);
        if (!is)
            throw std::runtime_error("cannot read " + path);
        return read_filter(is);
    }
}
