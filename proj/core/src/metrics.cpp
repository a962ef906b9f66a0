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
#include "cbsbeam/counter.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbs
{
    RVector sinr(const Beamformer &bf, const ChannelMatrix &channel, const PowerProfile &powers, NoiseModel noise)
    {
        const int K = channel.n_users();
        if (bf.n_users != K)
            throw std::invalid_argument("sinr: beamformer and channel disagree on the user count");
        if (powers.size() != K || powers.infinite)
            throw std::invalid_argument("sinr: need a finite power per user");
        MultiplyScope quiet(true);
        std::vector<CMatrix> TA(bf.chains.size());
        for (std::size_t c = 0; c < bf.chains.size(); ++c)
        {
            if (bf.chains[c].n_elements != channel.n_rows())
                throw std::invalid_argument("sinr: observation chain does not match the array size");
            TA[c] = bf.chains[c].apply(channel.A);
        }
        RVector out = RVector::Constant(K, std::numeric_limits<double>::quiet_NaN());
        for (const auto &cb : bf.combiners)
        {
            const ObservationChain &chain = bf.chains[cb.chain];
            if (cb.v.size() != chain.output_dim())
                throw std::invalid_argument("sinr: combiner dimension mismatch");
            const Eigen::RowVectorXcd g = cb.v.adjoint() * TA[cb.chain];
            double n = noise == NoiseModel::white ? cb.v.squaredNorm() : chain.apply_adjoint(cb.v).squaredNorm();
            double interf = 0.0;
            for (int i = 0; i < K; ++i)
                if (i != cb.user)
                    interf += powers.snr(i) * std::norm(g(i));
            out(cb.user) = powers.snr(cb.user) * std::norm(g(cb.user)) / (n + interf);
        }
        return out;
    }

    double sum_rate(const RVector &sinrs)
    {
        double r = 0.0;
        for (Eigen::Index i = 0; i < sinrs.size(); ++i)
        {
            if (std::isnan(sinrs(i)))
                continue;
            if (sinrs(i) < 0.0)
                throw std::invalid_argument("sum_rate: negative SINR");
            r += std::log2(1.0 + sinrs(i));
        }
        return r;
    }

    RVector sample_sinr(const Beamformer &bf, const CMatrix &Y, const CMatrix &X)
    {
        if (X.rows() != bf.n_users || X.cols() != Y.cols())
            throw std::invalid_argument("sample_sinr: symbol matrix shape mismatch");
        CMatrix Z;
        {
            MultiplyScope quiet(true);
            Z = detect(bf, Y);
        }
        RVector out = RVector::Constant(bf.n_users, std::numeric_limits<double>::quiet_NaN());
        const double n = static_cast<double>(Y.cols());
        for (const auto &cb : bf.combiners)
        {
            const auto z = Z.row(cb.user);
            const auto x = X.row(cb.user);
            const double ex = x.squaredNorm();
            const cplx g = (z * x.adjoint())(0, 0) / ex;
            const double err = (z - g * x).squaredNorm();
            out(cb.user) = std::norm(g) * (ex / n) / (err / n);
        }
        return out;
    }

    RVector beam_pattern_mrc(const CVector &v, const RVector &omega)
    {
        const int N = static_cast<int>(v.size());
        const double Nt = 0.5 * (N - 1);
        RVector f(omega.size());
        for (Eigen::Index i = 0; i < omega.size(); ++i)
        {
            cplx acc = 0.0;
            for (int n = 0; n < N; ++n)
                acc += std::conj(v(n)) * std::polar(1.0, (n - Nt) * omega(i));
            f(i) = std::abs(acc) / std::sqrt(static_cast<double>(N));
        }
        return f;
    }

    RVector beam_pattern_mrc(const CVector &v, const ArrayGeometry &geom, const std::vector<UserLocation> &points,
                             ChannelModel model, double beta0)
    {
        if (v.size() != geom.n_elements())
            throw std::invalid_argument("beam_pattern_mrc: combiner length must equal the array size");
        RVector f(static_cast<Eigen::Index>(points.size()));
        const double sqrtN = std::sqrt(static_cast<double>(geom.n_elements()));
        for (std::size_t i = 0; i < points.size(); ++i)
        {
            CVector a = steering(geom, points[i], model, beta0);
            double amp = std::sqrt(beta0) / points[i].distance_m;
            f(static_cast<Eigen::Index>(i)) = std::abs(v.dot(a)) / (sqrtN * amp);
        }
        return f;
    }

    CbsPattern beam_pattern_cbs(const CVector &v, const FirFilter &filter, double omega_k, const RVector &omega)
    {
        CbsPattern p;
        p.array_factor = beam_pattern_mrc(v, omega) / v.norm();
        const double Hk = std::abs(freq_response(filter, omega_k));
        if (!(Hk > 0.0))
            throw std::invalid_argument("beam_pattern_cbs: target frequency sits on a filter null");
        p.filter_factor.resize(omega.size());
        for (Eigen::Index i = 0; i < omega.size(); ++i)
            p.filter_factor(i) = std::abs(freq_response(filter, omega(i))) / Hk;
        p.product = p.array_factor.cwiseProduct(p.filter_factor);
        return p;
    }

    RMatrix correlation_map(const ArrayGeometry &geom, const UserLocation &reference, const RVector &r_grid,
                            const RVector &theta_grid, bool normalize, double beta0)
    {
        const CVector ae = steering_usw2(geom, reference, beta0);
        const double self = ae.squaredNorm() * ae.squaredNorm();
        RMatrix G(r_grid.size(), theta_grid.size());
        for (Eigen::Index i = 0; i < r_grid.size(); ++i)
            for (Eigen::Index j = 0; j < theta_grid.size(); ++j)
            {
                double v = std::norm(ae.dot(steering_usw2(geom, {r_grid(i), theta_grid(j)}, beta0)));
                G(i, j) = normalize ? v / self : v;
            }
        return G;
    }

    double to_db(double x) { return 10.0 * std::log10(x); }
    double from_db(double x) { return std::pow(10.0, x / 10.0); }

    MetricsReport make_report(const RVector &sinrs)
    {
        MetricsReport r;
        r.sinr = sinrs;
        r.sinr_db = sinrs.unaryExpr([](double x) { return std::isnan(x) ? x : to_db(x); });
        r.sum_rate = sum_rate(sinrs);
        return r;
    }
}
