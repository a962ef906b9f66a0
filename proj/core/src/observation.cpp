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
#include "cbsbeam/beamformers.hpp"
#include "cbsbeam/counter.hpp"

#include <cmath>
#include <stdexcept>

namespace cbs
{
    PowerProfile PowerProfile::uniform(int K, double snr_linear)
    {
        if (!(snr_linear > 0.0))
            throw std::invalid_argument("PowerProfile: SNR must be positive");
        return {RVector::Constant(K, snr_linear), false};
    }

    PowerProfile PowerProfile::zero_forcing(int K) { return {RVector::Constant(K, 1.0), true}; }

    RMatrix PassbandSelection::phi() const
    {
        RMatrix P = RMatrix::Zero(n_total, size());
        for (int j = 0; j < size(); ++j)
            P(users[j], j) = 1.0;
        return P;
    }

    PassbandSelection select_passband(const ChannelMatrix &channel, double omega_lo, double omega_hi,
                                      bool include_high, bool mirror)
    {
        PassbandSelection sel;
        sel.n_total = channel.n_users();
        for (int k = 0; k < sel.n_total; ++k)
        {
            double w = mirror ? std::abs(channel.omega(k)) : channel.omega(k);
            if (w >= omega_lo && (w < omega_hi || (include_high && w <= omega_hi)))
                sel.users.push_back(k);
        }
        return sel;
    }

    PassbandSelection select_passband(const ChannelMatrix &channel, const BandSpec &band)
    {
        PassbandSelection sel = select_passband(channel, band.omega_c1, band.omega_c2, band.omega_c2 >= pi);
        if (band.fixed_distance())
            return sel;
        std::vector<int> kept;
        for (int k : sel.users)
        {
            double r = channel.users[k].distance_m;
            if (r >= band.r_c1 && r <= band.r_c2)
                kept.push_back(k);
        }
        sel.users = std::move(kept);
        return sel;
    }

    DecimationPlan DecimationPlan::make(int input_dim, int interval, int offset)
    {
        if (input_dim < 1)
            throw std::invalid_argument("DecimationPlan: input dimension must be positive");
        if (interval < 1)
            throw std::invalid_argument("DecimationPlan: interval must be >= 1");
        if (offset < 0 || offset >= interval)
            throw std::invalid_argument("DecimationPlan: offset must lie in [0, interval-1]");
        if (offset >= input_dim)
            throw std::invalid_argument("DecimationPlan: offset exceeds input dimension");
        return {input_dim, interval, offset};
    }

    int DecimationPlan::output_dim() const
    {
        // Rows mu, mu+N_d, ... below input_dim. Equals ceil(input_dim / N_d) for mu = 0.
        return (input_dim - offset + interval - 1) / interval;
    }

    CVector DecimationPlan::apply(const CVector &x) const
    {
        CVector out(output_dim());
        for (int j = 0; j < out.size(); ++j)
            out(j) = x(offset + j * interval);
        return out;
    }

    CMatrix DecimationPlan::apply(const CMatrix &X) const
    {
        CMatrix out(output_dim(), X.cols());
        for (int j = 0; j < out.rows(); ++j)
            out.row(j) = X.row(offset + j * interval);
        return out;
    }

    CVector DecimationPlan::apply_adjoint(const CVector &x) const
    {
        CVector out = CVector::Zero(input_dim);
        for (int j = 0; j < x.size(); ++j)
            out(offset + j * interval) = x(j);
        return out;
    }

    RMatrix DecimationPlan::matrix() const
    {
        RMatrix D = RMatrix::Zero(output_dim(), input_dim);
        for (int j = 0; j < D.rows(); ++j)
            D(j, offset + j * interval) = 1.0;
        return D;
    }

    ObservationChain ObservationChain::identity(int N)
    {
        ObservationChain c;
        c.n_elements = N;
        return c;
    }

    ObservationChain ObservationChain::cbs(const CbsOperator &op)
    {
        ObservationChain c;
        c.n_elements = op.input_dim();
        c.op = op;
        return c;
    }

    int ObservationChain::output_dim() const
    {
        if (decimation)
            return decimation->output_dim();
        return op ? op->output_dim() : n_elements;
    }

    CVector ObservationChain::apply(const CVector &y) const
    {
        CVector x = op ? op->apply(y) : y;
        if (whitener)
        {
            x = whitener->W * x;
            count_multiplies(static_cast<std::uint64_t>(whitener->dim()) * whitener->dim());
        }
        if (decimation)
            x = decimation->apply(x);
        return x;
    }

    CMatrix ObservationChain::apply(const CMatrix &Y) const
    {
        CMatrix X = op ? op->apply(Y) : Y;
        if (whitener)
        {
            X = whitener->W * X;
            count_multiplies(static_cast<std::uint64_t>(whitener->dim()) * whitener->dim() * Y.cols());
        }
        if (decimation)
            X = decimation->apply(X);
        return X;
    }

    CVector ObservationChain::apply_adjoint(const CVector &x) const
    {
        CVector u = decimation ? decimation->apply_adjoint(x) : x;
        if (whitener)
            u = whitener->W * u;
        return op ? op->apply_adjoint(u) : u;
    }

    CMatrix ObservationChain::transfer() const
    {
        CMatrix T = op ? op->dense() : CMatrix::Identity(n_elements, n_elements);
        if (whitener)
            T = whitener->W * T;
        if (decimation)
            T = decimation->apply(T);
        return T;
    }
}
