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
#include <limits>
#include <stdexcept>

namespace cbs
{
    namespace
    {
        bool normalize_into(const CVector &x, CVector &v)
        {
            double n = x.norm();
            if (!(n > 0.0) || !std::isfinite(n))
                return false;
            v = x / n;
            return true;
        }

        // Rows of B (K x dim) -> unit combiners on a single chain.
        void combiners_from_rows(Beamformer &bf, const CMatrix &B, const std::vector<int> &users, int chain)
        {
            for (int j = 0; j < static_cast<int>(users.size()); ++j)
            {
                Combiner c;
                c.user = users[j];
                c.chain = chain;
                if (!normalize_into(B.row(j).adjoint(), c.v))
                    throw SingularError("beamformer: zero combining vector for user " + std::to_string(users[j]));
                bf.combiners.push_back(std::move(c));
            }
        }

        std::vector<int> all_users(int K)
        {
            std::vector<int> u(K);
            for (int k = 0; k < K; ++k)
                u[k] = k;
            return u;
        }

        CMatrix columns(const CMatrix &A, const std::vector<int> &idx)
        {
            CMatrix out(A.rows(), static_cast<Eigen::Index>(idx.size()));
            for (std::size_t j = 0; j < idx.size(); ++j)
                out.col(j) = A.col(idx[j]);
            return out;
        }

        void require_full_column_rank(const CMatrix &A, const char *who)
        {
            if (A.cols() > A.rows())
                throw SingularError(std::string(who) + ": more users than observation dimensions");
            Eigen::ColPivHouseholderQR<CMatrix> qr(A);
            qr.setThreshold(1e-10);
            if (qr.rank() < A.cols())
                throw SingularError(std::string(who) + ": channel matrix is rank deficient");
        }

        // (U^H U + P^{-1})^{-1} U^H, with P^{-1} = 0 in the zero-forcing limit.
        CMatrix regularized_pinv(const CMatrix &U, const PowerProfile &p)
        {
            CMatrix G = U.adjoint() * U;
            if (!p.infinite)
                G.diagonal().array() += p.snr.array().inverse().cast<cplx>();
            Eigen::LDLT<CMatrix> ldlt(G);
            if (ldlt.info() != Eigen::Success)
                throw SingularError("regularized_pinv: factorization failed");
            return ldlt.solve(U.adjoint());
        }

        PowerProfile subset(const PowerProfile &p, const std::vector<int> &idx)
        {
            PowerProfile q;
            q.infinite = p.infinite;
            q.snr.resize(static_cast<Eigen::Index>(idx.size()));
            for (std::size_t j = 0; j < idx.size(); ++j)
                q.snr(j) = p.snr(idx[j]);
            return q;
        }

        void append(Beamformer &dst, Beamformer &&src)
        {
            const int base = static_cast<int>(dst.chains.size());
            for (auto &c : src.chains)
                dst.chains.push_back(std::move(c));
            for (auto &c : src.combiners)
            {
                c.chain += base;
                dst.combiners.push_back(std::move(c));
            }
            dst.underdetermined = dst.underdetermined || src.underdetermined;
        }

        void check_powers(const PowerProfile &p, int K)
        {
            if (p.size() != K)
                throw std::invalid_argument("beamformer: power profile length must equal the user count");
            if (!p.infinite && (p.snr.array() <= 0.0).any())
                throw std::invalid_argument("beamformer: transmit SNR must be positive");
        }
    }

    std::string to_string(Family f)
    {
        switch (f)
        {
        case Family::mrc:
            return "mrc";
        case Family::zf:
            return "zf";
        case Family::mmse:
            return "mmse";
        case Family::cbs_mrc:
            return "cbs_mrc";
        case Family::cbs_mmse:
            return "cbs_mmse";
        case Family::cbs_mmse_decimated:
            return "cbs_mmse_decimated";
        case Family::cbs_mrc_whitened:
            return "cbs_mrc_whitened";
        case Family::cbs_mmse_whitened:
            return "cbs_mmse_whitened";
        case Family::nf_cbs_mrc:
            return "nf_cbs_mrc";
        case Family::nf_cbs_mmse:
            return "nf_cbs_mmse";
        }
        return "?";
    }

    Family family_from_string(const std::string &s)
    {
        for (Family f : {Family::mrc, Family::zf, Family::mmse, Family::cbs_mrc, Family::cbs_mmse,
                         Family::cbs_mmse_decimated, Family::cbs_mrc_whitened, Family::cbs_mmse_whitened,
                         Family::nf_cbs_mrc, Family::nf_cbs_mmse})
            if (to_string(f) == s)
                return f;
        throw std::invalid_argument("unknown receiver family '" + s + "'");
    }

    const Combiner *Beamformer::find(int user) const
    {
        for (const auto &c : combiners)
            if (c.user == user)
                return &c;
        return nullptr;
    }

    Beamformer mrc(const ChannelMatrix &channel)
    {
        Beamformer bf;
        bf.family = Family::mrc;
        bf.n_users = channel.n_users();
        bf.chains.push_back(ObservationChain::identity(channel.n_rows()));
        combiners_from_rows(bf, channel.A.adjoint(), all_users(bf.n_users), 0);
        return bf;
    }

    Beamformer zf(const ChannelMatrix &channel)
    {
        require_full_column_rank(channel.A, "zf");
        Beamformer bf;
        bf.family = Family::zf;
        bf.n_users = channel.n_users();
        bf.chains.push_back(ObservationChain::identity(channel.n_rows()));
        combiners_from_rows(bf, regularized_pinv(channel.A, PowerProfile::zero_forcing(bf.n_users)),
                            all_users(bf.n_users), 0);
        return bf;
    }

    Beamformer mmse(const ChannelMatrix &channel, const PowerProfile &powers)
    {
        check_powers(powers, channel.n_users());
        if (powers.infinite)
        {
            Beamformer bf = zf(channel);
            bf.family = Family::mmse;
            return bf;
        }
        Beamformer bf;
        bf.family = Family::mmse;
        bf.n_users = channel.n_users();
        bf.chains.push_back(ObservationChain::identity(channel.n_rows()));
        combiners_from_rows(bf, regularized_pinv(channel.A, powers), all_users(bf.n_users), 0);
        return bf;
    }

    Beamformer cbs_mrc(const CbsOperator &op, const ChannelMatrix &channel,
                       const std::optional<PassbandSelection> &selection)
    {
        if (op.input_dim() != channel.n_rows())
            throw std::invalid_argument("cbs_mrc: operator size does not match the array");
        Beamformer bf;
        bf.family = Family::cbs_mrc;
        bf.n_users = channel.n_users();
        bf.chains.push_back(ObservationChain::cbs(op));
        const std::vector<int> users = selection ? selection->users : all_users(bf.n_users);
        const CMatrix U = op.apply(columns(channel.A, users));
        for (std::size_t j = 0; j < users.size(); ++j)
        {
            Combiner c;
            c.user = users[j];
            c.chain = 0;
            if (normalize_into(U.col(j), c.v)) // users at an exact filter null are left unserved
                bf.combiners.push_back(std::move(c));
        }
        return bf;
    }

    CVector woodbury_apply(const CMatrix &Ubar, const RVector &p, const CVector &x)
    {
        if (Ubar.cols() == 0)
            return x;
        CMatrix S = Ubar.adjoint() * Ubar;
        for (Eigen::Index i = 0; i < p.size(); ++i)
            S(i, i) += std::isinf(p(i)) ? 0.0 : 1.0 / p(i);
        Eigen::LDLT<CMatrix> ldlt(S);
        if (ldlt.info() != Eigen::Success)
            throw SingularError("woodbury_apply: factorization failed");
        return x - Ubar * ldlt.solve(Ubar.adjoint() * x);
    }

    CVector direct_inverse_apply(const CMatrix &Ubar, const RVector &p, const CVector &x)
    {
        CMatrix C = CMatrix::Identity(Ubar.rows(), Ubar.rows());
        for (Eigen::Index i = 0; i < Ubar.cols(); ++i)
            C += p(i) * Ubar.col(i) * Ubar.col(i).adjoint();
        return C.llt().solve(x);
    }

    Beamformer cbs_mmse(const CbsOperator &op, const ChannelMatrix &channel, const PowerProfile &powers,
                        const PassbandSelection &selection, const CbsMmseOptions &opt)
    {
        if (op.input_dim() != channel.n_rows())
            throw std::invalid_argument("cbs_mmse: operator size does not match the array");
        check_powers(powers, channel.n_users());
        if (selection.size() == 0)
            throw std::invalid_argument("cbs_mmse: empty passband selection");

        Beamformer bf;
        bf.family = opt.whiten ? Family::cbs_mmse_whitened
                               : (opt.decimation && !opt.decimation->is_identity() ? Family::cbs_mmse_decimated
                                                                                    : Family::cbs_mmse);
        bf.n_users = channel.n_users();
        ObservationChain chain = ObservationChain::cbs(op);
        if (opt.whiten)
            chain.whitener = std::make_shared<const WhiteningOperator>(build_whitener(op));
        if (opt.decimation)
        {
            if (opt.decimation->input_dim != op.output_dim())
                throw std::invalid_argument("cbs_mmse: decimation plan does not match the operator output");
            chain.decimation = *opt.decimation;
        }

        const CMatrix U = chain.apply(columns(channel.A, selection.users));
        const PowerProfile pp = subset(powers, selection.users);
        const int Kp = selection.size();
        bf.underdetermined = U.rows() < Kp;

        if (opt.whiten)
        {
            combiners_from_rows(bf, regularized_pinv(U, pp), selection.users, 0);
        }
        else
        {
            for (int k = 0; k < Kp; ++k)
            {
                CMatrix Ubar(U.rows(), Kp - 1);
                RVector pbar(Kp - 1);
                for (int i = 0, j = 0; i < Kp; ++i)
                {
                    if (i == k)
                        continue;
                    Ubar.col(j) = U.col(i);
                    pbar(j) = powers.infinite ? std::numeric_limits<double>::infinity() : pp.snr(i);
                    ++j;
                }
                Combiner c;
                c.user = selection.users[k];
                c.chain = 0;
                if (!normalize_into(woodbury_apply(Ubar, pbar, U.col(k)), c.v))
                    throw SingularError("cbs_mmse: zero combining vector for user " + std::to_string(c.user));
                bf.combiners.push_back(std::move(c));
            }
        }
        bf.chains.push_back(std::move(chain));
        return bf;
    }

    Beamformer cbs_mrc_whitened(const CbsOperator &op, std::shared_ptr<const WhiteningOperator> whitener,
                                const ChannelMatrix &channel, const std::optional<PassbandSelection> &selection)
    {
        if (!whitener)
            whitener = std::make_shared<const WhiteningOperator>(build_whitener(op));
        Beamformer bf = cbs_mrc(op, channel, selection);
        bf.family = Family::cbs_mrc_whitened;
        bf.chains[0].whitener = whitener;
        for (auto &c : bf.combiners)
            normalize_into(whitener->W * c.v, c.v);
        return bf;
    }

    Beamformer cbs_mrc_whitened_literal(const CbsOperator &op, std::shared_ptr<const WhiteningOperator> whitener,
                                        const ChannelMatrix &channel)
    {
        if (!whitener)
            whitener = std::make_shared<const WhiteningOperator>(build_whitener(op));
        Beamformer bf = cbs_mrc(op, channel);
        bf.family = Family::cbs_mrc_whitened;
        bf.chains[0].whitener = whitener;
        const CMatrix Winv = whitener->inverse();
        for (auto &c : bf.combiners)
            normalize_into(Winv * c.v, c.v);
        return bf;
    }

    Beamformer cbs_nearfield(const CbsOperator &op, const ChannelMatrix &channel, const PowerProfile &powers,
                             const PassbandSelection &selection, NearFieldFamily family)
    {
        if (channel.model == ChannelModel::far_field)
            throw std::invalid_argument("cbs_nearfield: channel must use a spherical-wave model");
        if (family == NearFieldFamily::mrc)
        {
            Beamformer bf = cbs_mrc(op, channel, selection);
            bf.family = Family::nf_cbs_mrc;
            return bf;
        }
        Beamformer bf = cbs_mmse(op, channel, powers, selection);
        bf.family = Family::nf_cbs_mmse;
        return bf;
    }

    std::vector<PassbandSelection> bank_selections(const FilterBank &bank, const ChannelMatrix &channel)
    {
        std::vector<PassbandSelection> sel(bank.size());
        for (int m = 0; m < bank.size(); ++m)
        {
            sel[m].n_total = channel.n_users();
            sel[m].segment = m;
        }
        for (int k = 0; k < channel.n_users(); ++k)
            sel[bank.segment_of(channel.omega(k))].users.push_back(k);
        return sel;
    }

    Beamformer cbs_mrc_bank(const FilterBank &bank, const ChannelMatrix &channel, bool whiten)
    {
        Beamformer bf;
        bf.family = whiten ? Family::cbs_mrc_whitened : Family::cbs_mrc;
        bf.n_users = channel.n_users();
        const auto sel = bank_selections(bank, channel);
        for (int m = 0; m < bank.size(); ++m)
        {
            if (sel[m].size() == 0)
                continue;
            CbsOperator op(bank.filters[m], channel.n_rows());
            append(bf, whiten ? cbs_mrc_whitened(op, nullptr, channel, sel[m]) : cbs_mrc(op, channel, sel[m]));
        }
        return bf;
    }

    Beamformer cbs_mmse_bank(const FilterBank &bank, const ChannelMatrix &channel, const PowerProfile &powers,
                             int decimation_interval, int decimation_offset, bool whiten)
    {
        Beamformer bf;
        bf.n_users = channel.n_users();
        const auto sel = bank_selections(bank, channel);
        for (int m = 0; m < bank.size(); ++m)
        {
            if (sel[m].size() == 0)
                continue;
            CbsOperator op(bank.filters[m], channel.n_rows());
            CbsMmseOptions opt;
            opt.whiten = whiten;
            if (decimation_interval > 1)
                opt.decimation = DecimationPlan::make(op.output_dim(), decimation_interval, decimation_offset);
            append(bf, cbs_mmse(op, channel, powers, sel[m], opt));
        }
        bf.family = whiten ? Family::cbs_mmse_whitened
                           : (decimation_interval > 1 ? Family::cbs_mmse_decimated : Family::cbs_mmse);
        return bf;
    }

    CMatrix detect(const Beamformer &bf, const CMatrix &Y)
    {
        CMatrix out = CMatrix::Zero(bf.n_users, Y.cols());
        std::vector<CMatrix> X(bf.chains.size());
        for (std::size_t c = 0; c < bf.chains.size(); ++c)
            X[c] = bf.chains[c].apply(Y);
        for (const auto &c : bf.combiners)
        {
            out.row(c.user) = c.v.adjoint() * X[c.chain];
            count_multiplies(static_cast<std::uint64_t>(c.v.size()) * Y.cols());
        }
        return out;
    }
}
