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
#ifndef CBSBEAM_BEAMFORMERS_HPP
#define CBSBEAM_BEAMFORMERS_HPP

#include "cbsbeam/array_model.hpp"
#include "cbsbeam/band_spec.hpp"
#include "cbsbeam/spatial_filter.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cbs
{
    // Per-user transmit SNR P_i / sigma^2. The zero-forcing limit is a flag, not a large number.
    struct PowerProfile
    {
        RVector snr;
        bool infinite = false;

        static PowerProfile uniform(int K, double snr_linear);
        static PowerProfile zero_forcing(int K);
        int size() const { return static_cast<int>(snr.size()); }
    };

    struct PassbandSelection
    {
        std::vector<int> users; // ascending, 0-based
        int n_total = 0;        // K
        int segment = -1;

        int size() const { return static_cast<int>(users.size()); }
        RMatrix phi() const; // K x K_p
    };

    // |omega_i| in [lo, hi) (hi inclusive when include_high). mirror = false tests the signed omega.
    PassbandSelection select_passband(const ChannelMatrix &channel, double omega_lo, double omega_hi,
                                      bool include_high = false, bool mirror = true);
    // Near-field band set: r in [r_c1, r_c2] (ignored for fixed-distance specs), |omega| in [w_c1, w_c2).
    PassbandSelection select_passband(const ChannelMatrix &channel, const BandSpec &band);

    struct DecimationPlan
    {
        int input_dim = 1;
        int interval = 1; // N_d
        int offset = 0;   // mu

        static DecimationPlan make(int input_dim, int interval, int offset = 0);
        int output_dim() const; // J = ceil(input_dim / N_d)
        bool is_identity() const { return interval == 1; }
        CVector apply(const CVector &x) const;
        CMatrix apply(const CMatrix &X) const;
        CVector apply_adjoint(const CVector &x) const;
        RMatrix matrix() const; // D_mu, J x input_dim
    };

    // Linear observation map y -> D W H_c y. Absent stages are identity.
    struct ObservationChain
    {
        int n_elements = 0;
        std::optional<CbsOperator> op;
        std::shared_ptr<const WhiteningOperator> whitener;
        std::optional<DecimationPlan> decimation;

        static ObservationChain identity(int N);
        static ObservationChain cbs(const CbsOperator &op);

        int output_dim() const;
        CVector apply(const CVector &y) const; // counted
        CMatrix apply(const CMatrix &Y) const;
        CVector apply_adjoint(const CVector &x) const;
        CMatrix transfer() const; // dense T
    };

    enum class Family
    {
        mrc,
        zf,
        mmse,
        cbs_mrc,
        cbs_mmse,
        cbs_mmse_decimated,
        cbs_mrc_whitened,
        cbs_mmse_whitened,
        nf_cbs_mrc,
        nf_cbs_mmse
    };

    std::string to_string(Family f);
    Family family_from_string(const std::string &s);

    struct Combiner
    {
        int user = 0;
        int chain = 0;
        CVector v; // unit norm, lives in the chain's output space
    };

    // A user without a combiner is not served by this receiver.
    struct Beamformer
    {
        Family family = Family::mrc;
        std::vector<ObservationChain> chains;
        std::vector<Combiner> combiners;
        int n_users = 0;
        bool underdetermined = false; // some decimated segment has J < K_p

        const Combiner *find(int user) const;
        int observation_dim(int chain = 0) const { return chains.at(chain).output_dim(); }
    };

    Beamformer mrc(const ChannelMatrix &channel);
    Beamformer zf(const ChannelMatrix &channel);
    Beamformer mmse(const ChannelMatrix &channel, const PowerProfile &powers);

    // Default selection serves every user.
    Beamformer cbs_mrc(const CbsOperator &op, const ChannelMatrix &channel,
                       const std::optional<PassbandSelection> &selection = std::nullopt);

    struct CbsMmseOptions
    {
        std::optional<DecimationPlan> decimation;
        bool whiten = false;
    };

    Beamformer cbs_mmse(const CbsOperator &op, const ChannelMatrix &channel, const PowerProfile &powers,
                        const PassbandSelection &selection, const CbsMmseOptions &opt = {});

    Beamformer cbs_mrc_whitened(const CbsOperator &op, std::shared_ptr<const WhiteningOperator> whitener,
                                const ChannelMatrix &channel,
                                const std::optional<PassbandSelection> &selection = std::nullopt);
    // v = W_c^{-1} H_c a_k on the whitened observation; behaves exactly like cbs_mrc.
    Beamformer cbs_mrc_whitened_literal(const CbsOperator &op, std::shared_ptr<const WhiteningOperator> whitener,
                                        const ChannelMatrix &channel);

    enum class NearFieldFamily
    {
        mrc,
        mmse
    };

    Beamformer cbs_nearfield(const CbsOperator &op, const ChannelMatrix &channel, const PowerProfile &powers,
                             const PassbandSelection &selection, NearFieldFamily family);

    // Filter-bank receivers: every user is served by the segment containing |omega_i|.
    std::vector<PassbandSelection> bank_selections(const FilterBank &bank, const ChannelMatrix &channel);
    Beamformer cbs_mrc_bank(const FilterBank &bank, const ChannelMatrix &channel, bool whiten = false);
    Beamformer cbs_mmse_bank(const FilterBank &bank, const ChannelMatrix &channel, const PowerProfile &powers,
                             int decimation_interval = 1, int decimation_offset = 0, bool whiten = false);

    // C^{-1} x with C = I + sum_i p_i u_i u_i^H (columns of Ubar), via the K_p x K_p Woodbury system.
    CVector woodbury_apply(const CMatrix &Ubar, const RVector &p, const CVector &x);
    CVector direct_inverse_apply(const CMatrix &Ubar, const RVector &p, const CVector &x);

    // Detected outputs v_k^H T y for every served user (rows follow user index; unserved rows are 0).
    // Counts the multiplications of the observation chains and the combining step.
    CMatrix detect(const Beamformer &bf, const CMatrix &Y);
}

#endif
