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
#ifndef CBSBEAM_ARRAY_MODEL_HPP
#define CBSBEAM_ARRAY_MODEL_HPP

#include "cbsbeam/types.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace cbs
{
    // Uniform linear array along the y axis. Element n sits at (0, n*d),
    // n = -(N-1)/2 ... (N-1)/2. N must be odd.
    class ArrayGeometry
    {
    public:
        ArrayGeometry(int n_elements, double spacing_m, double wavelength_m);

        // d = lambda/2 for carrier frequency f (c = 299792458 m/s).
        static ArrayGeometry half_wavelength(int n_elements, double carrier_hz);

        int n_elements() const { return n_; }
        int half_aperture() const { return (n_ - 1) / 2; }
        double spacing_m() const { return d_; }
        double wavelength_m() const { return lambda_; }
        bool is_half_wavelength() const;
        double rayleigh_distance_m() const;

    private:
        int n_;
        double d_;
        double lambda_;
    };

    inline constexpr double speed_of_light = 299792458.0;

    struct UserLocation
    {
        double distance_m = 1.0;
        double angle_rad = 0.0;

        double x() const;
        double y() const;
        double spatial_freq(const ArrayGeometry &g) const; // omega = 2*pi/lambda * d * sin(theta)
        double curvature(const ArrayGeometry &g) const;    // psi = pi*lambda*cos^2(theta)/(4r)
        double eps(const ArrayGeometry &g) const;          // d / r

        static UserLocation from_xy(double x, double y);
        // Angle such that spatial_freq(g) == omega. Requires |omega| <= 2*pi*d/lambda.
        static UserLocation from_omega(const ArrayGeometry &g, double omega, double distance_m);

        bool operator==(const UserLocation &) const = default;
    };

    struct ScattererSet
    {
        std::vector<UserLocation> positions; // (r~_q, theta~_q) relative to array centre
        CMatrix gains;                       // Q x K, beta_{q,i}
        int count() const { return static_cast<int>(positions.size()); }
    };

    enum class ChannelModel
    {
        exact_spherical,
        far_field,
        usw2
    };

    std::string to_string(ChannelModel m);
    ChannelModel channel_model_from_string(const std::string &s);

    struct ChannelMatrix
    {
        CMatrix A; // N x K
        std::vector<UserLocation> users;
        ChannelModel model = ChannelModel::far_field;
        bool nlos = false;
        double beta0 = 1.0;
        RVector omega; // per-user spatial frequency
        RVector psi;   // per-user curvature

        int n_rows() const { return static_cast<int>(A.rows()); }
        int n_users() const { return static_cast<int>(A.cols()); }
    };

    CVector steering_exact(const ArrayGeometry &geom, const UserLocation &user, double beta0 = 1.0);
    CVector steering_farfield(const ArrayGeometry &geom, double omega, double r, double beta0 = 1.0);
    CVector steering_usw2(const ArrayGeometry &geom, const UserLocation &user, double beta0 = 1.0);
    CVector steering(const ArrayGeometry &geom, const UserLocation &user, ChannelModel model, double beta0 = 1.0);

    // One ring of q_per_user scatterers around every user. Scatterer (u*q_per_user + j)
    // belongs to user u; its gain column entries for other users are zero.
    // Gains are CN(0, 1/q_per_user).
    ScattererSet build_one_ring(const std::vector<UserLocation> &users, int q_per_user, double ring_radius_m, Rng &rng);

    // Non-line-of-sight response of a single user: sum_q beta_{q,i} b_N(p_q) exp(-j 2 pi |p_q - q_i| / lambda).
    CVector nlos_response(const ArrayGeometry &geom, const ScattererSet &sc, int user_index,
                          const UserLocation &user, double beta0 = 1.0);

    ChannelMatrix assemble_channel(const ArrayGeometry &geom, const std::vector<UserLocation> &users,
                                   ChannelModel model, const ScattererSet *nlos = nullptr, double beta0 = 1.0);

    enum class SymbolAlphabet
    {
        gaussian,
        qpsk
    };

    // y = A diag(sqrt(P)) x + n, one column per symbol.
    CMatrix simulate_uplink(const ChannelMatrix &channel, const RVector &powers, double noise_var,
                            int n_symbols, Rng &rng, SymbolAlphabet alphabet = SymbolAlphabet::gaussian,
                            CMatrix *symbols_out = nullptr);
}

#endif
