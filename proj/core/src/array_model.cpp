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
#include "cbsbeam/array_model.hpp"

#include <cmath>
#include <stdexcept>

namespace cbs
{
    ArrayGeometry::ArrayGeometry(int n_elements, double spacing_m, double wavelength_m)
        : n_(n_elements), d_(spacing_m), lambda_(wavelength_m)
    {
        if (n_ < 1 || n_ % 2 == 0)
            throw std::invalid_argument("ArrayGeometry: number of elements must be odd and positive");
        if (!(d_ > 0.0) || !(lambda_ > 0.0))
            throw std::invalid_argument("ArrayGeometry: spacing and wavelength must be positive");
    }

    ArrayGeometry ArrayGeometry::half_wavelength(int n_elements, double carrier_hz)
    {
        if (!(carrier_hz > 0.0))
            throw std::invalid_argument("ArrayGeometry: carrier frequency must be positive");
        double lambda = speed_of_light / carrier_hz;
        return ArrayGeometry(n_elements, 0.5 * lambda, lambda);
    }

    bool ArrayGeometry::is_half_wavelength() const
    {
        return std::abs(d_ - 0.5 * lambda_) <= 1e-12 * 0.5 * lambda_;
    }

    double ArrayGeometry::rayleigh_distance_m() const
    {
        double D = n_ * d_;
        return 2.0 * D * D / lambda_;
    }

    double UserLocation::x() const { return distance_m * std::cos(angle_rad); }
    double UserLocation::y() const { return distance_m * std::sin(angle_rad); }

    double UserLocation::spatial_freq(const ArrayGeometry &g) const
    {
        return 2.0 * pi / g.wavelength_m() * g.spacing_m() * std::sin(angle_rad);
    }

    double UserLocation::curvature(const ArrayGeometry &g) const
    {
        double c = std::cos(angle_rad);
        return pi * g.wavelength_m() * c * c / (4.0 * distance_m);
    }

    double UserLocation::eps(const ArrayGeometry &g) const { return g.spacing_m() / distance_m; }

    UserLocation UserLocation::from_xy(double x, double y)
    {
        return {std::hypot(x, y), std::atan2(y, x)};
    }

    UserLocation UserLocation::from_omega(const ArrayGeometry &g, double omega, double distance_m)
    {
        double s = omega * g.wavelength_m() / (2.0 * pi * g.spacing_m());
        if (std::abs(s) > 1.0 + 1e-12)
            throw std::invalid_argument("UserLocation::from_omega: spatial frequency not visible");
        s = std::clamp(s, -1.0, 1.0);
        return {distance_m, std::asin(s)};
    }

    std::string to_string(ChannelModel m)
    {
        switch (m)
        {
        case ChannelModel::exact_spherical:
            return "exact_spherical";
        case ChannelModel::far_field:
            return "far_field";
        case ChannelModel::usw2:
            return "usw2";
        }
        return "?";
    }

    ChannelModel channel_model_from_string(const std::string &s)
    {
        if (s == "exact_spherical" || s == "exact")
            return ChannelModel::exact_spherical;
        if (s == "far_field" || s == "upw")
            return ChannelModel::far_field;
        if (s == "usw2" || s == "usw")
            return ChannelModel::usw2;
        throw std::invalid_argument("unknown channel model '" + s + "'");
    }

    CVector steering_exact(const ArrayGeometry &geom, const UserLocation &user, double beta0)
    {
        const double r = user.distance_m;
        if (!(r > 10.0 * geom.spacing_m()))
            throw std::invalid_argument("steering_exact: distance must exceed 10 element spacings");
        const int N = geom.n_elements(), Nt = geom.half_aperture();
        const double eps = geom.spacing_m() / r, s = std::sin(user.angle_rad);
        const double k = 2.0 * pi / geom.wavelength_m(), amp = std::sqrt(beta0);
        CVector a(N);
        for (int i = 0; i < N; ++i)
        {
            double n = i - Nt;
            double rn = r * std::sqrt(1.0 - 2.0 * n * eps * s + n * n * eps * eps);
            a(i) = amp / rn * std::polar(1.0, -k * rn);
        }
        return a;
    }

    CVector steering_farfield(const ArrayGeometry &geom, double omega, double r, double beta0)
    {
        if (!(r > 0.0))
            throw std::invalid_argument("steering_farfield: distance must be positive");
        const int N = geom.n_elements(), Nt = geom.half_aperture();
        const cplx c = std::sqrt(beta0) / r * std::polar(1.0, -2.0 * pi * r / geom.wavelength_m());
        CVector a(N);
        for (int i = 0; i < N; ++i)
            a(i) = c * std::polar(1.0, (i - Nt) * omega);
        return a;
    }

    CVector steering_usw2(const ArrayGeometry &geom, const UserLocation &user, double beta0)
    {
        if (!geom.is_half_wavelength())
            throw std::invalid_argument("steering_usw2: requires half-wavelength spacing");
        const double r = user.distance_m;
        if (!(r > 0.0))
            throw std::invalid_argument("steering_usw2: distance must be positive");
        const int N = geom.n_elements(), Nt = geom.half_aperture();
        const double w = user.spatial_freq(geom), psi = user.curvature(geom);
        const cplx c = std::sqrt(beta0) / r * std::polar(1.0, -2.0 * pi * r / geom.wavelength_m());
        CVector a(N);
        for (int i = 0; i < N; ++i)
        {
            double n = i - Nt;
            a(i) = c * std::polar(1.0, n * w - n * n * psi);
        }
        return a;
    }

    CVector steering(const ArrayGeometry &geom, const UserLocation &user, ChannelModel model, double beta0)
    {
        switch (model)
        {
        case ChannelModel::exact_spherical:
            return steering_exact(geom, user, beta0);
        case ChannelModel::far_field:
            return steering_farfield(geom, user.spatial_freq(geom), user.distance_m, beta0);
        case ChannelModel::usw2:
            return steering_usw2(geom, user, beta0);
        }
        throw std::invalid_argument("steering: bad model");
    }

    ScattererSet build_one_ring(const std::vector<UserLocation> &users, int q_per_user, double ring_radius_m, Rng &rng)
    {
        if (q_per_user < 1)
            throw std::invalid_argument("build_one_ring: need at least one scatterer per user");
        if (!(ring_radius_m > 0.0))
            throw std::invalid_argument("build_one_ring: ring radius must be positive");
        const int K = static_cast<int>(users.size());
        ScattererSet sc;
        sc.positions.reserve(static_cast<std::size_t>(K) * q_per_user);
        sc.gains = CMatrix::Zero(static_cast<Eigen::Index>(K) * q_per_user, K);
        std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
        for (int k = 0; k < K; ++k)
        {
            for (int q = 0; q < q_per_user; ++q)
            {
                double phi = phase(rng);
                double x = users[k].x() + ring_radius_m * std::cos(phi);
                double y = users[k].y() + ring_radius_m * std::sin(phi);
                sc.positions.push_back(UserLocation::from_xy(x, y));
                sc.gains(k * q_per_user + q, k) = complex_normal(rng, 1.0 / q_per_user);
            }
        }
        return sc;
    }

    CVector nlos_response(const ArrayGeometry &geom, const ScattererSet &sc, int user_index,
                          const UserLocation &user, double beta0)
    {
        CVector a = CVector::Zero(geom.n_elements());
        const double k = 2.0 * pi / geom.wavelength_m();
        for (int q = 0; q < sc.count(); ++q)
        {
            cplx beta = sc.gains(q, user_index);
            if (beta == cplx(0.0))
                continue;
            const UserLocation &p = sc.positions[q];
            double dist = std::hypot(p.x() - user.x(), p.y() - user.y());
            a += beta * std::polar(1.0, -k * dist) * steering_exact(geom, p, beta0);
        }
        return a;
    }

    ChannelMatrix assemble_channel(const ArrayGeometry &geom, const std::vector<UserLocation> &users,
                                   ChannelModel model, const ScattererSet *nlos, double beta0)
    {
        const int K = static_cast<int>(users.size());
        if (nlos && nlos->gains.cols() != K)
            throw std::invalid_argument("assemble_channel: scatterer gain columns must equal the user count");
        if (nlos && nlos->gains.rows() != nlos->count())
            throw std::invalid_argument("assemble_channel: scatterer gain rows must equal the scatterer count");
        ChannelMatrix ch;
        ch.A.resize(geom.n_elements(), K);
        ch.users = users;
        ch.model = model;
        ch.nlos = nlos != nullptr;
        ch.beta0 = beta0;
        ch.omega.resize(K);
        ch.psi.resize(K);
        for (int k = 0; k < K; ++k)
        {
            ch.A.col(k) = steering(geom, users[k], model, beta0);
            if (nlos)
                ch.A.col(k) += nlos_response(geom, *nlos, k, users[k], beta0);
            ch.omega(k) = users[k].spatial_freq(geom);
            ch.psi(k) = users[k].curvature(geom);
        }
        return ch;
    }

    CMatrix simulate_uplink(const ChannelMatrix &channel, const RVector &powers, double noise_var, int n_symbols,
                            Rng &rng, SymbolAlphabet alphabet, CMatrix *symbols_out)
    {
        const int K = channel.n_users(), N = channel.n_rows();
        if (powers.size() != K)
            throw std::invalid_argument("simulate_uplink: power vector length must equal the user count");
        if ((powers.array() < 0.0).any())
            throw std::invalid_argument("simulate_uplink: powers must be non-negative");
        if (!(noise_var > 0.0))
            throw std::invalid_argument("simulate_uplink: noise variance must be positive");
        if (n_symbols < 0)
            throw std::invalid_argument("simulate_uplink: negative symbol count");

        CMatrix X(K, n_symbols);
        const double q = std::sqrt(0.5);
        std::bernoulli_distribution coin(0.5);
        for (int s = 0; s < n_symbols; ++s)
            for (int k = 0; k < K; ++k)
                X(k, s) = alphabet == SymbolAlphabet::qpsk ? cplx(coin(rng) ? q : -q, coin(rng) ? q : -q)
                                                           : complex_normal(rng, 1.0);
        CMatrix Y(N, n_symbols);
        for (int s = 0; s < n_symbols; ++s)
            for (int i = 0; i < N; ++i)
                Y(i, s) = complex_normal(rng, noise_var);
        Y.noalias() += channel.A * (powers.array().sqrt().matrix().asDiagonal() * X);
        if (symbols_out)
            *symbols_out = std::move(X);
        return Y;
    }
}
