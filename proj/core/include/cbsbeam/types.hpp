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

#ifndef CBSBEAM_TYPES_HPP
#define CBSBEAM_TYPES_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace cbs
{
    using cplx = std::complex<double>;
    using CVector = Eigen::VectorXcd;
    using CMatrix = Eigen::MatrixXcd;
    using RVector = Eigen::VectorXd;
    using RMatrix = Eigen::MatrixXd;
    using Rng = std::mt19937_64;

    inline constexpr double pi = std::numbers::pi;

    // Bad configuration value; field() names the offending key as "section.key".
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string &field, const std::string &what)
            : std::runtime_error(field.empty() ? what : field + ": " + what), field_(field) {}
        const std::string &field() const { return field_; }

    private:
        std::string field_;
    };

    // Numerically singular system (rank-deficient ZF, ill-conditioned whitener, ...).
    class SingularError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Optimization failure (infeasible subproblem, non-monotone SCA step, ...).
    class SolverError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Complex Gaussian CN(0, var).
    inline cplx complex_normal(Rng &rng, double var = 1.0)
    {
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * var));
        double re = nd(rng);
        double im = nd(rng);
        return {re, im};
    }

    // Derive an independent seed from (master, stream ids). splitmix64 mixing.
    inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
    {
        auto mix = [](std::uint64_t z)
        {
            z += 0x9E3779B97F4A7C15ULL;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            return z ^ (z >> 31);
        };
        std::uint64_t s = mix(master);
        s = mix(s ^ a);
        s = mix(s ^ b);
        s = mix(s ^ c);
        return s;
    }
}

#endif
