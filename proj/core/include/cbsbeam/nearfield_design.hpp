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
#ifndef CBSBEAM_NEARFIELD_DESIGN_HPP
#define CBSBEAM_NEARFIELD_DESIGN_HPP

#include "cbsbeam/array_model.hpp"
#include "cbsbeam/band_spec.hpp"
#include "cbsbeam/socp_solver.hpp"
#include "cbsbeam/spatial_filter.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cbs
{
    // s = H_c a_N(r, theta) under the second-order spherical model, computed from the closed
    // form sum_l h(l) exp(j m w - j m^2 psi), m = -(N-1)/2 + p + L - 1 - l.
    CVector post_cbs_vector(const CVector &h, const ArrayGeometry &geom, const UserLocation &user, double beta0 = 1.0);

    // w_{i,p}: s_p = (sqrt(beta0)/r) e^{-j 2 pi r / lambda} w^H h.
    CVector constraint_vector(const ArrayGeometry &geom, const UserLocation &user, int p, int L);

    enum class TapStructure
    {
        complex,       // 2L real unknowns
        real,          // L
        symmetric      // 2 ceil(L/2), complex with h(l) = h(L-1-l); the norm profile is even in omega
    };

    std::string to_string(TapStructure s);
    TapStructure tap_structure_from_string(const std::string &s);

    enum class Band
    {
        passband,
        transition,
        stopband
    };

    struct GridPoint
    {
        double r = 0.0;
        double omega = 0.0;
    };

    struct GridOptions
    {
        double fine_step = 0.0;   // omega step near band edges; 0 means pi/(4N)
        double coarse_step = 0.0; // elsewhere; 0 means pi/N
        double edge_zone = 0.1 * pi;
        int r_steps = 32;         // r step = (r_s2 - r_s1) / r_steps inside the transition shell
        double density_scale = 1.0; // > 1 refines every step (verification grids)

        // Transition samples closer than this to the passband edge are skipped. The response
        // cannot fall from eps1 to eps2 over a single fine step; 0 keeps the literal set.
        double transition_guard = 0.0;
        bool mirror = true; // include -omega points
    };

    struct ConstraintGrid
    {
        std::vector<GridPoint> passband;
        std::vector<GridPoint> transition;
        std::vector<GridPoint> stopband;
    };

    ConstraintGrid sample_bands(const BandSpec &spec, const GridOptions &opt = {});

    struct DesignOptions
    {
        TapStructure taps = TapStructure::complex;
        GridOptions grid;
        double tol = 1e-4;
        int max_iter = 50;
        int max_feasibility_iter = 50;
        // Passband floor used while designing, as a multiple of eps1; a small margin keeps
        // the floor satisfied between design samples.
        double passband_margin = 1.0;
        SolverOptions solver{1e-9, 1e-10, 1e-11, 5000, 20.0};
        bool verbose = false;
    };

    struct ScaState
    {
        CVector h;
        std::vector<double> t_history;            // accepted objective values, t_0 first
        std::vector<double> min_passband_history; // re-evaluated min ||s|| over passband samples
        std::vector<double> max_transition_history;
        int iterations = 0;
        int feasibility_iterations = 0;
        int solver_newton_steps = 0;
        bool converged = false;
        double min_passband = 0.0;
        double max_transition = 0.0;
        double max_stopband = 0.0;
        std::size_t n_passband = 0, n_transition = 0, n_stopband = 0;
    };

    // Min-max design of the stopband response via successive convex approximation.
    // h0 empty: scaled window-method bandpass, followed by a feasibility phase if needed.
    std::pair<FirFilter, ScaState> sca_design(const BandSpec &spec, const DesignOptions &opt = {},
                                              const std::optional<CVector> &h0 = std::nullopt);

    struct DesignProfile
    {
        std::vector<GridPoint> points;
        std::vector<Band> bands;
        RVector norm; // ||s|| per point
        double min_passband = 0.0, max_passband = 0.0;
        double max_transition = 0.0, max_stopband = 0.0;
        double ripple_db = 0.0; // 20 log10(max/min) over the passband
        double gap_db = 0.0;    // 20 log10(min passband / max stopband)
        int passband_violations = 0, transition_violations = 0;
    };

    // Norm profile over a verification grid (density_scale >= 4 recommended).
    DesignProfile evaluate_design(const FirFilter &filter, const BandSpec &spec, const GridOptions &grid);

    ArrayGeometry design_geometry(const BandSpec &spec);
}

#endif
