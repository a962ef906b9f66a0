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
#include "cbsbeam/nearfield_design.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace cbs
{
    std::string to_string(TapStructure s)
    {
        switch (s)
        {
        case TapStructure::complex:
            return "complex";
        case TapStructure::real:
            return "real";
        case TapStructure::symmetric:
            return "symmetric";
        }
        return "?";
    }

    TapStructure tap_structure_from_string(const std::string &s)
    {
        if (s == "complex")
            return TapStructure::complex;
        if (s == "real")
            return TapStructure::real;
        if (s == "symmetric")
            return TapStructure::symmetric;
        throw std::invalid_argument("unknown tap structure: " + s);
    }

    ArrayGeometry design_geometry(const BandSpec &spec) { return ArrayGeometry::half_wavelength(spec.n_elements, spec.carrier_hz); }

    namespace
    {
        std::string fmt(double x)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", x);
            return buf;
        }

        // e(i) = exp(j (n w - n^2 psi)), n = i - (N-1)/2
        CVector phase_table(const ArrayGeometry &geom, const UserLocation &user)
        {
            const int N = geom.n_elements(), Nt = geom.half_aperture();
            const double w = user.spatial_freq(geom), psi = user.curvature(geom);
            CVector e(N);
            for (int i = 0; i < N; ++i)
            {
                double n = i - Nt;
                e(i) = std::polar(1.0, n * w - n * n * psi);
            }
            return e;
        }

        // h = T z for the chosen tap structure.
        struct TapMap
        {
            TapStructure s;
            int L;

            int dim() const
            {
                switch (s)
                {
                case TapStructure::complex:
                    return 2 * L;
                case TapStructure::real:
                    return L;
                case TapStructure::symmetric:
                    return 2 * half();
                }
                return 0;
            }

            int half() const { return (L + 1) / 2; }
            int fold(int l) const { return std::min(l, L - 1 - l); }

            CVector to_taps(const RVector &z) const
            {
                CVector h(L);
                for (int l = 0; l < L; ++l)
                {
                    switch (s)
                    {
                    case TapStructure::complex:
                        h(l) = {z(l), z(L + l)};
                        break;
                    case TapStructure::real:
                        h(l) = z(l);
                        break;
                    case TapStructure::symmetric:
                        h(l) = {z(fold(l)), z(half() + fold(l))};
                        break;
                    }
                }
                return h;
            }

            // Inverse of to_taps; throws if h is not representable.
            RVector from_taps(const CVector &h) const
            {
                if (h.size() != L)
                    throw std::invalid_argument("initial taps must have length L");
                RVector z = RVector::Zero(dim());
                const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
                for (int l = 0; l < L; ++l)
                {
                    if (s == TapStructure::symmetric)
                    {
                        if (std::abs(h(l) - h(L - 1 - l)) > 1e-9 * scale)
                            throw std::invalid_argument("initial taps are not symmetric");
                        z(fold(l)) = h(l).real();
                        z(half() + fold(l)) = h(l).imag();
                        continue;
                    }
                    if (s == TapStructure::complex)
                    {
                        z(l) = h(l).real();
                        z(L + l) = h(l).imag();
                        continue;
                    }
                    if (std::abs(h(l).imag()) > 1e-9 * scale)
                        throw std::invalid_argument("initial taps are not real");
                    z(l) = h(l).real();
                }
                return z;
            }

            // Real adjoint: Re(g^H T z) = adjoint(g)^T z.
            RVector adjoint(const CVector &g) const
            {
                RVector a = RVector::Zero(dim());
                for (int l = 0; l < L; ++l)
                {
                    switch (s)
                    {
                    case TapStructure::complex:
                        a(l) = g(l).real();
                        a(L + l) = g(l).imag();
                        break;
                    case TapStructure::real:
                        a(l) = g(l).real();
                        break;
                    case TapStructure::symmetric:
                        a(fold(l)) += g(l).real();
                        a(half() + fold(l)) += g(l).imag();
                        break;
                    }
                }
                return a;
            }

            // Real gram of z -> lift(S T z) given the complex gram R = S^H S.
            void add_gram(const CMatrix &R, double w, RMatrix &H) const
            {
                switch (s)
                {
                case TapStructure::complex:
                    H.topLeftCorner(L, L) += w * R.real();
                    H.block(0, L, L, L) -= w * R.imag();
                    H.block(L, 0, L, L) += w * R.imag();
                    H.block(L, L, L, L) += w * R.real();
                    break;
                case TapStructure::real:
                    H.topLeftCorner(L, L) += w * R.real();
                    break;
                case TapStructure::symmetric:
                {
                    // Fold F: h = F z with F = [E, jE], E the L x half() duplication map.
                    const int m = half();
                    for (int a = 0; a < L; ++a)
                        for (int b = 0; b < L; ++b)
                        {
                            const int i = fold(a), k = fold(b);
                            const double re = w * R(a, b).real(), im = w * R(a, b).imag();
                            H(i, k) += re;
                            H(i, m + k) -= im;
                            H(m + i, k) += im;
                            H(m + i, m + k) += re;
                        }
                    break;
                }
                }
            }
        };

        // Post-CBS response at one grid point: u = lift(s), s_p = kappa sum_l h(l) e(p + L - 1 - l).
        // The common phase exp(-j 2 pi r / lambda) is dropped; it does not change any norm.
        class NearFieldBlock : public BlockOperator
        {
        public:
            NearFieldBlock(CVector e, double kappa, TapMap map, bool cache)
                : e_(std::move(e)), kappa_(kappa), map_(map), L_(map.L), P_(static_cast<int>(e_.size()) - map.L + 1)
            {
                if (cache)
                {
                    gram_ = RMatrix::Zero(map_.dim(), map_.dim());
                    map_.add_gram(complex_gram(), 1.0, *gram_);
                }
            }

            int rows() const override { return 2 * P_; }
            int cols() const override { return map_.dim(); }

            CVector response(const CVector &h) const
            {
                CVector s(P_);
                for (int p = 0; p < P_; ++p)
                {
                    cplx acc = 0.0;
                    for (int l = 0; l < L_; ++l)
                        acc += h(l) * e_(p + L_ - 1 - l);
                    s(p) = kappa_ * acc;
                }
                return s;
            }

            // S^H s
            CVector adjoint_response(const CVector &s) const
            {
                CVector g(L_);
                for (int l = 0; l < L_; ++l)
                {
                    cplx acc = 0.0;
                    for (int p = 0; p < P_; ++p)
                        acc += std::conj(e_(p + L_ - 1 - l)) * s(p);
                    g(l) = kappa_ * acc;
                }
                return g;
            }

            RVector apply(const RVector &z) const override { return lift_complex(response(map_.to_taps(z))); }

            RVector apply_adjoint(const RVector &u) const override
            {
                return map_.adjoint(adjoint_response(unlift_complex(u)));
            }

            void add_gram(double w, RMatrix &H) const override
            {
                if (gram_)
                    H.topLeftCorner(gram_->rows(), gram_->cols()) += w * *gram_;
                else
                    map_.add_gram(complex_gram(), w, H);
            }

            const TapMap &map() const { return map_; }

        private:
            // R(l, l') = kappa^2 sum_p conj(e(p+k)) e(p+k'), k = L-1-l. Shifting (k, k') by one
            // drops the p = 0 term and adds p = P, which gives an O(L^2) fill.
            CMatrix complex_gram() const
            {
                CMatrix Rk(L_, L_);
                for (int k = 0; k < L_; ++k)
                {
                    cplx acc = 0.0;
                    for (int p = 0; p < P_; ++p)
                        acc += std::conj(e_(p)) * e_(p + k);
                    Rk(0, k) = acc;
                    Rk(k, 0) = std::conj(acc);
                }
                for (int k = 1; k < L_; ++k)
                    for (int kk = k; kk < L_; ++kk)
                    {
                        cplx v = Rk(k - 1, kk - 1) - std::conj(e_(k - 1)) * e_(kk - 1) +
                                 std::conj(e_(P_ + k - 1)) * e_(P_ + kk - 1);
                        Rk(k, kk) = v;
                        Rk(kk, k) = std::conj(v);
                    }
                CMatrix R(L_, L_);
                const double k2 = kappa_ * kappa_;
                for (int l = 0; l < L_; ++l)
                    for (int ll = 0; ll < L_; ++ll)
                        R(l, ll) = k2 * Rk(L_ - 1 - l, L_ - 1 - ll);
                return R;
            }

            CVector e_;
            double kappa_;
            TapMap map_;
            int L_, P_;
            std::optional<RMatrix> gram_;
        };

        using BlockPtr = std::shared_ptr<const NearFieldBlock>;

        std::vector<BlockPtr> make_blocks(const std::vector<GridPoint> &pts, const ArrayGeometry &geom, const BandSpec &spec,
                                          const TapMap &map, bool cache)
        {
            std::vector<BlockPtr> out;
            out.reserve(pts.size());
            for (const auto &q : pts)
            {
                UserLocation u = UserLocation::from_omega(geom, q.omega, q.r);
                out.push_back(std::make_shared<NearFieldBlock>(phase_table(geom, u), std::sqrt(spec.beta0) / q.r, map, cache));
            }
            return out;
        }

        RVector norms(const std::vector<BlockPtr> &blocks, const CVector &h)
        {
            RVector v(static_cast<Eigen::Index>(blocks.size()));
            for (std::size_t i = 0; i < blocks.size(); ++i)
                v(static_cast<Eigen::Index>(i)) = blocks[i]->response(h).norm();
            return v;
        }

        double max_or_zero(const RVector &v) { return v.size() ? v.maxCoeff() : 0.0; }

        // Omega samples on [0, pi]: fine steps within edge_zone of any cutoff, coarse elsewhere.
        std::vector<double> omega_samples(const BandSpec &spec, const GridOptions &opt)
        {
            const int N = spec.n_elements;
            const double fine = (opt.fine_step > 0.0 ? opt.fine_step : pi / (4.0 * N)) / opt.density_scale;
            const double coarse = (opt.coarse_step > 0.0 ? opt.coarse_step : pi / N) / opt.density_scale;
            const double edges[] = {spec.omega_c1, spec.omega_c2, spec.omega_s1, spec.omega_s2};

            std::vector<double> cuts = {0.0, pi};
            for (double e : edges)
            {
                cuts.push_back(std::clamp(e, 0.0, pi));
                cuts.push_back(std::clamp(e - opt.edge_zone, 0.0, pi));
                cuts.push_back(std::clamp(e + opt.edge_zone, 0.0, pi));
            }
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                       cuts.end());

            auto near_edge = [&](double w)
            {
                for (double e : edges)
                    if (std::abs(w - e) <= opt.edge_zone + 1e-12)
                        return true;
                return false;
            };

            std::vector<double> out;
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            {
                const double a = cuts[i], b = cuts[i + 1];
                const double step = near_edge(0.5 * (a + b)) ? fine : coarse;
                const int m = std::max(1, static_cast<int>(std::ceil((b - a) / step - 1e-9)));
                for (int k = 0; k < m; ++k)
                    out.push_back(a + (b - a) * k / m);
            }
            out.push_back(pi);
            return out;
        }

        std::vector<double> geometric(double lo, double hi, int count, bool include_lo, bool include_hi)
        {
            std::vector<double> out;
            if (count < 1 || !(hi > lo))
                return out;
            const double ratio = std::pow(hi / lo, 1.0 / count);
            for (int k = include_lo ? 0 : 1; k <= (include_hi ? count : count - 1); ++k)
                out.push_back(lo * std::pow(ratio, k));
            return out;
        }

        std::vector<double> distance_samples(const BandSpec &spec, const GridOptions &opt, const ArrayGeometry &geom)
        {
            if (spec.fixed_distance())
                return {spec.r_c1};
            std::vector<double> r;
            const int steps = std::max(1, static_cast<int>(std::lround(opt.r_steps * opt.density_scale)));
            for (int k = 0; k <= steps; ++k)
                r.push_back(spec.r_s1 + (spec.r_s2 - spec.r_s1) * k / steps);
            r.push_back(spec.r_c1);
            r.push_back(spec.r_c2);
            const int below = std::max(2, static_cast<int>(std::lround(4 * opt.density_scale)));
            const int above = std::max(2, static_cast<int>(std::lround(8 * opt.density_scale)));
            for (double v : geometric(0.5 * spec.r_s1, spec.r_s1, below, true, false))
                r.push_back(v);
            for (double v : geometric(spec.r_s2, 4.0 * spec.r_s2, above, false, true))
                r.push_back(v);
            r.push_back(10.0 * geom.rayleigh_distance_m());
            std::sort(r.begin(), r.end());
            r.erase(std::unique(r.begin(), r.end(), [](double a, double b) { return std::abs(a - b) <= 1e-9 * b; }), r.end());
            return r;
        }

        bool in(double v, double lo, double hi) { return v >= lo - 1e-12 && v <= hi + 1e-12; }

        struct Problem
        {
            ConstraintGrid grid;
            std::vector<BlockPtr> pass, trans, stop;
        };
    }

    CVector post_cbs_vector(const CVector &h, const ArrayGeometry &geom, const UserLocation &user, double beta0)
    {
        if (!geom.is_half_wavelength())
            throw std::invalid_argument("post_cbs_vector: requires half-wavelength spacing");
        const int L = static_cast<int>(h.size());
        if (L < 1 || L > geom.n_elements())
            throw std::invalid_argument("post_cbs_vector: filter length must be in [1, N]");
        NearFieldBlock b(phase_table(geom, user), std::sqrt(beta0) / user.distance_m, TapMap{TapStructure::complex, L}, false);
        return std::polar(1.0, -2.0 * pi * user.distance_m / geom.wavelength_m()) * b.response(h);
    }

    CVector constraint_vector(const ArrayGeometry &geom, const UserLocation &user, int p, int L)
    {
        if (L < 1 || L > geom.n_elements() || p < 0 || p > geom.n_elements() - L)
            throw std::invalid_argument("constraint_vector: index out of range");
        CVector e = phase_table(geom, user);
        CVector w(L);
        for (int l = 0; l < L; ++l)
            w(l) = std::conj(e(p + L - 1 - l));
        return w;
    }

    ConstraintGrid sample_bands(const BandSpec &spec, const GridOptions &opt)
    {
        spec.validate();
        if (!(opt.density_scale > 0.0))
            throw std::invalid_argument("sample_bands: density_scale must be positive");
        const ArrayGeometry geom = design_geometry(spec);
        const std::vector<double> omegas = omega_samples(spec, opt);
        const std::vector<double> dists = distance_samples(spec, opt, geom);

        ConstraintGrid g;
        for (double r : dists)
        {
            const bool r_pass = in(r, spec.r_c1, spec.r_c2);
            const bool r_trans = in(r, spec.r_s1, spec.r_s2);
            for (double w : omegas)
            {
                const int signs = (opt.mirror && w > 0.0 && w < pi) ? 2 : 1;
                for (int sgn = 0; sgn < signs; ++sgn)
                {
                    GridPoint q{r, sgn ? -w : w};
                    if (r_pass && in(w, spec.omega_c1, spec.omega_c2))
                        g.passband.push_back(q);
                    else if (r_trans && in(w, spec.omega_s1, spec.omega_s2))
                    {
                        const double gap = std::max(spec.omega_c1 - w, w - spec.omega_c2);
                        if (r_pass && gap < opt.transition_guard - 1e-12)
                            continue;
                        g.transition.push_back(q);
                    }
                    else
                        g.stopband.push_back(q);
                }
            }
        }
        if (g.passband.empty())
            throw std::invalid_argument("sample_bands: empty passband");
        return g;
    }

    std::pair<FirFilter, ScaState> sca_design(const BandSpec &spec, const DesignOptions &opt, const std::optional<CVector> &h0)
    {
        spec.validate();
        const int L = spec.filter_length;
        const ArrayGeometry geom = design_geometry(spec);
        const TapMap map{opt.taps, L};
        const int n = map.dim();

        // Symmetric taps give an even norm profile, so the -omega samples are redundant.
        GridOptions gopt = opt.grid;
        if (opt.taps == TapStructure::symmetric)
            gopt.mirror = false;
        Problem pb;
        pb.grid = sample_bands(spec, gopt);
        const std::size_t total = pb.grid.passband.size() + pb.grid.transition.size() + pb.grid.stopband.size();
        const bool cache = static_cast<double>(n) * n * static_cast<double>(total) <= 3e7;
        pb.pass = make_blocks(pb.grid.passband, geom, spec, map, cache);
        pb.trans = make_blocks(pb.grid.transition, geom, spec, map, cache);
        pb.stop = make_blocks(pb.grid.stopband, geom, spec, map, cache);

        const double floor = opt.passband_margin * spec.eps1;
        ScaState st;
        st.n_passband = pb.pass.size();
        st.n_transition = pb.trans.size();
        st.n_stopband = pb.stop.size();

        RVector z;
        if (h0)
            z = map.from_taps(*h0);
        else
        {
            FirFilter w = design_window_bandpass(L, spec.omega_c1, spec.omega_c2, true);
            z = map.from_taps(w.taps);
            double mp = norms(pb.pass, map.to_taps(z)).minCoeff();
            if (!(mp > 0.0))
                throw SolverError("sca_design: window initializer has a passband null");
            z *= std::sqrt(2.0) * floor / mp;
        }

        auto log = [&](const char *phase, int it, double t, double mp, double mt)
        {
            if (opt.verbose)
                std::fprintf(stderr, "[sca] %s %3d  t=%.6e  min_pass=%.6f  max_trans=%.6e\n", phase, it, t, mp, mt);
        };

        // Linearized passband rows at h_j: 2 Re(s_j^H S h) - ||s_j||^2 >= floor^2.
        auto passband_rows = [&](const CVector &hj)
        {
            std::vector<AffineRow> rows;
            rows.reserve(pb.pass.size());
            for (std::size_t i = 0; i < pb.pass.size(); ++i)
            {
                CVector s = pb.pass[i]->response(hj);
                rows.push_back({2.0 * map.adjoint(pb.pass[i]->adjoint_response(s)), 0.0, floor * floor + s.squaredNorm(),
                                "passband " + std::to_string(i)});
            }
            return rows;
        };

        auto cone = [](const std::vector<BlockPtr> &blocks, BoundKind kind, double bound, const char *tag)
        {
            std::vector<ConeBlock> out;
            for (std::size_t i = 0; i < blocks.size(); ++i)
                out.push_back({blocks[i], RVector(), kind, bound, std::string(tag) + " " + std::to_string(i)});
            return out;
        };

        const double radius = 100.0 * std::max(z.norm(), 1e-12);

        auto run = [&](ConeProblem &cp, const RVector &start)
        {
            cp.n = n;
            cp.z_norm_bound = std::max(radius, 2.0 * start.norm());
            ConeSolution sol = solve(cp, start, opt.solver);
            st.solver_newton_steps += sol.iterations;
            if (sol.status == SolveStatus::infeasible)
                throw SolverError("sca_design: subproblem infeasible at " + sol.infeasible_class);
            if (sol.status != SolveStatus::optimal)
                throw SolverError("sca_design: subproblem did not converge (" + to_string(sol.status) + ")");
            return sol;
        };

        // Feasibility phase: drive the transition norms under eps2.
        CVector h = map.to_taps(z);
        double mt = max_or_zero(norms(pb.trans, h));
        while (mt >= spec.eps2)
        {
            if (st.feasibility_iterations >= opt.max_feasibility_iter)
                throw SolverError("sca_design: could not satisfy the transition ceiling");
            ConeProblem cp;
            cp.blocks = cone(pb.trans, BoundKind::slack, 0.0, "transition");
            cp.rows = passband_rows(h);
            ConeSolution sol = run(cp, z);
            const double prev = mt;
            z = sol.z;
            h = map.to_taps(z);
            mt = max_or_zero(norms(pb.trans, h));
            ++st.feasibility_iterations;
            log("feas", st.feasibility_iterations, mt, norms(pb.pass, h).minCoeff(), mt);
            if (mt >= spec.eps2 && prev - mt <= opt.tol * std::max(1.0, prev))
                throw SolverError("sca_design: transition ceiling infeasible (stalled at " + fmt(mt) + ")");
        }

        double t = max_or_zero(norms(pb.stop, h));
        auto record = [&]()
        {
            st.t_history.push_back(t);
            st.min_passband_history.push_back(norms(pb.pass, h).minCoeff());
            st.max_transition_history.push_back(max_or_zero(norms(pb.trans, h)));
        };
        record();
        log("main", 0, t, st.min_passband_history.back(), st.max_transition_history.back());

        if (pb.stop.empty())
            st.converged = true;
        while (!st.converged && st.iterations < opt.max_iter)
        {
            ConeProblem cp;
            cp.blocks = cone(pb.stop, BoundKind::slack, 0.0, "stopband");
            auto tb = cone(pb.trans, BoundKind::constant, spec.eps2, "transition");
            cp.blocks.insert(cp.blocks.end(), tb.begin(), tb.end());
            cp.rows = passband_rows(h);
            ConeSolution sol = run(cp, z);
            const CVector hn = map.to_taps(sol.z);
            const double tn = max_or_zero(norms(pb.stop, hn));
            if (tn > t)
            {
                // The inner approximation makes h_j feasible, so t can only rise by solver error.
                // A rise inside the stopping tolerance ends the loop at h_j.
                if (tn - t <= std::max({1e-9, 10.0 * sol.gap, opt.tol * std::max(1.0, std::abs(t))}))
                {
                    st.converged = true;
                    break;
                }
                throw SolverError("sca_design: objective increased from " + fmt(t) + " to " + fmt(tn) + " (solver t " + fmt(sol.t) + ", gap " + fmt(sol.gap) + ")");
            }
            const double prev = t;
            z = sol.z;
            h = hn;
            t = tn;
            ++st.iterations;
            record();
            log("main", st.iterations, t, st.min_passband_history.back(), st.max_transition_history.back());
            if (prev - t <= opt.tol * std::max(1.0, std::abs(prev)))
                st.converged = true;
        }

        st.h = h;
        st.min_passband = norms(pb.pass, h).minCoeff();
        st.max_transition = max_or_zero(norms(pb.trans, h));
        st.max_stopband = t;

        FirFilter f;
        f.taps = h;
        f.omega_c1 = spec.omega_c1;
        f.omega_c2 = spec.omega_c2;
        f.method = FilterMethod::nearfield_optimized;
        f.band = spec;
        return {f, st};
    }

    DesignProfile evaluate_design(const FirFilter &filter, const BandSpec &spec, const GridOptions &grid)
    {
        if (filter.length() != spec.filter_length)
            throw std::invalid_argument("evaluate_design: filter length does not match the band spec");
        const ArrayGeometry geom = design_geometry(spec);
        const ConstraintGrid g = sample_bands(spec, grid);
        const TapMap map{TapStructure::complex, spec.filter_length};

        DesignProfile prof;
        const std::size_t total = g.passband.size() + g.transition.size() + g.stopband.size();
        prof.points.reserve(total);
        prof.bands.reserve(total);
        prof.norm.resize(static_cast<Eigen::Index>(total));
        double minp = std::numeric_limits<double>::infinity(), maxp = 0.0, maxt = 0.0, maxs = 0.0;
        Eigen::Index k = 0;
        auto add = [&](const std::vector<GridPoint> &pts, Band band)
        {
            const auto blocks = make_blocks(pts, geom, spec, map, false);
            for (std::size_t i = 0; i < pts.size(); ++i)
            {
                const double v = blocks[i]->response(filter.taps).norm();
                prof.points.push_back(pts[i]);
                prof.bands.push_back(band);
                prof.norm(k++) = v;
                switch (band)
                {
                case Band::passband:
                    minp = std::min(minp, v);
                    maxp = std::max(maxp, v);
                    if (v < spec.eps1 * (1.0 - 1e-9))
                        ++prof.passband_violations;
                    break;
                case Band::transition:
                    maxt = std::max(maxt, v);
                    if (v > spec.eps2 * (1.0 + 1e-9))
                        ++prof.transition_violations;
                    break;
                case Band::stopband:
                    maxs = std::max(maxs, v);
                    break;
                }
            }
        };
        add(g.passband, Band::passband);
        add(g.transition, Band::transition);
        add(g.stopband, Band::stopband);
        prof.min_passband = minp;
        prof.max_passband = maxp;
        prof.max_transition = maxt;
        prof.max_stopband = maxs;
        prof.ripple_db = 20.0 * std::log10(maxp / minp);
        prof.gap_db = maxs > 0.0 ? 20.0 * std::log10(minp / maxs) : std::numeric_limits<double>::infinity();
        return prof;
    }
}
