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
#include "cbsbeam/socp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cbs
{
    void BlockOperator::add_gram(double w, RMatrix &H) const
    {
        const int n = cols();
        RMatrix S(rows(), n);
        RVector e = RVector::Zero(n);
        for (int i = 0; i < n; ++i)
        {
            e(i) = 1.0;
            S.col(i) = apply(e);
            e(i) = 0.0;
        }
        H.topLeftCorner(n, n).noalias() += w * S.transpose() * S;
    }

    DenseBlock::DenseBlock(RMatrix S) : S_(std::move(S)), gram_(S_.transpose() * S_) {}

    void DenseBlock::add_gram(double w, RMatrix &H) const { H.topLeftCorner(cols(), cols()) += w * gram_; }

    RMatrix lift_complex(const CMatrix &S)
    {
        const Eigen::Index m = S.rows(), n = S.cols();
        RMatrix R(2 * m, 2 * n);
        R.topLeftCorner(m, n) = S.real();
        R.topRightCorner(m, n) = -S.imag();
        R.bottomLeftCorner(m, n) = S.imag();
        R.bottomRightCorner(m, n) = S.real();
        return R;
    }

    RVector lift_complex(const CVector &v)
    {
        RVector r(2 * v.size());
        r.head(v.size()) = v.real();
        r.tail(v.size()) = v.imag();
        return r;
    }

    CVector unlift_complex(const RVector &x)
    {
        if (x.size() % 2 != 0)
            throw std::invalid_argument("unlift_complex: odd length");
        const Eigen::Index n = x.size() / 2;
        CVector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = {x(i), x(n + i)};
        return v;
    }

    ConeProblem lift_complex(int L, const std::vector<ComplexConeBlock> &blocks, const std::vector<ComplexAffineRow> &rows)
    {
        ConeProblem p;
        p.n = 2 * L;
        for (const auto &b : blocks)
        {
            if (b.S.cols() != L)
                throw std::invalid_argument("lift_complex: block width must equal L");
            ConeBlock cb;
            cb.op = std::make_shared<DenseBlock>(lift_complex(b.S));
            if (b.offset.size() > 0)
                cb.offset = lift_complex(b.offset);
            cb.kind = b.kind;
            cb.bound = b.bound;
            p.blocks.push_back(std::move(cb));
        }
        for (const auto &r : rows)
        {
            if (r.c.size() != L)
                throw std::invalid_argument("lift_complex: row length must equal L");
            // Re(c^H h) = Re(c)^T Re(h) + Im(c)^T Im(h)
            p.rows.push_back({lift_complex(r.c), r.c_t, r.rhs, {}});
        }
        return p;
    }

    std::string to_string(SolveStatus s)
    {
        switch (s)
        {
        case SolveStatus::optimal:
            return "optimal";
        case SolveStatus::max_iter:
            return "max-iter";
        case SolveStatus::infeasible:
            return "infeasible";
        }
        return "?";
    }

    namespace
    {
        RVector block_residual(const ConeBlock &b, const RVector &z)
        {
            RVector u = b.op->apply(z);
            if (b.offset.size() > 0)
                u += b.offset;
            return u;
        }

        void check_problem(const ConeProblem &p)
        {
            if (p.n < 0)
                throw std::invalid_argument("ConeProblem: negative dimension");
            for (const auto &b : p.blocks)
            {
                if (!b.op || b.op->cols() != p.n)
                    throw std::invalid_argument("ConeProblem: block width must equal n");
                if (b.offset.size() > 0 && b.offset.size() != b.op->rows())
                    throw std::invalid_argument("ConeProblem: block offset length mismatch");
                if (b.kind == BoundKind::constant && !(b.bound >= 0.0))
                    throw std::invalid_argument("ConeProblem: constant bound must be non-negative");
            }
            for (const auto &r : p.rows)
                if (r.a.size() != p.n)
                    throw std::invalid_argument("ConeProblem: affine row length must equal n");
        }

        // Barrier problem over x = [z; t; s]. In phase I (with_s) the slack blocks are dropped, every
        // constant bound and affine row is relaxed by s, and the objective is s; otherwise the objective is t.
        // Phase I keeps t fixed unless some affine row involves it.
        struct Barrier
        {
            const ConeProblem &p;
            bool phase1;
            bool t_free;
            double z_bound;
            int n, dim, it, is;

            Barrier(const ConeProblem &prob, bool with_s, double zb)
                : p(prob), phase1(with_s), t_free(!with_s), z_bound(zb), n(prob.n), dim(prob.n + (with_s ? 2 : 1)),
                  it(prob.n), is(with_s ? prob.n + 1 : -1)
            {
                for (const auto &r : prob.rows)
                    t_free = t_free || r.a_t != 0.0;
            }

            double nu() const
            {
                double v = 0.0;
                for (const auto &b : p.blocks)
                    if (!(phase1 && b.kind == BoundKind::slack))
                        v += 2.0;
                v += static_cast<double>(p.rows.size());
                if (!phase1)
                    v += 1.0; // t >= 0
                if (z_bound > 0.0)
                    v += 2.0;
                return v;
            }

            double objective(const RVector &x) const { return phase1 ? x(is) : x(it); }

            // Returns +inf outside the domain. Fills gradient and Hessian when requested.
            double eval(const RVector &x, double tau, RVector *g, RMatrix *H) const
            {
                const RVector z = x.head(n);
                double phi = tau * objective(x);
                if (g)
                {
                    g->setZero(dim);
                    (*g)(phase1 ? is : it) = tau;
                }
                if (H)
                    H->setZero(dim, dim);
                const double s = phase1 ? x(is) : 0.0;

                for (const auto &b : p.blocks)
                {
                    if (phase1 && b.kind == BoundKind::slack)
                        continue;
                    const RVector u = block_residual(b, z);
                    int iv; // variable carrying the bound
                    double bound;
                    if (b.kind == BoundKind::slack)
                    {
                        iv = it;
                        bound = x(it);
                    }
                    else
                    {
                        iv = phase1 ? is : -1;
                        bound = b.bound + s;
                    }
                    const double uu = u.squaredNorm();
                    const double f = bound * bound - uu;
                    if (!(bound > 0.0) || !(f > 0.0))
                        return std::numeric_limits<double>::infinity();
                    phi -= std::log(f);
                    if (!g && !H)
                        continue;
                    // grad f = [-2 S^T u ; 2 bound e_iv]
                    RVector gf = RVector::Zero(dim);
                    gf.head(n) = -2.0 * b.op->apply_adjoint(u);
                    if (iv >= 0)
                        gf(iv) = 2.0 * bound;
                    if (g)
                        *g -= gf / f;
                    if (H)
                    {
                        H->selfadjointView<Eigen::Lower>().rankUpdate(gf, 1.0 / (f * f));
                        b.op->add_gram(2.0 / f, *H);
                        if (iv >= 0)
                            (*H)(iv, iv) -= 2.0 / f;
                    }
                }

                auto affine = [&](const RVector &a, double at, double as, double rhs)
                {
                    double sl = a.dot(z) - rhs;
                    if (at != 0.0)
                        sl += at * x(it);
                    if (phase1)
                        sl += as * s;
                    if (!(sl > 0.0))
                        return false;
                    phi -= std::log(sl);
                    if (g || H)
                    {
                        RVector ga = RVector::Zero(dim);
                        ga.head(n) = a;
                        ga(it) = at;
                        if (phase1)
                            ga(is) = as;
                        if (g)
                            *g -= ga / sl;
                        if (H)
                            H->selfadjointView<Eigen::Lower>().rankUpdate(ga, 1.0 / (sl * sl));
                    }
                    return true;
                };
                for (const auto &r : p.rows)
                    if (!affine(r.a, t_free ? r.a_t : 0.0, 1.0, r.rhs - (t_free ? 0.0 : r.a_t * x(it))))
                        return std::numeric_limits<double>::infinity();
                if (!phase1)
                {
                    static thread_local RVector zero;
                    if (zero.size() != n)
                        zero = RVector::Zero(n);
                    if (!affine(zero, 1.0, 0.0, 0.0))
                        return std::numeric_limits<double>::infinity();
                }

                if (z_bound > 0.0)
                {
                    const double f = z_bound * z_bound - z.squaredNorm();
                    if (!(f > 0.0))
                        return std::numeric_limits<double>::infinity();
                    phi -= std::log(f);
                    if (g || H)
                    {
                        RVector gf = RVector::Zero(dim);
                        gf.head(n) = -2.0 * z;
                        if (g)
                            *g -= gf / f;
                        if (H)
                        {
                            H->selfadjointView<Eigen::Lower>().rankUpdate(gf, 1.0 / (f * f));
                            H->topLeftCorner(n, n).diagonal().array() += 2.0 / f;
                        }
                    }
                }
                if (H)
                    *H = H->selfadjointView<Eigen::Lower>();
                return phi;
            }
        };

        struct PathResult
        {
            RVector x;
            int newton = 0;
            bool converged = false;
            bool stopped_early = false;
            double gap = 0.0;
        };

        // Barrier path following. stop(x) may end the path early (phase I).
        template <class Stop>
        PathResult follow_path(const Barrier &B, RVector x, const SolverOptions &opt, int budget, Stop stop)
        {
            PathResult res;
            const double nu = B.nu();
            double tau = nu / std::max(std::abs(B.objective(x)), 1e-3);
            RVector g(B.dim), dx(B.dim);
            RMatrix H(B.dim, B.dim);
            for (;;)
            {
                // Centering.
                for (int inner = 0; inner < 200; ++inner)
                {
                    if (res.newton >= budget)
                    {
                        res.x = x;
                        res.gap = nu / tau;
                        return res;
                    }
                    const double F = B.eval(x, tau, &g, &H);
                    Eigen::LLT<RMatrix> llt(H);
                    if (llt.info() != Eigen::Success)
                    {
                        const double reg = 1e-12 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
                        H.diagonal().array() += reg;
                        llt.compute(H);
                        if (llt.info() != Eigen::Success)
                            throw SolverError("socp: Newton system is not positive definite");
                    }
                    dx = -llt.solve(g);
                    const double dec = -g.dot(dx); // Newton decrement squared
                    ++res.newton;
                    if (!(dec > 0.0) || dec <= 1e-14 * std::max(1.0, std::abs(F)) || dec < 1e-20)
                        break;
                    double alpha = 1.0;
                    double Fn = B.eval(x + alpha * dx, tau, nullptr, nullptr);
                    int halvings = 0;
                    while ((!std::isfinite(Fn) || Fn > F - 0.01 * alpha * dec) && halvings < 60)
                    {
                        alpha *= 0.5;
                        Fn = B.eval(x + alpha * dx, tau, nullptr, nullptr);
                        ++halvings;
                    }
                    if (!std::isfinite(Fn) || Fn > F)
                        break; // no progress possible at this precision
                    x += alpha * dx;
                    if (stop(x))
                    {
                        res.x = x;
                        res.stopped_early = true;
                        res.gap = nu / tau;
                        return res;
                    }
                    if (0.5 * dec <= 1e-10)
                        break;
                }
                const double obj = B.objective(x);
                double thresh = opt.gap_tol * std::max(1.0, std::abs(obj));
                if (opt.abs_gap_tol > 0.0)
                    thresh = std::min(thresh, opt.abs_gap_tol);
                if (nu / tau <= thresh)
                {
                    res.x = x;
                    res.converged = true;
                    res.gap = nu / tau;
                    return res;
                }
                tau *= opt.mu;
            }
        }

        double constant_violation(const ConeProblem &p, const RVector &z, std::string *worst)
        {
            double v = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < p.blocks.size(); ++i)
            {
                const auto &b = p.blocks[i];
                if (b.kind != BoundKind::constant)
                    continue;
                double e = block_residual(b, z).norm() - b.bound;
                if (e > v)
                {
                    v = e;
                    if (worst)
                        *worst = b.label.empty() ? "block " + std::to_string(i) : b.label;
                }
            }
            return v;
        }
    }

    double min_slack(const ConeProblem &problem, const RVector &z)
    {
        double t = 0.0;
        for (const auto &b : problem.blocks)
            if (b.kind == BoundKind::slack)
                t = std::max(t, block_residual(b, z).norm());
        return t;
    }

    double max_violation(const ConeProblem &problem, const RVector &z, double t, std::string *worst)
    {
        double v = std::max(0.0, -t);
        if (worst)
            *worst = v > 0.0 ? "t >= 0" : "";
        for (std::size_t i = 0; i < problem.blocks.size(); ++i)
        {
            const auto &b = problem.blocks[i];
            double bound = b.kind == BoundKind::slack ? t : b.bound;
            double e = block_residual(b, z).norm() - bound;
            if (e > v)
            {
                v = e;
                if (worst)
                    *worst = b.label.empty() ? "block " + std::to_string(i) : b.label;
            }
        }
        for (std::size_t i = 0; i < problem.rows.size(); ++i)
        {
            const auto &r = problem.rows[i];
            double e = r.rhs - r.a.dot(z) - r.a_t * t;
            if (e > v)
            {
                v = e;
                if (worst)
                    *worst = r.label.empty() ? "row " + std::to_string(i) : r.label;
            }
        }
        if (problem.z_norm_bound > 0.0)
        {
            double e = z.norm() - problem.z_norm_bound;
            if (e > v)
            {
                v = e;
                if (worst)
                    *worst = "norm bound";
            }
        }
        return v;
    }

    ConeSolution solve(const ConeProblem &problem, const SolverOptions &opt)
    {
        return solve(problem, RVector::Zero(problem.n), opt);
    }

    ConeSolution solve(const ConeProblem &problem, const RVector &z0, const SolverOptions &opt)
    {
        check_problem(problem);
        if (z0.size() != problem.n)
            throw std::invalid_argument("socp solve: warm start has the wrong length");
        if (problem.z_norm_bound > 0.0 && !(z0.norm() < problem.z_norm_bound))
            throw std::invalid_argument("socp solve: warm start violates the norm bound");

        ConeSolution sol;
        const int n = problem.n;
        RVector z = z0;

        // Strict feasibility of the constant blocks and affine rows (t is chosen freely).
        auto slack_t = [&](const RVector &zz)
        {
            double t = min_slack(problem, zz);
            return 1.01 * t + 1e-9 + 1e-6 * std::abs(t);
        };
        auto strictly_feasible = [&](const RVector &zz, double t)
        {
            for (const auto &b : problem.blocks)
                if (b.kind == BoundKind::constant && !(block_residual(b, zz).norm() < b.bound))
                    return false;
            for (const auto &r : problem.rows)
                if (!(r.a.dot(zz) + r.a_t * t - r.rhs > 0.0))
                    return false;
            return true;
        };

        double t_start = slack_t(z);
        if (!strictly_feasible(z, t_start))
        {
            // Phase I: minimize s with every constant bound and affine row relaxed by s.
            const double t_fix = slack_t(z);
            double v = constant_violation(problem, z, nullptr);
            for (const auto &r : problem.rows)
                v = std::max(v, r.rhs - r.a.dot(z) - r.a_t * t_fix);
            double s0 = v + std::max(1e-3, 0.1 * std::abs(v));
            for (const auto &b : problem.blocks)
                if (b.kind == BoundKind::constant)
                    s0 = std::max(s0, -b.bound + 1e-6); // bound + s must stay positive
            double zb = problem.z_norm_bound;
            if (zb <= 0.0)
                zb = 1e3 * std::max(1.0, z.norm());
            Barrier B1(problem, true, zb);
            RVector x(n + 2);
            x.head(n) = z;
            x(n) = t_fix;
            x(n + 1) = s0;
            SolverOptions o1 = opt;
            o1.abs_gap_tol = 0.0;
            PathResult pr = follow_path(B1, x, o1, opt.max_iter,
                                        [&](const RVector &xx)
                                        {
                                            // Rows that involve t may need the phase-I t, not the smallest slack.
                                            const double t = std::max(slack_t(xx.head(n)), xx(n));
                                            return xx(n + 1) < 0.0 && strictly_feasible(xx.head(n), t);
                                        });
            sol.phase1_iterations = pr.newton;
            sol.iterations = pr.newton;
            z = pr.x.head(n);
            t_start = std::max(slack_t(z), pr.x(n));
            if (!pr.stopped_early)
            {
                sol.z = z;
                sol.t = slack_t(z);
                sol.status = pr.converged ? SolveStatus::infeasible : SolveStatus::max_iter;
                sol.primal_residual = max_violation(problem, z, sol.t, &sol.infeasible_class);
                sol.gap = pr.gap;
                return sol;
            }
        }

        Barrier B2(problem, false, problem.z_norm_bound);
        RVector x(n + 1);
        x.head(n) = z;
        x(n) = t_start;
        PathResult pr = follow_path(B2, x, opt, opt.max_iter - sol.iterations, [](const RVector &) { return false; });
        sol.iterations += pr.newton;
        sol.z = pr.x.head(n);
        sol.t = pr.x(n);
        sol.gap = pr.gap;
        sol.primal_residual = max_violation(problem, sol.z, sol.t, nullptr);
        sol.status = pr.converged && sol.primal_residual <= opt.feas_tol ? SolveStatus::optimal : SolveStatus::max_iter;
        return sol;
    }

    void dump_problem(std::ostream &os, const ConeProblem &problem)
    {
        char buf[64];
        auto num = [&](double v)
        {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        os << problem.n << ' ' << problem.blocks.size() << ' ' << problem.rows.size() << ' '
           << num(problem.z_norm_bound) << '\n';
        for (const auto &b : problem.blocks)
        {
            const int m = b.op->rows();
            os << "block " << m << ' ' << (b.kind == BoundKind::slack ? "slack" : "constant") << ' '
               << num(b.bound) << '\n';
            RMatrix S(m, problem.n);
            RVector e = RVector::Zero(problem.n);
            for (int i = 0; i < problem.n; ++i)
            {
                e(i) = 1.0;
                S.col(i) = b.op->apply(e);
                e(i) = 0.0;
            }
            for (int r = 0; r < m; ++r)
            {
                for (int c = 0; c < problem.n; ++c)
                    os << (c ? " " : "") << num(S(r, c));
                os << ' ' << num(b.offset.size() ? b.offset(r) : 0.0) << '\n';
            }
        }
        for (const auto &r : problem.rows)
        {
            os << "row";
            for (int c = 0; c < problem.n; ++c)
                os << ' ' << num(r.a(c));
            os << ' ' << num(r.a_t) << ' ' << num(r.rhs) << '\n';
        }
    }
}
