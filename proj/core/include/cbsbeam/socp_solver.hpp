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
#ifndef CBSBEAM_SOCP_SOLVER_HPP
#define CBSBEAM_SOCP_SOLVER_HPP

#include "cbsbeam/types.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace cbs
{
    // Real linear map S: R^n -> R^m used inside a cone block.
    class BlockOperator
    {
    public:
        virtual ~BlockOperator() = default;
        virtual int rows() const = 0;
        virtual int cols() const = 0;
        virtual RVector apply(const RVector &z) const = 0;         // S z
        virtual RVector apply_adjoint(const RVector &u) const = 0; // S^T u
        virtual void add_gram(double w, RMatrix &H) const;         // H += w S^T S
    };

    class DenseBlock : public BlockOperator
    {
    public:
        explicit DenseBlock(RMatrix S);
        int rows() const override { return static_cast<int>(S_.rows()); }
        int cols() const override { return static_cast<int>(S_.cols()); }
        RVector apply(const RVector &z) const override { return S_ * z; }
        RVector apply_adjoint(const RVector &u) const override { return S_.transpose() * u; }
        void add_gram(double w, RMatrix &H) const override;
        const RMatrix &matrix() const { return S_; }

    private:
        RMatrix S_;
        RMatrix gram_;
    };

    // [Re; Im] embedding of a complex matrix acting on [Re z; Im z].
    RMatrix lift_complex(const CMatrix &S);
    RVector lift_complex(const CVector &v);
    CVector unlift_complex(const RVector &x);

    enum class BoundKind
    {
        slack,   // ||S z + c|| <= t
        constant // ||S z + c|| <= bound
    };

    struct ConeBlock
    {
        std::shared_ptr<const BlockOperator> op;
        RVector offset; // c, empty means zero
        BoundKind kind = BoundKind::slack;
        double bound = 0.0;
        std::string label;
    };

    // a^T z + a_t t >= rhs
    struct AffineRow
    {
        RVector a;
        double a_t = 0.0;
        double rhs = 0.0;
        std::string label;
    };

    // minimize t over (z, t) subject to the cone blocks and affine rows.
    struct ConeProblem
    {
        int n = 0; // dimension of z
        std::vector<ConeBlock> blocks;
        std::vector<AffineRow> rows;

        // Optional ||z|| <= z_norm_bound (<= 0 disables). Keeps the barrier bounded when
        // the blocks do not pin every direction of z.
        double z_norm_bound = 0.0;
    };

    // Complex form: blocks act on complex h of length L, affine rows are Re(c^H h) + c_t t >= rhs.
    struct ComplexConeBlock
    {
        CMatrix S;
        CVector offset;
        BoundKind kind = BoundKind::slack;
        double bound = 0.0;
    };

    struct ComplexAffineRow
    {
        CVector c;
        double c_t = 0.0;
        double rhs = 0.0;
    };

    ConeProblem lift_complex(int L, const std::vector<ComplexConeBlock> &blocks, const std::vector<ComplexAffineRow> &rows);

    enum class SolveStatus
    {
        optimal,
        max_iter,
        infeasible
    };

    std::string to_string(SolveStatus s);

    struct SolverOptions
    {
        double feas_tol = 1e-6;
        double gap_tol = 1e-6;    // relative: nu/tau <= gap_tol * max(1, |t|)
        double abs_gap_tol = 0.0; // optional absolute floor, used when > 0
        int max_iter = 5000;      // total Newton steps
        double mu = 20.0;
    };

    struct ConeSolution
    {
        RVector z;
        double t = 0.0;
        SolveStatus status = SolveStatus::max_iter;
        double primal_residual = 0.0; // max constraint violation at (z, t)
        double gap = 0.0;             // barrier duality-gap bound nu / tau
        int iterations = 0;           // Newton steps, both phases
        int phase1_iterations = 0;
        std::string infeasible_class; // label of the worst block/row when infeasible
    };

    // Log-barrier interior-point method. A warm start that is not strictly feasible
    // triggers a phase-I problem.
    ConeSolution solve(const ConeProblem &problem, const RVector &z0, const SolverOptions &opt = {});
    ConeSolution solve(const ConeProblem &problem, const SolverOptions &opt = {});

    // Max violation of every constraint at (z, t); 0 when feasible.
    double max_violation(const ConeProblem &problem, const RVector &z, double t, std::string *worst = nullptr);

    // Smallest t for which (z, t) is feasible for the slack blocks (0 if none).
    double min_slack(const ConeProblem &problem, const RVector &z);

    // Text dump: header line "n blocks rows", then each block and row densely.
    void dump_problem(std::ostream &os, const ConeProblem &problem);
}

#endif
