#include "test_util.hpp"

#include <cbsbeam/counter.hpp>
#include <cbsbeam/spatial_filter.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace cbs;
using namespace cbs::test;

TEST(WindowDesign, CentreTapIsBandwidthOverPi)
{
    FirFilter f = design_window_bandpass(5, 0.4 * pi, 0.6 * pi);
    ASSERT_EQ(f.length(), 5);
    EXPECT_NEAR(f.taps(2).real(), 0.2, 1e-15);
    EXPECT_EQ(f.method, FilterMethod::window);
}

TEST(WindowDesign, TruncatedSincTaps)
{
    const int L = 14;
    const double c1 = 0.2 * pi, c2 = 0.55 * pi, M = 0.5 * (L - 1);
    FirFilter f = design_window_bandpass(L, c1, c2);
    for (int l = 0; l < L; ++l)
    {
        const double x = l - M;
        const double want = (std::sin(c2 * x) - std::sin(c1 * x)) / (pi * x);
        EXPECT_NEAR(f.taps(l).real(), want, 1e-15);
        EXPECT_EQ(f.taps(l).imag(), 0.0);
    }
}

TEST(WindowDesign, LinearPhaseSymmetry)
{
    for (int L : {5, 14, 31, 110})
        for (bool hamming : {false, true})
        {
            FirFilter f = design_window_bandpass(L, 0.1 * pi, 0.37 * pi, hamming);
            for (int l = 0; l < L; ++l)
                EXPECT_NEAR(std::abs(f.taps(l) - f.taps(L - 1 - l)), 0.0, 1e-15);
        }
}

TEST(WindowDesign, BandCentreResponseFig4Filter)
{
    FirFilter f = design_window_bandpass(110, 0.0, pi / 9);
    const double w = pi / 18;
    const double direct = dtft(f.taps, w);
    // frequency sampling on a grid where pi/18 is bin 128
    const int n = 36 * 128;
    cplx bin = 0.0;
    for (int l = 0; l < 110; ++l)
        bin += f.taps(l) * std::exp(cplx(0.0, -2.0 * pi * 128.0 * l / n));
    EXPECT_NEAR(std::abs(freq_response(f, w)), direct, 1e-13);
    EXPECT_NEAR(std::abs(bin), direct, 1e-12);
    EXPECT_NEAR(direct, 1.0, 0.1);
}

TEST(WindowDesign, PassbandDominatesNearbyStopband)
{
    for (int L : {30, 64, 110})
    {
        FirFilter f = design_window_bandpass(L, 0.3 * pi, 0.5 * pi);
        const double centre = std::abs(freq_response(f, 0.4 * pi));
        EXPECT_GE(centre, 10.0 * std::abs(freq_response(f, 0.6 * pi))) << "L = " << L;
        EXPECT_GE(centre, 10.0 * std::abs(freq_response(f, 0.2 * pi))) << "L = " << L;
    }
}

TEST(WindowDesign, RejectsBadBand)
{
    EXPECT_THROW(design_window_bandpass(0, 0.1, 0.2), std::invalid_argument);
    EXPECT_THROW(design_window_bandpass(8, 0.5, 0.2), std::invalid_argument);
    EXPECT_THROW(design_window_bandpass(8, -0.1, 0.2), std::invalid_argument);
    EXPECT_THROW(design_window_bandpass(8, 0.1, 3.5), std::invalid_argument);
}

TEST(FreqResponse, IdentityAndDc)
{
    FirFilter id = FirFilter::identity();
    for (double w : {-2.0, 0.0, 1.3})
        EXPECT_NEAR(std::abs(freq_response(id, w) - cplx(1.0)), 0.0, 1e-15);
    Rng rng(1);
    FirFilter f = FirFilter::from_taps(random_cvector(rng, 7));
    EXPECT_LT(std::abs(freq_response(f, 0.0) - f.taps.sum()), 1e-14);
}

TEST(FreqResponse, MatchesNaiveSum)
{
    Rng rng(2);
    CVector h = random_cvector(rng, 7);
    FirFilter f = FirFilter::from_taps(h);
    cplx want = 0.0;
    for (int l = 0; l < 7; ++l)
        want += h(l) * std::exp(cplx(0.0, -0.3 * pi * l));
    EXPECT_LT(std::abs(freq_response(f, 0.3 * pi) - want), 1e-14);
}

TEST(CbsOperator, TwoTapLayout)
{
    CVector h(2);
    h << 1.0, 2.0;
    CbsOperator op(FirFilter::from_taps(h), 4);
    CMatrix want(3, 4);
    want << 2, 1, 0, 0, 0, 2, 1, 0, 0, 0, 2, 1;
    EXPECT_EQ(op.output_dim(), 3);
    EXPECT_LT((op.dense() - want).norm(), 1e-15);
}

TEST(CbsOperator, IdentityFilter)
{
    CbsOperator op(FirFilter::identity(), 9);
    EXPECT_LT((op.dense() - CMatrix::Identity(9, 9)).norm(), 1e-15);
    Rng rng(3);
    CVector y = random_cvector(rng, 9);
    EXPECT_LT((apply_cbs(op, y) - y).norm(), 1e-15);
}

TEST(CbsOperator, DenseMatchesEntrywiseOracle)
{
    Rng rng(4);
    CVector h = random_cvector(rng, 6);
    CbsOperator op(FirFilter::from_taps(h), 21);
    EXPECT_LT((op.dense() - toeplitz_oracle(h, 21)).norm(), 1e-15);
}

TEST(CbsOperator, MatrixFreeMatchesDense)
{
    Rng rng(5);
    CVector h = random_cvector(rng, 12);
    CbsOperator op(FirFilter::from_taps(h), 65);
    const CMatrix D = toeplitz_oracle(h, 65);
    for (int t = 0; t < 50; ++t)
    {
        CVector y = random_cvector(rng, 65);
        EXPECT_LT(rel_err(apply_cbs(op, y), CVector(D * y)), 1e-12);
        CVector x = random_cvector(rng, op.output_dim());
        EXPECT_LT(rel_err(op.apply_adjoint(x), CVector(D.adjoint() * x)), 1e-12);
    }
    CMatrix Y = random_cmatrix(rng, 65, 4);
    EXPECT_LT(rel_err(op.apply(Y), CMatrix(D * Y)), 1e-12);
}

TEST(CbsOperator, ImpulseRecoversReversedTaps)
{
    Rng rng(6);
    const int L = 5, N = 17;
    CVector h = random_cvector(rng, L);
    CbsOperator op(FirFilter::from_taps(h), N);
    const int j = 8;
    CVector e = CVector::Zero(N);
    e(j) = 1.0;
    CVector out = op.apply(e);
    for (int p = 0; p < op.output_dim(); ++p)
    {
        const int k = j - p;
        cplx want = (k >= 0 && k < L) ? h(L - 1 - k) : cplx(0.0);
        EXPECT_LT(std::abs(out(p) - want), 1e-15);
    }
}

TEST(CbsOperator, RejectsFilterLongerThanArray)
{
    Rng rng(7);
    EXPECT_THROW(CbsOperator(FirFilter::from_taps(random_cvector(rng, 10)), 9), std::invalid_argument);
}

TEST(CbsOperator, CountsOneMultiplyPerTapAndOutput)
{
    Rng rng(8);
    const int L = 110, N = 513;
    CbsOperator op(design_window_bandpass(L, 0.0, pi / 9), N);
    CVector y = random_cvector(rng, N);
    MultiplyScope scope;
    apply_cbs(op, y);
    EXPECT_EQ(scope.count(), static_cast<std::uint64_t>(L) * (N - L + 1));
}

TEST(CbsOperator, FarfieldFactorization)
{
    for (int N : {17, 65})
        for (int L : {5, 14})
        {
            CbsOperator op(design_window_bandpass(L, 0.2 * pi, 0.5 * pi), N);
            const int P = N - L + 1;
            for (int i = 0; i < 64; ++i)
            {
                const double w = -pi + 2.0 * pi * i / 64.0;
                CVector lhs = op.apply(ula(N, w));
                CVector rhs = std::polar(1.0, (L - 1) * w) * freq_response(op.filter(), w) * leading_ula(N, P, w);
                EXPECT_LT((lhs - rhs).norm() / std::sqrt(double(P)), 1e-10);
            }
        }
}

TEST(Autocorrelation, EnergyAndSupport)
{
    Rng rng(9);
    CVector h = random_cvector(rng, 6);
    CVector g = autocorr_first_row(FirFilter::from_taps(h), 20);
    ASSERT_EQ(g.size(), 15);
    EXPECT_NEAR(g(0).real(), h.squaredNorm(), 1e-13);
    EXPECT_NEAR(g(0).imag(), 0.0, 1e-15);
    for (int j = 6; j < 15; ++j)
        EXPECT_EQ(g(j), cplx(0.0));
}

TEST(Autocorrelation, ToeplitzMatchesDenseProduct)
{
    Rng rng(10);
    for (int L : {3, 14, 40})
    {
        CVector h = random_cvector(rng, L);
        const CMatrix D = toeplitz_oracle(h, 65);
        CMatrix G = autocorr_toeplitz(autocorr_first_row(FirFilter::from_taps(h), 65));
        EXPECT_LT((G - D * D.adjoint()).norm() / (D * D.adjoint()).norm(), 1e-12);
    }
}

TEST(Whitening, IdentityFilter)
{
    WhiteningOperator w = build_whitener(CbsOperator(FirFilter::identity(), 9));
    EXPECT_LT((w.W - CMatrix::Identity(9, 9)).norm(), 1e-12);
}

TEST(Whitening, HermitianPositiveDefinite)
{
    CbsOperator op(design_window_bandpass(14, 0.2 * pi, 0.5 * pi), 65);
    WhiteningOperator w = build_whitener(op);
    EXPECT_LT((w.W - w.W.adjoint()).norm(), 1e-10);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(w.W);
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    EXPECT_LT((w.inverse() * w.W - CMatrix::Identity(op.output_dim(), op.output_dim())).norm(), 1e-8);
}

TEST(Whitening, FullSizeBankFilterIsWhite)
{
    CbsOperator op(design_window_bandpass(110, 0.0, pi / 9), 513);
    WhiteningOperator w = build_whitener(op);
    CMatrix WH = w.W * op.dense();
    const int P = op.output_dim();
    EXPECT_LT((WH * WH.adjoint() - CMatrix::Identity(P, P)).norm() / std::sqrt(double(P)), 1e-8);
}

TEST(Whitening, SampleCovarianceOfWhitenedNoise)
{
    Rng rng(11);
    CbsOperator op(design_window_bandpass(8, 0.3 * pi, 0.6 * pi), 33);
    WhiteningOperator w = build_whitener(op);
    const int n = 100000, P = op.output_dim();
    CMatrix S = CMatrix::Zero(P, P);
    CMatrix block(33, 1000);
    for (int b = 0; b < n / 1000; ++b)
    {
        for (int j = 0; j < 1000; ++j)
            block.col(j) = random_cvector(rng, 33);
        CMatrix Z = w.W * op.dense() * block;
        S += Z * Z.adjoint();
    }
    S /= double(n);
    EXPECT_LT((S - CMatrix::Identity(P, P)).norm() / std::sqrt(double(P)), 0.05);
}

TEST(Whitening, SingularOperatorThrows)
{
    CVector h = CVector::Zero(3);
    EXPECT_THROW(build_whitener(CbsOperator(FirFilter::from_taps(h), 9)), SingularError);
}

TEST(FilterBank, TilesZeroToPi)
{
    FilterBank bank = build_filter_bank(9, 110);
    ASSERT_EQ(bank.size(), 9);
    EXPECT_NEAR(bank.delta_omega, pi / 9, 1e-15);
    EXPECT_NEAR(bank.filters.front().omega_c1, 0.0, 1e-15);
    EXPECT_NEAR(bank.filters.back().omega_c2, pi, 1e-15);
    for (int m = 0; m + 1 < 9; ++m)
        EXPECT_NEAR(bank.filters[m].omega_c2, bank.filters[m + 1].omega_c1, 1e-15);
    for (const auto &f : bank.filters)
        EXPECT_EQ(f.length(), 110);
}

TEST(FilterBank, SingleSegment)
{
    FilterBank bank = build_filter_bank(1, 14);
    ASSERT_EQ(bank.size(), 1);
    EXPECT_NEAR(bank.filters[0].omega_c2, pi, 1e-15);
    EXPECT_EQ(bank.segment_of(0.0), 0);
    EXPECT_EQ(bank.segment_of(pi), 0);
}

TEST(FilterBank, SegmentBoundaries)
{
    FilterBank bank = build_filter_bank(3, 14);
    EXPECT_EQ(bank.segment_of(0.0), 0);
    EXPECT_EQ(bank.segment_of(pi / 3), 1);
    EXPECT_EQ(bank.segment_of(-pi / 3), 1);
    EXPECT_EQ(bank.segment_of(2 * pi / 3 - 1e-9), 1);
    EXPECT_EQ(bank.segment_of(pi), 2);
    EXPECT_EQ(bank.segment_of(-pi), 2);
}

TEST(FilterFile, RoundTrip)
{
    Rng rng(12);
    FirFilter f = FirFilter::from_taps(random_cvector(rng, 9));
    f.omega_c1 = 0.4 * pi;
    f.omega_c2 = 0.6 * pi;
    f.method = FilterMethod::nearfield_optimized;
    std::stringstream ss;
    write_filter(ss, f);
    FirFilter g = read_filter(ss);
    EXPECT_EQ(g.taps, f.taps);
    EXPECT_EQ(g.omega_c1, f.omega_c1);
    EXPECT_EQ(g.omega_c2, f.omega_c2);
    EXPECT_EQ(g.method, f.method);
}

TEST(FilterFile, RejectsTruncatedInput)
{
    std::stringstream ss("4 0 1 window\n1 0\n2 0\n");
    EXPECT_THROW(read_filter(ss), std::runtime_error);
}
