#include "test_util.hpp"

#include <cbsbeam/metrics.hpp>

#include <gtest/gtest.h>

using namespace cbs;
using cbs::test::rel_err;

namespace
{
    const ArrayGeometry g65 = ArrayGeometry::half_wavelength(65, 3e9);
}

TEST(Geometry, RejectsEvenElementCount)
{
    EXPECT_THROW(ArrayGeometry::half_wavelength(64, 3e9), std::invalid_argument);
    EXPECT_THROW(ArrayGeometry(8, 0.05, 0.1), std::invalid_argument);
}

TEST(Geometry, HalfWavelengthAt3GHz)
{
    EXPECT_NEAR(g65.wavelength_m(), speed_of_light / 3e9, 1e-15);
    EXPECT_NEAR(g65.spacing_m(), 0.5 * g65.wavelength_m(), 1e-15);
    EXPECT_TRUE(g65.is_half_wavelength());
}

TEST(Geometry, FromOmegaRoundTrip)
{
    for (double w : {-3.0, -0.4, 0.0, 1.1, 3.1})
    {
        UserLocation u = UserLocation::from_omega(g65, w, 50.0);
        EXPECT_NEAR(u.spatial_freq(g65), w, 1e-12);
    }
    EXPECT_THROW(UserLocation::from_omega(g65, 3.3, 50.0), std::invalid_argument);
}

TEST(SteeringExact, CentreElement)
{
    for (double th : {-1.2, 0.0, 0.4, 1.5})
    {
        UserLocation u{30.0, th};
        CVector a = steering_exact(g65, u, 2.0);
        cplx want = std::sqrt(2.0) / 30.0 * std::polar(1.0, -2.0 * pi * 30.0 / g65.wavelength_m());
        EXPECT_LT(std::abs(a(32) - want), 1e-12 * std::abs(want));
    }
}

TEST(SteeringExact, BroadsideSymmetry)
{
    CVector a = steering_exact(g65, {20.0, 0.0});
    for (int m = 1; m <= 32; ++m)
        EXPECT_NEAR(std::abs(a(32 + m)), std::abs(a(32 - m)), 1e-15);
}

TEST(SteeringExact, MatchesEuclideanDistance)
{
    const double lambda = 0.1, d = 0.05, r = 3.0, th = pi / 6;
    ArrayGeometry g(5, d, lambda);
    CVector a = steering_exact(g, {r, th});
    const double ux = r * std::cos(th), uy = r * std::sin(th);
    for (int i = 0; i < 5; ++i)
    {
        const double ey = (i - 2) * d;
        const double dist = std::sqrt(ux * ux + (uy - ey) * (uy - ey));
        cplx want = 1.0 / dist * std::polar(1.0, -2.0 * pi * dist / lambda);
        EXPECT_LT(std::abs(a(i) - want), 1e-13) << "element " << i;
    }
}

TEST(SteeringFarfield, BroadsideConstant)
{
    CVector a = steering_farfield(g65, 0.0, 12.0);
    for (int i = 1; i < 65; ++i)
        EXPECT_LT(std::abs(a(i) - a(0)), 1e-15);
    EXPECT_NEAR(std::abs(a(0)), 1.0 / 12.0, 1e-15);
}

TEST(SteeringFarfield, DftOrthogonality)
{
    const int N = 65;
    for (int m = 1; m < N; m += 7)
    {
        CVector a = steering_farfield(g65, 0.3, 1.0);
        CVector b = steering_farfield(g65, 0.3 + 2.0 * pi * m / N, 1.0);
        EXPECT_LT(std::abs(a.dot(b)) / a.squaredNorm(), 1e-9);
    }
}

TEST(SteeringFarfield, CloseToExactBeyondRayleighDistance)
{
    ArrayGeometry g = ArrayGeometry::half_wavelength(33, 3e9);
    const double r = 1.01 * g.rayleigh_distance_m();
    for (double th : {-0.9, 0.2, 1.1})
    {
        UserLocation u{r, th};
        CVector e = steering_exact(g, u), f = steering(g, u, ChannelModel::far_field);
        for (int i = 0; i < 33; ++i)
            EXPECT_LT(std::abs(std::arg(e(i) / f(i))), pi / 8);
    }
}

TEST(SteeringFarfield, SecondOrderBoundAt200m)
{
    ArrayGeometry g = ArrayGeometry::half_wavelength(513, 3e9);
    UserLocation u{200.0, 0.35};
    CVector e = steering_exact(g, u), f = steering(g, u, ChannelModel::far_field);
    const double eps = g.spacing_m() / u.distance_m;
    const double bound = 513.0 * 513.0 * eps * eps * pi / 4.0 * u.distance_m / g.wavelength_m();
    // unwrap along the array from the centre, where the two models agree exactly
    double worst = 0.0;
    for (int dir : {-1, 1})
    {
        double acc = 0.0, prev = 0.0;
        for (int i = 256; i >= 0 && i < 513; i += dir)
        {
            double ph = std::arg(e(i) / f(i));
            double step = std::remainder(ph - prev, 2.0 * pi);
            acc += step;
            prev = ph;
            worst = std::max(worst, std::abs(acc));
        }
    }
    EXPECT_GT(worst, 1.0);
    EXPECT_LT(worst, bound);
}

TEST(SteeringUsw2, PhaseIsLinearMinusQuadratic)
{
    ArrayGeometry g = ArrayGeometry::half_wavelength(513, 3e9);
    UserLocation u{40.0, pi / 6};
    CVector a = steering_usw2(g, u);
    const double lambda = speed_of_light / 3e9;
    const double w = pi * std::sin(pi / 6);
    const double psi = pi * lambda * std::cos(pi / 6) * std::cos(pi / 6) / 160.0;
    for (int i = 0; i < 513; i += 16)
    {
        const double n = i - 256;
        cplx want = std::polar(1.0, n * w - n * n * psi);
        EXPECT_LT(std::abs(a(i) / a(256) - want), 1e-9) << "element " << i;
    }
}

TEST(SteeringUsw2, ReducesToFarfieldWithoutCurvature)
{
    UserLocation u{25.0, pi / 2};
    CVector a = steering_usw2(g65, u), f = steering_farfield(g65, u.spatial_freq(g65), 25.0);
    EXPECT_LT(rel_err(a, f), 1e-12);
}

TEST(SteeringUsw2, QuadraticTermCancelsInDifference)
{
    UserLocation u{15.0, 0.7};
    CVector a = steering_usw2(g65, u);
    const double w = u.spatial_freq(g65);
    for (int m = 1; m <= 32; m += 5)
    {
        cplx ratio = a(32 + m) / a(32 - m);
        EXPECT_LT(std::abs(ratio - std::polar(1.0, 2.0 * m * w)), 1e-12);
    }
}

TEST(SteeringUsw2, CloseToExactInFresnelRegion)
{
    // What the second-order model drops: the cubic range term in phase and the 1/r_n taper.
    ArrayGeometry g = ArrayGeometry::half_wavelength(129, 3e9);
    const UserLocation u{40.0, 0.5};
    const CVector e = steering_exact(g, u), s = steering_usw2(g, u);
    const double D = g.half_aperture() * g.spacing_m(), k = 2.0 * pi / g.wavelength_m();
    const double cubic = k * D * D * D * std::abs(std::sin(0.5)) * std::pow(std::cos(0.5), 2) / (2.0 * 40.0 * 40.0);
    double worst = 0.0;
    for (int n = 0; n < 129; ++n)
    {
        worst = std::max(worst, std::abs(std::arg(e(n) / s(n))));
        const double ratio = std::abs(e(n)) / std::abs(s(n));
        EXPECT_GE(ratio, 40.0 / (40.0 + D) - 1e-12);
        EXPECT_LE(ratio, 40.0 / (40.0 - D) + 1e-12);
    }
    EXPECT_GT(worst, 0.5 * cubic);
    EXPECT_LT(worst, 1.2 * cubic);
}

TEST(OneRing, ScatterersOnTheCircle)
{
    Rng rng(5);
    std::vector<UserLocation> users{{200.0, 0.1}, {150.0, -0.7}};
    ScattererSet sc = build_one_ring(users, 3, 5.0, rng);
    ASSERT_EQ(sc.count(), 6);
    ASSERT_EQ(sc.gains.rows(), 6);
    ASSERT_EQ(sc.gains.cols(), 2);
    for (int q = 0; q < 6; ++q)
    {
        const UserLocation &u = users[q / 3];
        const double dx = sc.positions[q].x() - u.x(), dy = sc.positions[q].y() - u.y();
        EXPECT_NEAR(std::hypot(dx, dy), 5.0, 1e-9);
        EXPECT_GT(sc.positions[q].distance_m, 0.0);
        for (int k = 0; k < 2; ++k)
            if (k != q / 3)
                EXPECT_EQ(sc.gains(q, k), cplx(0.0));
    }
}

TEST(OneRing, Deterministic)
{
    std::vector<UserLocation> users{{60.0, 0.3}};
    Rng a(77), b(77);
    ScattererSet s1 = build_one_ring(users, 3, 5.0, a), s2 = build_one_ring(users, 3, 5.0, b);
    EXPECT_EQ(s1.positions, s2.positions);
    EXPECT_EQ(s1.gains, s2.gains);
}

TEST(OneRing, GainVarianceScalesWithQ)
{
    Rng rng(9);
    std::vector<UserLocation> users(2000, UserLocation{100.0, 0.0});
    ScattererSet sc = build_one_ring(users, 4, 5.0, rng);
    double acc = 0.0;
    for (int k = 0; k < 2000; ++k)
        acc += sc.gains.col(k).squaredNorm();
    EXPECT_NEAR(acc / 2000.0, 1.0, 0.05);
}

TEST(Channel, LosOnlyColumns)
{
    std::vector<UserLocation> users{{80.0, 0.2}, {90.0, -0.5}};
    ChannelMatrix ch = assemble_channel(g65, users, ChannelModel::usw2);
    EXPECT_FALSE(ch.nlos);
    for (int k = 0; k < 2; ++k)
    {
        EXPECT_LT(rel_err(CVector(ch.A.col(k)), steering_usw2(g65, users[k])), 1e-15);
        EXPECT_NEAR(ch.omega(k), users[k].spatial_freq(g65), 1e-15);
        EXPECT_NEAR(ch.psi(k), users[k].curvature(g65), 1e-15);
    }
}

TEST(Channel, SingleFarfieldUser)
{
    UserLocation u{120.0, -0.3};
    ChannelMatrix ch = assemble_channel(g65, {u}, ChannelModel::far_field);
    EXPECT_LT(rel_err(CVector(ch.A.col(0)), steering_farfield(g65, u.spatial_freq(g65), 120.0)), 1e-15);
}

TEST(Channel, DirectSummationOracle)
{
    ArrayGeometry g = ArrayGeometry::half_wavelength(9, 3e9);
    const double lambda = g.wavelength_m(), d = g.spacing_m();
    std::vector<UserLocation> users{{30.0, 0.4}, {45.0, -0.9}};
    Rng rng(3);
    ScattererSet sc = build_one_ring(users, 2, 5.0, rng);
    ChannelMatrix ch = assemble_channel(g, users, ChannelModel::exact_spherical, &sc, 1.0);

    auto elem = [&](double r, double th, int i)
    {
        const double ey = (i - 4) * d;
        const double x = r * std::cos(th), y = r * std::sin(th);
        const double dist = std::sqrt(x * x + (y - ey) * (y - ey));
        return 1.0 / dist * std::polar(1.0, -2.0 * pi * dist / lambda);
    };
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 9; ++i)
        {
            cplx want = elem(users[k].distance_m, users[k].angle_rad, i);
            for (int q = 0; q < sc.count(); ++q)
            {
                const UserLocation &p = sc.positions[q];
                const double hop = std::hypot(p.x() - users[k].x(), p.y() - users[k].y());
                want += sc.gains(q, k) * std::polar(1.0, -2.0 * pi * hop / lambda) *
                        elem(p.distance_m, p.angle_rad, i);
            }
            EXPECT_LT(std::abs(ch.A(i, k) - want), 1e-13);
        }
}

TEST(Channel, NlosIsAdditive)
{
    std::vector<UserLocation> users{{50.0, 0.1}, {70.0, 0.6}, {65.0, -0.2}};
    Rng rng(21);
    ScattererSet sc = build_one_ring(users, 3, 5.0, rng);
    ChannelMatrix with = assemble_channel(g65, users, ChannelModel::usw2, &sc);
    ChannelMatrix without = assemble_channel(g65, users, ChannelModel::usw2);
    for (int k = 0; k < 3; ++k)
    {
        CVector diff = with.A.col(k) - without.A.col(k);
        EXPECT_LT(rel_err(diff, nlos_response(g65, sc, k, users[k])), 1e-13);
    }
}

TEST(Uplink, NoiseOnlyCovariance)
{
    ChannelMatrix ch = cbs::test::farfield_channel(9, {0.3, -1.0});
    Rng rng(4);
    CMatrix Y = simulate_uplink(ch, RVector::Zero(2), 2.0, 100000, rng);
    CMatrix S = Y * Y.adjoint() / 100000.0;
    EXPECT_LT((S - 2.0 * CMatrix::Identity(9, 9)).norm() / (2.0 * 3.0), 0.05);
}

TEST(Uplink, SingleUserMatchedFilterGain)
{
    const double r = 50.0, P = 1e3;
    ChannelMatrix ch = cbs::test::farfield_channel(17, {0.8}, r);
    Rng rng(8);
    CMatrix X;
    CMatrix Y = simulate_uplink(ch, RVector::Constant(1, P), 1.0, 100000, rng, SymbolAlphabet::qpsk, &X);
    Beamformer bf = mrc(ch);
    RVector s = sample_sinr(bf, Y, X);
    const double want = P * 17.0 / (r * r);
    EXPECT_NEAR(s(0) / want, 1.0, 0.03);
}

TEST(Uplink, RejectsBadArguments)
{
    ChannelMatrix ch = cbs::test::farfield_channel(9, {0.3});
    Rng rng(1);
    EXPECT_THROW(simulate_uplink(ch, RVector::Ones(2), 1.0, 10, rng), std::invalid_argument);
    EXPECT_THROW(simulate_uplink(ch, RVector::Ones(1), 0.0, 10, rng), std::invalid_argument);
    EXPECT_THROW(simulate_uplink(ch, -RVector::Ones(1), 1.0, 10, rng), std::invalid_argument);
}
