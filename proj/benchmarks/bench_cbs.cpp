#include <cbsbeam/array_model.hpp>
#include <cbsbeam/beamformers.hpp>
#include <cbsbeam/socp_solver.hpp>
#include <cbsbeam/spatial_filter.hpp>

#include <benchmark/benchmark.h>

using namespace cbs;

namespace
{
    CVector random_vector(Rng &rng, int n)
    {
        CVector v(n);
        for (int i = 0; i < n; ++i)
            v(i) = complex_normal(rng);
        return v;
    }

    ChannelMatrix random_channel(Rng &rng, int N, int K)
    {
        ArrayGeometry g = ArrayGeometry::half_wavelength(N, 3e9);
        std::uniform_real_distribution<double> u(-pi, pi);
        std::vector<UserLocation> users;
        for (int k = 0; k < K; ++k)
            users.push_back(UserLocation::from_omega(g, u(rng), 200.0));
        return assemble_channel(g, users, ChannelModel::far_field);
    }
}

// Sliding-window convolution against the dense (N-L+1) x N product.
static void BM_ApplyCbs(benchmark::State &state)
{
    const int N = static_cast<int>(state.range(0)), L = static_cast<int>(state.range(1));
    Rng rng(1);
    CbsOperator op(design_window_bandpass(L, 0.0, pi / 9), N);
    CVector y = random_vector(rng, N);
    for (auto _ : state)
        benchmark::DoNotOptimize(op.apply(y));
}
BENCHMARK(BM_ApplyCbs)->Args({65, 14})->Args({513, 110})->Args({513, 470});

static void BM_DenseCbs(benchmark::State &state)
{
    const int N = static_cast<int>(state.range(0)), L = static_cast<int>(state.range(1));
    Rng rng(1);
    CMatrix H = CbsOperator(design_window_bandpass(L, 0.0, pi / 9), N).dense();
    CVector y = random_vector(rng, N);
    for (auto _ : state)
        benchmark::DoNotOptimize(CVector(H * y));
}
BENCHMARK(BM_DenseCbs)->Args({65, 14})->Args({513, 110})->Args({513, 470});

static void BM_Mmse(benchmark::State &state)
{
    Rng rng(2);
    ChannelMatrix ch = random_channel(rng, static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    PowerProfile pw = PowerProfile::uniform(ch.n_users(), 400.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(mmse(ch, pw));
}
BENCHMARK(BM_Mmse)->Args({65, 24})->Args({513, 200})->Unit(benchmark::kMillisecond);

static void BM_CbsMmseBank(benchmark::State &state)
{
    Rng rng(2);
    const int N = static_cast<int>(state.range(0)), K = static_cast<int>(state.range(1));
    ChannelMatrix ch = random_channel(rng, N, K);
    FilterBank bank = build_filter_bank(static_cast<int>(state.range(2)), static_cast<int>(state.range(3)));
    PowerProfile pw = PowerProfile::uniform(K, 400.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(cbs_mmse_bank(bank, ch, pw));
}
BENCHMARK(BM_CbsMmseBank)->Args({65, 24, 3, 14})->Args({513, 200, 9, 110})->Unit(benchmark::kMillisecond);

// One cone subproblem of the size met inside the desk-scale filter design.
static void BM_SocpSolve(benchmark::State &state)
{
    const int n = static_cast<int>(state.range(0)), blocks = static_cast<int>(state.range(1));
    Rng rng(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    ConeProblem p;
    p.n = n;
    for (int b = 0; b < blocks; ++b)
    {
        RMatrix S(2 * 18, n);
        for (Eigen::Index i = 0; i < S.size(); ++i)
            S.data()[i] = nd(rng);
        ConeBlock blk;
        blk.op = std::make_shared<DenseBlock>(S);
        blk.offset = RVector::Constant(2 * 18, 1.0);
        p.blocks.push_back(blk);
    }
    for (int j = 0; j < 8; ++j)
    {
        RVector a(n);
        for (int i = 0; i < n; ++i)
            a(i) = nd(rng);
        p.rows.push_back({a, 0.0, -1.0, "row"});
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(p));
}
BENCHMARK(BM_SocpSolve)->Args({48, 40})->Args({48, 120})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
