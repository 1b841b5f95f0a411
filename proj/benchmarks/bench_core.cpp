#include <benchmark/benchmark.h>

#include "mcx/linalg.hpp"
#include "mcx/rng.hpp"
#include "mcx/verify.hpp"

namespace {

mcx::HermitianMatrix random_hermitian(mcx::CounterRng& rng, int d) {
    mcx::Matrix m(d, d);
    for (int j = 0; j < d; ++j) {
        m(j, j) = rng.normal();
        for (int k = 0; k < j; ++k) {
            mcx::cd v{rng.normal(), rng.normal()};
            m(j, k) = v;
            m(k, j) = std::conj(v);
        }
    }
    return mcx::HermitianMatrix::from_matrix(m);
}

mcx::EnsembleSpec series_spec(int n) {
    mcx::RademacherSeriesPayload p;
    mcx::CounterRng rng(11);
    for (int k = 0; k < n; ++k) p.coefficients.push_back(random_hermitian(rng, 4));
    return mcx::EnsembleSpec(mcx::Family::rademacher_series, std::move(p));
}

void BM_EigHermitian(benchmark::State& state) {
    mcx::CounterRng rng(3);
    mcx::HermitianMatrix a = random_hermitian(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mcx::eig_hermitian(a));
}
BENCHMARK(BM_EigHermitian)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_MatrixExp(benchmark::State& state) {
    mcx::CounterRng rng(5);
    mcx::HermitianMatrix a = random_hermitian(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mcx::matrix_exp(a));
}
BENCHMARK(BM_MatrixExp)->Arg(4)->Arg(16);

void BM_BoundEvaluation(benchmark::State& state) {
    mcx::BoundSet b = mcx::bernstein(10.0, 1.0, 2);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(b.tail_upper(t));
        t = t < 10.0 ? t + 0.1 : 0.0;
    }
}
BENCHMARK(BM_BoundEvaluation);

void BM_SimulateTail(benchmark::State& state) {
    mcx::EnsembleSpec spec = series_spec(20);  // 2^20 states forces Monte Carlo
    mcx::SimulationConfig config;
    config.samples = state.range(0);
    config.seed = 7;
    config.t_grid = {0.0, 2.0, 4.0, 6.0};
    for (auto _ : state) benchmark::DoNotOptimize(mcx::simulate_tail(spec, config));
}
BENCHMARK(BM_SimulateTail)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
