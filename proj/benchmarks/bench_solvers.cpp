#include <cstddef>

#include <benchmark/benchmark.h>

#include "kerrcav/fock.hpp"
#include "kerrcav/kraus.hpp"
#include "kerrcav/reference.hpp"

namespace {

using namespace kerrcav;

constexpr double kChi = 0.3;
constexpr double kGamma = 0.2;
constexpr double kTime = 2.0;

DensityMatrix coherent(std::size_t dim)
{
    return make_state(CoherentState{1.5}, Truncation(dim)).rho;
}

void BM_EvolveKraus(benchmark::State& state)
{
    const auto rho0 = coherent(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve_kraus(rho0, {kChi, kGamma, kTime}));
    }
}
BENCHMARK(BM_EvolveKraus)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_Rk4(benchmark::State& state)
{
    const Truncation trunc(static_cast<std::size_t>(state.range(0)));
    const auto rho0 = coherent(trunc.dim());
    const ChannelParams p{kChi, kGamma, kTime};
    const IntegratorConfig cfg{rk4_required_steps(trunc, p)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(rk4_evolve(rho0, p, cfg));
    }
    state.counters["steps"] = static_cast<double>(cfg.steps);
}
BENCHMARK(BM_Rk4)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_MatrixExponential(benchmark::State& state)
{
    const Truncation trunc(static_cast<std::size_t>(state.range(0)));
    const ComplexMatrix generator = build_liouvillian(trunc, {kChi, kGamma, 0.0}).matrix * kTime;
    for (auto _ : state) {
        benchmark::DoNotOptimize(matrix_exponential(generator));
    }
}
BENCHMARK(BM_MatrixExponential)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_EvolveLiouvillian(benchmark::State& state)
{
    const auto rho0 = coherent(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve_liouvillian(rho0, {kChi, kGamma, kTime}));
    }
}
BENCHMARK(BM_EvolveLiouvillian)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_Completeness(benchmark::State& state)
{
    const Truncation trunc(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(completeness_residual(trunc, {kChi, kGamma, kTime}));
    }
}
BENCHMARK(BM_Completeness)->Arg(16)->Arg(64);

} // namespace

BENCHMARK_MAIN();
