#include <benchmark/benchmark.h>

#include "lienard/averaging.hpp"
#include "lienard/design.hpp"
#include "lienard/simulator.hpp"

using namespace lienard;

namespace {

DesignProblem example_problem()
{
    DesignProblem p;
    p.n = 4;
    p.m = 2;
    p.targets = {Rational(1), Rational(2), Rational(3), Rational(4)};
    p.zeroed = {CoefficientId{'a', 1}, CoefficientId{'a', 3}, CoefficientId{'b', 1}};
    return p;
}

LienardSystem example_system(double epsilon)
{
    LienardSystem sys = design_cycles(example_problem()).system;
    sys.epsilon = epsilon;
    return sys;
}

// n = m = degree, every coefficient 1.
LienardSystem dense_system(int degree)
{
    LienardSystem sys;
    sys.n = degree;
    sys.m = degree;
    sys.f.assign(degree + 1, PiExt{Rational(1)});
    sys.g.assign(degree + 1, PiExt{Rational(1)});
    return sys;
}

void BM_AveragedFunction(benchmark::State& state)
{
    const LienardSystem sys = dense_system(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(averaged_function(sys));
}
BENCHMARK(BM_AveragedFunction)->Arg(4)->Arg(16)->Arg(64);

void BM_PositiveRoots(benchmark::State& state)
{
    const AveragedFunction p = averaged_function(example_system(0.0));
    for (auto _ : state) benchmark::DoNotOptimize(positive_roots(p, 1e-12));
}
BENCHMARK(BM_PositiveRoots);

void BM_Design(benchmark::State& state)
{
    const DesignProblem p = example_problem();
    for (auto _ : state) benchmark::DoNotOptimize(design_cycles(p));
}
BENCHMARK(BM_Design);

void BM_PoincareMap(benchmark::State& state)
{
    const PiecewiseField field(example_system(0.01));
    const IntegratorConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(poincare_map(2.5, field, cfg));
}
BENCHMARK(BM_PoincareMap);

void BM_FindLimitCycles(benchmark::State& state)
{
    const PiecewiseField field(example_system(0.01));
    const IntegratorConfig cfg;
    const ScanWindow window{0.5, 4.5, static_cast<std::size_t>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(find_limit_cycles(field, cfg, window, ScanOptions{1}));
}
BENCHMARK(BM_FindLimitCycles)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
