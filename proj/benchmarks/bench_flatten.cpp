#include "pdarcy/flatten.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace pdarcy;

namespace {

void BM_FlattenCheck(benchmark::State& state)
{
    const auto zeta = make_perturbation(PerturbationFamily::sine, {}, 0.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(flatten_check(zeta, 1000, 1));
    }
}
BENCHMARK(BM_FlattenCheck)->Unit(benchmark::kMillisecond);

void BM_SolveFlattened(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto zeta = make_perturbation(PerturbationFamily::sine, {}, 0.1);
    const auto forcing = ForcingSpec::from_expressions("1", "1");
    auto reference = std::make_shared<const Mesh2D>(build_reference_mesh(n, n));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_flattened(zeta, forcing, 0.1, reference));
    }
}
BENCHMARK(BM_SolveFlattened)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_PullbackToReference(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto zeta = make_perturbation(PerturbationFamily::sine, {}, 0.1);
    auto fitted = std::make_shared<const Mesh2D>(build_fitted_mesh(zeta, n, n));
    auto reference = std::make_shared<const Mesh2D>(build_reference_mesh(n, n));
    const Field2D u = interpolate(fitted, [](double x, double z) { return x * z; });
    for (auto _ : state) {
        benchmark::DoNotOptimize(t_apply(zeta, u, reference, PullbackDirection::to_reference));
    }
}
BENCHMARK(BM_PullbackToReference)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
