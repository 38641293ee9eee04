#include "pdarcy/fem2d.hpp"
#include "pdarcy/mesh2d.hpp"
#include "pdarcy/solver1d.hpp"

#include <benchmark/benchmark.h>

#include <memory>

using namespace pdarcy;

namespace {

const ForcingSpec& smooth_forcing()
{
    static const ForcingSpec f = ForcingSpec::from_expressions("1 + x*z", "cos(x)");
    return f;
}

void BM_Exact1D(benchmark::State& state)
{
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_exact_1d(smooth_forcing(), 0.1, 0.5));
    }
}
BENCHMARK(BM_Exact1D);

void BM_Fem1D(benchmark::State& state)
{
    const int cells = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_fem_1d(smooth_forcing(), 0.1, 0.5, cells));
    }
}
BENCHMARK(BM_Fem1D)->Arg(64)->Arg(1024);

void BM_FittedMesh(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto zeta = make_perturbation(PerturbationFamily::sine, {}, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_fitted_mesh(zeta, n, n));
    }
}
BENCHMARK(BM_FittedMesh)->Arg(32)->Arg(128);

void BM_Assemble(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto zeta = make_perturbation(PerturbationFamily::sine, {}, 0.1);
    const Mesh2D mesh = build_fitted_mesh(zeta, n, n);
    const auto problem = fitted_problem(smooth_forcing(), 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_galerkin(mesh, problem));
    }
}
BENCHMARK(BM_Assemble)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_AssembleSolve(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto zeta = make_perturbation(PerturbationFamily::sine, {}, 0.1);
    auto mesh = std::make_shared<const Mesh2D>(build_fitted_mesh(zeta, n, n));
    for (auto _ : state) {
        const auto sol = assemble_solve(mesh, smooth_forcing(), 0.1);
        state.counters["cg_iterations"] = sol.stats.iterations;
    }
}
BENCHMARK(BM_AssembleSolve)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace
