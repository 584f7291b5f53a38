#include "hesskit/families.hpp"
#include "hesskit/grid.hpp"
#include "hesskit/measures.hpp"
#include "hesskit/radial.hpp"
#include "hesskit/symm.hpp"
#include "hesskit/verify.hpp"

#include <benchmark/benchmark.h>

using namespace hesskit;

namespace {

void BM_sigma_k(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    Rng rng(1);
    const auto m = random_symmetric(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(sigma_k(m, (n + 1) / 2));
}
BENCHMARK(BM_sigma_k)->DenseRange(2, 6, 2);

void BM_sigma_k_grad(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    Rng rng(2);
    const auto m = random_symmetric(rng, n);
    for (auto _ : state) benchmark::DoNotOptimize(sigma_k_grad(m, (n + 1) / 2));
}
BENCHMARK(BM_sigma_k_grad)->DenseRange(2, 6, 2);

void BM_hessian_fd(benchmark::State& state)
{
    const auto spec = GridSpec::ball(3, static_cast<int>(state.range(0)), 1.0);
    const auto u = quadratic_grid_field(spec, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(hessian_fd(u));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.size()));
}
BENCHMARK(BM_hessian_fd)->Arg(16)->Arg(32);

void BM_grid_energy(benchmark::State& state)
{
    const auto spec = GridSpec::ball(3, static_cast<int>(state.range(0)), 1.0);
    const auto u = quadratic_grid_field(spec, 0.5);
    for (auto _ : state) benchmark::DoNotOptimize(hessian_energy(u, 2));
}
BENCHMARK(BM_grid_energy)->Arg(16)->Arg(32);

void BM_solve_radial(benchmark::State& state)
{
    const auto f = RadialDensity::polynomial_bump(2, 0.7);
    const int samples = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_radial(f, 5, 2, RadialDomain::ball(1.0), samples));
}
BENCHMARK(BM_solve_radial)->Arg(1001)->Arg(10001);

void BM_radial_energy(benchmark::State& state)
{
    const auto w = quadratic_solution(5, 2, 1.0, {}, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(radial_energy(w, 2));
}
BENCHMARK(BM_radial_energy)->Arg(10001);

void BM_wolff_atoms(benchmark::State& state)
{
    Rng rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<Atom> atoms;
    for (int i = 0; i < state.range(0); ++i) atoms.push_back({{u(rng), u(rng), u(rng), u(rng), u(rng)}, 1.0});
    const DiscreteMeasure mu(5, atoms);
    const auto params = PotentialParams::for_hessian(2);
    const Point x{2.0, 0.0, 0.0, 0.0, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(wolff(mu, x, params));
}
BENCHMARK(BM_wolff_atoms)->Arg(1)->Arg(16)->Arg(128);

void BM_wolff_density(benchmark::State& state)
{
    const DiscreteMeasure mu(5, {}, RadialDensityPart{Point(5, 0.0), RadialDensity::polynomial_bump(2, 1.0)});
    const auto params = PotentialParams::for_hessian(2);
    const Point x{0.5, 0.0, 0.0, 0.0, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(wolff(mu, x, params));
}
BENCHMARK(BM_wolff_density);

void BM_schwarz(benchmark::State& state)
{
    Rng rng(4);
    const auto u = random_admissible_profile(rng, 5, 2, 1.0, 4001);
    const auto v = random_admissible_profile(rng, 5, 2, 1.0, 4001);
    for (auto _ : state) benchmark::DoNotOptimize(verify_schwarz(u, v, 2));
}
BENCHMARK(BM_schwarz);

} // namespace

BENCHMARK_MAIN();
