#include <benchmark/benchmark.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "taxisfv/amr.hpp"
#include "taxisfv/discretization.hpp"
#include "taxisfv/linear_solver.hpp"
#include "taxisfv/presets.hpp"
#include "taxisfv/split_problem.hpp"
#include "taxisfv/time_integration.hpp"

using namespace taxisfv;

namespace {

std::vector<double> preset_state(const Grid1D& g) {
    RunConfig c = preset_config(PresetId::I);
    c.epsilon = 0.05;
    return initial_state_1d(c, g);
}

void BM_StencilCoefficients(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> w(0.2, 1.0);
    std::array<double, 5> h{};
    for (auto& x : h) x = w(rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(diffusion_coeffs(h));
        benchmark::DoNotOptimize(velocity_coeffs(std::span<const double, 4>(h.data(), 4)));
    }
}
BENCHMARK(BM_StencilCoefficients);

void BM_Advection(benchmark::State& state) {
    const Grid1D g = Grid1D::uniform(0.0, 5.0, static_cast<std::size_t>(state.range(0)));
    const Discretization1D d(g, make_upa_system(UpaParameters{}));
    const auto w = preset_state(g);
    std::vector<double> out(w.size());
    for (auto _ : state) {
        d.advection(w, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Advection)->Arg(1000)->Arg(4000);

void BM_BandedLU(benchmark::State& state) {
    const Grid1D g = Grid1D::uniform(0.0, 5.0, static_cast<std::size_t>(state.range(0)));
    const Discretization1D d(g, make_upa_system(UpaParameters{}));
    const auto w = preset_state(g);
    std::vector<double> x(w.size());
    for (auto _ : state) {
        const ShiftedOperator1D op(d, 0.05, w);
        op.solve(w, x);
        benchmark::DoNotOptimize(x.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BandedLU)->Arg(1000)->Arg(4000);

void BM_Imex3Step(benchmark::State& state) {
    const Grid1D g = Grid1D::uniform(0.0, 5.0, static_cast<std::size_t>(state.range(0)));
    Problem1D p(Discretization1D(g, make_upa_system(UpaParameters{})));
    const auto w0 = preset_state(g);
    TimeIntegrator integ(Method::Imex3);
    for (auto _ : state) {
        std::vector<double> w = w0;
        benchmark::DoNotOptimize(integ.advance(p, w, 0.0, 1.0));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Imex3Step)->Arg(1000)->Arg(4000);

void BM_Adapt(benchmark::State& state) {
    const Grid1D g = Grid1D::uniform(0.0, 5.0, 400);
    RunConfig c = preset_config(PresetId::I);
    const auto w = initial_state_1d(c, g);
    const SpeciesSystem sys = make_upa_system(c.upa);
    for (auto _ : state) benchmark::DoNotOptimize(adapt(g, w, sys, c.amr_config));
}
BENCHMARK(BM_Adapt);

}  // namespace
BENCHMARK_MAIN();
