#include "thoraxfem/assembly.hpp"
#include "thoraxfem/materials.hpp"
#include "thoraxfem/phantom.hpp"
#include "thoraxfem/solver.hpp"
#include "thoraxfem/stress.hpp"

#include <benchmark/benchmark.h>

using namespace tfem;

namespace {

Mesh bench_bar(int n)
{
    return gen_bar({1.0, 0.5, 0.5, n, n / 2, n / 2});
}

RegionStiffness heart_region()
{
    RegionStiffness regions;
    regions.elasticity[1] = elasticity_matrix(Material{"Myocardium", 1e6, 0.3, 2000.0});
    return regions;
}

void BM_GenBar(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(bench_bar(n));
    }
}
BENCHMARK(BM_GenBar)->Arg(8)->Arg(16)->Arg(32);

void BM_GenPhantom(benchmark::State& state)
{
    ThoraxPhantomSpec spec;
    spec.h = 0.3 / static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(gen_thorax_phantom(spec));
    }
}
BENCHMARK(BM_GenPhantom)->Arg(15)->Arg(30);

void BM_AssembleStiffness(benchmark::State& state)
{
    const Mesh mesh = bench_bar(static_cast<int>(state.range(0)));
    const RegionStiffness regions = heart_region();
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_stiffness(mesh, regions));
    }
    state.SetItemsProcessed(state.iterations() * mesh.num_tets());
}
BENCHMARK(BM_AssembleStiffness)->Arg(8)->Arg(16)->Arg(32);

void BM_Matvec(benchmark::State& state)
{
    const Mesh mesh = bench_bar(static_cast<int>(state.range(0)));
    const CsrMatrix k = assemble_stiffness(mesh, heart_region());
    std::vector<double> x(k.n, 1.0);
    std::vector<double> y(k.n, 0.0);
    for (auto _ : state) {
        k.multiply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * k.nnz());
}
BENCHMARK(BM_Matvec)->Arg(16)->Arg(32);

void BM_CgSolveBar(benchmark::State& state)
{
    const Mesh mesh = bench_bar(static_cast<int>(state.range(0)));
    CsrMatrix k = assemble_stiffness(mesh, heart_region());

    std::vector<TractionPatch> patches(1);
    patches[0].select = Selector::make_facet(2);
    patches[0].total_force = Vec3(0, 0, -1.0);
    std::vector<DirichletSet> sets(1);
    sets[0].select = Selector::make_facet(1);

    const std::vector<double> f = assemble_traction(mesh, patches);
    const SparseSystem sys = apply_dirichlet(k, f, resolve_dirichlet(mesh, sets));
    SolverSettings settings;
    settings.tolerance = 1e-8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cg_solve(sys.reduced_matrix, sys.reduced_load, settings));
    }
}
BENCHMARK(BM_CgSolveBar)->Arg(8)->Arg(16);

void BM_StressRecovery(benchmark::State& state)
{
    const Mesh mesh = bench_bar(static_cast<int>(state.range(0)));
    const RegionStiffness regions = heart_region();
    const std::vector<char> active(mesh.tets.size(), 1);
    std::vector<double> u(3 * mesh.num_nodes());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 1e-5 * std::sin(double(i));
    for (auto _ : state) {
        benchmark::DoNotOptimize(recover_stress(mesh, regions, active, u, Vec3::UnitZ()));
    }
    state.SetItemsProcessed(state.iterations() * mesh.num_tets());
}
BENCHMARK(BM_StressRecovery)->Arg(16)->Arg(32);

void BM_VonMises(benchmark::State& state)
{
    Vec6 s;
    s << 1e4, -3e4, 5e3, 2e3, -1e3, 4e3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(von_mises(s));
        benchmark::DoNotOptimize(principal_stresses(s));
    }
}
BENCHMARK(BM_VonMises);

} // namespace

BENCHMARK_MAIN();
