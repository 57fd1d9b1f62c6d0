// Parallel kernels against their serial references, plus the heavy
// per-step pieces. Thread count follows CRFLOW_THREADS / OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include "crflow/elliptic.hpp"
#include "crflow/geometry.hpp"
#include "crflow/operators.hpp"
#include "crflow/parallel.hpp"
#include "crflow/presets.hpp"
#include "crflow/reference.hpp"

using namespace crflow;

namespace {

Grid grid_of(const benchmark::State& st) { return Grid::cube(static_cast<int>(st.range(0)), 1.0, 4); }

void BM_Laplacian(benchmark::State& st) {
    const Grid g = grid_of(st);
    const Geometry geo = make_geometry(random_smooth_metric(g, 1));
    const ScalarField phi = random_smooth_scalar(g, 2);
    for (auto _ : st) benchmark::DoNotOptimize(laplacian(geo, phi));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

void BM_LaplacianReference(benchmark::State& st) {
    const Grid g = grid_of(st);
    const Geometry geo = make_geometry(random_smooth_metric(g, 1));
    const ScalarField phi = random_smooth_scalar(g, 2);
    for (auto _ : st) benchmark::DoNotOptimize(reference::laplacian(geo, phi));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}

void BM_Curvature(benchmark::State& st) {
    const MetricField m = random_smooth_metric(grid_of(st), 1);
    for (auto _ : st) benchmark::DoNotOptimize(make_geometry(m));
    st.SetItemsProcessed(st.iterations() * static_cast<long>(m.size()));
}

void BM_Pressure(benchmark::State& st) {
    const Grid g = grid_of(st);
    EllipticConfig cfg;
    const YamabeResult y = yamabe_normalize(perturbed_torus(g, 0.8, 0.05), cfg);
    for (auto _ : st) benchmark::DoNotOptimize(pressure(y.geometry, cfg));
}

}  // namespace

BENCHMARK(BM_Laplacian)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LaplacianReference)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Curvature)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pressure)->Arg(16)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    configure_threads_from_env();
    benchmark::Initialize(&argc, argv);
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
