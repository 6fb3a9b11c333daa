#include <benchmark/benchmark.h>

#include "bcp/recursions.hpp"
#include "bcp/simulate.hpp"
#include "validate.hpp"

using namespace bcp;

namespace {

par::Exec exec_of(const benchmark::State& st) { return st.range(0) ? par::Exec::Parallel : par::Exec::Serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "openmp" : "serial"); }

void BM_KilledAsgReplicates(benchmark::State& st)
{
    const ModelParams p{1, 1, 1};
    const auto m = LambdaMeasure::kingman(2);
    for (auto _ : st) benchmark::DoNotOptimize(sim::simulate_killed_asg(m, p, 3, 20000, 7, exec_of(st)));
    label(st);
}
BENCHMARK(BM_KilledAsgReplicates)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Truncated solve dominated by the c_{n,k} row blocks of a beta density.
void BM_CnkRows(benchmark::State& st)
{
    const ModelParams p{1, 0.5, 0.5};
    const auto m = LambdaMeasure::beta(1.5, 2.5);
    for (auto _ : st) benchmark::DoNotOptimize(solve_lambda_fixed_K(m, p, 256, exec_of(st)));
    label(st);
}
BENCHMARK(BM_CnkRows)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Gth(benchmark::State& st)
{
    const MoranParams p{400, 0.5, 0.1, 0.1};
    const int n = p.N;
    std::vector<double> Q(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (i != j) Q[(i - 1) * n + (j - 1)] = moran_rate(p, i, j);
    for (auto _ : st) benchmark::DoNotOptimize(gth_stationary(Q, n, exec_of(st)));
    label(st);
}
BENCHMARK(BM_Gth)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_MoranValidationGrid(benchmark::State& st)
{
    for (auto _ : st) benchmark::DoNotOptimize(validate::moran_grid_sweep(20, exec_of(st)));
    label(st);
}
BENCHMARK(BM_MoranValidationGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_NegativeControlGrid(benchmark::State& st)
{
    for (auto _ : st) benchmark::DoNotOptimize(validate::negative_control_sweep(7, exec_of(st)));
    label(st);
}
BENCHMARK(BM_NegativeControlGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
