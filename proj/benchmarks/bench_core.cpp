#include <vector>

#include <benchmark/benchmark.h>

#include "zenodd/channel.hpp"
#include "zenodd/linalg.hpp"
#include "zenodd/model.hpp"
#include "zenodd/montecarlo.hpp"
#include "zenodd/protocol.hpp"

using namespace zenodd;

namespace {

void BM_Expm(benchmark::State& state) {
    const ComplexMatrix h = random_traceless_hermitian(state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(expm_i(h, 0.3));
}
BENCHMARK(BM_Expm)->Arg(4)->Arg(16);

void BM_TrajectoryEvolve(benchmark::State& state) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const int n = static_cast<int>(state.range(0));
    const TrajectoryEngine engine(m, set, n);
    const TrajectorySample s = sample_trajectory(set, n, 1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(engine.evolve(s.indices));
}
BENCHMARK(BM_TrajectoryEvolve)->Arg(10)->Arg(100);

void BM_ReducedChoiPurity(benchmark::State& state) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const TrajectoryEngine engine(m, set, 20);
    const Superoperator s = engine.evolve(sample_trajectory(set, 20, 1, 0).indices);
    const ComplexMatrix sigma2 = StatisticParams::pure_zero(2, 2).sigma2;
    for (auto _ : state) benchmark::DoNotOptimize(choi_of_reduced_map(s, sigma2, Subsystem::Two).purity());
}
BENCHMARK(BM_ReducedChoiPurity);

void BM_BruteForceAverage(benchmark::State& state) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_average(m, set, n));
}
BENCHMARK(BM_BruteForceAverage)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_SampleValues(benchmark::State& state) {
    const BipartiteModel m = reference_model();
    const DecouplingSet set = DecouplingSet::pauli();
    const Statistic purity = make_statistic("purity-1", m, StatisticParams::pure_zero(2, 2));
    const MultiStatistic eval = [&](const TrajectoryContext& ctx) { return std::vector<double>{purity.evaluate(ctx)}; };
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_values(m, set, 50, 1000, 7, eval, threads));
}
BENCHMARK(BM_SampleValues)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
