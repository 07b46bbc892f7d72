#include <benchmark/benchmark.h>

#include "triq/optics.hpp"
#include "triq/oracle.hpp"
#include "triq/protocol_engine.hpp"
#include "triq/protocol_states.hpp"

using namespace triq;

static void BM_SymmetricState(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(symmetric_state(n));
}
BENCHMARK(BM_SymmetricState)->DenseRange(3, 6);

static void BM_BornProbabilities(benchmark::State& state) {
    const PureState psi = symmetric_state(3).state;
    const Basis fb = fourier_basis(3);
    const std::vector<Basis> bases{fb, fb, fb};
    for (auto _ : state) benchmark::DoNotOptimize(born_probabilities(psi, bases));
}
BENCHMARK(BM_BornProbabilities);

static void BM_PartialTrace(benchmark::State& state) {
    const PureState psi = symmetric_state(static_cast<int>(state.range(0))).state;
    for (auto _ : state) benchmark::DoNotOptimize(partial_trace(psi, {0, 1}));
}
BENCHMARK(BM_PartialTrace)->DenseRange(3, 5);

static void BM_Measure(benchmark::State& state) {
    const PureState psi = symmetric_state(3).state;
    const Basis fb = fourier_basis(3);
    const std::vector<std::optional<Basis>> sel{fb, fb, fb};
    std::uint64_t trial = 0;
    for (auto _ : state) {
        Rng rng = trial_rng(1, trial++);
        benchmark::DoNotOptimize(measure(psi, sel, rng));
    }
}
BENCHMARK(BM_Measure);

static void BM_HeraldTripartite(benchmark::State& state) {
    const CouplerUnitary coupler = CouplerUnitary::dft();
    const DetectorAssignment assign;
    for (auto _ : state) benchmark::DoNotOptimize(herald_tripartite(coupler, assign));
}
BENCHMARK(BM_HeraldTripartite);

static void BM_QkdRounds(benchmark::State& state) {
    QkdConfig cfg;
    cfg.n_trials = state.range(0);
    cfg.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_qkd(cfg));
    state.SetItemsProcessed(state.iterations() * cfg.n_trials);
}
BENCHMARK(BM_QkdRounds)->Arg(1000)->Arg(10000);

static void BM_SecretSharingRounds(benchmark::State& state) {
    SecretSharingConfig cfg;
    cfg.n_trials = state.range(0);
    cfg.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_secret_sharing(cfg));
    state.SetItemsProcessed(state.iterations() * cfg.n_trials);
}
BENCHMARK(BM_SecretSharingRounds)->Arg(1000)->Arg(10000);

static void BM_OracleConstants(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(compute_oracle_constants());
}
BENCHMARK(BM_OracleConstants);

BENCHMARK_MAIN();
