#include <benchmark/benchmark.h>

#include "qumera/observables.hpp"
#include "qumera/random.hpp"

using namespace qumera;

static void BM_transfer_matrix(benchmark::State& state) {
    MeraSpec spec = random_spec(static_cast<std::size_t>(state.range(0)), 5);
    Channel ch = averaged_channel(spec);
    for (auto _ : state) benchmark::DoNotOptimize(transfer_matrix(ch));
}
BENCHMARK(BM_transfer_matrix)->Arg(2)->Arg(3);

static void BM_spectrum(benchmark::State& state) {
    MeraSpec spec = random_spec(static_cast<std::size_t>(state.range(0)), 5);
    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    for (auto _ : state) benchmark::DoNotOptimize(spectrum(tm));
}
BENCHMARK(BM_spectrum)->Arg(2)->Arg(3);

static void BM_transfer_power(benchmark::State& state) {
    MeraSpec spec = random_spec(2, 5);
    TransferMatrix tm = transfer_matrix(averaged_channel(spec));
    for (auto _ : state)
        benchmark::DoNotOptimize(power(tm, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_transfer_power)->Arg(8)->Arg(32);

static void BM_symmetric_expectation(benchmark::State& state) {
    MeraSpec spec = random_spec(2, 5);
    Rng rng(1);
    Eigen::MatrixXcd h = rng.hermitian(8);
    for (auto _ : state)
        benchmark::DoNotOptimize(symmetric_expectation(spec, static_cast<std::size_t>(state.range(0)), h));
}
BENCHMARK(BM_symmetric_expectation)->Arg(16)->Arg(1024);
