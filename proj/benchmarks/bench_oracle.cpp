#include <benchmark/benchmark.h>

#include "qumera/oracle.hpp"
#include "qumera/random.hpp"

using namespace qumera;

static void BM_build_state(benchmark::State& state) {
    MeraSpec spec = random_spec(2, 9);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_state(spec, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_build_state)->Arg(8)->Arg(16);

static void BM_triple_density_oracle(benchmark::State& state) {
    MeraSpec spec = random_spec(2, 9);
    FullState psi = build_state(spec, 16);
    for (auto _ : state) benchmark::DoNotOptimize(triple_density_oracle(psi, 6));
}
BENCHMARK(BM_triple_density_oracle);
