#include <benchmark/benchmark.h>

#include "qumera/cones.hpp"
#include "qumera/random.hpp"

using namespace qumera;

static void BM_cone_tensor(benchmark::State& state) {
    MeraSpec spec = random_spec(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(cone_tensor(spec));
}
BENCHMARK(BM_cone_tensor)->Arg(2)->Arg(3)->Arg(4);

static void BM_contract_chain(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    ComplexTensor a({d, d, d, d}), b({d, d, d, d});
    for (cplx& v : a.data()) v = rng.gaussian_cplx();
    for (cplx& v : b.data()) v = rng.gaussian_cplx();
    for (auto _ : state) benchmark::DoNotOptimize(contract(a, b, {{2, 0}, {3, 1}}));
}
BENCHMARK(BM_contract_chain)->Arg(2)->Arg(4)->Arg(8);

static void BM_kraus_set(benchmark::State& state) {
    MeraSpec spec = random_spec(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(kraus_set(spec, Modality::L, Picture::Schroedinger));
}
BENCHMARK(BM_kraus_set)->Arg(2)->Arg(3);
