// Serial vs OpenMP subhead resolution, and the incremental sorter vs the
// from-scratch replay it is checked against.

#include <benchmark/benchmark.h>

#include "sata/oracle.hpp"
#include "sata/plan.hpp"

namespace {

sata::SelectiveMask preset_mask(const char* name) {
    sata::GeneratorSpec spec;
    spec.preset = name;
    spec.locality = sata::Locality::banded(32);
    spec.noise = 0.1;
    spec.seed = 1;
    return sata::generate_mask(spec);
}

void build(benchmark::State& state, sata::Execution exec) {
    const auto mask = preset_mask("kvt-base");
    sata::PlanConfig cfg;
    const auto tile = static_cast<std::size_t>(state.range(0));
    if (tile != 0) cfg.tile = tile;
    cfg.zero_skip = true;
    for (auto _ : state) benchmark::DoNotOptimize(sata::build_subheads(mask, cfg, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mask.n_heads));
}

void BM_BuildSubheadsSerial(benchmark::State& state) { build(state, sata::Execution::serial); }
void BM_BuildSubheadsParallel(benchmark::State& state) { build(state, sata::Execution::parallel); }
BENCHMARK(BM_BuildSubheadsSerial)->Arg(0)->Arg(22)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildSubheadsParallel)->Arg(0)->Arg(22)->Unit(benchmark::kMillisecond);

sata::HeadMask head_of_size(std::size_t n) {
    sata::GeneratorSpec spec;
    spec.seq_len = n;
    spec.k_per_query = n / 4 + 1;
    spec.n_heads = 1;
    spec.locality = sata::Locality::block(4);
    spec.noise = 0.1;
    return sata::generate_mask(spec).heads[0];
}

void BM_SortKeysIncremental(benchmark::State& state) {
    const auto head = head_of_size(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sata::sort_keys(head));
}

void BM_SortKeysReplay(benchmark::State& state) {
    const auto head = head_of_size(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sata::oracle::replay_sort(head));
}

BENCHMARK(BM_SortKeysIncremental)->Arg(32)->Arg(64)->Arg(198);
BENCHMARK(BM_SortKeysReplay)->Arg(32)->Arg(64)->Arg(198);

}  // namespace

BENCHMARK_MAIN();
