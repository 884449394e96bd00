#include <benchmark/benchmark.h>

#include <limits>

#include "ctl/gw.hpp"
#include "ctl/levy.hpp"
#include "ctl/parallel.hpp"

using namespace ctl;

namespace {

double extinction(std::size_t, Rng& rng) {
    return run_gw(1, std::numeric_limits<double>::infinity(), rng).extinction_time;
}

void BM_ReplicateParallel(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(replicate(static_cast<std::size_t>(st.range(0)), 1, extinction));
}
BENCHMARK(BM_ReplicateParallel)->Arg(10000)->Arg(100000);

void BM_ReplicateSerial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(replicate_serial(static_cast<std::size_t>(st.range(0)), 1, extinction));
}
BENCHMARK(BM_ReplicateSerial)->Arg(10000)->Arg(100000);

void BM_ScaleFunctionFft(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(scale_function(static_cast<double>(st.range(0)), 0.01));
}
BENCHMARK(BM_ScaleFunctionFft)->Arg(50)->Arg(200);

void BM_ScaleFunctionDirect(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(scale_function_reference(static_cast<double>(st.range(0)), 0.01));
}
BENCHMARK(BM_ScaleFunctionDirect)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
