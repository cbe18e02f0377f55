#include "dimap/mapping.hpp"

#include "dimap/rng.hpp"

#include <benchmark/benchmark.h>

using namespace dimap;

namespace {

Eigen::MatrixXd random_cost(int n, std::uint64_t seed) {
    RngStream rng(seed, 1);
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = rng.uniform(0.0, 100.0);
    return c;
}

std::vector<identity::Pid> random_pids(int n, identity::Domain d, std::uint64_t seed) {
    RngStream rng(seed, 2);
    std::vector<identity::Pid> out(n);
    for (auto& p : out) {
        p.domain = d;
        p.position = {rng.uniform(-500, 500), rng.uniform(-500, 500), rng.uniform(50, 150)};
        p.speed_mps = rng.uniform(0, 30);
        p.heading_rad = rng.uniform(-3, 3);
    }
    return out;
}

}  // namespace

static void BM_hungarian(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto cost = random_cost(n, 42);
    for (auto _ : state) benchmark::DoNotOptimize(mapping::hungarian(cost).total_cost);
    state.SetComplexityN(n);
}
BENCHMARK(BM_hungarian)->RangeMultiplier(2)->Range(4, 256)->Complexity(benchmark::oNCubed);

static void BM_map_identities(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto vd = random_pids(n, identity::Domain::VD, 7);
    const auto ad = random_pids(n + n / 4, identity::Domain::AD, 8);
    const auto w = identity::uniform_weights();
    for (auto _ : state) benchmark::DoNotOptimize(mapping::map_identities(vd, ad, w, 0.01));
}
BENCHMARK(BM_map_identities)->Arg(8)->Arg(32)->Arg(128);

static void BM_feature_weights(benchmark::State& state) {
    const auto pids = random_pids(static_cast<int>(state.range(0)), identity::Domain::AD, 9);
    for (auto _ : state) benchmark::DoNotOptimize(identity::feature_weights(pids));
}
BENCHMARK(BM_feature_weights)->Arg(8)->Arg(32)->Arg(128);

BENCHMARK_MAIN();
