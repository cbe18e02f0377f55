#include "dimap/auth.hpp"

#include "dimap/rng.hpp"

#include <benchmark/benchmark.h>

using namespace dimap;

namespace {

std::vector<std::pair<int, int>> random_edges(int n, double p, std::uint64_t seed) {
    RngStream rng(seed, 7);
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.bernoulli(p)) edges.emplace_back(i, j);
    return edges;
}

}  // namespace

static void BM_bron_kerbosch(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto edges = random_edges(n, 0.5, 11);
    for (auto _ : state) benchmark::DoNotOptimize(auth::bron_kerbosch(n, edges));
}
BENCHMARK(BM_bron_kerbosch)->Arg(8)->Arg(16)->Arg(24)->Arg(32);

static void BM_mmse_check(benchmark::State& state) {
    tracking::FilterParams fp;
    tracking::CartesianMeasurement z;
    z.position = {0, 0, 0};
    z.covariance = Eigen::Matrix3d::Identity() * 0.25;
    tracking::Track track = tracking::spawn_track(z, 1, fp);
    track.status = tracking::TrackStatus::Confirmed;
    for (int k = 1; k < 32; ++k)
        track.history.push_back({0.05 * k, {0.5 * k, 0, 0}, Eigen::Matrix3d::Identity() * 0.2});

    RngStream rng(13, 8);
    std::vector<auth::ClaimSample> window;
    for (int k = 0; k < 10; ++k)
        window.push_back({{0.5 * k + rng.gaussian(0, 2), rng.gaussian(0, 2), rng.gaussian(0, 2)},
                          2.0,
                          0.05 * k});
    for (auto _ : state) benchmark::DoNotOptimize(auth::mmse_check(window, track, 11.34));
}
BENCHMARK(BM_mmse_check);

static void BM_merge_views(benchmark::State& state) {
    const int n_dids = static_cast<int>(state.range(0));
    std::vector<auth::LocalView> views;
    for (int owner = 1; owner <= 6; ++owner) {
        std::vector<auth::DidEpochObservation> observations;
        for (int d = 0; d < n_dids; ++d) {
            auth::DidEpochObservation o;
            o.did = channels::Did{static_cast<std::uint64_t>(d)};
            o.matched = true;
            o.track_id = d;
            o.mmse = auth::MmseResult{1.0, d % 7 != 6};
            observations.push_back(o);
        }
        views.push_back(auth::build_local_view(owner, observations));
    }
    for (auto _ : state) benchmark::DoNotOptimize(auth::merge_views(views, 2));
}
BENCHMARK(BM_merge_views)->Arg(8)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
