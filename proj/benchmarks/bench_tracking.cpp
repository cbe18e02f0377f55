#include "dimap/tracking.hpp"

#include "dimap/rng.hpp"

#include <benchmark/benchmark.h>

using namespace dimap;

namespace {

std::vector<tracking::CartesianMeasurement> scan_of(int n, double t, std::uint64_t seed) {
    RngStream rng(seed, 3);
    std::vector<tracking::CartesianMeasurement> out(n);
    for (int i = 0; i < n; ++i) {
        out[i].position = {200.0 * i + rng.gaussian(0, 0.5), rng.gaussian(0, 0.5),
                           100.0 + rng.gaussian(0, 0.5)};
        out[i].covariance = Eigen::Matrix3d::Identity() * 0.25;
        out[i].time_s = t;
    }
    return out;
}

}  // namespace

static void BM_ucm_convert(benchmark::State& state) {
    channels::VdMeasurement m;
    m.range_m = 180.0;
    m.azimuth_rad = 0.6;
    m.elevation_rad = 0.15;
    m.var_range = 0.25;
    m.var_azimuth = m.var_elevation = 2.89e-4;
    const world::Vec3 obs(10, 20, 100);
    for (auto _ : state) benchmark::DoNotOptimize(tracking::ucm_convert(m, obs));
}
BENCHMARK(BM_ucm_convert);

static void BM_kf_predict_update(benchmark::State& state) {
    tracking::FilterParams fp;
    tracking::Track t = tracking::spawn_track(scan_of(1, 0.0, 1)[0], 1, fp);
    double time = 0.0;
    for (auto _ : state) {
        time += 0.05;
        t = tracking::kf_predict(t, 0.05, fp);
        auto z = scan_of(1, time, 2)[0];
        z.time_s = time;
        t = tracking::kf_update(t, z);
        benchmark::DoNotOptimize(t.covariance);
    }
}
BENCHMARK(BM_kf_predict_update);

static void BM_associate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    tracking::FilterParams fp;
    tracking::GateParams gate;
    std::vector<tracking::Track> tracks;
    const auto scan0 = scan_of(n, 0.0, 4);
    for (int i = 0; i < n; ++i) tracks.push_back(tracking::spawn_track(scan0[i], i + 1, fp));
    const auto scan1 = scan_of(n, 0.05, 5);
    for (auto _ : state) benchmark::DoNotOptimize(tracking::associate(tracks, scan1, gate));
}
BENCHMARK(BM_associate)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

static void BM_full_scan_cycle(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    tracking::TrackStore store({}, {});
    double time = 0.0;
    for (auto _ : state) {
        time += 0.05;
        store.process_scan(scan_of(n, time, 6), time);
    }
    benchmark::DoNotOptimize(store.tracks());
}
BENCHMARK(BM_full_scan_cycle)->Arg(4)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
