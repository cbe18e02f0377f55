#pragma once

#include "dimap/auth.hpp"
#include "dimap/config.hpp"
#include "dimap/mapping.hpp"
#include "dimap/metrics.hpp"
#include "dimap/tracking.hpp"

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace dimap::scenarios {

struct BeamLatency {
    double isac_ms = 0.0;   // echo processing only
    double sweep_ms = 0.0;  // codebook sweep + report + feedback
};

BeamLatency beam_access_latency(const LatencyConstants& lat);

double alert_latency_ours_ms(const LatencyConstants& lat);      // echo + one hop
double alert_latency_baseline_ms(const LatencyConstants& lat);  // beacon exchange + confirm + hop

// The closest approaching track; if nothing approaches, the one with the
// smallest time to closest approach under constant velocity.
const tracking::Track* select_most_endangered(std::span<const tracking::Track* const> tracks,
                                              const world::Vec3& observer_position,
                                              const world::Vec3& observer_velocity);

// Inverse-variance combination of two position estimates; writes the fused
// covariance (ca^-1 + cv^-1)^-1 when requested.
world::Vec3 fuse_positions(const world::Vec3& xa, const Eigen::Matrix3d& ca,
                           const world::Vec3& xv, const Eigen::Matrix3d& cv,
                           Eigen::Matrix3d* fused_cov = nullptr);

struct RunResult {
    Metrics metrics;
    EventLog events;
    std::string config_echo;
    // sybil_detection outputs
    std::vector<auth::Verdict> verdicts;
    std::vector<auth::Verdict> baseline_verdicts;
    std::set<auth::Did> truth_attacker_dids;
    std::vector<auth::LocalView> final_views;
    std::map<std::string, channels::Did> did_of_name;
    // emergency_alert outputs: per-method range error series
    std::vector<double> ranging_errors_ad_m;
    std::vector<double> ranging_errors_vd_m;
    std::vector<double> ranging_errors_fused_m;
};

// Deterministic given (config, seed): orchestrates world -> channels ->
// identity -> mapping -> tracking -> auth per epoch and computes the
// kind-specific metrics.
RunResult run_scenario(const ScenarioConfig& cfg);

// emit_report wrapper for a finished run.
void write_run(const RunResult& result, const ScenarioConfig& cfg,
               const std::filesystem::path& out_dir);

}  // namespace dimap::scenarios
