#pragma once

#include "dimap/attacks.hpp"
#include "dimap/channels.hpp"
#include "dimap/tracking.hpp"
#include "dimap/world.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dimap::scenarios {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { BeamManagement, EmergencyAlert, SybilDetection };
const char* to_string(ScenarioKind k);

struct NodeSpec {
    std::string name;
    world::Role role = world::Role::Legitimate;
    world::Vec3 position = world::Vec3::Zero();
    world::Vec3 velocity = world::Vec3::Zero();
    world::WingType wing = world::WingType::Rotary;
    int rotors = 4;
    bool certifier = true;  // evaluates merged verdicts (legitimate nodes only)
    std::vector<world::Vec3> waypoints;
    double waypoint_speed_mps = 0.0;
};

struct Thresholds {
    double sim_min = 0.01;
    double mmse_tau = 11.3449;  // chi-square(3 dof) 0.99 quantile
    int mmse_window_min = 3;
    int mmse_window_cap = 10;
    double gate_radius_m = 15.0;
    int confirm_hits = 3;
    int delete_misses = 5;
    int quorum = 2;
    double process_noise_q = 1.0;
    double staleness_s = 0.5;
    int grace_epochs = 3;  // AD epochs heard before an unseen Did is judged
    double baseline_rho = 0.99;
    double baseline_dist_var_m2 = 4.0;
};

struct LatencyConstants {
    double t_echo_ms = 1.0;
    double t_feedback_ms = 1.594;
    double t_report_ms = 2.0;
    int n_codebook = 8;
    double t_ssb_ms = 0.25;
    double t_hop_ms = 2.3;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::SybilDetection;
    double duration_s = 10.0;
    double dt_s = 0.01;
    std::uint64_t seed = 1;
    std::vector<NodeSpec> nodes;
    channels::SensorConfig sensors;
    std::optional<attacks::AttackConfig> attack;
    Thresholds thresholds;
    LatencyConstants latency;

    void validate() const;  // throws ConfigError with field paths
    int ad_every() const;   // AD period in ticks
    int vd_every() const;   // VD period in ticks
    std::int64_t total_epochs() const;
};

// Flat bracketed-section key=value format; unknown sections or keys are hard
// errors. Sections: scenario, nodes, noise, attack, thresholds, latency.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Fully-resolved round-trippable echo of the configuration.
std::string echo_config(const ScenarioConfig& cfg);

// Numeric field access by dotted path (e.g. "noise.sigma_angle_rad") for
// parameter sweeps. Throws ConfigError on unknown keys.
void set_numeric_field(ScenarioConfig& cfg, const std::string& dotted_key, double value);

}  // namespace dimap::scenarios
