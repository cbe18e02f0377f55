#pragma once

#include "dimap/identity.hpp"
#include "dimap/rng.hpp"
#include "dimap/world.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace dimap::channels {

// Digital identity: stands for IP/MAC address, keys, RF fingerprint.
struct Did {
    std::uint64_t address = 0;
    auto operator<=>(const Did&) const = default;
};

struct WitnessReport {
    Did witness_did;
    Did subject_did;
    identity::Pid measured_pid;  // always VD
    double time_s = 0.0;
};

inline constexpr std::size_t kMaxWitnessReports = 8;

struct Beacon {
    Did sender_did;
    world::Vec3 claimed_position = world::Vec3::Zero();
    world::Vec3 claimed_velocity = world::Vec3::Zero();
    world::WingType claimed_wing_type = world::WingType::Rotary;
    int claimed_rotor_count = 4;
    std::vector<WitnessReport> witness_reports;
    double emit_time_s = 0.0;
    world::NodeId true_origin = -1;  // ground truth, scoring only
};

struct AdReception {
    Beacon beacon;
    world::NodeId receiver = -1;
    double receive_time_s = 0.0;
};

struct VdMeasurement {
    world::NodeId observer = -1;
    double range_m = 0.0;
    double azimuth_rad = 0.0;
    double elevation_rad = 0.0;
    double radial_velocity_mps = 0.0;
    identity::RotorClass rotor_class = identity::RotorClass::Quad;
    double var_range = 0.0;
    double var_azimuth = 0.0;
    double var_elevation = 0.0;
    double var_speed = 0.0;
    double time_s = 0.0;
    world::NodeId true_source = -1;  // ground truth, scoring only
};

struct SensorConfig {
    double comm_range_m = 800.0;
    double sense_range_m = 300.0;
    double t_ad_s = 0.2;    // beacon period
    double t_vd_s = 0.05;   // sensing period, refreshes at least as often as AD
    double sigma_gnss_m = 2.0;
    double sigma_r_m = 0.5;
    double sigma_angle_rad = 0.017;
    double sigma_v_mps = 0.1;
    double sigma_ad_speed_mps = 0.2;     // claim uncertainty assumed by receivers
    double sigma_ad_heading_rad = 0.05;  // claim uncertainty assumed by receivers
    double p_detect = 0.95;
    double rotor_confusion_prob = 0.05;
    bool clutter_enabled = false;  // no false alarms by default
    double hop_latency_s = 0.0023;

    void validate() const;
};

// What one transmitted identity claims about itself. Legitimate nodes claim
// their own (GNSS-noised) state; malicious nodes fabricate these per identity.
struct IdentityClaim {
    Did did;
    world::Vec3 claimed_position = world::Vec3::Zero();
    world::Vec3 claimed_velocity = world::Vec3::Zero();
    world::WingType claimed_wing_type = world::WingType::Rotary;
    int claimed_rotor_count = 4;
};

// Beacons emitted by node_id at the current AD epoch. A legitimate node emits
// one beacon for its own identity; a malicious node emits one beacon per
// identity it operates (claims supplied by the attack module). Phantoms throw.
std::vector<Beacon> emit_beacons(const world::WorldState& w, world::NodeId node_id,
                                 const SensorConfig& cfg, Did own_did,
                                 std::span<const IdentityClaim> malicious_claims,
                                 std::span<const WitnessReport> witness_reports,
                                 RngStream& rng);

// Every beacon reaches every non-phantom node within comm range of its true
// origin, one hop of latency later.
std::vector<AdReception> deliver(const world::WorldState& w, std::span<const Beacon> beacons,
                                 const SensorConfig& cfg);

// Echo measurements of physically real neighbors. Phantoms never echo.
std::vector<VdMeasurement> sense(const world::WorldState& w, world::NodeId observer_id,
                                 const SensorConfig& cfg, RngStream& rng);

}  // namespace dimap::channels
