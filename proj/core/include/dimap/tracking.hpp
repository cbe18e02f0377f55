#pragma once

#include "dimap/channels.hpp"
#include "dimap/identity.hpp"
#include "dimap/world.hpp"

#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dimap::tracking {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

struct CartesianMeasurement {
    world::Vec3 position = world::Vec3::Zero();
    Mat3 covariance = Mat3::Identity();
    double radial_velocity_mps = 0.0;  // carried, not fused into the state
    double time_s = 0.0;
    identity::RotorClass rotor_class = identity::RotorClass::Quad;
    world::NodeId true_source = -1;  // ground truth, scoring only
};

// Debiased polar->Cartesian conversion. The raw conversion has a
// multiplicative bias of exp(-var/2) per noisy angle factor; each coordinate
// is scaled by the inverse so the converted mean equals the true position.
// Covariance is first-order propagation with the same scaling.
CartesianMeasurement ucm_convert(const channels::VdMeasurement& m,
                                 const world::Vec3& observer_position);

enum class TrackStatus { Tentative, Confirmed, Coasting, Dead };
const char* to_string(TrackStatus s);

struct TrackHistoryEntry {
    double time_s = 0.0;
    world::Vec3 position = world::Vec3::Zero();
    Mat3 pos_cov = Mat3::Identity();
};

inline constexpr std::size_t kTrackHistoryCap = 64;
inline constexpr std::size_t kRotorHistoryCap = 32;

struct Track {
    int track_id = 0;
    Vec6 state = Vec6::Zero();  // position (m), velocity (m/s)
    Mat6 covariance = Mat6::Identity();
    TrackStatus status = TrackStatus::Tentative;
    int hit_streak = 0;
    int miss_streak = 0;
    int total_hits = 0;
    std::optional<channels::Did> associated_did;
    std::deque<identity::RotorClass> rotor_history;
    std::deque<TrackHistoryEntry> history;
    double time_s = 0.0;         // state reference time
    double last_update_s = 0.0;

    world::Vec3 position() const { return state.head<3>(); }
    world::Vec3 velocity() const { return state.tail<3>(); }
    Mat3 position_cov() const { return covariance.topLeftCorner<3, 3>(); }
    identity::RotorClass majority_rotor_class() const;
};

struct GateParams {
    double gate_radius_m = 15.0;
    int confirm_hits = 3;
    int delete_misses = 5;

    void validate() const;
};

struct FilterParams {
    double process_noise_q = 1.0;  // white-acceleration spectral density, m^2/s^3
    double staleness_s = 0.5;      // Confirmed -> Coasting beyond this without updates
    double initial_velocity_var = 400.0;
};

// Constant-velocity transition with continuous white-noise acceleration.
void cv_transition(double dt, double q, Mat6& F, Mat6& Q);

Track kf_predict(const Track& t, double dt, const FilterParams& p);
Track kf_update(const Track& t, const CartesianMeasurement& z);

struct Prediction {
    world::Vec3 position = world::Vec3::Zero();
    world::Vec3 velocity = world::Vec3::Zero();
    double azimuth_rad = 0.0;    // from the given observer
    double elevation_rad = 0.0;
};

// Side-effect-free k-step lookahead (k in {1,2}) for beam pointing.
Prediction predict_ahead(const Track& t, int k, double dt, const world::Vec3& observer_position);

struct AssociationResult {
    std::vector<std::pair<int, int>> pairs;  // (track index, measurement index)
    std::vector<int> unmatched_tracks;
    std::vector<int> unmatched_measurements;
};

// Greedy gated nearest neighbor: measurements in input order, each binds to
// the nearest unconsumed track within the gate.
AssociationResult associate(std::span<const Track> tracks,
                            std::span<const CartesianMeasurement> measurements,
                            const GateParams& gate);

Track spawn_track(const CartesianMeasurement& z, int track_id, const FilterParams& p);

// Lifecycle: update matched tracks, age missed ones, spawn tentatives from
// unmatched measurements, drop dead tracks.
std::vector<Track> manage_tracks(const std::vector<Track>& predicted,
                                 const AssociationResult& assoc,
                                 std::span<const CartesianMeasurement> measurements,
                                 const GateParams& gate, const FilterParams& filt,
                                 int& next_track_id);

// Track store owned by one simulation instance; sequential use only.
class TrackStore {
public:
    TrackStore() = default;
    TrackStore(GateParams gate, FilterParams filt) : gate_(gate), filt_(filt) {}

    // Predict all tracks to time_s, associate, update, manage lifecycle.
    AssociationResult process_scan(std::span<const CartesianMeasurement> measurements,
                                   double time_s);

    std::vector<Track>& tracks() { return tracks_; }
    const std::vector<Track>& tracks() const { return tracks_; }
    std::vector<const Track*> confirmed() const;
    Track* find(int track_id);
    const GateParams& gate() const { return gate_; }
    const FilterParams& filter_params() const { return filt_; }

private:
    GateParams gate_{};
    FilterParams filt_{};
    std::vector<Track> tracks_;
    int next_track_id_ = 1;
    double last_scan_s_ = -1.0;
};

}  // namespace dimap::tracking
