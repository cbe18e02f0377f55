#include "dimap/tracking.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dimap::tracking {

namespace {
constexpr double kMaxAngleVar = 0.25;  // rad^2, small-angle regime for debiasing
}

const char* to_string(TrackStatus s) {
    switch (s) {
        case TrackStatus::Tentative: return "tentative";
        case TrackStatus::Confirmed: return "confirmed";
        case TrackStatus::Coasting: return "coasting";
        case TrackStatus::Dead: return "dead";
    }
    return "?";
}

void GateParams::validate() const {
    if (!(gate_radius_m > 0.0) || confirm_hits <= 0 || delete_misses <= 0)
        throw std::invalid_argument("GateParams: all parameters must be positive");
}

identity::RotorClass Track::majority_rotor_class() const {
    std::array<int, identity::kNumRotorClasses> counts{};
    for (auto c : rotor_history) counts[static_cast<int>(c)]++;
    int best = static_cast<int>(identity::RotorClass::Other);
    int best_count = -1;
    for (int i = 0; i < identity::kNumRotorClasses; ++i) {
        if (counts[i] > best_count) {
            best_count = counts[i];
            best = i;
        }
    }
    return static_cast<identity::RotorClass>(best);
}

CartesianMeasurement ucm_convert(const channels::VdMeasurement& m,
                                 const world::Vec3& observer_position) {
    if (m.var_azimuth >= kMaxAngleVar || m.var_elevation >= kMaxAngleVar)
        throw std::invalid_argument("ucm_convert: angle noise too large for UCM");

    const double r = m.range_m;
    const double ca = std::cos(m.azimuth_rad), sa = std::sin(m.azimuth_rad);
    const double ce = std::cos(m.elevation_rad), se = std::sin(m.elevation_rad);

    // E[cos(theta + n)] = cos(theta) exp(-var/2) for Gaussian n, so the raw
    // conversion is biased low by one factor per noisy angle.
    const double lambda_xy = std::exp(0.5 * (m.var_azimuth + m.var_elevation));
    const double lambda_z = std::exp(0.5 * m.var_elevation);

    CartesianMeasurement out;
    out.position = observer_position +
                   world::Vec3(lambda_xy * r * ce * ca, lambda_xy * r * ce * sa, lambda_z * r * se);

    // first-order covariance: J diag(var_r, var_az, var_el) J^T, then the
    // debiasing scale applied per axis
    Eigen::Matrix3d jac;
    jac << ce * ca, -r * ce * sa, -r * se * ca,
           ce * sa,  r * ce * ca, -r * se * sa,
           se,       0.0,          r * ce;
    Eigen::Vector3d noise(std::max(m.var_range, 1e-12), std::max(m.var_azimuth, 1e-12),
                          std::max(m.var_elevation, 1e-12));
    const Eigen::Matrix3d raw_cov = jac * noise.asDiagonal() * jac.transpose();
    const Eigen::Vector3d scale(lambda_xy, lambda_xy, lambda_z);
    out.covariance = scale.asDiagonal() * raw_cov * scale.asDiagonal();

    out.radial_velocity_mps = m.radial_velocity_mps;
    out.time_s = m.time_s;
    out.rotor_class = m.rotor_class;
    out.true_source = m.true_source;
    return out;
}

void cv_transition(double dt, double q, Mat6& F, Mat6& Q) {
    F.setIdentity();
    F(0, 3) = dt;
    F(1, 4) = dt;
    F(2, 5) = dt;

    const double dt2 = dt * dt, dt3 = dt2 * dt;
    Q.setZero();
    for (int i = 0; i < 3; ++i) {
        Q(i, i) = q * dt3 / 3.0;
        Q(i + 3, i + 3) = q * dt;
        Q(i, i + 3) = Q(i + 3, i) = q * dt2 / 2.0;
    }
}

Track kf_predict(const Track& t, double dt, const FilterParams& p) {
    if (dt < 0.0) throw std::invalid_argument("kf_predict: dt must be >= 0");
    Track out = t;
    if (dt == 0.0) return out;

    Mat6 F, Q;
    cv_transition(dt, p.process_noise_q, F, Q);
    out.state = F * t.state;
    out.covariance = F * t.covariance * F.transpose() + Q;
    out.time_s = t.time_s + dt;
    if (out.status == TrackStatus::Confirmed && out.time_s - out.last_update_s > p.staleness_s)
        out.status = TrackStatus::Coasting;
    return out;
}

Track kf_update(const Track& t, const CartesianMeasurement& z) {
    if (z.time_s < t.last_update_s)
        throw std::invalid_argument("kf_update: measurement predates last update");
    Eigen::LLT<Mat3> llt(z.covariance);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("kf_update: measurement covariance not positive definite");

    // position-only linear update, Joseph form to keep the covariance SPD
    Eigen::Matrix<double, 3, 6> H = Eigen::Matrix<double, 3, 6>::Zero();
    H.leftCols<3>().setIdentity();

    const Eigen::Vector3d innovation = z.position - t.state.head<3>();
    const Mat3 S = H * t.covariance * H.transpose() + z.covariance;
    const Eigen::Matrix<double, 6, 3> K = t.covariance * H.transpose() * S.inverse();

    Track out = t;
    out.state = t.state + K * innovation;
    const Mat6 IKH = Mat6::Identity() - K * H;
    out.covariance = IKH * t.covariance * IKH.transpose() + K * z.covariance * K.transpose();
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    out.time_s = z.time_s;
    out.last_update_s = z.time_s;

    out.rotor_history.push_back(z.rotor_class);
    if (out.rotor_history.size() > kRotorHistoryCap) out.rotor_history.pop_front();
    out.history.push_back({z.time_s, out.state.head<3>(), out.covariance.topLeftCorner<3, 3>()});
    if (out.history.size() > kTrackHistoryCap) out.history.pop_front();
    return out;
}

Prediction predict_ahead(const Track& t, int k, double dt, const world::Vec3& observer_position) {
    if (t.status != TrackStatus::Confirmed && t.status != TrackStatus::Coasting)
        throw std::invalid_argument("predict_ahead: unconfirmed track");
    if (k != 1 && k != 2) throw std::invalid_argument("predict_ahead: k must be 1 or 2");

    Prediction p;
    p.velocity = t.velocity();
    p.position = t.position() + static_cast<double>(k) * dt * t.velocity();
    const world::Vec3 rel = p.position - observer_position;
    const double range = rel.norm();
    p.azimuth_rad = std::atan2(rel.y(), rel.x());
    p.elevation_rad = range > 0.0 ? std::asin(std::clamp(rel.z() / range, -1.0, 1.0)) : 0.0;
    return p;
}

AssociationResult associate(std::span<const Track> tracks,
                            std::span<const CartesianMeasurement> measurements,
                            const GateParams& gate) {
    AssociationResult res;
    std::vector<bool> track_used(tracks.size(), false);
    std::vector<bool> meas_used(measurements.size(), false);

    for (std::size_t mi = 0; mi < measurements.size(); ++mi) {
        double best = std::numeric_limits<double>::infinity();
        int best_track = -1;
        for (std::size_t ti = 0; ti < tracks.size(); ++ti) {
            if (track_used[ti]) continue;
            const double d = (tracks[ti].position() - measurements[mi].position).norm();
            if (d <= gate.gate_radius_m && d < best) {
                best = d;
                best_track = static_cast<int>(ti);
            }
        }
        if (best_track >= 0) {
            track_used[best_track] = true;
            meas_used[mi] = true;
            res.pairs.emplace_back(best_track, static_cast<int>(mi));
        }
    }
    for (std::size_t ti = 0; ti < tracks.size(); ++ti)
        if (!track_used[ti]) res.unmatched_tracks.push_back(static_cast<int>(ti));
    for (std::size_t mi = 0; mi < measurements.size(); ++mi)
        if (!meas_used[mi]) res.unmatched_measurements.push_back(static_cast<int>(mi));
    return res;
}

Track spawn_track(const CartesianMeasurement& z, int track_id, const FilterParams& p) {
    Track t;
    t.track_id = track_id;
    t.state.head<3>() = z.position;
    t.state.tail<3>().setZero();
    t.covariance.setZero();
    t.covariance.topLeftCorner<3, 3>() = z.covariance;
    t.covariance.bottomRightCorner<3, 3>() = Mat3::Identity() * p.initial_velocity_var;
    t.status = TrackStatus::Tentative;
    t.hit_streak = 1;
    t.total_hits = 1;
    t.time_s = z.time_s;
    t.last_update_s = z.time_s;
    t.rotor_history.push_back(z.rotor_class);
    t.history.push_back({z.time_s, z.position, z.covariance});
    return t;
}

std::vector<Track> manage_tracks(const std::vector<Track>& predicted,
                                 const AssociationResult& assoc,
                                 std::span<const CartesianMeasurement> measurements,
                                 const GateParams& gate, const FilterParams& filt,
                                 int& next_track_id) {
    std::vector<Track> out;
    out.reserve(predicted.size() + assoc.unmatched_measurements.size());

    std::vector<int> matched_meas(predicted.size(), -1);
    for (const auto& [ti, mi] : assoc.pairs) matched_meas[ti] = mi;

    for (std::size_t ti = 0; ti < predicted.size(); ++ti) {
        if (matched_meas[ti] >= 0) {
            Track t = kf_update(predicted[ti], measurements[matched_meas[ti]]);
            t.hit_streak += 1;
            t.total_hits += 1;
            t.miss_streak = 0;
            if (t.status == TrackStatus::Tentative && t.hit_streak >= gate.confirm_hits)
                t.status = TrackStatus::Confirmed;
            else if (t.status == TrackStatus::Coasting)
                t.status = TrackStatus::Confirmed;
            out.push_back(std::move(t));
        } else {
            Track t = predicted[ti];
            t.miss_streak += 1;
            t.hit_streak = 0;
            if (t.miss_streak >= gate.delete_misses) continue;  // dead, dropped
            if (t.status == TrackStatus::Confirmed) t.status = TrackStatus::Coasting;
            out.push_back(std::move(t));
        }
    }
    for (int mi : assoc.unmatched_measurements)
        out.push_back(spawn_track(measurements[mi], next_track_id++, filt));
    return out;
}

AssociationResult TrackStore::process_scan(std::span<const CartesianMeasurement> measurements,
                                           double time_s) {
    if (time_s < last_scan_s_)
        throw std::invalid_argument("process_scan: time must be non-decreasing");
    for (auto& t : tracks_) {
        const double dt = time_s - t.time_s;
        if (dt > 0.0) t = kf_predict(t, dt, filt_);
    }
    AssociationResult assoc = associate(tracks_, measurements, gate_);
    tracks_ = manage_tracks(tracks_, assoc, measurements, gate_, filt_, next_track_id_);
    last_scan_s_ = time_s;
    return assoc;
}

std::vector<const Track*> TrackStore::confirmed() const {
    std::vector<const Track*> out;
    for (const auto& t : tracks_)
        if (t.status == TrackStatus::Confirmed || t.status == TrackStatus::Coasting)
            out.push_back(&t);
    return out;
}

Track* TrackStore::find(int track_id) {
    for (auto& t : tracks_)
        if (t.track_id == track_id) return &t;
    return nullptr;
}

}  // namespace dimap::tracking
