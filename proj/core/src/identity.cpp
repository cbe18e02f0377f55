#include "dimap/identity.hpp"

#include "dimap/channels.hpp"
#include "dimap/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dimap::identity {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSigmaFloor = 1e-6;

double combined_sigma(double sa, double sb) {
    return std::max(std::sqrt(sa * sa + sb * sb), kSigmaFloor);
}

// per-feature |delta| for continuous features; exactly symmetric in (a, b)
double feature_delta(const Pid& a, const Pid& b, int feat) {
    switch (feat) {
        case kFeatPosition: return (a.position - b.position).norm();
        case kFeatSpeed: return std::abs(a.speed_mps - b.speed_mps);
        case kFeatHeading: {
            double d = std::fmod(std::abs(a.heading_rad - b.heading_rad), 2.0 * kPi);
            if (d > kPi) d = 2.0 * kPi - d;
            return d;
        }
        default: return 0.0;
    }
}

double feature_sigma(const Pid& p, int feat) {
    switch (feat) {
        case kFeatPosition: return p.sigma_pos_m;
        case kFeatSpeed: return p.sigma_speed_mps;
        case kFeatHeading: return p.sigma_heading_rad;
        default: return 0.0;
    }
}
}  // namespace

RotorClass rotor_class_of(int rotor_count) {
    switch (rotor_count) {
        case 0: return RotorClass::FixedWing;
        case 1:
        case 2: return RotorClass::Bi;
        case 3: return RotorClass::Tri;
        case 4: return RotorClass::Quad;
        case 5:
        case 6: return RotorClass::Hexa;
        case 7:
        case 8: return RotorClass::Octo;
        default: return RotorClass::Other;
    }
}

const char* to_string(RotorClass c) {
    switch (c) {
        case RotorClass::FixedWing: return "fixed_wing";
        case RotorClass::Bi: return "bi";
        case RotorClass::Tri: return "tri";
        case RotorClass::Quad: return "quad";
        case RotorClass::Hexa: return "hexa";
        case RotorClass::Octo: return "octo";
        case RotorClass::Other: return "other";
    }
    return "?";
}

const char* to_string(Domain d) { return d == Domain::AD ? "AD" : "VD"; }

double FeatureWeights::sum() const {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

FeatureWeights uniform_weights() {
    FeatureWeights fw;
    fw.w.fill(1.0 / kNumFeatures);
    return fw;
}

double wrap_angle(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a < 0) a += 2.0 * kPi;
    a -= kPi;
    if (a <= -kPi) a = kPi;
    return a;
}

double angle_diff(double a, double b) { return wrap_angle(a - b); }

FeatureWeights feature_weights(std::span<const Pid> population, const SimilarityParams& params) {
    const std::size_t m = population.size();
    if (m < 2) throw std::invalid_argument("feature_weights: insufficient population");

    std::array<double, kNumFeatures> indistinct{};
    const double pairs = static_cast<double>(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const Pid& a = population[i];
            const Pid& b = population[j];
            for (int f : {kFeatPosition, kFeatSpeed, kFeatHeading}) {
                const double sbar = combined_sigma(feature_sigma(a, f), feature_sigma(b, f));
                if (feature_delta(a, b, f) <= 2.0 * sbar) indistinct[f] += 1.0;
            }
            if (a.wing_type == b.wing_type) indistinct[kFeatWingType] += 1.0;
            if (a.rotor_class == b.rotor_class) indistinct[kFeatRotorClass] += 1.0;
        }
    }

    FeatureWeights fw;
    double total = 0.0;
    for (int f = 0; f < kNumFeatures; ++f) {
        const double prevalence = indistinct[f] / pairs;
        fw.w[f] = (1.0 - prevalence) + params.prevalence_floor;
        total += fw.w[f];
    }
    for (auto& x : fw.w) x /= total;
    return fw;
}

double similarity(const Pid& a, const Pid& b, const FeatureWeights& w,
                  const SimilarityParams& params) {
    double quad = 0.0;
    for (int f : {kFeatPosition, kFeatSpeed, kFeatHeading}) {
        const double sbar = combined_sigma(feature_sigma(a, f), feature_sigma(b, f));
        const double normalized = feature_delta(a, b, f) / sbar;
        quad += w.w[f] * normalized * normalized;
    }
    double s = std::exp(-0.5 * quad);
    if (a.wing_type != b.wing_type) s *= params.kappa_wing;
    if (a.rotor_class != b.rotor_class) s *= params.kappa_rotor;
    return s;
}

Pid extract_pid_ad(const channels::AdReception& reception, const channels::SensorConfig& cfg) {
    const channels::Beacon& b = reception.beacon;
    Pid p;
    p.domain = Domain::AD;
    p.position = b.claimed_position;
    p.speed_mps = b.claimed_velocity.norm();
    p.heading_rad = std::atan2(b.claimed_velocity.y(), b.claimed_velocity.x());
    p.wing_type = b.claimed_wing_type;
    p.rotor_class = rotor_class_of(b.claimed_rotor_count);
    p.sigma_pos_m = std::max(cfg.sigma_gnss_m, kSigmaFloor);
    p.sigma_speed_mps = std::max(cfg.sigma_ad_speed_mps, kSigmaFloor);
    p.sigma_heading_rad = std::max(cfg.sigma_ad_heading_rad, kSigmaFloor);
    p.time_s = b.emit_time_s;
    return p;
}

Pid extract_pid_vd(const tracking::Track& track) {
    if (track.status != tracking::TrackStatus::Confirmed &&
        track.status != tracking::TrackStatus::Coasting)
        throw std::invalid_argument("extract_pid_vd: unconfirmed track");

    const world::Vec3 pos = track.position();
    const world::Vec3 vel = track.velocity();

    Pid p;
    p.domain = Domain::VD;
    p.position = pos;
    p.speed_mps = vel.norm();
    p.heading_rad = std::atan2(vel.y(), vel.x());
    p.rotor_class = track.majority_rotor_class();
    p.wing_type = p.rotor_class == RotorClass::FixedWing ? world::WingType::Fixed
                                                         : world::WingType::Rotary;

    const auto& P = track.covariance;
    p.sigma_pos_m = std::max(std::sqrt((P(0, 0) + P(1, 1) + P(2, 2)) / 3.0), kSigmaFloor);
    p.sigma_speed_mps = std::max(std::sqrt((P(3, 3) + P(4, 4) + P(5, 5)) / 3.0), kSigmaFloor);
    const double horizontal_speed = std::hypot(vel.x(), vel.y());
    p.sigma_heading_rad =
        std::clamp(p.sigma_speed_mps / std::max(horizontal_speed, 0.5), kSigmaFloor, kPi);
    p.time_s = track.time_s;
    return p;
}

}  // namespace dimap::identity
