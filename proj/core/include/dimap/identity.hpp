#pragma once

#include "dimap/world.hpp"

#include <array>
#include <span>

namespace dimap::channels {
struct AdReception;
struct SensorConfig;
}
namespace dimap::tracking {
struct Track;
}

namespace dimap::identity {

enum class Domain { AD, VD };

// Coarse airframe class standing in for the micro-Doppler signature.
enum class RotorClass { FixedWing, Bi, Tri, Quad, Hexa, Octo, Other };
inline constexpr int kNumRotorClasses = 7;

RotorClass rotor_class_of(int rotor_count);
const char* to_string(RotorClass c);
const char* to_string(Domain d);

// Feature schema, fixed scenario-wide. Position/speed/heading are continuous,
// wing type and rotor class categorical.
enum Feature : int {
    kFeatPosition = 0,
    kFeatSpeed = 1,
    kFeatHeading = 2,
    kFeatWingType = 3,
    kFeatRotorClass = 4,
};
inline constexpr int kNumFeatures = 5;

struct Pid {
    Domain domain = Domain::AD;
    world::Vec3 position = world::Vec3::Zero();  // m
    double speed_mps = 0.0;
    double heading_rad = 0.0;
    world::WingType wing_type = world::WingType::Rotary;
    RotorClass rotor_class = RotorClass::Quad;
    double sigma_pos_m = 1.0;
    double sigma_speed_mps = 0.1;
    double sigma_heading_rad = 0.05;
    double time_s = 0.0;
};

struct FeatureWeights {
    std::array<double, kNumFeatures> w{};
    double sum() const;
};

struct SimilarityParams {
    double kappa_wing = 0.3;    // mismatch penalty, soft because VD classing is confusable
    double kappa_rotor = 0.2;
    double prevalence_floor = 0.01;  // epsilon added to (1 - prevalence)
};

FeatureWeights uniform_weights();

// Prevalence-based dynamic weights: a feature shared by many neighbor pairs
// discriminates poorly and gets a small weight. O(N * M^2) over M pids.
FeatureWeights feature_weights(std::span<const Pid> population,
                               const SimilarityParams& params = {});

// Gaussian kernel over weighted, noise-normalized feature deltas, times a
// categorical mismatch penalty. Symmetric, in [0, 1].
double similarity(const Pid& a, const Pid& b, const FeatureWeights& w,
                  const SimilarityParams& params = {});

Pid extract_pid_ad(const channels::AdReception& reception, const channels::SensorConfig& cfg);
Pid extract_pid_vd(const tracking::Track& track);

// smallest signed angular difference a-b in (-pi, pi]
double wrap_angle(double a);
double angle_diff(double a, double b);

}  // namespace dimap::identity
