#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace dimap::world {

using Vec3 = Eigen::Vector3d;
using NodeId = std::int32_t;

enum class Role { Legitimate, Malicious, SybilPhantom };
enum class WingType { Fixed, Rotary };

struct UavNode {
    NodeId node_id = 0;
    Role role = Role::Legitimate;
    Vec3 position = Vec3::Zero();   // m
    Vec3 velocity = Vec3::Zero();   // m/s
    WingType wing_type = WingType::Rotary;
    int rotor_count = 4;
    std::optional<NodeId> host_id;  // set only for SybilPhantom
};

struct PolarTruth {
    double range_m = 0.0;
    double azimuth_rad = 0.0;            // (-pi, pi]
    double elevation_rad = 0.0;          // [-pi/2, pi/2]
    double radial_velocity_mps = 0.0;    // negative = approaching
};

// Piecewise-linear waypoint route; empty waypoint list means constant velocity.
struct Trajectory {
    std::vector<Vec3> waypoints;
    double speed_mps = 0.0;
    std::size_t next_waypoint = 0;
};

struct WorldState {
    std::int64_t epoch = 0;
    double time_s = 0.0;
    std::vector<UavNode> nodes;
    std::vector<Trajectory> trajectories;  // parallel to nodes; may be empty

    const UavNode* find(NodeId id) const;
    const UavNode& at(NodeId id) const;  // throws on unknown id
    void validate() const;               // checks id uniqueness and phantom hosts
};

// Advances every node one tick. Phantoms are pinned to their host's state.
WorldState step(const WorldState& w, double dt);

PolarTruth relative_polar(const UavNode& observer, const UavNode& target);

// Converts a polar observation back to the Cartesian offset target - observer.
Vec3 polar_to_offset(const PolarTruth& p);

// Ids of all other nodes whose true position is within radius of node id.
std::vector<NodeId> neighbors_within(const WorldState& w, NodeId id, double radius_m);

}  // namespace dimap::world
