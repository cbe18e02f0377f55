#include "dimap/world.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace dimap::world {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const UavNode* WorldState::find(NodeId id) const {
    for (const auto& n : nodes) {
        if (n.node_id == id) return &n;
    }
    return nullptr;
}

const UavNode& WorldState::at(NodeId id) const {
    const UavNode* n = find(id);
    if (!n) throw std::invalid_argument("unknown node_id " + std::to_string(id));
    return *n;
}

void WorldState::validate() const {
    std::unordered_set<NodeId> seen;
    for (const auto& n : nodes) {
        if (!seen.insert(n.node_id).second)
            throw std::invalid_argument("duplicate node_id " + std::to_string(n.node_id));
        if (n.rotor_count < 0)
            throw std::invalid_argument("rotor_count < 0 for node " + std::to_string(n.node_id));
        if (n.role == Role::SybilPhantom) {
            if (!n.host_id) throw std::invalid_argument("phantom without host_id");
            const UavNode* host = find(*n.host_id);
            if (!host || host->role != Role::Malicious)
                throw std::invalid_argument("phantom host must be a Malicious node");
        } else if (n.host_id) {
            throw std::invalid_argument("host_id set on non-phantom node");
        }
    }
}

WorldState step(const WorldState& w, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    WorldState out = w;
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
        UavNode& n = out.nodes[i];
        if (n.role == Role::SybilPhantom) continue;  // pinned below
        Trajectory* traj =
            (i < out.trajectories.size() && !out.trajectories[i].waypoints.empty())
                ? &out.trajectories[i]
                : nullptr;
        if (!traj) {
            n.position += n.velocity * dt;
            continue;
        }
        // waypoint following at constant speed, possibly crossing several
        // segments within one tick
        double remaining = traj->speed_mps * dt;
        while (remaining > 0.0 && traj->next_waypoint < traj->waypoints.size()) {
            const Vec3 target = traj->waypoints[traj->next_waypoint];
            const Vec3 to_target = target - n.position;
            const double dist = to_target.norm();
            if (dist <= remaining) {
                n.position = target;
                remaining -= dist;
                ++traj->next_waypoint;
            } else {
                const Vec3 dir = to_target / dist;
                n.position += dir * remaining;
                n.velocity = dir * traj->speed_mps;
                remaining = 0.0;
            }
        }
        if (traj->next_waypoint >= traj->waypoints.size() && remaining > 0.0) {
            n.velocity = Vec3::Zero();  // route exhausted, hover
        }
    }
    // phantoms have no body of their own
    for (auto& n : out.nodes) {
        if (n.role == Role::SybilPhantom) {
            const UavNode& host = out.at(*n.host_id);
            n.position = host.position;
            n.velocity = host.velocity;
        }
    }
    out.epoch = w.epoch + 1;
    out.time_s = static_cast<double>(out.epoch) * dt;
    return out;
}

PolarTruth relative_polar(const UavNode& observer, const UavNode& target) {
    const Vec3 rel = target.position - observer.position;
    const double range = rel.norm();
    if (range <= 0.0) throw std::invalid_argument("relative_polar: degenerate geometry");
    const Vec3 rel_v = target.velocity - observer.velocity;

    PolarTruth p;
    p.range_m = range;
    p.azimuth_rad = std::atan2(rel.y(), rel.x());
    if (p.azimuth_rad <= -kPi) p.azimuth_rad = kPi;  // keep azimuth in (-pi, pi]
    const double sz = std::clamp(rel.z() / range, -1.0, 1.0);
    p.elevation_rad = std::asin(sz);
    p.radial_velocity_mps = rel.dot(rel_v) / range;  // d(range)/dt
    return p;
}

Vec3 polar_to_offset(const PolarTruth& p) {
    const double ce = std::cos(p.elevation_rad);
    return Vec3(p.range_m * ce * std::cos(p.azimuth_rad),
                p.range_m * ce * std::sin(p.azimuth_rad),
                p.range_m * std::sin(p.elevation_rad));
}

std::vector<NodeId> neighbors_within(const WorldState& w, NodeId id, double radius_m) {
    if (!(radius_m > 0.0)) throw std::invalid_argument("neighbors_within: radius must be > 0");
    const UavNode& self = w.at(id);
    std::vector<NodeId> out;
    for (const auto& n : w.nodes) {
        if (n.node_id == id) continue;
        if ((n.position - self.position).norm() <= radius_m) out.push_back(n.node_id);
    }
    return out;
}

}  // namespace dimap::world
