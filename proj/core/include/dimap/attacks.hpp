#pragma once

#include "dimap/channels.hpp"
#include "dimap/world.hpp"

#include <map>
#include <span>
#include <vector>

namespace dimap::attacks {

enum class HopMode { Direct, Indirect };
enum class TimeMode { Simultaneous, NonSimultaneous };
enum class IdMode { Fabricated, Stolen };
enum class ClaimMotion { FixedOffset, IndependentWalk };

struct AttackConfig {
    HopMode hop_mode = HopMode::Direct;
    TimeMode time_mode = TimeMode::Simultaneous;
    IdMode id_mode = IdMode::Fabricated;
    int n_sybil = 3;
    double spawn_interval_s = 5.0;  // NonSimultaneous only
    double claim_offset_m = 30.0;   // phantom claim offset from the host body
    // The attacker also disguises its own identity, but keeps the offset small
    // enough that its claims still match its own echo track; this is what
    // separates a misbehaving body from a bodiless phantom downstream.
    double host_claim_offset_m = 10.0;
    ClaimMotion claim_motion = ClaimMotion::FixedOffset;
    double walk_step_m = 3.0;  // per AD epoch, IndependentWalk only
    bool forge_witness_reports = false;

    void validate() const;
};

struct PhantomPlan {
    world::NodeId phantom_id = -1;
    channels::Did did;
    double spawn_time_s = 0.0;
    world::Vec3 offset_dir = world::Vec3::UnitX();  // fixed bearing for FixedOffset claims
    std::uint64_t walk_salt = 0;
};

struct AttackPlan {
    world::NodeId attacker = -1;
    channels::Did attacker_did;
    world::Vec3 host_offset_dir = world::Vec3::UnitX();
    std::vector<PhantomPlan> phantoms;
};

// Phantom spawn schedule plus per-identity claim generators. Phantom node ids
// are allocated past the largest existing id; the caller inserts the world
// entries. Stolen mode copies Dids from real nodes currently outside the
// victim neighborhood's comm range.
AttackPlan plan_attack(const AttackConfig& cfg, const world::WorldState& w,
                       const std::map<world::NodeId, channels::Did>& dids,
                       const channels::SensorConfig& sensors, std::uint64_t seed);

// Claimed fields for every identity the attacker operates at this epoch (its
// own Did plus each active phantom).
std::vector<channels::IdentityClaim> sybil_claims(const AttackPlan& plan, const AttackConfig& cfg,
                                                  const world::WorldState& w, double time_s,
                                                  double t_ad_s, std::uint64_t seed);

// Indirect path: beacons from the attacker reach far receivers through the
// nearest legitimate forwarder, two hops of latency in total. Receivers inside
// the attacker's own comm range are served by the direct delivery already.
std::vector<channels::AdReception> relay_indirect(const world::WorldState& w,
                                                  std::span<const channels::Beacon> beacons,
                                                  const channels::SensorConfig& cfg,
                                                  world::NodeId attacker);

// True position series of the claims an identity would make; used by tests.
world::Vec3 claim_position(const AttackPlan& plan, const AttackConfig& cfg,
                           const world::WorldState& w_at_epoch, std::size_t identity_index,
                           std::int64_t ad_epoch, std::uint64_t seed);

}  // namespace dimap::attacks
