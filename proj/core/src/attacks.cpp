#include "dimap/attacks.hpp"

#include "dimap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dimap::attacks {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

world::Vec3 bearing(double angle) { return {std::cos(angle), std::sin(angle), 0.0}; }

// cumulative seeded random walk, recomputed from scratch so claim generation
// is stateless and order-independent
world::Vec3 walk_offset(std::uint64_t seed, std::uint64_t salt, double step_m,
                        std::int64_t n_steps) {
    RngStream rng(seed, 0xA77ACC00ULL ^ salt);
    world::Vec3 acc = world::Vec3::Zero();
    for (std::int64_t i = 0; i < n_steps; ++i) {
        acc += world::Vec3(rng.gaussian(0.0, step_m), rng.gaussian(0.0, step_m),
                           rng.gaussian(0.0, 0.2 * step_m));
    }
    return acc;
}

int phantom_rotor_count(std::size_t k) {
    constexpr int counts[] = {4, 6, 8, 3};
    return counts[k % 4];
}
}  // namespace

void AttackConfig::validate() const {
    if (n_sybil < 1) throw std::invalid_argument("AttackConfig: n_sybil must be >= 1");
    if (time_mode == TimeMode::NonSimultaneous && !(spawn_interval_s > 0.0))
        throw std::invalid_argument("AttackConfig: spawn_interval_s must be > 0");
    if (claim_offset_m < 0.0 || host_claim_offset_m < 0.0)
        throw std::invalid_argument("AttackConfig: claim offsets must be >= 0");
    if (claim_motion == ClaimMotion::IndependentWalk && !(walk_step_m > 0.0))
        throw std::invalid_argument("AttackConfig: walk_step_m must be > 0");
}

AttackPlan plan_attack(const AttackConfig& cfg, const world::WorldState& w,
                       const std::map<world::NodeId, channels::Did>& dids,
                       const channels::SensorConfig& sensors, std::uint64_t seed) {
    cfg.validate();

    const world::UavNode* attacker = nullptr;
    world::NodeId max_id = 0;
    for (const auto& n : w.nodes) {
        max_id = std::max(max_id, n.node_id);
        if (!attacker && n.role == world::Role::Malicious) attacker = &n;
    }
    if (!attacker) throw std::invalid_argument("plan_attack: world has no Malicious node");

    AttackPlan plan;
    plan.attacker = attacker->node_id;
    plan.attacker_did = dids.at(attacker->node_id);

    // distinct fixed bearings for the host disguise and each phantom
    RngStream rng(seed, 0xA77AC000ULL);
    const double phase = rng.uniform(0.0, kTwoPi);
    plan.host_offset_dir = bearing(phase);

    // Stolen mode: victims are real nodes the attacked neighborhood cannot
    // currently hear.
    std::vector<channels::Did> stolen_pool;
    if (cfg.id_mode == IdMode::Stolen) {
        for (const auto& cand : w.nodes) {
            if (cand.role != world::Role::Legitimate) continue;
            bool out_of_range = (cand.position - attacker->position).norm() > sensors.comm_range_m;
            for (const auto& other : w.nodes) {
                if (!out_of_range) break;
                if (other.node_id == cand.node_id || other.role != world::Role::Legitimate)
                    continue;
                if ((other.position - attacker->position).norm() > sensors.comm_range_m)
                    continue;  // not part of the attacked neighborhood
                if ((cand.position - other.position).norm() <= sensors.comm_range_m)
                    out_of_range = false;
            }
            if (out_of_range) stolen_pool.push_back(dids.at(cand.node_id));
        }
        if (stolen_pool.size() < static_cast<std::size_t>(cfg.n_sybil))
            throw std::invalid_argument("plan_attack: no identity to steal");
        std::sort(stolen_pool.begin(), stolen_pool.end());
    }

    for (int k = 0; k < cfg.n_sybil; ++k) {
        PhantomPlan p;
        p.phantom_id = max_id + 1 + k;
        p.spawn_time_s = cfg.time_mode == TimeMode::Simultaneous
                             ? 0.0
                             : static_cast<double>(k) * cfg.spawn_interval_s;
        p.offset_dir = bearing(phase + kTwoPi * static_cast<double>(k + 1) /
                                           static_cast<double>(cfg.n_sybil + 1));
        p.walk_salt = static_cast<std::uint64_t>(k + 1);
        if (cfg.id_mode == IdMode::Fabricated) {
            p.did = channels::Did{0xFAB0000000000000ULL + (seed << 8 & 0xFFFFFFFF00ULL) +
                                  static_cast<std::uint64_t>(k)};
        } else {
            p.did = stolen_pool[static_cast<std::size_t>(k)];
        }
        plan.phantoms.push_back(p);
    }
    return plan;
}

world::Vec3 claim_position(const AttackPlan& plan, const AttackConfig& cfg,
                           const world::WorldState& w_at_epoch, std::size_t identity_index,
                           std::int64_t ad_epoch, std::uint64_t seed) {
    const world::UavNode& host = w_at_epoch.at(plan.attacker);
    const bool is_host = identity_index == 0;
    const double offset_m = is_host ? cfg.host_claim_offset_m : cfg.claim_offset_m;
    const world::Vec3 dir =
        is_host ? plan.host_offset_dir : plan.phantoms[identity_index - 1].offset_dir;

    if (cfg.claim_motion == ClaimMotion::FixedOffset) {
        // rides along with the host body at a constant bearing; the epoch
        // argument only matters through the host position the caller passes
        return host.position + offset_m * dir;
    }
    const std::uint64_t salt = is_host ? 0 : plan.phantoms[identity_index - 1].walk_salt;
    // anchor the walk where the host was at epoch 0 (claims drift on their own)
    const world::Vec3 anchor =
        host.position - host.velocity * w_at_epoch.time_s + offset_m * dir;
    return anchor + walk_offset(seed, salt, cfg.walk_step_m, ad_epoch);
}

std::vector<channels::IdentityClaim> sybil_claims(const AttackPlan& plan, const AttackConfig& cfg,
                                                  const world::WorldState& w, double time_s,
                                                  double t_ad_s, std::uint64_t seed) {
    const world::UavNode& host = w.at(plan.attacker);
    const std::int64_t ad_epoch = static_cast<std::int64_t>(std::llround(time_s / t_ad_s));

    std::vector<channels::IdentityClaim> out;
    const std::size_t n_ids = 1 + plan.phantoms.size();
    for (std::size_t k = 0; k < n_ids; ++k) {
        if (k > 0 && time_s + 1e-9 < plan.phantoms[k - 1].spawn_time_s) continue;

        channels::IdentityClaim c;
        c.did = k == 0 ? plan.attacker_did : plan.phantoms[k - 1].did;
        c.claimed_position = claim_position(plan, cfg, w, k, ad_epoch, seed);
        if (cfg.claim_motion == ClaimMotion::FixedOffset) {
            c.claimed_velocity = host.velocity;  // finite difference of the offset series
        } else if (ad_epoch > 0) {
            // finite difference against the previous epoch's claim; the walk
            // anchor is time-invariant, so the same world snapshot works
            const world::Vec3 prev_claim = claim_position(plan, cfg, w, k, ad_epoch - 1, seed);
            c.claimed_velocity = (c.claimed_position - prev_claim) / t_ad_s;
        } else {
            c.claimed_velocity = host.velocity;
        }
        if (k == 0) {
            // the body is visible, so the host keeps its airframe claim honest
            c.claimed_wing_type = host.wing_type;
            c.claimed_rotor_count = host.rotor_count;
        } else {
            c.claimed_wing_type = world::WingType::Rotary;
            c.claimed_rotor_count = phantom_rotor_count(k - 1);
        }
        out.push_back(c);
    }
    return out;
}

std::vector<channels::AdReception> relay_indirect(const world::WorldState& w,
                                                  std::span<const channels::Beacon> beacons,
                                                  const channels::SensorConfig& cfg,
                                                  world::NodeId attacker) {
    const world::UavNode& atk = w.at(attacker);

    const world::UavNode* forwarder = nullptr;
    double best = cfg.comm_range_m;
    for (const auto& n : w.nodes) {
        if (n.role != world::Role::Legitimate) continue;
        const double d = (n.position - atk.position).norm();
        if (d <= best) {
            best = d;
            forwarder = &n;
        }
    }
    if (!forwarder) throw std::invalid_argument("relay_indirect: no forwarder in range");

    std::vector<channels::AdReception> out;
    for (const auto& b : beacons) {
        if (b.true_origin != attacker) continue;
        for (const auto& n : w.nodes) {
            if (n.role == world::Role::SybilPhantom) continue;
            if (n.node_id == attacker || n.node_id == forwarder->node_id) continue;
            if ((n.position - forwarder->position).norm() > cfg.comm_range_m) continue;
            if ((n.position - atk.position).norm() <= cfg.comm_range_m) continue;  // heard directly
            channels::AdReception r;
            r.beacon = b;
            r.receiver = n.node_id;
            r.receive_time_s = b.emit_time_s + 2.0 * cfg.hop_latency_s;
            out.push_back(std::move(r));
        }
    }
    return out;
}

}  // namespace dimap::attacks
