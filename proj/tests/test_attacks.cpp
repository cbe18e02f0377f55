#include "dimap/attacks.hpp"

#include "dimap/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace dimap;
using attacks::AttackConfig;
using attacks::AttackPlan;
using world::Role;
using world::Vec3;

namespace {

world::WorldState attack_world() {
    world::WorldState w;
    auto add = [&](world::NodeId id, Vec3 pos, Role role) {
        world::UavNode n;
        n.node_id = id;
        n.role = role;
        n.position = pos;
        n.velocity = {10, 0, 0};
        w.nodes.push_back(n);
    };
    add(1, {0, 0, 100}, Role::Legitimate);
    add(2, {50, 0, 100}, Role::Legitimate);
    add(3, {100, 50, 100}, Role::Malicious);
    return w;
}

std::map<world::NodeId, channels::Did> dids_for(const world::WorldState& w) {
    std::map<world::NodeId, channels::Did> dids;
    for (const auto& n : w.nodes)
        dids[n.node_id] = channels::Did{0xD1D0ULL + static_cast<std::uint64_t>(n.node_id)};
    return dids;
}

}  // namespace

TEST_CASE("simultaneous attacks activate every phantom at epoch zero") {
    auto w = attack_world();
    AttackConfig cfg;
    cfg.n_sybil = 3;
    const auto plan = attacks::plan_attack(cfg, w, dids_for(w), {}, 1);
    REQUIRE(plan.phantoms.size() == 3);
    for (const auto& p : plan.phantoms) CHECK(p.spawn_time_s == 0.0);
    CHECK(plan.attacker == 3);

    const auto claims = attacks::sybil_claims(plan, cfg, w, 0.0, 0.2, 1);
    CHECK(claims.size() == 4);  // own identity plus three phantoms
}

TEST_CASE("non-simultaneous attacks spawn on the configured interval") {
    auto w = attack_world();
    AttackConfig cfg;
    cfg.n_sybil = 3;
    cfg.time_mode = attacks::TimeMode::NonSimultaneous;
    cfg.spawn_interval_s = 5.0;
    const auto plan = attacks::plan_attack(cfg, w, dids_for(w), {}, 1);
    CHECK(plan.phantoms[0].spawn_time_s == doctest::Approx(0.0));
    CHECK(plan.phantoms[1].spawn_time_s == doctest::Approx(5.0));
    CHECK(plan.phantoms[2].spawn_time_s == doctest::Approx(10.0));

    CHECK(attacks::sybil_claims(plan, cfg, w, 0.0, 0.2, 1).size() == 2);
    world::WorldState later = w;
    later.time_s = 5.0;
    CHECK(attacks::sybil_claims(plan, cfg, later, 5.0, 0.2, 1).size() == 3);
}

TEST_CASE("fabricated dids are fresh, stolen dids belong to far victims") {
    auto w = attack_world();
    const auto dids = dids_for(w);

    SUBCASE("fabricated") {
        AttackConfig cfg;
        const auto plan = attacks::plan_attack(cfg, w, dids, {}, 1);
        for (const auto& p : plan.phantoms)
            for (const auto& [id, did] : dids) CHECK(p.did != did);
    }
    SUBCASE("stolen wants an out-of-range victim") {
        AttackConfig cfg;
        cfg.id_mode = attacks::IdMode::Stolen;
        cfg.n_sybil = 1;
        channels::SensorConfig sensors;
        sensors.comm_range_m = 800.0;
        // everyone is inside the neighborhood: nothing to steal
        CHECK_THROWS(attacks::plan_attack(cfg, w, dids, sensors, 1));

        // add a node far outside comm range: its identity becomes stealable
        world::UavNode far;
        far.node_id = 9;
        far.role = Role::Legitimate;
        far.position = {5000, 5000, 100};
        auto w2 = w;
        w2.nodes.push_back(far);
        auto dids2 = dids_for(w2);
        const auto plan = attacks::plan_attack(cfg, w2, dids2, sensors, 1);
        REQUIRE(plan.phantoms.size() == 1);
        CHECK(plan.phantoms[0].did == dids2.at(9));
    }
}

TEST_CASE("fixed-offset claims keep magnitude and bearing") {
    auto w = attack_world();
    AttackConfig cfg;
    cfg.claim_offset_m = 30.0;
    cfg.host_claim_offset_m = 10.0;
    const auto plan = attacks::plan_attack(cfg, w, dids_for(w), {}, 7);
    const Vec3 host = w.at(3).position;

    const auto claims = attacks::sybil_claims(plan, cfg, w, 0.0, 0.2, 7);
    REQUIRE(claims.size() == 4);
    CHECK((claims[0].claimed_position - host).norm() == doctest::Approx(10.0));
    for (int k = 1; k < 4; ++k)
        CHECK((claims[k].claimed_position - host).norm() == doctest::Approx(30.0));

    // bearing stays constant as the host moves
    world::WorldState moved = w;
    for (int i = 0; i < 100; ++i) moved = world::step(moved, 0.01);
    const auto later = attacks::sybil_claims(plan, cfg, moved, 1.0, 0.2, 7);
    const Vec3 d0 = claims[1].claimed_position - host;
    const Vec3 d1 = later[1].claimed_position - moved.at(3).position;
    CHECK((d0 - d1).norm() < 1e-9);
}

TEST_CASE("claimed velocity is the finite difference of the claim series") {
    auto w = attack_world();
    AttackConfig cfg;
    cfg.claim_motion = attacks::ClaimMotion::IndependentWalk;
    const auto plan = attacks::plan_attack(cfg, w, dids_for(w), {}, 3);

    const double t_ad = 0.2;
    world::WorldState epoch5 = w;
    for (int i = 0; i < 100; ++i) epoch5 = world::step(epoch5, 0.01);  // t = 1.0 s = epoch 5
    const auto now = attacks::sybil_claims(plan, cfg, epoch5, 1.0, t_ad, 3);

    world::WorldState epoch4 = w;
    for (int i = 0; i < 80; ++i) epoch4 = world::step(epoch4, 0.01);
    const auto prev = attacks::sybil_claims(plan, cfg, epoch4, 0.8, t_ad, 3);

    for (std::size_t k = 0; k < now.size(); ++k) {
        const Vec3 fd = (now[k].claimed_position - prev[k].claimed_position) / t_ad;
        CHECK((now[k].claimed_velocity - fd).norm() < 1e-9);
    }
}

TEST_CASE("independent walks decorrelate from the host track") {
    auto w = attack_world();
    AttackConfig cfg;
    cfg.claim_motion = attacks::ClaimMotion::IndependentWalk;
    cfg.walk_step_m = 3.0;
    const auto plan = attacks::plan_attack(cfg, w, dids_for(w), {}, 11);

    std::vector<Vec3> host_disp, claim_disp;
    world::WorldState cur = w;
    Vec3 prev_host = cur.at(3).position;
    Vec3 prev_claim = attacks::sybil_claims(plan, cfg, cur, 0.0, 0.2, 11)[1].claimed_position;
    for (int e = 1; e <= 100; ++e) {
        for (int i = 0; i < 20; ++i) cur = world::step(cur, 0.01);
        const auto claims = attacks::sybil_claims(plan, cfg, cur, 0.2 * e, 0.2, 11);
        host_disp.push_back(cur.at(3).position - prev_host);
        claim_disp.push_back(claims[1].claimed_position - prev_claim);
        prev_host = cur.at(3).position;
        prev_claim = claims[1].claimed_position;
    }
    double num = 0, va = 0, vb = 0;
    Vec3 ma = Vec3::Zero(), mb = Vec3::Zero();
    for (std::size_t i = 0; i < host_disp.size(); ++i) {
        ma += host_disp[i];
        mb += claim_disp[i];
    }
    ma /= host_disp.size();
    mb /= claim_disp.size();
    for (std::size_t i = 0; i < host_disp.size(); ++i) {
        num += (host_disp[i] - ma).dot(claim_disp[i] - mb);
        va += (host_disp[i] - ma).squaredNorm();
        vb += (claim_disp[i] - mb).squaredNorm();
    }
    const double corr = (va > 0 && vb > 0) ? num / std::sqrt(va * vb) : 1.0;
    CHECK(std::abs(corr) < 0.2);
}

TEST_CASE("claim schedules are deterministic under a fixed seed") {
    auto w = attack_world();
    AttackConfig cfg;
    cfg.claim_motion = attacks::ClaimMotion::IndependentWalk;
    const auto plan_a = attacks::plan_attack(cfg, w, dids_for(w), {}, 99);
    const auto plan_b = attacks::plan_attack(cfg, w, dids_for(w), {}, 99);
    REQUIRE(plan_a.phantoms.size() == plan_b.phantoms.size());
    for (std::size_t k = 0; k < plan_a.phantoms.size(); ++k) {
        CHECK(plan_a.phantoms[k].did == plan_b.phantoms[k].did);
        CHECK((plan_a.phantoms[k].offset_dir - plan_b.phantoms[k].offset_dir).norm() == 0.0);
    }
    const auto ca = attacks::sybil_claims(plan_a, cfg, w, 2.0, 0.2, 99);
    const auto cb = attacks::sybil_claims(plan_b, cfg, w, 2.0, 0.2, 99);
    for (std::size_t k = 0; k < ca.size(); ++k)
        CHECK((ca[k].claimed_position - cb[k].claimed_position).norm() == 0.0);
}

TEST_CASE("relay_indirect forwards to receivers outside the attacker's reach") {
    world::WorldState w;
    auto add = [&](world::NodeId id, Vec3 pos, Role role) {
        world::UavNode n;
        n.node_id = id;
        n.role = role;
        n.position = pos;
        w.nodes.push_back(n);
    };
    channels::SensorConfig sensors;
    sensors.sense_range_m = 300.0;
    sensors.comm_range_m = 400.0;
    add(1, {0, 0, 100}, Role::Legitimate);      // far certifier
    add(2, {330, 0, 100}, Role::Legitimate);    // forwarder midway
    add(3, {660, 0, 100}, Role::Malicious);     // attacker at 2.2x sense range

    channels::Beacon b;
    b.sender_did = channels::Did{77};
    b.emit_time_s = 1.0;
    b.true_origin = 3;
    const auto rx = attacks::relay_indirect(w, std::vector<channels::Beacon>{b}, sensors, 3);
    REQUIRE(rx.size() == 1);
    CHECK(rx[0].receiver == 1);
    CHECK(rx[0].receive_time_s == doctest::Approx(1.0 + 2.0 * sensors.hop_latency_s));

    SUBCASE("no forwarder in range") {
        w.nodes[1].position = {5000, 0, 100};  // forwarder gone
        w.nodes[0].position = {4000, 0, 100};
        CHECK_THROWS(attacks::relay_indirect(w, std::vector<channels::Beacon>{b}, sensors, 3));
    }
}

TEST_CASE("attack config validation") {
    AttackConfig cfg;
    cfg.n_sybil = 0;
    CHECK_THROWS(cfg.validate());
    cfg = AttackConfig{};
    cfg.time_mode = attacks::TimeMode::NonSimultaneous;
    cfg.spawn_interval_s = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = AttackConfig{};
    CHECK_NOTHROW(cfg.validate());
}
