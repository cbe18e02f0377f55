#include "dimap/mapping.hpp"

#include "dimap/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace dimap;
using identity::Pid;
using mapping::MatchOutcome;

namespace {

Pid make_pid(identity::Domain domain, world::Vec3 pos, double speed = 10.0, double heading = 0.0) {
    Pid p;
    p.domain = domain;
    p.position = pos;
    p.speed_mps = speed;
    p.heading_rad = heading;
    p.sigma_pos_m = 1.0;
    p.sigma_speed_mps = 0.1;
    p.sigma_heading_rad = 0.05;
    return p;
}

int count_kind(const std::vector<MatchOutcome>& outcomes, MatchOutcome::Kind k) {
    int n = 0;
    for (const auto& o : outcomes)
        if (o.kind == k) ++n;
    return n;
}

Eigen::MatrixXd random_cost(RngStream& rng, int n, double lo = 0.0, double hi = 10.0) {
    Eigen::MatrixXd c(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) c(i, j) = rng.uniform(lo, hi);
    return c;
}

}  // namespace

TEST_CASE("hungarian solves the 2x2 symmetric example") {
    Eigen::MatrixXd c(2, 2);
    c << 1, 2, 2, 1;
    const auto a = mapping::hungarian(c);
    CHECK(a.row_to_col == std::vector<int>{0, 1});
    CHECK(a.total_cost == doctest::Approx(2.0));
}

TEST_CASE("hungarian solves a 3x3 instance against brute force") {
    Eigen::MatrixXd c(3, 3);
    c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    const auto a = mapping::hungarian(c);
    CHECK(a.total_cost == doctest::Approx(5.0));
    CHECK(a.total_cost == doctest::Approx(oracles::brute_force_assignment(c)));
    CHECK(a.row_to_col == std::vector<int>{1, 0, 2});
}

TEST_CASE("hungarian picks the zero diagonal") {
    Eigen::MatrixXd c = Eigen::MatrixXd::Ones(4, 4);
    c.diagonal().setZero();
    const auto a = mapping::hungarian(c);
    CHECK(a.row_to_col == std::vector<int>{0, 1, 2, 3});
    CHECK(a.total_cost == doctest::Approx(0.0));
}

TEST_CASE("hungarian equals brute force on random matrices") {
    RngStream rng(2024, 1);
    for (int n = 2; n <= 6; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            const Eigen::MatrixXd c = random_cost(rng, n);
            CHECK(mapping::hungarian(c).total_cost ==
                  doctest::Approx(oracles::brute_force_assignment(c)).epsilon(1e-9));
        }
    }
}

TEST_CASE("hungarian rejects non-square and non-finite input") {
    CHECK_THROWS(mapping::hungarian(Eigen::MatrixXd::Zero(2, 3)));
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS(mapping::hungarian(c));
}

TEST_CASE("build_cost_matrix pads the deficient domain with virtuals") {
    const auto w = identity::uniform_weights();
    std::vector<Pid> vd = {make_pid(identity::Domain::VD, {0, 0, 0}),
                           make_pid(identity::Domain::VD, {100, 0, 0})};
    std::vector<Pid> ad = {make_pid(identity::Domain::AD, {0, 0, 0}),
                           make_pid(identity::Domain::AD, {100, 0, 0}),
                           make_pid(identity::Domain::AD, {200, 0, 0}),
                           make_pid(identity::Domain::AD, {300, 0, 0})};
    const auto cm = mapping::build_cost_matrix(vd, ad, w, 0.1);
    CHECK(cm.size == 4);
    CHECK(cm.n_vd == 2);
    CHECK(cm.n_ad == 4);
    // virtual rows cost kBigCost against every real column
    for (int i = 2; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(cm.cost(i, j) == mapping::kBigCost);
}

TEST_CASE("build_cost_matrix uses the reciprocal cost transform") {
    const auto w = identity::uniform_weights();
    std::vector<Pid> vd = {make_pid(identity::Domain::VD, {0, 0, 0})};
    std::vector<Pid> ad = {make_pid(identity::Domain::AD, {0, 0, 0})};
    const auto cm = mapping::build_cost_matrix(vd, ad, w, 0.1);
    CHECK(cm.similarity(0, 0) == doctest::Approx(1.0));
    CHECK(cm.cost(0, 0) == doctest::Approx(1.0 / (1.0 + mapping::kCostFloor)));
}

TEST_CASE("build_cost_matrix eliminates below-threshold pairs") {
    const auto w = identity::uniform_weights();
    // ~84 sigma apart in position: similarity far below 0.1
    std::vector<Pid> vd = {make_pid(identity::Domain::VD, {0, 0, 0})};
    std::vector<Pid> ad = {make_pid(identity::Domain::AD, {120, 0, 0})};
    const auto cm = mapping::build_cost_matrix(vd, ad, w, 0.1);
    CHECK(cm.similarity(0, 0) < 0.1);
    CHECK(cm.cost(0, 0) == mapping::kBigCost);
}

TEST_CASE("build_cost_matrix rejects empty input and bad thresholds") {
    const auto w = identity::uniform_weights();
    std::vector<Pid> none;
    CHECK_THROWS(mapping::build_cost_matrix(none, none, w, 0.1));
    std::vector<Pid> one = {make_pid(identity::Domain::VD, {0, 0, 0})};
    CHECK_THROWS(mapping::build_cost_matrix(one, one, w, 0.0));
    CHECK_THROWS(mapping::build_cost_matrix(one, one, w, 1.0));
}

TEST_CASE("map_identities on the one-seen-four-heard layout") {
    // one physically real neighbor is tracked; four identities are heard, and
    // three of them claim positions far from any echo
    const auto w = identity::uniform_weights();
    std::vector<Pid> vd = {make_pid(identity::Domain::VD, {0, 0, 0})};
    std::vector<Pid> ad = {make_pid(identity::Domain::AD, {0.5, 0, 0}),
                           make_pid(identity::Domain::AD, {90, 10, 0}),
                           make_pid(identity::Domain::AD, {80, -40, 0}),
                           make_pid(identity::Domain::AD, {-70, 60, 0})};
    const auto outcomes = mapping::map_identities(vd, ad, w, 0.1);
    CHECK(count_kind(outcomes, MatchOutcome::Kind::Matched) == 1);
    CHECK(count_kind(outcomes, MatchOutcome::Kind::UnmatchedAd) == 3);
    CHECK(count_kind(outcomes, MatchOutcome::Kind::UnmatchedVd) == 0);
    for (const auto& o : outcomes)
        if (o.kind == MatchOutcome::Kind::Matched) CHECK(o.ad_index == 0);
}

TEST_CASE("map_identities matches everything on clean well-separated input") {
    const auto w = identity::uniform_weights();
    std::vector<Pid> vd, ad;
    for (int i = 0; i < 5; ++i) {
        vd.push_back(make_pid(identity::Domain::VD, {100.0 * i, 0, 0}, 5.0 + i));
        ad.push_back(make_pid(identity::Domain::AD, {100.0 * i, 0.3, 0}, 5.0 + i));
    }
    const auto outcomes = mapping::map_identities(vd, ad, w, 0.1);
    CHECK(count_kind(outcomes, MatchOutcome::Kind::Matched) == 5);
    for (const auto& o : outcomes) {
        REQUIRE(o.kind == MatchOutcome::Kind::Matched);
        CHECK(o.vd_index == o.ad_index);  // nearest-truth pairing
    }
}

TEST_CASE("map_identities reports everything unmatched below threshold") {
    const auto w = identity::uniform_weights();
    std::vector<Pid> vd = {make_pid(identity::Domain::VD, {0, 0, 0}),
                           make_pid(identity::Domain::VD, {50, 0, 0})};
    std::vector<Pid> ad = {make_pid(identity::Domain::AD, {500, 500, 0}),
                           make_pid(identity::Domain::AD, {-500, 500, 0})};
    const auto outcomes = mapping::map_identities(vd, ad, w, 0.1);
    CHECK(count_kind(outcomes, MatchOutcome::Kind::Matched) == 0);
    CHECK(count_kind(outcomes, MatchOutcome::Kind::UnmatchedVd) == 2);
    CHECK(count_kind(outcomes, MatchOutcome::Kind::UnmatchedAd) == 2);
}

TEST_CASE("outcomes partition both index sets") {
    RngStream rng(5150, 3);
    const auto w = identity::uniform_weights();
    for (int trial = 0; trial < 50; ++trial) {
        const int nv = 1 + static_cast<int>(rng.uniform_int(5));
        const int na = 1 + static_cast<int>(rng.uniform_int(5));
        std::vector<Pid> vd, ad;
        for (int i = 0; i < nv; ++i)
            vd.push_back(make_pid(identity::Domain::VD,
                                  {rng.uniform(-100, 100), rng.uniform(-100, 100), 0}));
        for (int j = 0; j < na; ++j)
            ad.push_back(make_pid(identity::Domain::AD,
                                  {rng.uniform(-100, 100), rng.uniform(-100, 100), 0}));
        const auto outcomes = mapping::map_identities(vd, ad, w, 0.1);

        std::vector<int> vd_seen(nv, 0), ad_seen(na, 0);
        int matched = 0;
        for (const auto& o : outcomes) {
            if (o.kind == MatchOutcome::Kind::Matched) {
                ++matched;
                vd_seen[o.vd_index]++;
                ad_seen[o.ad_index]++;
                CHECK(o.similarity >= 0.1);  // threshold soundness
            } else if (o.kind == MatchOutcome::Kind::UnmatchedVd) {
                vd_seen[o.vd_index]++;
            } else {
                ad_seen[o.ad_index]++;
            }
        }
        for (int c : vd_seen) CHECK(c == 1);
        for (int c : ad_seen) CHECK(c == 1);
        CHECK(matched <= std::min(nv, na));
    }
}

TEST_CASE("augmentation is a no-op on square all-feasible instances") {
    const auto w = identity::uniform_weights();
    std::vector<Pid> vd, ad;
    for (int i = 0; i < 4; ++i) {
        vd.push_back(make_pid(identity::Domain::VD, {10.0 * i, 0, 0}));
        ad.push_back(make_pid(identity::Domain::AD, {10.0 * i, 0.2, 0}));
    }
    const auto cm = mapping::build_cost_matrix(vd, ad, w, 0.01);
    CHECK(cm.size == 4);  // no virtuals added
    const auto direct = mapping::hungarian(cm.cost);

    // solve the same instance as a plain matrix with no sentinel entries
    Eigen::MatrixXd plain(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) plain(i, j) = 1.0 / (cm.similarity(i, j) + mapping::kCostFloor);
    const auto reference = mapping::hungarian(plain);
    CHECK(direct.row_to_col == reference.row_to_col);
}

TEST_CASE("uniform similarity scaling leaves the pairing unchanged") {
    RngStream rng(77, 4);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 4;
        Eigen::MatrixXd sim(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) sim(i, j) = rng.uniform(0.2, 1.0);
        Eigen::MatrixXd cost_a(n, n), cost_b(n, n);
        const double scale = 0.37;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                cost_a(i, j) = 1.0 / sim(i, j);
                cost_b(i, j) = 1.0 / (scale * sim(i, j));
            }
        CHECK(mapping::hungarian(cost_a).row_to_col == mapping::hungarian(cost_b).row_to_col);
    }
}
