#include "dimap/scenario.hpp"

#include "dimap/attacks.hpp"
#include "dimap/identity.hpp"
#include "dimap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace dimap::scenarios {

namespace {

constexpr double kWarmupS = 1.0;
constexpr double kDegPerRad = 57.295779513082320877;

std::string did_str(const channels::Did& d) {
    std::ostringstream os;
    os << "0x" << std::hex << d.address;
    return os.str();
}

class Payload {
public:
    Payload& add(const char* k, double v) { return put(k, format_double(v)); }
    Payload& add(const char* k, std::int64_t v) { return put(k, std::to_string(v)); }
    Payload& add(const char* k, int v) { return put(k, std::to_string(v)); }
    Payload& add(const char* k, const std::string& v) { return put(k, "\"" + v + "\""); }
    std::string str() const { return "{" + body_ + "}"; }

private:
    Payload& put(const char* k, const std::string& v) {
        if (!body_.empty()) body_ += ",";
        body_ += "\"" + std::string(k) + "\":" + v;
        return *this;
    }
    std::string body_;
};

struct DidState {
    int heard_epochs = 0;
    std::deque<auth::ClaimSample> window;
    world::Vec3 last_claim = world::Vec3::Zero();
};

struct NodeAgent {
    world::NodeId id = -1;
    bool certifier = true;
    channels::Did did;
    tracking::TrackStore store;
    std::map<channels::Did, DidState> dids;
    auth::ViewAccumulator view_acc;  // accumulated over the run
    std::map<world::NodeId, auth::LocalView> received_views;
    std::vector<channels::WitnessReport> witness_buffer;
    std::vector<std::pair<channels::Did, int>> last_matches;  // (did, track_id) this AD epoch
    std::set<int> confirmed_logged;
    std::int64_t flag_epoch_ad = -1;
    RngStream echo_rng;
    RngStream gnss_rng;
};

struct PendingBeamEval {
    std::int64_t eval_tick = 0;
    double pred_az = 0.0, pred_el = 0.0;
    double stale_az = 0.0, stale_el = 0.0;
};

double angle_between_deg(double az_a, double el_a, double az_b, double el_b) {
    auto unit = [](double az, double el) {
        return world::Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    };
    const double c = std::clamp(unit(az_a, el_a).dot(unit(az_b, el_b)), -1.0, 1.0);
    return std::acos(c) * kDegPerRad;
}

class Engine {
public:
    explicit Engine(const ScenarioConfig& cfg) : cfg_(cfg) { init(); }

    RunResult run();

private:
    void init();
    void vd_epoch();
    void ad_epoch(std::int64_t ad_idx);
    void process_inbox(NodeAgent& agent, const std::vector<channels::AdReception>& inbox,
                       const std::map<world::NodeId, auth::LocalView>& snapshots);
    void detection_checks(std::int64_t ad_idx);
    void beam_hook();
    void alert_hook();
    void ranging_hook();
    void finalize(RunResult& out);

    const world::UavNode* truth_node_of(const channels::Did& did) const;
    const world::UavNode& observer() const { return world_.at(agents_.front().id); }

    ScenarioConfig cfg_;
    world::WorldState world_;
    std::map<world::NodeId, channels::Did> dids_;
    std::map<channels::Did, world::NodeId> owner_of_did_;  // real (non-phantom) owners
    std::map<std::string, channels::Did> did_of_name_;
    std::optional<attacks::AttackPlan> plan_;
    std::vector<NodeAgent> agents_;  // one per legitimate node, config order
    std::set<channels::Did> truth_attacker_dids_;
    std::set<channels::Did> ever_matched_;  // matched to a real track by any agent
    std::map<channels::Did, std::vector<world::Vec3>> claim_history_;  // per AD epoch

    EventLog events_;
    std::int64_t tick_ = 0;
    std::int64_t collisions_ = 0;

    // beam metrics
    std::vector<PendingBeamEval> pending_beam_;
    double sum_pred_err_deg_ = 0.0, sum_stale_err_deg_ = 0.0;
    std::int64_t beam_events_ = 0;

    // alert + ranging metrics
    bool alert_done_ = false;
    double alert_latency_ms_ = 0.0, alert_baseline_ms_ = 0.0;
    bool alert_correct_ = false, alert_fallback_ = false;
    std::vector<double> ranging_ad_, ranging_vd_, ranging_fused_, ranging_norm_;
};

void Engine::init() {
    cfg_.validate();

    world_.epoch = 0;
    world_.time_s = 0.0;
    std::map<std::string, world::NodeId> id_of_name;
    for (std::size_t i = 0; i < cfg_.nodes.size(); ++i) {
        const NodeSpec& spec = cfg_.nodes[i];
        world::UavNode n;
        n.node_id = static_cast<world::NodeId>(i + 1);
        n.role = spec.role;
        n.position = spec.position;
        n.velocity = spec.velocity;
        n.wing_type = spec.wing;
        n.rotor_count = spec.rotors;
        world_.nodes.push_back(n);

        world::Trajectory traj;
        traj.waypoints = spec.waypoints;
        traj.speed_mps = spec.waypoint_speed_mps;
        world_.trajectories.push_back(traj);

        const channels::Did did{0x0D1D000000000000ULL + static_cast<std::uint64_t>(n.node_id)};
        dids_[n.node_id] = did;
        owner_of_did_[did] = n.node_id;
        did_of_name_[spec.name] = did;
        id_of_name[spec.name] = n.node_id;
    }

    if (cfg_.attack) {
        plan_ = attacks::plan_attack(*cfg_.attack, world_, dids_, cfg_.sensors, cfg_.seed);
        for (const auto& ph : plan_->phantoms) {
            world::UavNode n;
            n.node_id = ph.phantom_id;
            n.role = world::Role::SybilPhantom;
            n.host_id = plan_->attacker;
            n.position = world_.at(plan_->attacker).position;
            n.velocity = world_.at(plan_->attacker).velocity;
            world_.nodes.push_back(n);
            world_.trajectories.push_back({});
            dids_[ph.phantom_id] = ph.did;
            truth_attacker_dids_.insert(ph.did);
        }
        truth_attacker_dids_.insert(plan_->attacker_did);
    }
    world_.validate();

    for (std::size_t i = 0; i < cfg_.nodes.size(); ++i) {
        const NodeSpec& spec = cfg_.nodes[i];
        if (spec.role != world::Role::Legitimate) continue;
        NodeAgent a;
        a.id = id_of_name.at(spec.name);
        a.certifier = spec.certifier;
        a.did = dids_.at(a.id);
        a.store = tracking::TrackStore(
            tracking::GateParams{cfg_.thresholds.gate_radius_m, cfg_.thresholds.confirm_hits,
                                 cfg_.thresholds.delete_misses},
            tracking::FilterParams{cfg_.thresholds.process_noise_q, cfg_.thresholds.staleness_s,
                                   400.0});
        a.echo_rng = node_stream(cfg_.seed, a.id, RngPurpose::Echo);
        a.gnss_rng = node_stream(cfg_.seed, a.id, RngPurpose::GnssClaim);
        a.view_acc = auth::ViewAccumulator(a.id);
        agents_.push_back(std::move(a));
    }
}

const world::UavNode* Engine::truth_node_of(const channels::Did& did) const {
    auto it = owner_of_did_.find(did);
    if (it == owner_of_did_.end()) return nullptr;
    return world_.find(it->second);
}

void Engine::vd_epoch() {
    for (NodeAgent& agent : agents_) {
        const world::UavNode& self = world_.at(agent.id);
        const auto measurements = channels::sense(world_, agent.id, cfg_.sensors, agent.echo_rng);
        std::vector<tracking::CartesianMeasurement> converted;
        converted.reserve(measurements.size());
        for (const auto& m : measurements) converted.push_back(tracking::ucm_convert(m, self.position));
        agent.store.process_scan(converted, world_.time_s);

        for (const auto& t : agent.store.tracks()) {
            if (t.status == tracking::TrackStatus::Confirmed &&
                !agent.confirmed_logged.count(t.track_id)) {
                agent.confirmed_logged.insert(t.track_id);
                events_.add(tick_, world_.time_s, "track_confirmed",
                            Payload().add("certifier", static_cast<int>(agent.id))
                                .add("track", t.track_id)
                                .str());
            }
        }
    }
}

void Engine::ad_epoch(std::int64_t ad_idx) {
    // view snapshots ride this epoch's beacons: state as of the previous epoch
    std::map<world::NodeId, auth::LocalView> snapshots;
    for (const NodeAgent& a : agents_) snapshots[a.id] = a.view_acc.view();

    std::vector<channels::Beacon> beacons;
    for (const auto& node : world_.nodes) {
        if (node.role == world::Role::SybilPhantom) continue;
        if (node.role == world::Role::Legitimate) {
            NodeAgent* agent = nullptr;
            for (auto& a : agents_)
                if (a.id == node.node_id) agent = &a;
            auto emitted = channels::emit_beacons(world_, node.node_id, cfg_.sensors,
                                                  dids_.at(node.node_id), {},
                                                  agent->witness_buffer, agent->gnss_rng);
            beacons.insert(beacons.end(), emitted.begin(), emitted.end());
            continue;
        }
        // malicious
        std::vector<channels::IdentityClaim> claims;
        if (plan_ && plan_->attacker == node.node_id) {
            claims = attacks::sybil_claims(*plan_, *cfg_.attack, world_, world_.time_s,
                                           cfg_.sensors.t_ad_s, cfg_.seed);
        } else {
            channels::IdentityClaim c;  // malicious node with no attack behaves honestly
            c.did = dids_.at(node.node_id);
            c.claimed_position = node.position;
            c.claimed_velocity = node.velocity;
            c.claimed_wing_type = node.wing_type;
            c.claimed_rotor_count = node.rotor_count;
            claims.push_back(c);
        }
        RngStream rng = node_stream(cfg_.seed, node.node_id, RngPurpose::AttackClaims);
        auto emitted = channels::emit_beacons(world_, node.node_id, cfg_.sensors,
                                              dids_.at(node.node_id), claims, {}, rng);
        if (cfg_.attack && cfg_.attack->forge_witness_reports) {
            // the attacker vouches for its own phantoms
            for (auto& b : emitted) {
                for (const auto& c : claims) {
                    if (c.did == b.sender_did) continue;
                    channels::WitnessReport wr;
                    wr.witness_did = b.sender_did;
                    wr.subject_did = c.did;
                    wr.measured_pid.domain = identity::Domain::VD;
                    wr.measured_pid.position = c.claimed_position;
                    wr.measured_pid.speed_mps = c.claimed_velocity.norm();
                    wr.measured_pid.time_s = world_.time_s;
                    b.witness_reports.push_back(wr);
                    if (b.witness_reports.size() >= channels::kMaxWitnessReports) break;
                }
            }
        }
        beacons.insert(beacons.end(), emitted.begin(), emitted.end());
    }

    for (const auto& b : beacons) claim_history_[b.sender_did].push_back(b.claimed_position);

    auto receptions = channels::deliver(world_, beacons, cfg_.sensors);
    if (plan_ && cfg_.attack->hop_mode == attacks::HopMode::Indirect) {
        auto relayed = attacks::relay_indirect(world_, beacons, cfg_.sensors, plan_->attacker);
        receptions.insert(receptions.end(), relayed.begin(), relayed.end());
    }

    std::map<world::NodeId, std::vector<channels::AdReception>> inbox;
    for (auto& r : receptions) inbox[r.receiver].push_back(std::move(r));

    for (NodeAgent& agent : agents_) process_inbox(agent, inbox[agent.id], snapshots);

    switch (cfg_.kind) {
        case ScenarioKind::SybilDetection:
            detection_checks(ad_idx);
            break;
        case ScenarioKind::BeamManagement:
            beam_hook();
            break;
        case ScenarioKind::EmergencyAlert:
            ranging_hook();
            if (!alert_done_ && world_.time_s >= cfg_.duration_s / 2.0) alert_hook();
            break;
    }
}

void Engine::process_inbox(NodeAgent& agent, const std::vector<channels::AdReception>& inbox,
                           const std::map<world::NodeId, auth::LocalView>& snapshots) {
    const world::UavNode& self = world_.at(agent.id);
    agent.last_matches.clear();

    std::map<channels::Did, channels::AdReception> heard;
    for (const auto& r : inbox) {
        const auto origin_role = world_.at(r.beacon.true_origin).role;
        if (origin_role == world::Role::Legitimate) {
            auto s = snapshots.find(r.beacon.true_origin);
            if (s != snapshots.end()) agent.received_views[r.beacon.true_origin] = s->second;
        }
        auto [it, inserted] = heard.try_emplace(r.beacon.sender_did, r);
        if (!inserted && it->second.beacon.true_origin != r.beacon.true_origin) {
            ++collisions_;
            events_.add(tick_, world_.time_s, "did_collision",
                        Payload().add("receiver", static_cast<int>(agent.id))
                            .add("did", did_str(r.beacon.sender_did))
                            .str());
        }
    }

    std::vector<channels::Did> ad_order;
    std::vector<identity::Pid> ad_pids;
    for (auto& [did, r] : heard) {
        DidState& ds = agent.dids[did];
        ds.heard_epochs += 1;
        ds.last_claim = r.beacon.claimed_position;
        ds.window.push_back({r.beacon.claimed_position, std::max(cfg_.sensors.sigma_gnss_m, 1e-3),
                             r.beacon.emit_time_s});
        while (ds.window.size() > static_cast<std::size_t>(cfg_.thresholds.mmse_window_cap))
            ds.window.pop_front();

        ad_order.push_back(did);
        ad_pids.push_back(identity::extract_pid_ad(r, cfg_.sensors));
    }

    const auto confirmed = agent.store.confirmed();
    std::vector<identity::Pid> vd_pids;
    vd_pids.reserve(confirmed.size());
    for (const auto* t : confirmed) vd_pids.push_back(identity::extract_pid_vd(*t));

    identity::FeatureWeights weights = identity::uniform_weights();
    {
        std::vector<identity::Pid> pool;
        pool.insert(pool.end(), ad_pids.begin(), ad_pids.end());
        pool.insert(pool.end(), vd_pids.begin(), vd_pids.end());
        if (pool.size() >= 2) weights = identity::feature_weights(pool);
    }

    std::vector<mapping::MatchOutcome> outcomes;
    if (!ad_pids.empty() || !vd_pids.empty())
        outcomes = mapping::map_identities(vd_pids, ad_pids, weights, cfg_.thresholds.sim_min);

    std::map<channels::Did, int> matched_track;
    for (const auto& o : outcomes) {
        if (o.kind != mapping::MatchOutcome::Kind::Matched) continue;
        const channels::Did did = ad_order[static_cast<std::size_t>(o.ad_index)];
        tracking::Track* track = agent.store.find(confirmed[o.vd_index]->track_id);
        track->associated_did = did;
        matched_track[did] = track->track_id;
        ever_matched_.insert(did);
        agent.last_matches.emplace_back(did, track->track_id);
    }

    std::vector<auth::DidEpochObservation> observations;
    for (const auto& [did, r] : heard) {
        auth::DidEpochObservation obs;
        obs.did = did;
        const DidState& ds = agent.dids[did];
        obs.in_claimed_sense_range =
            (ds.last_claim - self.position).norm() <= cfg_.sensors.sense_range_m;
        obs.grace_elapsed = ds.heard_epochs >= cfg_.thresholds.grace_epochs;
        auto mt = matched_track.find(did);
        if (mt != matched_track.end()) {
            obs.matched = true;
            obs.track_id = mt->second;
            if (ds.window.size() >= static_cast<std::size_t>(cfg_.thresholds.mmse_window_min)) {
                const std::vector<auth::ClaimSample> window(ds.window.begin(), ds.window.end());
                obs.mmse = auth::mmse_check(window, *agent.store.find(mt->second),
                                            cfg_.thresholds.mmse_tau);
            }
        }
        observations.push_back(obs);
    }
    agent.view_acc.ingest(observations, auth::build_local_view(agent.id, observations));

    // refresh the witness buffer with this epoch's matched subjects
    for (const auto& [did, track_id] : agent.last_matches) {
        channels::WitnessReport wr;
        wr.witness_did = agent.did;
        wr.subject_did = did;
        wr.measured_pid = identity::extract_pid_vd(*agent.store.find(track_id));
        wr.time_s = world_.time_s;
        agent.witness_buffer.push_back(std::move(wr));
    }
    while (agent.witness_buffer.size() > channels::kMaxWitnessReports)
        agent.witness_buffer.erase(agent.witness_buffer.begin());
}

void Engine::detection_checks(std::int64_t ad_idx) {
    if (truth_attacker_dids_.empty()) return;
    for (NodeAgent& agent : agents_) {
        if (!agent.certifier || agent.flag_epoch_ad >= 0) continue;
        std::vector<auth::LocalView> views;
        views.push_back(agent.view_acc.view());
        for (const auto& [id, v] : agent.received_views) views.push_back(v);
        const int quorum = std::min<int>(cfg_.thresholds.quorum, static_cast<int>(views.size()));
        const auth::GlobalView global = auth::merge_views(views, quorum);
        bool all = true;
        for (const auto& d : truth_attacker_dids_)
            if (!global.suspects.count(d)) all = false;
        if (all) {
            agent.flag_epoch_ad = ad_idx;
            events_.add(tick_, world_.time_s, "detected",
                        Payload().add("certifier", static_cast<int>(agent.id))
                            .add("ad_epoch", ad_idx)
                            .str());
        }
    }
}

void Engine::beam_hook() {
    // settle due evaluations against the current true geometry; the second
    // configured node is the tracked peer
    const world::UavNode& obs = observer();
    const world::UavNode& target = world_.at(2);
    for (auto it = pending_beam_.begin(); it != pending_beam_.end();) {
        if (it->eval_tick != tick_) {
            ++it;
            continue;
        }
        const world::PolarTruth truth = world::relative_polar(obs, target);
        sum_pred_err_deg_ += angle_between_deg(it->pred_az, it->pred_el, truth.azimuth_rad,
                                               truth.elevation_rad);
        sum_stale_err_deg_ += angle_between_deg(it->stale_az, it->stale_el, truth.azimuth_rad,
                                                truth.elevation_rad);
        beam_events_ += 1;
        it = pending_beam_.erase(it);
    }

    if (world_.time_s < kWarmupS) return;
    NodeAgent& agent = agents_.front();
    const channels::Did target_did = dids_.at(target.node_id);

    const tracking::Track* track = nullptr;
    for (const auto* t : agent.store.confirmed())
        if (t->associated_did && *t->associated_did == target_did) track = t;
    if (!track && agent.store.confirmed().size() == 1) track = agent.store.confirmed().front();
    if (!track) return;

    const double horizon = cfg_.sensors.t_ad_s;
    const world::Vec3 obs_future = obs.position + 2.0 * horizon * obs.velocity;
    const tracking::Prediction two_step = tracking::predict_ahead(*track, 2, horizon, obs_future);

    const world::Vec3 stale_rel = track->position() - obs.position;
    PendingBeamEval ev;
    ev.eval_tick = tick_ + 2 * cfg_.ad_every();
    ev.pred_az = two_step.azimuth_rad;
    ev.pred_el = two_step.elevation_rad;
    ev.stale_az = std::atan2(stale_rel.y(), stale_rel.x());
    const double r = stale_rel.norm();
    ev.stale_el = r > 0 ? std::asin(std::clamp(stale_rel.z() / r, -1.0, 1.0)) : 0.0;
    pending_beam_.push_back(ev);
}

void Engine::alert_hook() {
    alert_done_ = true;
    NodeAgent& agent = agents_.front();
    const world::UavNode& obs = world_.at(agent.id);
    alert_latency_ms_ = alert_latency_ours_ms(cfg_.latency);
    alert_baseline_ms_ = alert_latency_baseline_ms(cfg_.latency);

    // ground truth: the nearest approaching real neighbor
    const world::UavNode* truth_target = nullptr;
    double truth_best_range = std::numeric_limits<double>::infinity();
    double truth_best_tca = std::numeric_limits<double>::infinity();
    bool truth_has_approaching = false;
    for (const auto& n : world_.nodes) {
        if (n.node_id == agent.id || n.role == world::Role::SybilPhantom) continue;
        const world::Vec3 rel = n.position - obs.position;
        const world::Vec3 relv = n.velocity - obs.velocity;
        const double range = rel.norm();
        const double rv = rel.dot(relv) / range;
        if (rv < 0.0) {
            if (!truth_has_approaching || range < truth_best_range) {
                truth_best_range = range;
                truth_target = &n;
            }
            truth_has_approaching = true;
        } else if (!truth_has_approaching) {
            const double v2 = relv.squaredNorm();
            const double tca = v2 > 0.0 ? std::max(0.0, -rel.dot(relv) / v2)
                                        : std::numeric_limits<double>::infinity();
            if (tca < truth_best_tca) {
                truth_best_tca = tca;
                truth_target = &n;
            }
        }
    }

    const auto confirmed = agent.store.confirmed();
    const tracking::Track* chosen = nullptr;
    if (!confirmed.empty())
        chosen = select_most_endangered(confirmed, obs.position, obs.velocity);

    channels::Did target_did{};
    if (chosen && chosen->associated_did) {
        target_did = *chosen->associated_did;
        const world::UavNode* truth_of_target = truth_node_of(target_did);
        alert_correct_ = truth_target && truth_of_target &&
                         truth_of_target->node_id == truth_target->node_id;
    } else {
        alert_fallback_ = true;  // no mapped Did: broadcast, counted incorrect
    }

    events_.add(tick_, world_.time_s, "alert",
                Payload().add("sender", static_cast<int>(agent.id))
                    .add("target_did", chosen && chosen->associated_did ? did_str(target_did)
                                                                        : std::string("broadcast"))
                    .add("latency_ms", alert_latency_ms_)
                    .add("baseline_ms", alert_baseline_ms_)
                    .add("correct", alert_correct_ ? 1 : 0)
                    .str());
}

void Engine::ranging_hook() {
    if (world_.time_s < kWarmupS) return;
    for (NodeAgent& agent : agents_) {
        const world::UavNode& self = world_.at(agent.id);
        for (const auto& [did, track_id] : agent.last_matches) {
            const world::UavNode* truth = truth_node_of(did);
            if (!truth || truth->role != world::Role::Legitimate) continue;
            const tracking::Track* track = agent.store.find(track_id);
            const DidState& ds = agent.dids[did];

            const double true_range = (truth->position - self.position).norm();
            const double ad_range = (ds.last_claim - self.position).norm();
            const double vd_range = (track->position() - self.position).norm();

            const double sig_ad = std::max(cfg_.sensors.sigma_gnss_m, 1e-3);
            const Eigen::Matrix3d cov_ad = Eigen::Matrix3d::Identity() * (sig_ad * sig_ad);
            Eigen::Matrix3d cov_fused;
            const world::Vec3 fused = fuse_positions(ds.last_claim, cov_ad, track->position(),
                                                     track->position_cov(), &cov_fused);
            const double fused_range = (fused - self.position).norm();
            const world::Vec3 los = (fused - self.position) / std::max(fused_range, 1e-9);
            const double sigma_los = std::sqrt(los.dot(cov_fused * los));

            ranging_ad_.push_back(std::abs(ad_range - true_range));
            ranging_vd_.push_back(std::abs(vd_range - true_range));
            ranging_fused_.push_back(std::abs(fused_range - true_range));
            ranging_norm_.push_back((fused_range - true_range) / std::max(sigma_los, 1e-12));
        }
    }
}

void Engine::finalize(RunResult& out) {
    Metrics& m = out.metrics;
    m.add("epochs", static_cast<double>(cfg_.total_epochs()));
    m.add("ad_epochs", std::floor(static_cast<double>(cfg_.total_epochs() - 1) / cfg_.ad_every()) + 1);
    m.add("vd_epochs", std::floor(static_cast<double>(cfg_.total_epochs() - 1) / cfg_.vd_every()) + 1);

    switch (cfg_.kind) {
        case ScenarioKind::BeamManagement: {
            const BeamLatency lat = beam_access_latency(cfg_.latency);
            m.add("beam_latency_isac_ms", lat.isac_ms);
            m.add("beam_latency_sweep_ms", lat.sweep_ms);
            m.add("beam_delta_ms", lat.sweep_ms - lat.isac_ms);
            m.add("beam_events", static_cast<double>(beam_events_));
            m.add("pointing_error_pred_deg",
                  beam_events_ ? sum_pred_err_deg_ / static_cast<double>(beam_events_) : 0.0);
            m.add("pointing_error_stale_deg",
                  beam_events_ ? sum_stale_err_deg_ / static_cast<double>(beam_events_) : 0.0);
            break;
        }
        case ScenarioKind::EmergencyAlert: {
            m.add("alert_latency_ms", alert_latency_ms_);
            m.add("alert_latency_baseline_ms", alert_baseline_ms_);
            m.add("alert_reduction_pct",
                  alert_baseline_ms_ > 0.0
                      ? 100.0 * (1.0 - alert_latency_ms_ / alert_baseline_ms_)
                      : 0.0);
            m.add("alert_correct_target", alert_correct_ ? 1.0 : 0.0);
            m.add("alert_broadcast_fallback", alert_fallback_ ? 1.0 : 0.0);
            m.add("ranging_samples", static_cast<double>(ranging_fused_.size()));
            if (!ranging_fused_.empty()) {
                m.add("ranging_p90_ad_m", percentile_nearest_rank(ranging_ad_, 90.0));
                m.add("ranging_p90_vd_m", percentile_nearest_rank(ranging_vd_, 90.0));
                m.add("ranging_p90_fused_m", percentile_nearest_rank(ranging_fused_, 90.0));
                double mean = 0.0;
                for (double x : ranging_norm_) mean += x;
                mean /= static_cast<double>(ranging_norm_.size());
                double var = 0.0;
                for (double x : ranging_norm_) var += (x - mean) * (x - mean);
                var /= static_cast<double>(ranging_norm_.size());
                m.add("ranging_fused_norm_var", var);
            }
            break;
        }
        case ScenarioKind::SybilDetection: {
            std::vector<auth::LocalView> views;
            std::set<channels::Did> heard;
            for (const NodeAgent& a : agents_) {
                views.push_back(a.view_acc.view());
                for (const auto& [did, label] : views.back().vertices) heard.insert(did);
            }
            const int quorum =
                std::min<int>(cfg_.thresholds.quorum, static_cast<int>(views.size()));
            const auth::GlobalView global = auth::merge_views(views, quorum);
            out.verdicts = auth::classify(global, heard, ever_matched_);
            out.final_views = views;

            // AD-only mobility baseline over the emitted claim histories
            std::vector<auth::ClaimSeries> series;
            for (const auto& [did, positions] : claim_history_)
                series.push_back({did, positions});
            std::size_t min_len = std::numeric_limits<std::size_t>::max();
            for (const auto& s : series) min_len = std::min(min_len, s.positions.size());
            if (!series.empty() && min_len >= 3) {
                out.baseline_verdicts = auth::baseline_mobility_detect(
                    series, static_cast<int>(min_len), cfg_.thresholds.baseline_rho,
                    cfg_.thresholds.baseline_dist_var_m2);
            }

            const DetectionMetrics ours = detection_metrics(out.verdicts, truth_attacker_dids_);
            const DetectionMetrics base =
                detection_metrics(out.baseline_verdicts, truth_attacker_dids_);
            m.add("precision", ours.precision);
            m.add("recall", ours.recall);
            m.add("f1", ours.f1);
            m.add("precision_baseline", base.precision);
            m.add("recall_baseline", base.recall);
            m.add("f1_baseline", base.f1);
            std::int64_t detect = -1;
            for (const NodeAgent& a : agents_)
                if (a.certifier && a.flag_epoch_ad >= 0 &&
                    (detect < 0 || a.flag_epoch_ad < detect))
                    detect = a.flag_epoch_ad;
            m.add("detection_epoch_ad", static_cast<double>(detect));
            m.add("n_flagged",
                  static_cast<double>(ours.true_positives + ours.false_positives));
            m.add("n_truth", static_cast<double>(truth_attacker_dids_.size()));
            m.add("did_collisions", static_cast<double>(collisions_));

            for (const auto& v : out.verdicts)
                events_.add(tick_, world_.time_s, "verdict",
                            Payload().add("did", did_str(v.did))
                                .add("class", auth::to_string(v.cls))
                                .str());
            for (const auto& v : out.baseline_verdicts)
                events_.add(tick_, world_.time_s, "baseline_verdict",
                            Payload().add("did", did_str(v.did))
                                .add("class", auth::to_string(v.cls))
                                .str());
            break;
        }
    }
    out.truth_attacker_dids = truth_attacker_dids_;
    out.did_of_name = did_of_name_;
    out.ranging_errors_ad_m = std::move(ranging_ad_);
    out.ranging_errors_vd_m = std::move(ranging_vd_);
    out.ranging_errors_fused_m = std::move(ranging_fused_);
    out.events = std::move(events_);
    out.config_echo = echo_config(cfg_);
}

RunResult Engine::run() {
    RunResult out;
    const std::int64_t total = cfg_.total_epochs();
    for (tick_ = 0; tick_ < total; ++tick_) {
        if (tick_ % cfg_.vd_every() == 0) vd_epoch();
        if (tick_ % cfg_.ad_every() == 0) ad_epoch(tick_ / cfg_.ad_every());
        world_ = world::step(world_, cfg_.dt_s);
    }
    finalize(out);
    return out;
}

}  // namespace

world::Vec3 fuse_positions(const world::Vec3& xa, const Eigen::Matrix3d& ca,
                           const world::Vec3& xv, const Eigen::Matrix3d& cv,
                           Eigen::Matrix3d* fused_cov) {
    const Eigen::Matrix3d ia = ca.inverse();
    const Eigen::Matrix3d iv = cv.inverse();
    const Eigen::Matrix3d cf = (ia + iv).inverse();
    if (fused_cov) *fused_cov = cf;
    return cf * (ia * xa + iv * xv);
}

BeamLatency beam_access_latency(const LatencyConstants& lat) {
    BeamLatency b;
    b.isac_ms = lat.t_echo_ms;  // prediction costs no air time
    b.sweep_ms = static_cast<double>(lat.n_codebook) * lat.t_ssb_ms + lat.t_report_ms +
                 lat.t_feedback_ms;
    return b;
}

double alert_latency_ours_ms(const LatencyConstants& lat) {
    return lat.t_echo_ms + lat.t_hop_ms;
}

double alert_latency_baseline_ms(const LatencyConstants& lat) {
    // beacon out + reply, DID confirmation processing, then the alert itself
    return 3.0 * lat.t_hop_ms + lat.t_report_ms + lat.t_feedback_ms;
}

const tracking::Track* select_most_endangered(std::span<const tracking::Track* const> tracks,
                                              const world::Vec3& observer_position,
                                              const world::Vec3& observer_velocity) {
    if (tracks.empty()) throw std::invalid_argument("select_most_endangered: no confirmed tracks");

    const tracking::Track* best_approaching = nullptr;
    double best_range = std::numeric_limits<double>::infinity();
    const tracking::Track* best_tca_track = nullptr;
    double best_tca = std::numeric_limits<double>::infinity();

    for (const tracking::Track* t : tracks) {
        const world::Vec3 rel = t->position() - observer_position;
        const world::Vec3 relv = t->velocity() - observer_velocity;
        const double range = std::max(rel.norm(), 1e-9);
        const double rv = rel.dot(relv) / range;
        if (rv < 0.0 && range < best_range) {
            best_range = range;
            best_approaching = t;
        }
        const double v2 = relv.squaredNorm();
        const double tca =
            v2 > 0.0 ? std::max(0.0, -rel.dot(relv) / v2) : std::numeric_limits<double>::infinity();
        if (tca < best_tca) {
            best_tca = tca;
            best_tca_track = t;
        }
    }
    if (best_approaching) return best_approaching;
    return best_tca_track ? best_tca_track : tracks.front();
}

RunResult run_scenario(const ScenarioConfig& cfg) {
    Engine engine(cfg);
    return engine.run();
}

void write_run(const RunResult& result, const ScenarioConfig& cfg,
               const std::filesystem::path& out_dir) {
    emit_report(result.metrics, result.events, result.config_echo, to_string(cfg.kind), cfg.seed,
                out_dir);
}

}  // namespace dimap::scenarios
