#include "dimap/channels.hpp"

#include <algorithm>
#include <stdexcept>

namespace dimap::channels {

void SensorConfig::validate() const {
    if (!(comm_range_m > 0.0)) throw std::invalid_argument("SensorConfig: comm_range_m must be > 0");
    if (!(sense_range_m > 0.0)) throw std::invalid_argument("SensorConfig: sense_range_m must be > 0");
    if (!(t_ad_s > 0.0) || !(t_vd_s > 0.0))
        throw std::invalid_argument("SensorConfig: periods must be > 0");
    if (t_vd_s > t_ad_s)
        throw std::invalid_argument("SensorConfig: t_vd_s must not exceed t_ad_s");
    for (double s : {sigma_gnss_m, sigma_r_m, sigma_angle_rad, sigma_v_mps, sigma_ad_speed_mps,
                     sigma_ad_heading_rad})
        if (s < 0.0) throw std::invalid_argument("SensorConfig: sigma must be >= 0");
    if (!(p_detect > 0.0) || p_detect > 1.0)
        throw std::invalid_argument("SensorConfig: p_detect must be in (0, 1]");
    if (rotor_confusion_prob < 0.0 || rotor_confusion_prob >= 1.0)
        throw std::invalid_argument("SensorConfig: rotor_confusion_prob must be in [0, 1)");
    if (hop_latency_s < 0.0) throw std::invalid_argument("SensorConfig: hop_latency_s must be >= 0");
}

std::vector<Beacon> emit_beacons(const world::WorldState& w, world::NodeId node_id,
                                 const SensorConfig& cfg, Did own_did,
                                 std::span<const IdentityClaim> malicious_claims,
                                 std::span<const WitnessReport> witness_reports,
                                 RngStream& rng) {
    const world::UavNode& node = w.at(node_id);
    if (node.role == world::Role::SybilPhantom)
        throw std::invalid_argument("emit_beacons: phantoms do not transmit");

    std::vector<Beacon> out;
    if (node.role == world::Role::Legitimate) {
        Beacon b;
        b.sender_did = own_did;
        b.claimed_position = node.position + world::Vec3(rng.gaussian(0.0, cfg.sigma_gnss_m),
                                                         rng.gaussian(0.0, cfg.sigma_gnss_m),
                                                         rng.gaussian(0.0, cfg.sigma_gnss_m));
        b.claimed_velocity = node.velocity;
        b.claimed_wing_type = node.wing_type;
        b.claimed_rotor_count = node.rotor_count;
        b.emit_time_s = w.time_s;
        b.true_origin = node_id;
        b.witness_reports.assign(witness_reports.begin(), witness_reports.end());
        if (b.witness_reports.size() > kMaxWitnessReports)
            b.witness_reports.resize(kMaxWitnessReports);
        out.push_back(std::move(b));
        return out;
    }

    // Malicious: one beacon per operated identity, claims fabricated upstream.
    for (const IdentityClaim& c : malicious_claims) {
        Beacon b;
        b.sender_did = c.did;
        b.claimed_position = c.claimed_position;
        b.claimed_velocity = c.claimed_velocity;
        b.claimed_wing_type = c.claimed_wing_type;
        b.claimed_rotor_count = c.claimed_rotor_count;
        b.emit_time_s = w.time_s;
        b.true_origin = node_id;
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<AdReception> deliver(const world::WorldState& w, std::span<const Beacon> beacons,
                                 const SensorConfig& cfg) {
    std::vector<AdReception> out;
    for (const Beacon& b : beacons) {
        const world::UavNode& origin = w.at(b.true_origin);
        for (const auto& n : w.nodes) {
            if (n.role == world::Role::SybilPhantom) continue;
            if (n.node_id == b.true_origin) continue;
            if ((n.position - origin.position).norm() > cfg.comm_range_m) continue;
            AdReception r;
            r.beacon = b;
            r.receiver = n.node_id;
            r.receive_time_s = b.emit_time_s + cfg.hop_latency_s;
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<VdMeasurement> sense(const world::WorldState& w, world::NodeId observer_id,
                                 const SensorConfig& cfg, RngStream& rng) {
    const world::UavNode& observer = w.at(observer_id);
    if (observer.role == world::Role::SybilPhantom)
        throw std::invalid_argument("sense: phantoms do not sense");

    std::vector<VdMeasurement> out;
    for (const auto& target : w.nodes) {
        if (target.node_id == observer_id) continue;
        if (target.role == world::Role::SybilPhantom) continue;  // no body, no echo
        if ((target.position - observer.position).norm() > cfg.sense_range_m) continue;
        if (!rng.bernoulli(cfg.p_detect)) continue;

        const world::PolarTruth truth = world::relative_polar(observer, target);
        VdMeasurement m;
        m.observer = observer_id;
        m.range_m = std::max(0.0, truth.range_m + rng.gaussian(0.0, cfg.sigma_r_m));
        m.azimuth_rad = identity::wrap_angle(truth.azimuth_rad + rng.gaussian(0.0, cfg.sigma_angle_rad));
        m.elevation_rad = std::clamp(truth.elevation_rad + rng.gaussian(0.0, cfg.sigma_angle_rad),
                                     -1.5707963267948966, 1.5707963267948966);
        m.radial_velocity_mps = truth.radial_velocity_mps + rng.gaussian(0.0, cfg.sigma_v_mps);

        m.rotor_class = identity::rotor_class_of(target.rotor_count);
        if (cfg.rotor_confusion_prob > 0.0 && rng.bernoulli(cfg.rotor_confusion_prob)) {
            // flip to a random wrong class
            const int true_class = static_cast<int>(m.rotor_class);
            int other = static_cast<int>(rng.uniform_int(identity::kNumRotorClasses - 1));
            if (other >= true_class) ++other;
            m.rotor_class = static_cast<identity::RotorClass>(other);
        }

        m.var_range = std::max(cfg.sigma_r_m * cfg.sigma_r_m, 1e-12);
        m.var_azimuth = std::max(cfg.sigma_angle_rad * cfg.sigma_angle_rad, 1e-12);
        m.var_elevation = m.var_azimuth;
        m.var_speed = std::max(cfg.sigma_v_mps * cfg.sigma_v_mps, 1e-12);
        m.time_s = w.time_s;
        m.true_source = target.node_id;
        out.push_back(std::move(m));
    }

    if (cfg.clutter_enabled) {
        // Poisson(1) false alarms per scan, uniform over the sensing volume;
        // true_source -1 marks a detection with no body behind it
        int n_clutter = 0;
        double acc = rng.uniform01();
        while (acc > std::exp(-1.0) && n_clutter < 8) {
            ++n_clutter;
            acc *= rng.uniform01();
        }
        for (int k = 0; k < n_clutter; ++k) {
            VdMeasurement m;
            m.observer = observer_id;
            m.range_m = cfg.sense_range_m * std::cbrt(rng.uniform01());
            m.azimuth_rad = rng.uniform(-3.141592653589793, 3.141592653589793);
            m.elevation_rad = rng.uniform(-0.5, 0.5);
            m.radial_velocity_mps = rng.gaussian(0.0, 10.0);
            m.rotor_class =
                static_cast<identity::RotorClass>(rng.uniform_int(identity::kNumRotorClasses));
            m.var_range = std::max(cfg.sigma_r_m * cfg.sigma_r_m, 1e-12);
            m.var_azimuth = std::max(cfg.sigma_angle_rad * cfg.sigma_angle_rad, 1e-12);
            m.var_elevation = m.var_azimuth;
            m.var_speed = std::max(cfg.sigma_v_mps * cfg.sigma_v_mps, 1e-12);
            m.time_s = w.time_s;
            m.true_source = -1;
            out.push_back(std::move(m));
        }
    }
    return out;
}

}  // namespace dimap::channels
