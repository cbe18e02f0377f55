#include "dimap/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dimap::scenarios {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

double parse_double(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(path + ": expected a number, got '" + v + "'");
    }
}

std::int64_t parse_int(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(path + ": expected an integer, got '" + v + "'");
    }
}

std::uint64_t parse_u64(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(path + ": expected an unsigned integer, got '" + v + "'");
    }
}

bool parse_bool(const std::string& path, const std::string& v) {
    if (v == "yes" || v == "true" || v == "on" || v == "1") return true;
    if (v == "no" || v == "false" || v == "off" || v == "0") return false;
    throw ConfigError(path + ": expected yes/no, got '" + v + "'");
}

world::Vec3 parse_vec3(const std::string& path, const std::string& v) {
    std::array<double, 3> xyz{};
    std::stringstream ss(v);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) throw ConfigError(path + ": expected x,y,z");
        xyz[i++] = parse_double(path, trim(part));
    }
    if (i != 3) throw ConfigError(path + ": expected x,y,z");
    return {xyz[0], xyz[1], xyz[2]};
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    return out;
}

const char* to_string(world::Role r) {
    switch (r) {
        case world::Role::Legitimate: return "legit";
        case world::Role::Malicious: return "malicious";
        case world::Role::SybilPhantom: return "phantom";
    }
    return "?";
}

NodeSpec parse_node(const std::string& path, const std::string& name, const std::string& value) {
    NodeSpec n;
    n.name = name;
    std::stringstream ss(value);
    std::string tok;
    while (ss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError(path + ": expected key=value, got '" + tok + "'");
        const std::string k = tok.substr(0, eq);
        const std::string v = tok.substr(eq + 1);
        const std::string kp = path + "." + k;
        if (k == "role") {
            if (v == "legit" || v == "legitimate") n.role = world::Role::Legitimate;
            else if (v == "malicious") n.role = world::Role::Malicious;
            else throw ConfigError(kp + ": expected legit|malicious, got '" + v + "'");
        } else if (k == "pos") {
            n.position = parse_vec3(kp, v);
        } else if (k == "vel") {
            n.velocity = parse_vec3(kp, v);
        } else if (k == "wing") {
            if (v == "fixed") n.wing = world::WingType::Fixed;
            else if (v == "rotary") n.wing = world::WingType::Rotary;
            else throw ConfigError(kp + ": expected fixed|rotary, got '" + v + "'");
        } else if (k == "rotors") {
            n.rotors = static_cast<int>(parse_int(kp, v));
        } else if (k == "certifier") {
            n.certifier = parse_bool(kp, v);
        } else if (k == "waypoints") {
            for (const auto& w : split(v, ';'))
                n.waypoints.push_back(parse_vec3(kp, w));
        } else if (k == "speed") {
            n.waypoint_speed_mps = parse_double(kp, v);
        } else {
            throw ConfigError(kp + ": unknown key");
        }
    }
    return n;
}

std::string node_to_string(const NodeSpec& n) {
    std::ostringstream os;
    os << "role=" << to_string(n.role);
    os << " pos=" << fmt9(n.position.x()) << "," << fmt9(n.position.y()) << ","
       << fmt9(n.position.z());
    os << " vel=" << fmt9(n.velocity.x()) << "," << fmt9(n.velocity.y()) << ","
       << fmt9(n.velocity.z());
    os << " wing=" << (n.wing == world::WingType::Fixed ? "fixed" : "rotary");
    os << " rotors=" << n.rotors;
    os << " certifier=" << (n.certifier ? "yes" : "no");
    if (!n.waypoints.empty()) {
        os << " waypoints=";
        for (std::size_t i = 0; i < n.waypoints.size(); ++i) {
            if (i) os << ";";
            os << fmt9(n.waypoints[i].x()) << "," << fmt9(n.waypoints[i].y()) << ","
               << fmt9(n.waypoints[i].z());
        }
        os << " speed=" << fmt9(n.waypoint_speed_mps);
    }
    return os.str();
}

}  // namespace

const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::BeamManagement: return "beam_management";
        case ScenarioKind::EmergencyAlert: return "emergency_alert";
        case ScenarioKind::SybilDetection: return "sybil_detection";
    }
    return "?";
}

int ScenarioConfig::ad_every() const {
    return static_cast<int>(std::llround(sensors.t_ad_s / dt_s));
}

int ScenarioConfig::vd_every() const {
    return static_cast<int>(std::llround(sensors.t_vd_s / dt_s));
}

std::int64_t ScenarioConfig::total_epochs() const {
    return static_cast<std::int64_t>(std::llround(duration_s / dt_s));
}

void ScenarioConfig::validate() const {
    if (!(duration_s > 0.0)) throw ConfigError("scenario.duration_s: must be > 0");
    if (!(dt_s > 0.0)) throw ConfigError("scenario.dt_s: must be > 0");
    try {
        sensors.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("noise: ") + e.what());
    }
    auto near_integer = [](double x) { return std::abs(x - std::llround(x)) < 1e-6; };
    if (!near_integer(sensors.t_ad_s / dt_s) || ad_every() < 1)
        throw ConfigError("noise.t_ad_s: must be a positive multiple of scenario.dt_s");
    if (!near_integer(sensors.t_vd_s / dt_s) || vd_every() < 1)
        throw ConfigError("noise.t_vd_s: must be a positive multiple of scenario.dt_s");

    if (nodes.empty()) throw ConfigError("nodes: at least one node required");
    std::set<std::string> names;
    int n_legit = 0, n_malicious = 0;
    for (const auto& n : nodes) {
        if (!names.insert(n.name).second)
            throw ConfigError("nodes." + n.name + ": duplicate node name");
        if (n.role == world::Role::Legitimate) ++n_legit;
        if (n.role == world::Role::Malicious) ++n_malicious;
        if (n.rotors < 0) throw ConfigError("nodes." + n.name + ".rotors: must be >= 0");
        if (!n.waypoints.empty() && !(n.waypoint_speed_mps > 0.0))
            throw ConfigError("nodes." + n.name + ".speed: required with waypoints");
    }
    if (n_legit < 1) throw ConfigError("nodes: at least one legitimate node required");
    if (nodes.front().role != world::Role::Legitimate)
        throw ConfigError("nodes: the first node acts as observer and must be legitimate");

    if (attack) {
        try {
            attack->validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("attack: ") + e.what());
        }
        if (n_malicious < 1)
            throw ConfigError("attack: requires at least one malicious node in [nodes]");
    }

    if ((kind == ScenarioKind::BeamManagement || kind == ScenarioKind::EmergencyAlert) &&
        nodes.size() < 2)
        throw ConfigError("nodes: this scenario kind needs an observer and a target");

    const Thresholds& t = thresholds;
    if (!(t.sim_min > 0.0) || !(t.sim_min < 1.0))
        throw ConfigError("thresholds.sim_min: must be in (0, 1)");
    if (!(t.mmse_tau > 0.0)) throw ConfigError("thresholds.mmse_tau: must be > 0");
    if (t.mmse_window_min < 1 || t.mmse_window_cap < t.mmse_window_min)
        throw ConfigError("thresholds.mmse_window: need 1 <= min <= cap");
    if (!(t.gate_radius_m > 0.0)) throw ConfigError("thresholds.gate_radius_m: must be > 0");
    if (t.confirm_hits < 1) throw ConfigError("thresholds.confirm_hits: must be >= 1");
    if (t.delete_misses < 1) throw ConfigError("thresholds.delete_misses: must be >= 1");
    if (t.quorum < 1) throw ConfigError("thresholds.quorum: must be >= 1");
    if (!(t.process_noise_q > 0.0)) throw ConfigError("thresholds.process_noise_q: must be > 0");
    if (!(t.staleness_s > 0.0)) throw ConfigError("thresholds.staleness_s: must be > 0");
    if (t.grace_epochs < 1) throw ConfigError("thresholds.grace_epochs: must be >= 1");
    if (!(t.baseline_rho > 0.0) || !(t.baseline_rho < 1.0))
        throw ConfigError("thresholds.baseline_rho: must be in (0, 1)");
    if (!(t.baseline_dist_var_m2 > 0.0))
        throw ConfigError("thresholds.baseline_dist_var_m2: must be > 0");

    const LatencyConstants& l = latency;
    for (auto [key, v] : {std::pair<const char*, double>{"t_echo_ms", l.t_echo_ms},
                          {"t_feedback_ms", l.t_feedback_ms},
                          {"t_report_ms", l.t_report_ms},
                          {"t_ssb_ms", l.t_ssb_ms},
                          {"t_hop_ms", l.t_hop_ms}})
        if (v < 0.0) throw ConfigError(std::string("latency.") + key + ": must be >= 0");
    if (l.n_codebook < 0) throw ConfigError("latency.n_codebook: must be >= 0");
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig cfg;
    bool saw_attack_section = false;
    attacks::AttackConfig attack;

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known = {"scenario", "nodes", "noise",
                                                        "attack", "thresholds", "latency"};
            if (!known.count(section))
                throw ConfigError("[" + section + "]: unknown section");
            if (section == "attack") saw_attack_section = true;
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        const std::string path = section + "." + key;

        if (section == "scenario") {
            if (key == "kind") {
                if (value == "beam_management") cfg.kind = ScenarioKind::BeamManagement;
                else if (value == "emergency_alert") cfg.kind = ScenarioKind::EmergencyAlert;
                else if (value == "sybil_detection") cfg.kind = ScenarioKind::SybilDetection;
                else throw ConfigError(path + ": unknown scenario kind '" + value + "'");
            } else if (key == "duration_s") cfg.duration_s = parse_double(path, value);
            else if (key == "dt_s") cfg.dt_s = parse_double(path, value);
            else if (key == "seed") cfg.seed = parse_u64(path, value);
            else throw ConfigError(path + ": unknown key");
        } else if (section == "nodes") {
            cfg.nodes.push_back(parse_node("nodes." + key, key, value));
        } else if (section == "noise") {
            auto& s = cfg.sensors;
            if (key == "comm_range_m") s.comm_range_m = parse_double(path, value);
            else if (key == "sense_range_m") s.sense_range_m = parse_double(path, value);
            else if (key == "t_ad_s") s.t_ad_s = parse_double(path, value);
            else if (key == "t_vd_s") s.t_vd_s = parse_double(path, value);
            else if (key == "sigma_gnss_m") s.sigma_gnss_m = parse_double(path, value);
            else if (key == "sigma_r_m") s.sigma_r_m = parse_double(path, value);
            else if (key == "sigma_angle_rad") s.sigma_angle_rad = parse_double(path, value);
            else if (key == "sigma_v_mps") s.sigma_v_mps = parse_double(path, value);
            else if (key == "sigma_ad_speed_mps") s.sigma_ad_speed_mps = parse_double(path, value);
            else if (key == "sigma_ad_heading_rad") s.sigma_ad_heading_rad = parse_double(path, value);
            else if (key == "p_detect") s.p_detect = parse_double(path, value);
            else if (key == "rotor_confusion_prob") s.rotor_confusion_prob = parse_double(path, value);
            else if (key == "clutter") s.clutter_enabled = parse_bool(path, value);
            else throw ConfigError(path + ": unknown key");
        } else if (section == "attack") {
            if (key == "hop_mode") {
                if (value == "direct") attack.hop_mode = attacks::HopMode::Direct;
                else if (value == "indirect") attack.hop_mode = attacks::HopMode::Indirect;
                else throw ConfigError(path + ": expected direct|indirect");
            } else if (key == "time_mode") {
                if (value == "simultaneous") attack.time_mode = attacks::TimeMode::Simultaneous;
                else if (value == "non_simultaneous")
                    attack.time_mode = attacks::TimeMode::NonSimultaneous;
                else throw ConfigError(path + ": expected simultaneous|non_simultaneous");
            } else if (key == "id_mode") {
                if (value == "fabricated") attack.id_mode = attacks::IdMode::Fabricated;
                else if (value == "stolen") attack.id_mode = attacks::IdMode::Stolen;
                else throw ConfigError(path + ": expected fabricated|stolen");
            } else if (key == "claim_motion") {
                if (value == "fixed_offset") attack.claim_motion = attacks::ClaimMotion::FixedOffset;
                else if (value == "independent_walk")
                    attack.claim_motion = attacks::ClaimMotion::IndependentWalk;
                else throw ConfigError(path + ": expected fixed_offset|independent_walk");
            } else if (key == "n_sybil") attack.n_sybil = static_cast<int>(parse_int(path, value));
            else if (key == "spawn_interval_s") attack.spawn_interval_s = parse_double(path, value);
            else if (key == "claim_offset_m") attack.claim_offset_m = parse_double(path, value);
            else if (key == "host_claim_offset_m")
                attack.host_claim_offset_m = parse_double(path, value);
            else if (key == "walk_step_m") attack.walk_step_m = parse_double(path, value);
            else if (key == "forge_witness_reports")
                attack.forge_witness_reports = parse_bool(path, value);
            else throw ConfigError(path + ": unknown key");
        } else if (section == "thresholds") {
            auto& t = cfg.thresholds;
            if (key == "sim_min") t.sim_min = parse_double(path, value);
            else if (key == "mmse_tau") t.mmse_tau = parse_double(path, value);
            else if (key == "mmse_window_min") t.mmse_window_min = static_cast<int>(parse_int(path, value));
            else if (key == "mmse_window_cap") t.mmse_window_cap = static_cast<int>(parse_int(path, value));
            else if (key == "gate_radius_m") t.gate_radius_m = parse_double(path, value);
            else if (key == "confirm_hits") t.confirm_hits = static_cast<int>(parse_int(path, value));
            else if (key == "delete_misses") t.delete_misses = static_cast<int>(parse_int(path, value));
            else if (key == "quorum") t.quorum = static_cast<int>(parse_int(path, value));
            else if (key == "process_noise_q") t.process_noise_q = parse_double(path, value);
            else if (key == "staleness_s") t.staleness_s = parse_double(path, value);
            else if (key == "grace_epochs") t.grace_epochs = static_cast<int>(parse_int(path, value));
            else if (key == "baseline_rho") t.baseline_rho = parse_double(path, value);
            else if (key == "baseline_dist_var_m2") t.baseline_dist_var_m2 = parse_double(path, value);
            else throw ConfigError(path + ": unknown key");
        } else if (section == "latency") {
            auto& l = cfg.latency;
            if (key == "t_echo_ms") l.t_echo_ms = parse_double(path, value);
            else if (key == "t_feedback_ms") l.t_feedback_ms = parse_double(path, value);
            else if (key == "t_report_ms") l.t_report_ms = parse_double(path, value);
            else if (key == "n_codebook") l.n_codebook = static_cast<int>(parse_int(path, value));
            else if (key == "t_ssb_ms") l.t_ssb_ms = parse_double(path, value);
            else if (key == "t_hop_ms") l.t_hop_ms = parse_double(path, value);
            else throw ConfigError(path + ": unknown key");
        }
    }

    if (saw_attack_section) cfg.attack = attack;
    cfg.sensors.hop_latency_s = cfg.latency.t_hop_ms / 1000.0;  // derived, not a [noise] key
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string echo_config(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "[scenario]\n";
    os << "kind = " << to_string(cfg.kind) << "\n";
    os << "duration_s = " << fmt9(cfg.duration_s) << "\n";
    os << "dt_s = " << fmt9(cfg.dt_s) << "\n";
    os << "seed = " << cfg.seed << "\n\n";

    os << "[nodes]\n";
    for (const auto& n : cfg.nodes) os << n.name << " = " << node_to_string(n) << "\n";
    os << "\n";

    const auto& s = cfg.sensors;
    os << "[noise]\n";
    os << "comm_range_m = " << fmt9(s.comm_range_m) << "\n";
    os << "sense_range_m = " << fmt9(s.sense_range_m) << "\n";
    os << "t_ad_s = " << fmt9(s.t_ad_s) << "\n";
    os << "t_vd_s = " << fmt9(s.t_vd_s) << "\n";
    os << "sigma_gnss_m = " << fmt9(s.sigma_gnss_m) << "\n";
    os << "sigma_r_m = " << fmt9(s.sigma_r_m) << "\n";
    os << "sigma_angle_rad = " << fmt9(s.sigma_angle_rad) << "\n";
    os << "sigma_v_mps = " << fmt9(s.sigma_v_mps) << "\n";
    os << "sigma_ad_speed_mps = " << fmt9(s.sigma_ad_speed_mps) << "\n";
    os << "sigma_ad_heading_rad = " << fmt9(s.sigma_ad_heading_rad) << "\n";
    os << "p_detect = " << fmt9(s.p_detect) << "\n";
    os << "rotor_confusion_prob = " << fmt9(s.rotor_confusion_prob) << "\n";
    os << "clutter = " << (s.clutter_enabled ? "yes" : "no") << "\n\n";

    if (cfg.attack) {
        const auto& a = *cfg.attack;
        os << "[attack]\n";
        os << "hop_mode = " << (a.hop_mode == attacks::HopMode::Direct ? "direct" : "indirect")
           << "\n";
        os << "time_mode = "
           << (a.time_mode == attacks::TimeMode::Simultaneous ? "simultaneous"
                                                              : "non_simultaneous")
           << "\n";
        os << "id_mode = " << (a.id_mode == attacks::IdMode::Fabricated ? "fabricated" : "stolen")
           << "\n";
        os << "claim_motion = "
           << (a.claim_motion == attacks::ClaimMotion::FixedOffset ? "fixed_offset"
                                                                   : "independent_walk")
           << "\n";
        os << "n_sybil = " << a.n_sybil << "\n";
        os << "spawn_interval_s = " << fmt9(a.spawn_interval_s) << "\n";
        os << "claim_offset_m = " << fmt9(a.claim_offset_m) << "\n";
        os << "host_claim_offset_m = " << fmt9(a.host_claim_offset_m) << "\n";
        os << "walk_step_m = " << fmt9(a.walk_step_m) << "\n";
        os << "forge_witness_reports = " << (a.forge_witness_reports ? "yes" : "no") << "\n\n";
    }

    const auto& t = cfg.thresholds;
    os << "[thresholds]\n";
    os << "sim_min = " << fmt9(t.sim_min) << "\n";
    os << "mmse_tau = " << fmt9(t.mmse_tau) << "\n";
    os << "mmse_window_min = " << t.mmse_window_min << "\n";
    os << "mmse_window_cap = " << t.mmse_window_cap << "\n";
    os << "gate_radius_m = " << fmt9(t.gate_radius_m) << "\n";
    os << "confirm_hits = " << t.confirm_hits << "\n";
    os << "delete_misses = " << t.delete_misses << "\n";
    os << "quorum = " << t.quorum << "\n";
    os << "process_noise_q = " << fmt9(t.process_noise_q) << "\n";
    os << "staleness_s = " << fmt9(t.staleness_s) << "\n";
    os << "grace_epochs = " << t.grace_epochs << "\n";
    os << "baseline_rho = " << fmt9(t.baseline_rho) << "\n";
    os << "baseline_dist_var_m2 = " << fmt9(t.baseline_dist_var_m2) << "\n\n";

    const auto& l = cfg.latency;
    os << "[latency]\n";
    os << "t_echo_ms = " << fmt9(l.t_echo_ms) << "\n";
    os << "t_feedback_ms = " << fmt9(l.t_feedback_ms) << "\n";
    os << "t_report_ms = " << fmt9(l.t_report_ms) << "\n";
    os << "n_codebook = " << l.n_codebook << "\n";
    os << "t_ssb_ms = " << fmt9(l.t_ssb_ms) << "\n";
    os << "t_hop_ms = " << fmt9(l.t_hop_ms) << "\n";
    return os.str();
}

void set_numeric_field(ScenarioConfig& cfg, const std::string& dotted_key, double value) {
    auto& s = cfg.sensors;
    auto& t = cfg.thresholds;
    auto& l = cfg.latency;
    const std::map<std::string, double*> doubles = {
        {"scenario.duration_s", &cfg.duration_s},
        {"scenario.dt_s", &cfg.dt_s},
        {"noise.comm_range_m", &s.comm_range_m},
        {"noise.sense_range_m", &s.sense_range_m},
        {"noise.t_ad_s", &s.t_ad_s},
        {"noise.t_vd_s", &s.t_vd_s},
        {"noise.sigma_gnss_m", &s.sigma_gnss_m},
        {"noise.sigma_r_m", &s.sigma_r_m},
        {"noise.sigma_angle_rad", &s.sigma_angle_rad},
        {"noise.sigma_v_mps", &s.sigma_v_mps},
        {"noise.sigma_ad_speed_mps", &s.sigma_ad_speed_mps},
        {"noise.sigma_ad_heading_rad", &s.sigma_ad_heading_rad},
        {"noise.p_detect", &s.p_detect},
        {"noise.rotor_confusion_prob", &s.rotor_confusion_prob},
        {"thresholds.sim_min", &t.sim_min},
        {"thresholds.mmse_tau", &t.mmse_tau},
        {"thresholds.gate_radius_m", &t.gate_radius_m},
        {"thresholds.process_noise_q", &t.process_noise_q},
        {"thresholds.staleness_s", &t.staleness_s},
        {"thresholds.baseline_rho", &t.baseline_rho},
        {"thresholds.baseline_dist_var_m2", &t.baseline_dist_var_m2},
        {"latency.t_echo_ms", &l.t_echo_ms},
        {"latency.t_feedback_ms", &l.t_feedback_ms},
        {"latency.t_report_ms", &l.t_report_ms},
        {"latency.t_ssb_ms", &l.t_ssb_ms},
        {"latency.t_hop_ms", &l.t_hop_ms},
    };
    if (auto it = doubles.find(dotted_key); it != doubles.end()) {
        *it->second = value;
        cfg.sensors.hop_latency_s = cfg.latency.t_hop_ms / 1000.0;
        return;
    }

    std::map<std::string, int*> ints = {
        {"thresholds.mmse_window_min", &t.mmse_window_min},
        {"thresholds.mmse_window_cap", &t.mmse_window_cap},
        {"thresholds.confirm_hits", &t.confirm_hits},
        {"thresholds.delete_misses", &t.delete_misses},
        {"thresholds.quorum", &t.quorum},
        {"thresholds.grace_epochs", &t.grace_epochs},
        {"latency.n_codebook", &l.n_codebook},
    };
    if (cfg.attack) {
        auto& a = *cfg.attack;
        const std::map<std::string, double*> attack_doubles = {
            {"attack.spawn_interval_s", &a.spawn_interval_s},
            {"attack.claim_offset_m", &a.claim_offset_m},
            {"attack.host_claim_offset_m", &a.host_claim_offset_m},
            {"attack.walk_step_m", &a.walk_step_m},
        };
        if (auto it = attack_doubles.find(dotted_key); it != attack_doubles.end()) {
            *it->second = value;
            return;
        }
        if (dotted_key == "attack.n_sybil") {
            a.n_sybil = static_cast<int>(std::llround(value));
            return;
        }
    }
    if (auto it = ints.find(dotted_key); it != ints.end()) {
        *it->second = static_cast<int>(std::llround(value));
        return;
    }
    throw ConfigError(dotted_key + ": unknown or non-numeric field");
}

}  // namespace dimap::scenarios
