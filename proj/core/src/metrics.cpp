#include "dimap/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dimap::scenarios {

double percentile_nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile: empty sample");
    if (!(p > 0.0) || p > 100.0) throw std::invalid_argument("percentile: p must be in (0, 100]");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n) / 100.0));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return values[rank - 1];
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

DetectionMetrics detection_metrics(std::span<const auth::Verdict> verdicts,
                                   const std::set<auth::Did>& truth) {
    std::set<auth::Did> flagged;
    for (const auto& v : verdicts)
        if (v.cls == auth::VerdictClass::Sybil || v.cls == auth::VerdictClass::Malicious)
            flagged.insert(v.did);

    DetectionMetrics m;
    for (const auto& d : flagged)
        truth.count(d) ? ++m.true_positives : ++m.false_positives;
    for (const auto& d : truth)
        if (!flagged.count(d)) ++m.false_negatives;

    if (flagged.empty())
        m.precision = truth.empty() ? 1.0 : 0.0;
    else
        m.precision = static_cast<double>(m.true_positives) / static_cast<double>(flagged.size());
    m.recall = truth.empty()
                   ? 1.0
                   : static_cast<double>(m.true_positives) / static_cast<double>(truth.size());
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    return m;
}

const double* Metrics::find(std::string_view name) const {
    for (const auto& m : values)
        if (m.name == name) return &m.value;
    return nullptr;
}

double Metrics::at(std::string_view name) const {
    const double* v = find(name);
    if (!v) throw std::out_of_range("metric not found: " + std::string(name));
    return *v;
}

void emit_report(const Metrics& metrics, const EventLog& events, const std::string& config_echo,
                 const std::string& scenario_name, std::uint64_t seed,
                 const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("emit_report: cannot create " + out_dir.string());

    auto open = [&](const char* name) {
        std::ofstream f(out_dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("emit_report: cannot write " + (out_dir / name).string());
        return f;
    };

    {
        auto csv = open("summary.csv");
        csv << "scenario,seed,metric,value\n";
        for (const auto& m : metrics.values)
            csv << scenario_name << "," << seed << "," << m.name << "," << format_double(m.value)
                << "\n";
    }
    {
        auto jsonl = open("events.jsonl");
        for (const auto& e : events.events) {
            jsonl << "{\"epoch\":" << e.epoch << ",\"time_s\":" << format_double(e.time_s)
                  << ",\"kind\":\"" << e.kind << "\",\"payload\":"
                  << (e.payload_json.empty() ? "{}" : e.payload_json) << "}\n";
        }
    }
    {
        auto echo = open("config.echo");
        echo << config_echo;
    }
}

}  // namespace dimap::scenarios
