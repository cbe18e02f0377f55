#pragma once

#include "dimap/auth.hpp"

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace dimap::scenarios {

// Nearest-rank percentile: the ceil(p*n/100)-th order statistic.
double percentile_nearest_rank(std::vector<double> values, double p);

std::string format_double(double v);  // 9 significant digits

struct DetectionMetrics {
    double precision = 0.0;  // 0 when nothing is flagged but attackers exist
    double recall = 0.0;
    double f1 = 0.0;
    int true_positives = 0;
    int false_positives = 0;
    int false_negatives = 0;
};

// Positives are {Sybil, Malicious} verdicts; truth is the set of attacker Dids.
DetectionMetrics detection_metrics(std::span<const auth::Verdict> verdicts,
                                   const std::set<auth::Did>& truth);

struct Metric {
    std::string name;
    double value = 0.0;
};

struct Metrics {
    std::vector<Metric> values;  // insertion order is the report order

    void add(std::string name, double value) { values.push_back({std::move(name), value}); }
    const double* find(std::string_view name) const;
    double at(std::string_view name) const;  // throws if absent
};

struct Event {
    std::int64_t epoch = 0;
    double time_s = 0.0;
    std::string kind;
    std::string payload_json;  // preformatted JSON object
};

struct EventLog {
    std::vector<Event> events;

    void add(std::int64_t epoch, double time_s, std::string kind, std::string payload_json) {
        events.push_back({epoch, time_s, std::move(kind), std::move(payload_json)});
    }
};

// Writes summary.csv, events.jsonl and config.echo into out_dir. Deterministic
// byte-for-byte for a given (metrics, events, echo) input.
void emit_report(const Metrics& metrics, const EventLog& events, const std::string& config_echo,
                 const std::string& scenario_name, std::uint64_t seed,
                 const std::filesystem::path& out_dir);

}  // namespace dimap::scenarios
