#pragma once

#include "dimap/channels.hpp"
#include "dimap/tracking.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace dimap::auth {

using WitnessReport = channels::WitnessReport;
using Did = channels::Did;
using DidPair = std::pair<Did, Did>;  // normalized: first < second

DidPair make_edge(Did a, Did b);

enum class ConsistencyLabel { Unknown, Consistent, Inconsistent };
const char* to_string(ConsistencyLabel l);

// One certifier's trust graph: labeled heard identities plus edges between
// pairs simultaneously verified as distinct physical tracks.
struct LocalView {
    world::NodeId owner = -1;
    std::map<Did, ConsistencyLabel> vertices;
    std::set<DidPair> edges;
};

struct GlobalView {
    std::set<Did> trusted_core;
    std::set<Did> suspects;
    int contributing_views = 0;
};

enum class VerdictClass { Trusted, Sybil, Malicious, Unknown };
const char* to_string(VerdictClass c);

struct Verdict {
    Did did;
    VerdictClass cls = VerdictClass::Unknown;
};

struct MmseResult {
    double score = 0.0;
    bool pass = false;
};

// One claimed position sample, time-aligned against the track history.
struct ClaimSample {
    world::Vec3 position = world::Vec3::Zero();
    double sigma_m = 1.0;
    double time_s = 0.0;
};

// Mean squared Mahalanobis deviation between claimed positions and the
// certifier's track estimate, normalized by the combined covariance.
MmseResult mmse_check(std::span<const ClaimSample> claimed, const tracking::Track& track,
                      double tau);

// Everything one certifier knows about one heard Did at one AD epoch.
struct DidEpochObservation {
    Did did;
    bool in_claimed_sense_range = true;  // claimed position within own sense range
    bool grace_elapsed = true;           // heard long enough to judge an unmatched Did
    bool matched = false;
    int track_id = -1;
    std::optional<MmseResult> mmse;  // present once the claim window is usable
};

LocalView build_local_view(world::NodeId owner, std::span<const DidEpochObservation> dids);

// Run-level view built from epoch observations. A failed MMSE check is hard
// evidence and sticks; heard-but-never-seen is negative evidence that is
// forgiven if the Did later matches a track with a passing check (late track
// confirmation would otherwise poison legitimate identities). Edges union.
class ViewAccumulator {
public:
    ViewAccumulator() = default;
    explicit ViewAccumulator(world::NodeId owner) : owner_(owner) {}

    void ingest(std::span<const DidEpochObservation> observations, const LocalView& epoch_view);
    LocalView view() const;

private:
    struct DidEvidence {
        bool mmse_failed = false;    // sticky
        bool unmatched_flag = false;  // provisional
        bool consistent_seen = false;
    };
    world::NodeId owner_ = -1;
    std::map<Did, DidEvidence> evidence_;
    std::set<DidPair> edges_;
};

// Agreement graph + largest maximal clique = trusted core; suspects are heard
// Dids outside the core that some view found inconsistent.
GlobalView merge_views(std::span<const LocalView> views, int quorum);

std::vector<Verdict> classify(const GlobalView& global, const std::set<Did>& heard,
                              const std::set<Did>& ever_matched_to_real_track);

// Exact maximal clique enumeration with pivoting; cliques and the outer list
// are sorted for deterministic output.
std::vector<std::vector<int>> bron_kerbosch(int n, const std::vector<std::pair<int, int>>& edges);

// AD-only baseline: groups Dids whose claimed trajectories move in lockstep.
struct ClaimSeries {
    Did did;
    std::vector<world::Vec3> positions;  // one per AD epoch, oldest first
};

std::vector<Verdict> baseline_mobility_detect(std::span<const ClaimSeries> series, int window,
                                              double correlation_threshold,
                                              double distance_var_bound_m2);

}  // namespace dimap::auth
