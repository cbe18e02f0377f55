#include "dimap/auth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dimap::auth {

const char* to_string(ConsistencyLabel l) {
    switch (l) {
        case ConsistencyLabel::Unknown: return "unknown";
        case ConsistencyLabel::Consistent: return "consistent";
        case ConsistencyLabel::Inconsistent: return "inconsistent";
    }
    return "?";
}

const char* to_string(VerdictClass c) {
    switch (c) {
        case VerdictClass::Trusted: return "trusted";
        case VerdictClass::Sybil: return "sybil";
        case VerdictClass::Malicious: return "malicious";
        case VerdictClass::Unknown: return "unknown";
    }
    return "?";
}

DidPair make_edge(Did a, Did b) {
    if (b < a) std::swap(a, b);
    return {a, b};
}

MmseResult mmse_check(std::span<const ClaimSample> claimed, const tracking::Track& track,
                      double tau) {
    if (claimed.empty()) throw std::invalid_argument("mmse_check: empty claim window");
    if (track.status != tracking::TrackStatus::Confirmed &&
        track.status != tracking::TrackStatus::Coasting)
        throw std::invalid_argument("mmse_check: track not confirmed");
    if (track.history.empty()) throw std::invalid_argument("mmse_check: track has no history");

    double sum = 0.0;
    for (const ClaimSample& c : claimed) {
        // nearest history entry by time
        const tracking::TrackHistoryEntry* best = &track.history.front();
        double best_dt = std::abs(best->time_s - c.time_s);
        for (const auto& h : track.history) {
            const double dt = std::abs(h.time_s - c.time_s);
            if (dt < best_dt) {
                best_dt = dt;
                best = &h;
            }
        }
        const Eigen::Vector3d delta = c.position - best->position;
        const Eigen::Matrix3d combined =
            best->pos_cov + Eigen::Matrix3d::Identity() * (c.sigma_m * c.sigma_m);
        sum += delta.dot(combined.ldlt().solve(delta));
    }

    MmseResult r;
    r.score = sum / static_cast<double>(claimed.size());
    r.pass = r.score <= tau;
    return r;
}

LocalView build_local_view(world::NodeId owner, std::span<const DidEpochObservation> dids) {
    LocalView view;
    view.owner = owner;

    std::vector<std::pair<Did, int>> consistent_tracks;
    for (const auto& d : dids) {
        ConsistencyLabel label = ConsistencyLabel::Unknown;
        if (!d.in_claimed_sense_range) {
            label = ConsistencyLabel::Unknown;  // heard beyond sense range: no judgment
        } else if (d.matched) {
            if (d.mmse.has_value())
                label = d.mmse->pass ? ConsistencyLabel::Consistent : ConsistencyLabel::Inconsistent;
            // matched but window not usable yet: no judgment
        } else if (d.grace_elapsed) {
            label = ConsistencyLabel::Inconsistent;  // heard long enough, never seen
        }
        view.vertices[d.did] = label;
        if (label == ConsistencyLabel::Consistent) consistent_tracks.emplace_back(d.did, d.track_id);
    }

    // every pair of consistent Dids bound to distinct tracks at this epoch
    for (std::size_t i = 0; i < consistent_tracks.size(); ++i)
        for (std::size_t j = i + 1; j < consistent_tracks.size(); ++j)
            if (consistent_tracks[i].second != consistent_tracks[j].second)
                view.edges.insert(make_edge(consistent_tracks[i].first, consistent_tracks[j].first));
    return view;
}

void ViewAccumulator::ingest(std::span<const DidEpochObservation> observations,
                             const LocalView& epoch_view) {
    for (const auto& o : observations) {
        DidEvidence& e = evidence_[o.did];
        if (o.matched && o.mmse.has_value()) {
            if (o.mmse->pass)
                e.consistent_seen = true;
            else
                e.mmse_failed = true;
        } else if (!o.matched && o.in_claimed_sense_range && o.grace_elapsed) {
            e.unmatched_flag = true;
        }
    }
    for (const auto& edge : epoch_view.edges) edges_.insert(edge);
}

LocalView ViewAccumulator::view() const {
    LocalView v;
    v.owner = owner_;
    for (const auto& [did, e] : evidence_) {
        ConsistencyLabel label = ConsistencyLabel::Unknown;
        if (e.mmse_failed)
            label = ConsistencyLabel::Inconsistent;
        else if (e.consistent_seen)
            label = ConsistencyLabel::Consistent;
        else if (e.unmatched_flag)
            label = ConsistencyLabel::Inconsistent;
        v.vertices[did] = label;
    }
    v.edges = edges_;
    return v;
}

std::vector<std::vector<int>> bron_kerbosch(int n, const std::vector<std::pair<int, int>>& edges) {
    std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
    for (const auto& [a, b] : edges) {
        if (a < 0 || b < 0 || a >= n || b >= n)
            throw std::invalid_argument("bron_kerbosch: edge endpoint out of range");
        if (a == b) continue;
        adj[a][b] = adj[b][a] = true;
    }

    std::vector<std::vector<int>> cliques;
    std::vector<int> R;

    auto intersect_neighbors = [&](const std::vector<int>& set, int v) {
        std::vector<int> out;
        out.reserve(set.size());
        for (int x : set)
            if (adj[v][x]) out.push_back(x);
        return out;
    };

    // classic pivoted recursion; P and X stay sorted so output is deterministic
    auto expand = [&](auto&& self, std::vector<int> P, std::vector<int> X) -> void {
        if (P.empty() && X.empty()) {
            cliques.push_back(R);
            return;
        }
        int pivot = -1;
        std::size_t best = 0;
        for (int u : P) {
            const auto cnt = intersect_neighbors(P, u).size();
            if (pivot < 0 || cnt > best) {
                pivot = u;
                best = cnt;
            }
        }
        for (int u : X) {
            const auto cnt = intersect_neighbors(P, u).size();
            if (pivot < 0 || cnt > best) {
                pivot = u;
                best = cnt;
            }
        }
        std::vector<int> candidates;
        for (int v : P)
            if (pivot < 0 || !adj[pivot][v]) candidates.push_back(v);
        for (int v : candidates) {
            R.push_back(v);
            self(self, intersect_neighbors(P, v), intersect_neighbors(X, v));
            R.pop_back();
            P.erase(std::find(P.begin(), P.end(), v));
            X.insert(std::lower_bound(X.begin(), X.end(), v), v);
        }
    };

    std::vector<int> P(n);
    std::iota(P.begin(), P.end(), 0);
    expand(expand, std::move(P), {});

    for (auto& c : cliques) std::sort(c.begin(), c.end());
    std::sort(cliques.begin(), cliques.end());
    return cliques;
}

GlobalView merge_views(std::span<const LocalView> views, int quorum) {
    if (views.empty()) throw std::invalid_argument("merge_views: no views");
    if (quorum < 1) throw std::invalid_argument("merge_views: quorum must be >= 1");

    std::map<Did, int> n_consistent, n_inconsistent;
    std::map<DidPair, int> edge_count;
    std::set<Did> heard;
    for (const auto& v : views) {
        for (const auto& [did, label] : v.vertices) {
            heard.insert(did);
            if (label == ConsistencyLabel::Consistent) n_consistent[did]++;
            if (label == ConsistencyLabel::Inconsistent) n_inconsistent[did]++;
        }
        for (const auto& e : v.edges) edge_count[e]++;
    }

    // agreement graph: vertices consistent in >= quorum views and inconsistent
    // in none; edges seen in >= quorum views
    std::vector<Did> vertices;
    for (const auto& [did, cnt] : n_consistent)
        if (cnt >= quorum && n_inconsistent.count(did) == 0) vertices.push_back(did);
    std::sort(vertices.begin(), vertices.end());

    std::map<Did, int> index;
    for (std::size_t i = 0; i < vertices.size(); ++i) index[vertices[i]] = static_cast<int>(i);

    std::vector<std::pair<int, int>> edges;
    for (const auto& [e, cnt] : edge_count) {
        if (cnt < quorum) continue;
        auto a = index.find(e.first);
        auto b = index.find(e.second);
        if (a != index.end() && b != index.end()) edges.emplace_back(a->second, b->second);
    }

    GlobalView global;
    global.contributing_views = static_cast<int>(views.size());
    if (!vertices.empty()) {
        const auto cliques = bron_kerbosch(static_cast<int>(vertices.size()), edges);
        // largest clique; on ties the lexicographically smallest index set,
        // which is the lexicographically smallest Did set since vertices are sorted
        const std::vector<int>* best = nullptr;
        for (const auto& c : cliques)
            if (!best || c.size() > best->size()) best = &c;
        if (best)
            for (int i : *best) global.trusted_core.insert(vertices[i]);
    }
    for (const Did& did : heard) {
        if (global.trusted_core.count(did)) continue;
        if (n_inconsistent.count(did)) global.suspects.insert(did);
    }
    return global;
}

std::vector<Verdict> classify(const GlobalView& global, const std::set<Did>& heard,
                              const std::set<Did>& ever_matched_to_real_track) {
    std::vector<Verdict> out;
    for (const Did& did : heard) {
        Verdict v;
        v.did = did;
        if (global.trusted_core.count(did)) {
            v.cls = VerdictClass::Trusted;
        } else if (global.suspects.count(did)) {
            // a suspect with a real body behind it misbehaves itself; one
            // without any track is a phantom
            v.cls = ever_matched_to_real_track.count(did) ? VerdictClass::Malicious
                                                          : VerdictClass::Sybil;
        } else {
            v.cls = VerdictClass::Unknown;
        }
        out.push_back(v);
    }
    return out;
}

std::vector<Verdict> baseline_mobility_detect(std::span<const ClaimSeries> series, int window,
                                              double correlation_threshold,
                                              double distance_var_bound_m2) {
    if (window < 3) throw std::invalid_argument("baseline_mobility_detect: window must be >= 3");
    const std::size_t n = series.size();
    std::size_t usable = window;
    for (const auto& s : series) usable = std::min(usable, s.positions.size());
    if (usable < 3) throw std::invalid_argument("baseline_mobility_detect: insufficient history");

    // displacement series over the trailing window, stacked per axis
    std::vector<std::vector<double>> disp(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pos = series[i].positions;
        const std::size_t start = pos.size() - usable;
        for (std::size_t t = start + 1; t < pos.size(); ++t) {
            const world::Vec3 d = pos[t] - pos[t - 1];
            disp[i].push_back(d.x());
            disp[i].push_back(d.y());
            disp[i].push_back(d.z());
        }
    }

    auto pearson = [](const std::vector<double>& a, const std::vector<double>& b) {
        const std::size_t m = a.size();
        double ma = std::accumulate(a.begin(), a.end(), 0.0) / m;
        double mb = std::accumulate(b.begin(), b.end(), 0.0) / m;
        double num = 0.0, va = 0.0, vb = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            num += (a[k] - ma) * (b[k] - mb);
            va += (a[k] - ma) * (a[k] - ma);
            vb += (b[k] - mb) * (b[k] - mb);
        }
        if (va <= 0.0 || vb <= 0.0) return va == vb ? 1.0 : 0.0;  // both static -> lockstep
        return num / std::sqrt(va * vb);
    };

    auto distance_var = [&](std::size_t i, std::size_t j) {
        const auto& pa = series[i].positions;
        const auto& pb = series[j].positions;
        const std::size_t sa = pa.size() - usable, sb = pb.size() - usable;
        std::vector<double> d(usable);
        double mean = 0.0;
        for (std::size_t t = 0; t < usable; ++t) {
            d[t] = (pa[sa + t] - pb[sb + t]).norm();
            mean += d[t];
        }
        mean /= usable;
        double var = 0.0;
        for (double x : d) var += (x - mean) * (x - mean);
        return var / usable;
    };

    // union-find over pairs claiming correlated, rigid motion
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };

    Eigen::MatrixXd corr = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double rho = pearson(disp[i], disp[j]);
            corr(i, j) = corr(j, i) = rho;
            if (rho > correlation_threshold && distance_var(i, j) < distance_var_bound_m2)
                parent[find(i)] = find(j);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

    std::vector<Verdict> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {series[i].did, VerdictClass::Trusted};
    for (const auto& [root, members] : groups) {
        if (members.size() < 2) continue;
        // the member most correlated with the rest is taken for the body
        std::size_t head = members.front();
        double best = -2.0;
        for (std::size_t i : members) {
            double mean_corr = 0.0;
            for (std::size_t j : members)
                if (j != i) mean_corr += corr(i, j);
            mean_corr /= static_cast<double>(members.size() - 1);
            if (mean_corr > best) {
                best = mean_corr;
                head = i;
            }
        }
        for (std::size_t i : members)
            out[i].cls = (i == head) ? VerdictClass::Malicious : VerdictClass::Sybil;
    }
    return out;
}

}  // namespace dimap::auth
