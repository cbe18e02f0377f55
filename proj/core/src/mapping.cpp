#include "dimap/mapping.hpp"

#include <limits>
#include <stdexcept>

namespace dimap::mapping {

CostMatrix build_cost_matrix(std::span<const identity::Pid> vd_pids,
                             std::span<const identity::Pid> ad_pids,
                             const identity::FeatureWeights& w, double sim_threshold,
                             const identity::SimilarityParams& params) {
    if (!(sim_threshold > 0.0) || !(sim_threshold < 1.0))
        throw std::invalid_argument("build_cost_matrix: sim_threshold must be in (0, 1)");
    if (vd_pids.empty() && ad_pids.empty())
        throw std::invalid_argument("build_cost_matrix: both domains empty");

    CostMatrix cm;
    cm.n_vd = static_cast<int>(vd_pids.size());
    cm.n_ad = static_cast<int>(ad_pids.size());
    cm.size = std::max(cm.n_vd, cm.n_ad);
    cm.cost = Eigen::MatrixXd::Zero(cm.size, cm.size);
    cm.similarity = Eigen::MatrixXd::Zero(cm.n_vd, cm.n_ad);

    // feasible-pair costs are bounded by 1/threshold; kBigCost must dominate
    // any full assignment through them
    if (kBigCost <= static_cast<double>(cm.size) / sim_threshold)
        throw std::invalid_argument("build_cost_matrix: sim_threshold too small for sentinel cost");

    for (int i = 0; i < cm.size; ++i) {
        for (int j = 0; j < cm.size; ++j) {
            if (cm.row_is_virtual(i) && cm.col_is_virtual(j)) {
                cm.cost(i, j) = 0.0;  // surplus virtuals pair off for free
            } else if (cm.row_is_virtual(i) || cm.col_is_virtual(j)) {
                cm.cost(i, j) = kBigCost;
            } else {
                const double s = identity::similarity(vd_pids[i], ad_pids[j], w, params);
                cm.similarity(i, j) = s;
                cm.cost(i, j) = s >= sim_threshold ? 1.0 / (s + kCostFloor) : kBigCost;
            }
        }
    }
    return cm;
}

Assignment hungarian(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols()) throw std::invalid_argument("hungarian: matrix must be square");
    const int n = static_cast<int>(cost.rows());
    Assignment res;
    res.row_to_col.assign(n, -1);
    if (n == 0) return res;
    if (!cost.allFinite()) throw std::invalid_argument("hungarian: entries must be finite");

    // potentials + shortest augmenting path, 1-based with column 0 as scratch
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            int j1 = 0;
            double delta = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }

    for (int j = 1; j <= n; ++j)
        if (match[j] > 0) res.row_to_col[match[j] - 1] = j - 1;
    for (int i = 0; i < n; ++i) res.total_cost += cost(i, res.row_to_col[i]);
    return res;
}

std::vector<MatchOutcome> decode(const CostMatrix& cm, const Assignment& a,
                                 double sim_threshold) {
    std::vector<MatchOutcome> out;
    std::vector<bool> ad_matched(cm.n_ad, false);

    for (int i = 0; i < cm.n_vd; ++i) {
        const int j = a.row_to_col[i];
        if (!cm.col_is_virtual(j) && cm.cost(i, j) < kBigCost &&
            cm.similarity(i, j) >= sim_threshold) {
            MatchOutcome m;
            m.kind = MatchOutcome::Kind::Matched;
            m.vd_index = i;
            m.ad_index = j;
            m.similarity = cm.similarity(i, j);
            ad_matched[j] = true;
            out.push_back(m);
        } else {
            MatchOutcome m;
            m.kind = MatchOutcome::Kind::UnmatchedVd;
            m.vd_index = i;
            out.push_back(m);
        }
    }
    for (int j = 0; j < cm.n_ad; ++j) {
        if (ad_matched[j]) continue;
        MatchOutcome m;
        m.kind = MatchOutcome::Kind::UnmatchedAd;
        m.ad_index = j;
        out.push_back(m);
    }
    return out;
}

std::vector<MatchOutcome> map_identities(std::span<const identity::Pid> vd_pids,
                                         std::span<const identity::Pid> ad_pids,
                                         const identity::FeatureWeights& w, double sim_threshold,
                                         const identity::SimilarityParams& params) {
    const CostMatrix cm = build_cost_matrix(vd_pids, ad_pids, w, sim_threshold, params);
    const Assignment a = hungarian(cm.cost);
    return decode(cm, a, sim_threshold);
}

}  // namespace dimap::mapping
