#pragma once

#include "dimap/identity.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace dimap::mapping {

// Sentinel for infeasible pairs and virtual-to-real edges. Any assignment
// routed through it decodes as Unmatched.
inline constexpr double kBigCost = 1e9;
inline constexpr double kCostFloor = 1e-6;  // epsilon in cost = 1 / (s + eps)

// Square cost matrix over VD rows and AD columns, padded with virtual
// identities in the deficient domain so the assignment stays balanced.
struct CostMatrix {
    int size = 0;  // K = max(n_vd, n_ad)
    int n_vd = 0;  // rows [0, n_vd) are real, the rest virtual
    int n_ad = 0;  // cols [0, n_ad) are real, the rest virtual
    Eigen::MatrixXd cost;        // K x K
    Eigen::MatrixXd similarity;  // n_vd x n_ad raw similarities

    bool row_is_virtual(int i) const { return i >= n_vd; }
    bool col_is_virtual(int j) const { return j >= n_ad; }
};

CostMatrix build_cost_matrix(std::span<const identity::Pid> vd_pids,
                             std::span<const identity::Pid> ad_pids,
                             const identity::FeatureWeights& w, double sim_threshold,
                             const identity::SimilarityParams& params = {});

struct Assignment {
    std::vector<int> row_to_col;
    double total_cost = 0.0;
};

// O(K^3) shortest-augmenting-path solver for the square assignment problem.
Assignment hungarian(const Eigen::MatrixXd& cost);

struct MatchOutcome {
    enum class Kind { Matched, UnmatchedVd, UnmatchedAd };
    Kind kind = Kind::Matched;
    int vd_index = -1;
    int ad_index = -1;
    double similarity = 0.0;
};

std::vector<MatchOutcome> decode(const CostMatrix& cm, const Assignment& a,
                                 double sim_threshold);

// build_cost_matrix + hungarian + decode in one call.
std::vector<MatchOutcome> map_identities(std::span<const identity::Pid> vd_pids,
                                         std::span<const identity::Pid> ad_pids,
                                         const identity::FeatureWeights& w, double sim_threshold,
                                         const identity::SimilarityParams& params = {});

}  // namespace dimap::mapping
