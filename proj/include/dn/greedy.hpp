#pragma once

#include "dn/hst.hpp"
#include "dn/metric.hpp"

#include <vector>

namespace dn {

/// (Approximate) greedy permutation: order[k] is the k-th center picked,
/// pick_alpha[k] its distance to the earlier centers at extraction time
/// (+inf for the first), prev_center[k] the serving center just before it
/// was picked. The classical radii are r_k = pick_alpha[k] (coverage radius
/// of the k-center prefix), and rbar_k = min prefix of r.
struct GreedySequence {
    std::vector<PointId> order;
    std::vector<double> pick_alpha;
    std::vector<PointId> prev_center;
    bool exact = true;
    int n = 0;

    /// Coverage radius of the first k centers (1 <= k <= n).
    double radius_after(int k) const {
        return k < n ? pick_alpha[k] : 0.0;
    }

    /// Approximation slack of the cover: exact mode covers at radius r_k,
    /// approximate mode at (1 + n^-2) r_k.
    double coverage_factor() const {
        return exact ? 1.0 : 1.0 + 1.0 / (static_cast<double>(n) * n);
    }
};

/// Exact greedy permutation (farthest-point ordering) with friends lists.
/// First center pinned to PointId 0; max-heap ties resolved to the smaller
/// id, so the output matches the naive quadratic scan bit for bit.
GreedySequence greedy_permutation(const MetricView& view);

/// Spread-independent approximate greedy permutation driven by the coarse
/// HST: active points are representatives of HST nodes with
/// delta <= r_curr / n^4, split lazily via a second max-heap. Satisfies the
/// (1 +- n^-2) cover/separation relaxation.
GreedySequence net_permutation(const MetricView& view, const Hst& hst);

struct KCenterResult {
    std::vector<PointId> centers;
    double radius = 0.0;
};

/// First k points of the sequence; radius is the (possibly inflated)
/// coverage radius. 2(1+n^-2)-approximate k-center.
KCenterResult k_center(const GreedySequence& seq, int k);

/// Test hook: brute-force check that every center's friends list covered the
/// in-radius center set at each extraction. Runs the construction again with
/// auditing on; returns false and fills `message` on the first violation.
bool audit_friends_soundness(const MetricView& view, const Hst* hst, std::string& message);

} // namespace dn
