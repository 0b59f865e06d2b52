#pragma once

#include "dn/net_tree.hpp"

#include <cstdint>
#include <memory>

namespace dn {

/// Binary search tree splitting at an empty thin annulus around a heavy
/// ball; answers coarse 2n-approximate nearest neighbor queries by walking
/// one root-leaf path.
struct RingSeparatorTree {
    struct Node {
        PointId pivot = -1; // leaf payload when radius < 0
        double radius = -1.0;
        int inner = -1;
        int outer = -1;
    };
    std::vector<Node> nodes;
    int root = -1;
    int n = 0;

    bool is_leaf(int v) const { return nodes[v].inner < 0; }
};

RingSeparatorTree build_ring_tree(const MetricView& view, uint64_t seed);

/// Nearest candidate among the pivots on the query's search path; the
/// returned point is within factor 2n of the true nearest neighbor.
PointId coarse_ann(const RingSeparatorTree& tree, const MetricView& view, const QueryPoint& q);

/// Net-tree descent from vertex u; valid when d(rep_u, q) <= 5 tau^level(u)
/// or the true nearest neighbor lies under u. Frontier sets shrink one
/// occupied level per step with the covering-radius distance filter; stops
/// once the best candidate is certified (1+eps)-close. `audit` optionally
/// collects the frontier vertex set after every filtering step.
PointId descend_ann(const NetTree& tree, const MetricView& view, const QueryPoint& q, int u,
                    double eps, std::vector<std::vector<int>>* audit = nullptr);

/// Combined index: coarse ring-separator layer plus net-tree refinement.
struct AnnIndex {
    NetTree tree;
    RingSeparatorTree ring;

    static AnnIndex build(const MetricView& view, uint64_t seed);
};

PointId ann_query(const AnnIndex& index, const MetricView& view, const QueryPoint& q, double eps);

} // namespace dn
