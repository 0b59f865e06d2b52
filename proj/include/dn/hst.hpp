#pragma once

#include "dn/metric.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dn {

struct GraphEdge {
    PointId a;
    PointId b;
    double w;
};

/// Edge-list weighted graph over the view's point ids. Edge weights are exact
/// oracle distances for every construction in this module.
struct WeightedGraph {
    int n = 0;
    std::vector<GraphEdge> edges;
};

/// Rooted binary ultrametric tree: leaf<->point bijection, per-node label
/// delta (0 iff leaf, nondecreasing toward the root), per-node representative
/// leaf point. Leaf distance = delta of the LCA.
struct Hst {
    struct Node {
        double delta = 0.0;
        PointId rep = -1;
        int parent = -1;
        int left = -1;
        int right = -1;
    };
    std::vector<Node> nodes;
    int root = -1;
    std::vector<int> leaf_of; // point id -> node index

    bool is_leaf(int v) const { return nodes[v].left < 0; }
    int size() const { return static_cast<int>(nodes.size()); }

    /// Ultrametric distance between stored points (naive LCA walk).
    double tree_distance(PointId x, PointId y) const;

    std::string to_json() const;
};

struct SeparatingBall {
    PointId center = -1;
    double r = 0.0;
    int inner_count = 0;  // |ball(center, r)|
    int outer_count = 0;  // |ball(center, 2r)|
    int rounds_used = 0;  // sampling attempts consumed
    double delta = 0.0;   // the stopping guess for the doubling constant
};

/// Randomized heavy-ball finder: returns (center, r) with
/// |ball(center,r)| >= ceil(n / (2 delta^3)) and |ball(center,2r)| <= n/2.
/// With lambda_hint the threshold starts at the hinted doubling constant;
/// without it the oblivious escalation delta = 2, 4, 8, ... is used, trying
/// delta^3 samples per round. Success is certain once delta^3 >= n.
SeparatingBall separating_ball(const MetricView& view, uint64_t seed,
                               std::optional<int> lambda_hint = std::nullopt);

/// Finds r' in [r, 2r] and h >= r/n such that the annulus (r', r'+h] around
/// center contains no point, by the 2n-bucket min/max sweep. When the whole
/// band (r, 2r] is empty returns (r, r).
std::pair<double, double> empty_ring(const MetricView& view, PointId center, double r);

/// Recursive separating-ball / empty-ring split with a star from each ball
/// center to all current points; subsets of size <= 8 become cliques.
/// The graph metric 3n-approximates the view's metric.
WeightedGraph build_low_quality_spanner(const MetricView& view, uint64_t seed);

/// Escalation trace entry recorded per separating-ball invocation when the
/// spanner runs dimension-obliviously.
struct EscalationStep {
    int subset_size = 0;
    double delta = 0.0;
    int rounds_used = 0;
};

WeightedGraph build_low_quality_spanner_traced(const MetricView& view, uint64_t seed,
                                               std::vector<EscalationStep>* trace,
                                               std::optional<int> lambda_hint = std::nullopt);

/// Kruskal-style HST over the graph's MST: merging edge weight w creates a
/// node labeled (n-1)*w. Ties are broken by (w, min id, max id).
Hst mst_to_hst(const WeightedGraph& graph);

/// Composition of the two: an HST that 3n^2-approximates the metric.
Hst build_coarse_hst(const MetricView& view, uint64_t seed);

/// Exact MST of a weighted graph (Kruskal). Throws on disconnected input.
WeightedGraph minimum_spanning_tree(const WeightedGraph& graph);

} // namespace dn
