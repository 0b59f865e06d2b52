#pragma once

#include "dn/net_tree.hpp"

#include <string>
#include <unordered_set>
#include <vector>

namespace dn {

/// eps^-1-separated pair decomposition over net-tree vertices. Every
/// unordered point pair is covered by exactly one (P_u, P_v) pair, the sides
/// are eps^-1-separated relative to their diameters, and representative
/// distances (1+eps)-approximate every covered pair.
struct WspdPairs {
    std::vector<std::pair<int, int>> pairs; // net-tree vertex ids, as emitted
    double eps = 0.0;

    /// Constant-time membership on the unordered pair.
    bool contains(int u, int v) const {
        return index_.count(key(u, v)) > 0;
    }
    void build_index() {
        index_.clear();
        for (auto [u, v] : pairs) index_.insert(key(u, v));
    }
    size_t size() const { return pairs.size(); }

private:
    static uint64_t key(int u, int v) {
        if (u > v) std::swap(u, v);
        return (static_cast<uint64_t>(u) << 32) | static_cast<uint32_t>(v);
    }
    std::unordered_set<uint64_t> index_;
};

/// genWSPD over the net-tree: expands the higher vertex (creation order
/// breaks level ties) until 8 (2 tau/(tau-1)) tau^level(u) <= eps * d(reps).
WspdPairs build_wspd(const NetTree& tree, const MetricView& view, double eps);

struct WspdReport {
    bool passed = true;
    std::string violation;
};

/// Exhaustive validation of the four decomposition properties plus the
/// representative-distance clause. Quadratic; test use.
WspdReport verify_wspd(const WspdPairs& pairs, const NetTree& tree, const MetricView& view);

/// (1+eps)-spanner: one edge per pair of an (eps/16)^-1-WSPD.
WeightedGraph build_spanner(const MetricView& view, double eps, uint64_t seed);

/// Exact nearest neighbor of every point, extracted from the singleton sides
/// of a 4-WSPD; ties to the smaller id.
std::vector<PointId> all_nearest_neighbors(const MetricView& view, uint64_t seed);

/// Spanning tree of weight <= (1+eps) * MST(view): exact MST of the spanner.
WeightedGraph approx_mst(const MetricView& view, double eps, uint64_t seed);

} // namespace dn
