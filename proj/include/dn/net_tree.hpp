#pragma once

#include "dn/greedy.hpp"
#include "dn/hst.hpp"
#include "dn/metric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dn {

/// Level sentinel for leaves ("minus infinity").
constexpr int kLeafLevel = -(1 << 30);
/// Level used for the (absent) parent of the root.
constexpr int kRootParentLevel = (1 << 30);

struct RelEntry {
    int vertex;
    double dist; // d(rep_u, rep_v), cached at insertion
};

struct NetTreeVertex {
    int level = kLeafLevel;
    PointId rep = -1;
    int parent = -1;
    double parent_rep_dist = 0.0; // d(rep, parent's rep), cached at creation
    std::vector<int> children;
    std::vector<RelEntry> rel;
};

/// Hierarchical nets: leaves = points, vertex levels encode scales tau^level
/// with tau = 11. Covering radius (2 tau / (tau-1)) tau^level, packing radius
/// ((tau-5)/(2(tau-1))) tau^(parent level - 1), representative inheritance,
/// and Rel lists of nearby same-scale vertices (radius 13 tau^level).
class NetTree {
public:
    static constexpr int kTau = 11;
    static constexpr double kCoverFactor = 2.0 * kTau / (kTau - 1.0);      // 2.2
    static constexpr double kPackFactor = (kTau - 5.0) / (2.0 * (kTau - 1.0)); // 0.3
    static constexpr double kRelFactor = 13.0;

    std::vector<NetTreeVertex> verts;
    int root = -1;
    std::vector<int> leaf_of; // point -> leaf vertex id

    int size() const { return static_cast<int>(verts.size()); }
    int num_points() const { return static_cast<int>(leaf_of.size()); }
    bool is_leaf(int v) const { return verts[v].children.empty(); }
    int level(int v) const { return verts[v].level; }
    int parent_level(int v) const {
        return verts[v].parent < 0 ? kRootParentLevel : verts[verts[v].parent].level;
    }
    int max_out_degree() const;

    /// tau^l as a long double (levels far outside double range saturate).
    static long double scale(int l);

    /// Drops Rel entries invalidated by later splices; pointer work only,
    /// the entry distances are cached.
    void refresh_rel(int v);

    /// Leaves under v, in discovery order.
    std::vector<PointId> points_under(int v) const;

    std::string to_json() const;

    // ---- augmentation (built once by finalize(), O(1)/O(log) queries) ----

    void finalize();

    /// Ancestor y of leaf_of[x] with level(parent(y)) > l >= level(y).
    int level_ancestor(PointId x, int l) const;

    /// Same, restricted to the window [level(z) - 6 ceil(log2 n), level(z)];
    /// nullopt means "don't know" (outside the window). z must be an
    /// ancestor of x's leaf.
    std::optional<int> restricted_level_ancestor(PointId x, int z, int l) const;

    int tree_lca(int u, int v) const;
    bool is_ancestor(int anc, int v) const { return tree_lca(anc, v) == anc; }

    int depth_of(int v) const { return depth_[v]; }
    /// Ancestor of v at the given depth (must be <= depth(v)); O(1).
    int ancestor_at_depth(int v, int depth) const;

private:
    int search_window() const;

    // depth-ancestor machinery: jump pointers + ladders
    std::vector<int> depth_;
    std::vector<std::vector<int>> jump_;
    std::vector<std::vector<int>> ladders_;
    std::vector<int> ladder_id_, ladder_pos_;
    // Euler-tour LCA
    std::vector<int> euler_, first_occ_, euler_depth_;
    std::vector<std::vector<int>> sparse_;
};

/// Full construction pipeline: coarse HST -> approximate greedy permutation ->
/// incremental insertion with Rel maintenance. Expected near-linear distance
/// calls for fixed doubling dimension.
NetTree build_net_tree(const MetricView& view, uint64_t seed);

/// One record per insertion (audit hook): the point, the earlier-phase
/// nearest point the construction picked, and the insertion level.
struct InsertRecord {
    PointId point;
    PointId q;
    int level;
};

/// Builds from an existing permutation (shared by build_net_tree and the
/// dimension-oblivious variant). `audit` optionally collects the per-step
/// q choices for verification against a brute-force scan.
NetTree build_net_tree_from_sequence(const MetricView& view, const GreedySequence& seq,
                                     std::vector<InsertRecord>* audit = nullptr);

struct NetTreeCheck {
    std::string name;
    bool passed;
    std::string detail;
};

struct NetTreeReport {
    std::vector<NetTreeCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Exhaustive invariant verification (covering, packing, inheritance,
/// parent-child representative distance, Rel = dRel, per-level net
/// separation/covering). Quadratic; test and audit use only.
NetTreeReport verify_net_tree(const NetTree& tree, const MetricView& view);

/// N_C(l) = representatives of vertices spanning level l.
std::vector<PointId> net_at_level(const NetTree& tree, int l);

/// Smallest integer l with tau^l >= x (x > 0).
int ceil_log_tau(double x);

} // namespace dn
