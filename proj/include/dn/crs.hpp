#pragma once

#include "dn/hst.hpp"
#include "dn/net_tree.hpp"
#include "dn/wspd.hpp"

#include <optional>
#include <unordered_map>
#include <vector>

namespace dn {

struct SpreadTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Snowflake embedding into l_inf: query(i,j) = ||phi_i - phi_j||_inf^2
/// approximates d(i,j) within the calibrated factor assouad_kappa(eps).
/// Rows cycle through scales (1+eps)^l; columns are greedy colors of the
/// per-scale net.
struct AssouadEmbedding {
    int rows = 0;
    std::vector<int> row_width;  // colors per row
    std::vector<int> row_offset; // prefix sums into each vector
    std::vector<std::vector<double>> phi;
    double eps = 0.0;

    double query(int i, int j) const;
    int vector_length() const { return phi.empty() ? 0 : static_cast<int>(phi[0].size()); }
};

/// Calibrated two-sided distortion bound of the embedding-backed distance
/// query, frozen from the calibration battery with headroom.
double assouad_kappa(double eps);

/// max_spread overrides the default 3 (n/eps)^12 precondition when the
/// caller (the pruned coarse layer) guarantees a bound in terms of a larger
/// ambient point count.
AssouadEmbedding build_assouad(const MetricView& view, double eps, uint64_t seed,
                               std::optional<double> max_spread = std::nullopt);

/// Coarse compact-distance layer: the 3n^2 HST, two grid-pruned copies whose
/// internal vertices carry Assouad embeddings of their child-representative
/// sets, answering two-sided approximate distance queries at eps0 = 0.1.
class CoarseCrs {
public:
    static constexpr double kEps0 = 0.1;

    static CoarseCrs build(const MetricView& view, const Hst& hst, uint64_t seed);

    /// Two-sided estimate: d / kappa_bound() <= estimate <= kappa_bound() * d.
    double query(PointId x, PointId y) const;

    /// Frozen distortion envelope of query(): the eps0 Assouad kappa plus the
    /// pruned-tree representative offset, with headroom. Always <= 3n^2.
    static double kappa_bound() { return 1.5; }

    /// Worst pruned-subset spread seen during the build (test hook).
    double max_subset_spread() const { return max_subset_spread_; }

private:
    struct Pruned {
        std::vector<int> hst_node; // pruned id -> hst node
        std::vector<double> delta; // copied labels, self-contained
        std::vector<int> parent;
        std::vector<std::vector<int>> children;
        std::vector<int> leaf_of; // point -> pruned leaf
        std::vector<int> depth;
        std::vector<std::vector<int>> jump; // binary lifting
        std::vector<int> euler, first_occ, euler_depth;
        std::vector<std::vector<int>> sparse;
        std::vector<AssouadEmbedding> sub; // per internal vertex
        std::vector<std::vector<PointId>> child_reps;
        std::vector<int> child_slot; // pruned id -> slot in parent's set

        int lca(int u, int v) const;
        int ancestor_at_depth(int v, int d) const;
        void build_index(int root);
        int root = 0;
    };

    Pruned trees_[2];
    double max_subset_spread_ = 0.0;
};

/// Full compact representation scheme: coarse layer bootstraps a seed level,
/// the net-tree/WSPD ladder refines it to a (1+eps) answer.
class CrsIndex {
public:
    static CrsIndex build(const MetricView& view, double eps, uint64_t seed);

    /// Within multiplicative (1+eps) of d(x,y); exact 0 for x == y.
    /// Queries are pure reads, safe for concurrent callers; ladder_steps
    /// optionally receives the climb length (test hook).
    double query(PointId x, PointId y, int* ladder_steps = nullptr) const;

    /// Documented bound on ladder steps, tied to the bootstrap distortion.
    static int max_ladder_steps();

    const NetTree& net_tree() const { return tree_; }
    const Hst& hst() const { return hst_; }
    const WspdPairs& wspd() const { return wspd_; }
    const CoarseCrs& coarse() const { return coarse_; }
    const std::vector<std::vector<int>>& k_sets() const { return k_sets_; }
    double coarse_estimate(PointId x, PointId y) const { return coarse_.query(x, y); }

private:
    double eps_ = 0.0;
    Hst hst_;
    CoarseCrs coarse_;
    NetTree tree_;
    WspdPairs wspd_;
    std::unordered_map<uint64_t, double> rep_dist_;
    std::vector<std::vector<int>> k_sets_; // per hst node: net-tree vertices
    // hst lca structures
    std::vector<int> hdepth_, heuler_, hfirst_;
    std::vector<std::vector<int>> hsparse_;

    int hst_lca(int u, int v) const;
};

} // namespace dn
