#include "dn/dim.hpp"
#include "dn/greedy.hpp"

#include <cmath>

namespace dn {

DimEstimate estimate_dim(const MetricView& view, uint64_t seed) {
    DimEstimate est;
    if (view.size() <= 1) return est;
    std::vector<EscalationStep> trace;
    WeightedGraph g = build_low_quality_spanner_traced(view, seed, &trace);
    Hst hst = mst_to_hst(g);
    GreedySequence seq = net_permutation(view, hst);
    NetTree tree = build_net_tree_from_sequence(view, seq);
    est.lambda_t = std::max(1, tree.max_out_degree());
    est.dim_estimate = std::log2(static_cast<double>(est.lambda_t));
    est.trace = std::move(trace);
    return est;
}

} // namespace dn
