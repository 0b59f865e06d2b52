#pragma once

#include "dn/net_tree.hpp"

#include <vector>

namespace dn {

/// Doubling-dimension estimate: the net-tree is built with the
/// dimension-oblivious separating-ball escalation, and log2 of the maximum
/// out-degree approximates the dimension up to a constant factor.
struct DimEstimate {
    int lambda_t = 1;          // max net-tree out-degree
    double dim_estimate = 0.0; // log2(lambda_t)
    std::vector<EscalationStep> trace;
};

DimEstimate estimate_dim(const MetricView& view, uint64_t seed);

} // namespace dn
