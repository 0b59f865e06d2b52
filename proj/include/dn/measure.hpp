#pragma once

#include "dn/net_tree.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace dn {

/// Doubling probability measure on the point set, computed by splitting each
/// vertex's mass equally among its non-representative children (mass 1/gamma
/// each, gamma = maximum out-degree) with the remainder kept by the
/// representative child. Weights are carried in log space; deep trees drive
/// masses below double range.
struct DoublingMeasure {
    std::vector<double> log_mu;     // per point, natural log
    std::vector<double> log_mass;   // per net-tree vertex
    int gamma = 1;

    double mu(PointId p) const { return std::exp(log_mu[p]); }
    int n() const { return static_cast<int>(log_mu.size()); }
};

DoublingMeasure build_doubling_measure(const NetTree& tree);

struct DoublingRatioReport {
    double max_ratio = 1.0;
    PointId witness_point = -1;
    double witness_radius = 0.0;
    int samples = 0;
};

/// Samples radii log-uniformly in [min distance / 2, diameter] around every
/// point and reports the worst mu(b(x,2r)) / mu(b(x,r)) with its witness.
/// Ball masses are exhaustive log-sum-exp sums.
DoublingRatioReport measure_doubling_ratio(const MetricView& view, const DoublingMeasure& m,
                                           int radii_per_point, uint64_t seed);

/// log(sum of exp(values)); -inf for an empty set.
double log_sum_exp(const std::vector<double>& values);

} // namespace dn
