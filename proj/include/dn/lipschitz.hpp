#pragma once

#include "dn/metric.hpp"

#include <functional>
#include <vector>

namespace dn {

/// A mapping f between a finite domain metric and a codomain metric indexed
/// by the same point ids. The codomain oracle rho(i, j) evaluates
/// rho(f(i), f(j)).
struct MappingView {
    const MetricView* domain = nullptr;
    std::function<double(PointId, PointId)> codomain;

    static MappingView scalar_values(const MetricView& dom, std::vector<double> values);
    static MappingView metric_codomain(const MetricView& dom, const MetricView& codom);
};

struct LipschitzResult {
    double constant = 0.0;
    PointId witness_a = -1;
    PointId witness_b = -1;
};

/// Exact O(n^2) Lipschitz constant with witness pair; duplicate domain
/// points make the ratio undefined and are rejected.
LipschitzResult lipschitz_exact(const MappingView& m);

/// 1-D exact path: the constant is realized by a consecutive pair of the
/// sorted points.
double lipschitz_1d(const std::vector<double>& points,
                    const std::function<double(int, int)>& rho);

/// Per-point Lipschitz constants for a real-valued f on the line, via
/// tangents to left/right prefix convex hulls (two insert-only sweeps).
std::vector<double> lipschitz_1d_pointwise(const std::vector<double>& points,
                                           const std::vector<double>& values);

/// WSPD approximation: K over representative pairs of an eps^-1-WSPD.
/// Guarantee: result <= K_exact <= (1+2 eps)/(1-2 eps) * result.
LipschitzResult lipschitz_wspd(const MappingView& m, double eps, uint64_t seed);

} // namespace dn
