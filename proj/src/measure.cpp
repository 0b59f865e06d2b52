#include "dn/measure.hpp"
#include "dn/rng.hpp"

#include <algorithm>
#include <cmath>

namespace dn {

double log_sum_exp(const std::vector<double>& values) {
    if (values.empty()) return -kInf;
    double mx = *std::max_element(values.begin(), values.end());
    if (std::isinf(mx)) return mx;
    double s = 0.0;
    for (double v : values) s += std::exp(v - mx);
    return mx + std::log(s);
}

DoublingMeasure build_doubling_measure(const NetTree& tree) {
    DoublingMeasure m;
    int nv = tree.size();
    m.log_mass.assign(nv, 0.0);
    m.log_mu.assign(tree.num_points(), 0.0);
    m.gamma = std::max(1, tree.max_out_degree());
    if (nv == 0) return m;
    const double log_gamma = std::log(static_cast<double>(m.gamma));
    // Partition(root, 1): non-representative children get mass/gamma, the
    // representative child keeps the rest.
    std::vector<int> stack = {tree.root};
    m.log_mass[tree.root] = 0.0;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (tree.is_leaf(u)) {
            m.log_mu[tree.verts[u].rep] = m.log_mass[u];
            continue;
        }
        int deg = static_cast<int>(tree.verts[u].children.size());
        int rep_child = -1;
        for (int c : tree.verts[u].children) {
            if (rep_child < 0 && tree.verts[c].rep == tree.verts[u].rep) {
                rep_child = c;
                continue;
            }
            m.log_mass[c] = m.log_mass[u] - log_gamma;
            stack.push_back(c);
        }
        // rep child keeps p_u (1 - (deg-1)/gamma)
        m.log_mass[rep_child] =
            m.log_mass[u] + std::log1p(-static_cast<double>(deg - 1) / m.gamma);
        stack.push_back(rep_child);
    }
    return m;
}

DoublingRatioReport measure_doubling_ratio(const MetricView& view, const DoublingMeasure& m,
                                           int radii_per_point, uint64_t seed) {
    if (radii_per_point < 1) throw std::invalid_argument("radii_per_point must be >= 1");
    DoublingRatioReport rep;
    int n = view.size();
    if (n < 2) {
        rep.max_ratio = 1.0;
        return rep;
    }
    // radius range [min distance / 2, diameter], log-uniform
    double mind = kInf, maxd = 0.0;
    for (PointId i = 0; i < n; ++i)
        for (PointId j = i + 1; j < n; ++j) {
            double d = view.distance(i, j);
            mind = std::min(mind, d);
            maxd = std::max(maxd, d);
        }
    double lo = std::log(mind / 2.0), hi = std::log(maxd);
    Rng rng(seed);
    std::vector<double> inner_terms, outer_terms;
    for (PointId x = 0; x < n; ++x) {
        for (int t = 0; t < radii_per_point; ++t) {
            double r = std::exp(lo + (hi - lo) * rng.next_unit());
            inner_terms.clear();
            outer_terms.clear();
            for (PointId y = 0; y < n; ++y) {
                double d = view.distance(x, y);
                if (d <= r) inner_terms.push_back(m.log_mu[y]);
                if (d <= 2.0 * r) outer_terms.push_back(m.log_mu[y]);
            }
            double ratio = std::exp(log_sum_exp(outer_terms) - log_sum_exp(inner_terms));
            rep.samples++;
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.witness_point = x;
                rep.witness_radius = r;
            }
        }
    }
    return rep;
}

} // namespace dn
