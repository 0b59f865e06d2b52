#include "dn/lipschitz.hpp"
#include "dn/wspd.hpp"

#include <algorithm>
#include <cmath>

namespace dn {

MappingView MappingView::scalar_values(const MetricView& dom, std::vector<double> values) {
    if (static_cast<int>(values.size()) != dom.size())
        throw std::invalid_argument("value count mismatch");
    MappingView m;
    m.domain = &dom;
    m.codomain = [vals = std::move(values)](PointId i, PointId j) {
        return std::fabs(vals[i] - vals[j]);
    };
    return m;
}

MappingView MappingView::metric_codomain(const MetricView& dom, const MetricView& codom) {
    if (codom.size() != dom.size()) throw std::invalid_argument("codomain size mismatch");
    MappingView m;
    m.domain = &dom;
    m.codomain = [&codom](PointId i, PointId j) { return codom.distance(i, j); };
    return m;
}

LipschitzResult lipschitz_exact(const MappingView& m) {
    const MetricView& dom = *m.domain;
    int n = dom.size();
    if (n < 2) throw std::invalid_argument("need at least two points");
    LipschitzResult res;
    for (PointId i = 0; i < n; ++i)
        for (PointId j = i + 1; j < n; ++j) {
            double dx = dom.distance(i, j);
            if (dx == 0.0) throw DuplicatePointsError("duplicate domain points");
            double k = m.codomain(i, j) / dx;
            if (k > res.constant) {
                res.constant = k;
                res.witness_a = i;
                res.witness_b = j;
            }
        }
    return res;
}

double lipschitz_1d(const std::vector<double>& points,
                    const std::function<double(int, int)>& rho) {
    int n = static_cast<int>(points.size());
    if (n < 2) throw std::invalid_argument("need at least two points");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return points[a] < points[b]; });
    double k = 0.0;
    for (int t = 0; t + 1 < n; ++t) {
        int a = idx[t], b = idx[t + 1];
        double dx = points[b] - points[a];
        if (dx == 0.0) throw DuplicatePointsError("duplicate points on the line");
        k = std::max(k, rho(a, b) / dx);
    }
    return k;
}

namespace {

struct Pt {
    double x, y;
};

double cross(const Pt& o, const Pt& a, const Pt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

/// Incremental hull of points arriving in strictly increasing x; keeps the
/// upper or lower boundary.
struct SweepHull {
    bool upper;
    std::vector<Pt> h;

    void push(const Pt& p) {
        while (h.size() >= 2) {
            double c = cross(h[h.size() - 2], h.back(), p);
            if (upper ? c >= 0 : c <= 0)
                h.pop_back();
            else
                break;
        }
        h.push_back(p);
    }

    /// Max slope from the query point (strictly right of every hull point)
    /// to a hull vertex; sign selects which extreme is sought.
    double best_slope_to(const Pt& q, bool maximize) const {
        auto slope = [&](const Pt& p) { return (q.y - p.y) / (q.x - p.x); };
        auto value = [&](const Pt& p) { return maximize ? slope(p) : -slope(p); };
        size_t lo = 0, hi = h.size() - 1;
        // The slope profile along a convex chain is unimodal; binary-search
        // its peak by comparing neighbors.
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (value(h[mid + 1]) >= value(h[mid]))
                lo = mid + 1;
            else
                hi = mid;
        }
        return value(h[lo]);
    }
};

} // namespace

std::vector<double> lipschitz_1d_pointwise(const std::vector<double>& points,
                                           const std::vector<double>& values) {
    int n = static_cast<int>(points.size());
    if (n < 2) throw std::invalid_argument("need at least two points");
    if (values.size() != points.size()) throw std::invalid_argument("value count mismatch");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return points[a] < points[b]; });
    for (int t = 0; t + 1 < n; ++t)
        if (points[idx[t]] == points[idx[t + 1]])
            throw DuplicatePointsError("duplicate points on the line");

    std::vector<double> out(n, 0.0);
    // Left-to-right: tangents from each point to the hulls of its left side.
    // |slope| maxima live on the upper hull (descending case) and the lower
    // hull (ascending case).
    auto sweep = [&](const std::vector<int>& order) {
        SweepHull up{true, {}}, lo{false, {}};
        for (int t = 0; t < n; ++t) {
            int i = order[t];
            Pt q{points[i], values[i]};
            if (t > 0) {
                double a = up.best_slope_to(q, false); // most negative slope
                double b = lo.best_slope_to(q, true);  // most positive slope
                out[i] = std::max({out[i], std::fabs(a), std::fabs(b)});
            }
            up.push(q);
            lo.push(q);
        }
    };
    sweep(idx);
    std::vector<int> rev(idx.rbegin(), idx.rend());
    // Mirror x for the right-side sweep so points still arrive in
    // increasing coordinate order.
    std::vector<double> mirrored(points);
    for (double& x : mirrored) x = -x;
    {
        SweepHull up{true, {}}, lo{false, {}};
        for (int t = 0; t < n; ++t) {
            int i = rev[t];
            Pt q{mirrored[i], values[i]};
            if (t > 0) {
                double a = up.best_slope_to(q, false);
                double b = lo.best_slope_to(q, true);
                out[i] = std::max({out[i], std::fabs(a), std::fabs(b)});
            }
            up.push(q);
            lo.push(q);
        }
    }
    return out;
}

LipschitzResult lipschitz_wspd(const MappingView& m, double eps, uint64_t seed) {
    if (!(eps > 0.0) || eps >= 0.25) throw std::invalid_argument("eps must be in (0, 1/4)");
    const MetricView& dom = *m.domain;
    if (dom.size() < 2) throw std::invalid_argument("need at least two points");
    NetTree tree = build_net_tree(dom, seed);
    WspdPairs w = build_wspd(tree, dom, eps);
    LipschitzResult res;
    for (auto [u, v] : w.pairs) {
        PointId a = tree.verts[u].rep, b = tree.verts[v].rep;
        double k = m.codomain(a, b) / dom.distance(a, b);
        if (k > res.constant) {
            res.constant = k;
            res.witness_a = a;
            res.witness_b = b;
        }
    }
    return res;
}

} // namespace dn
