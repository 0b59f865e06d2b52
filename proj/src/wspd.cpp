#include "dn/wspd.hpp"
#include "dn/rng.hpp"

#include <algorithm>
#include <cmath>

namespace dn {

namespace {

constexpr double kWspdStopFactor = 8.0 * NetTree::kCoverFactor; // 17.6

/// The weak order on vertices is creation order (arena index).
bool order_before(const NetTree& t, int u, int v) {
    if (t.verts[u].level != t.verts[v].level) return t.verts[u].level > t.verts[v].level;
    return u <= v;
}

} // namespace

WspdPairs build_wspd(const NetTree& tree, const MetricView& view, double eps) {
    if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("eps must be in (0, 1]");
    WspdPairs out;
    out.eps = eps;
    if (tree.size() == 0 || tree.num_points() < 2) {
        out.build_index();
        return out;
    }
    std::vector<std::pair<int, int>> work = {{tree.root, tree.root}};
    while (!work.empty()) {
        auto [u, v] = work.back();
        work.pop_back();
        if (u == v) {
            // A self pair expands into unordered child pairs; pairing the
            // children against u itself would cover point pairs twice.
            if (tree.is_leaf(u)) continue;
            const auto& ch = tree.verts[u].children;
            for (size_t i = 0; i < ch.size(); ++i)
                for (size_t j = i; j < ch.size(); ++j) work.push_back({ch[i], ch[j]});
            continue;
        }
        if (!order_before(tree, u, v)) std::swap(u, v);
        // u is the higher vertex now.
        double d = view.distance(tree.verts[u].rep, tree.verts[v].rep);
        long double lhs = kWspdStopFactor * NetTree::scale(tree.verts[u].level);
        if (lhs <= static_cast<long double>(eps) * static_cast<long double>(d)) {
            out.pairs.push_back({u, v});
            continue;
        }
        for (int c : tree.verts[u].children) work.push_back({c, v});
    }
    out.build_index();
    return out;
}

WspdReport verify_wspd(const WspdPairs& pairs, const NetTree& tree, const MetricView& view) {
    WspdReport rep;
    auto fail = [&](const std::string& why) {
        rep.passed = false;
        if (rep.violation.empty()) rep.violation = why;
    };
    int n = view.size();
    std::vector<std::vector<char>> covered(n, std::vector<char>(n, 0));
    for (size_t i = 0; i < pairs.pairs.size(); ++i) {
        auto [u, v] = pairs.pairs[i];
        auto pu = tree.points_under(u);
        auto pv = tree.points_under(v);
        // property 2: disjoint sides
        std::vector<char> inu(n, 0);
        for (PointId p : pu) inu[p] = 1;
        for (PointId p : pv)
            if (inu[p]) fail("sides not disjoint");
        // diameters and set distance
        double diam_u = 0, diam_v = 0, dset = kInf;
        for (size_t a = 0; a < pu.size(); ++a)
            for (size_t b = a + 1; b < pu.size(); ++b)
                diam_u = std::max(diam_u, view.distance(pu[a], pu[b]));
        for (size_t a = 0; a < pv.size(); ++a)
            for (size_t b = a + 1; b < pv.size(); ++b)
                diam_v = std::max(diam_v, view.distance(pv[a], pv[b]));
        for (PointId a : pu)
            for (PointId b : pv) dset = std::min(dset, view.distance(a, b));
        // property 4: separation
        double maxdiam = std::max(diam_u, diam_v);
        if (dset * pairs.eps < maxdiam * (1 - 1e-12)) fail("separation violated");
        // representative clause
        double drep = view.distance(tree.verts[u].rep, tree.verts[v].rep);
        if (maxdiam > pairs.eps * drep * (1 + 1e-12)) fail("diameter vs rep distance violated");
        for (PointId a : pu)
            for (PointId b : pv) {
                if (drep > (1.0 + pairs.eps) * view.distance(a, b) * (1 + 1e-12))
                    fail("rep distance exceeds (1+eps) d(x,y)");
                covered[std::min(a, b)][std::max(a, b)] = 1;
            }
    }
    // property 3: full coverage of distinct pairs
    for (PointId a = 0; a < n; ++a)
        for (PointId b = a + 1; b < n; ++b)
            if (!covered[a][b]) fail("pair not covered");
    return rep;
}

WeightedGraph build_spanner(const MetricView& view, double eps, uint64_t seed) {
    if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("eps must be in (0, 1]");
    WeightedGraph g;
    g.n = view.size();
    if (g.n < 2) return g;
    NetTree tree = build_net_tree(view, seed);
    double delta = eps / 16.0;
    WspdPairs w = build_wspd(tree, view, delta);
    g.edges.reserve(w.size());
    for (auto [u, v] : w.pairs) {
        PointId a = tree.verts[u].rep, b = tree.verts[v].rep;
        g.edges.push_back({a, b, view.distance(a, b)});
    }
    return g;
}

std::vector<PointId> all_nearest_neighbors(const MetricView& view, uint64_t seed) {
    int n = view.size();
    if (n < 2) throw std::invalid_argument("need at least two points");
    NetTree tree = build_net_tree(view, seed);
    WspdPairs w = build_wspd(tree, view, 0.25); // 4-WSPD
    std::vector<PointId> nn(n, -1);
    std::vector<double> best(n, kInf);
    auto offer = [&](PointId x, PointId y, double d) {
        if (d < best[x] || (d == best[x] && y < nn[x])) {
            best[x] = d;
            nn[x] = y;
        }
    };
    for (auto [u, v] : w.pairs) {
        bool u_single = tree.is_leaf(u), v_single = tree.is_leaf(v);
        if (!u_single && !v_single) continue;
        if (u_single) {
            PointId x = tree.verts[u].rep;
            for (PointId y : tree.points_under(v)) {
                double d = view.distance(x, y);
                offer(x, y, d);
                offer(y, x, d);
            }
        } else { // v_single
            PointId x = tree.verts[v].rep;
            for (PointId y : tree.points_under(u)) {
                double d = view.distance(x, y);
                offer(x, y, d);
                offer(y, x, d);
            }
        }
    }
    return nn;
}

WeightedGraph approx_mst(const MetricView& view, double eps, uint64_t seed) {
    WeightedGraph spanner = build_spanner(view, eps, seed);
    if (spanner.n < 2) return spanner;
    return minimum_spanning_tree(spanner);
}

} // namespace dn
