#include "dn/hst.hpp"
#include "dn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dn {

double Hst::tree_distance(PointId x, PointId y) const {
    if (x == y) return 0.0;
    // Walk both leaves to their LCA by depth.
    auto depth = [&](int v) {
        int d = 0;
        while (nodes[v].parent >= 0) {
            v = nodes[v].parent;
            ++d;
        }
        return d;
    };
    int u = leaf_of[x], v = leaf_of[y];
    int du = depth(u), dv = depth(v);
    while (du > dv) {
        u = nodes[u].parent;
        --du;
    }
    while (dv > du) {
        v = nodes[v].parent;
        --dv;
    }
    while (u != v) {
        u = nodes[u].parent;
        v = nodes[v].parent;
    }
    return nodes[u].delta;
}

std::string Hst::to_json() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < nodes.size(); ++i) {
        const Node& nd = nodes[i];
        if (i) os << ",";
        os << "{\"id\":" << i << ",\"delta\":" << nd.delta << ",\"rep\":" << nd.rep
           << ",\"parent\":" << nd.parent << ",\"children\":[";
        if (nd.left >= 0) os << nd.left << "," << nd.right;
        os << "]}";
    }
    os << "]";
    return os.str();
}

namespace {

// Smallest radius around p covering at least m of the subset.
double radius_of_m_nearest(const MetricView& view, const std::vector<PointId>& ids, PointId p,
                           int m) {
    std::vector<double> d;
    d.reserve(ids.size());
    for (PointId x : ids) d.push_back(view.distance(p, x));
    std::nth_element(d.begin(), d.begin() + (m - 1), d.end());
    return d[m - 1];
}

int count_within(const MetricView& view, const std::vector<PointId>& ids, PointId p, double r) {
    int c = 0;
    for (PointId x : ids) c += view.distance(p, x) <= r;
    return c;
}

SeparatingBall separating_ball_subset(const MetricView& view, const std::vector<PointId>& ids,
                                      Rng& rng, std::optional<int> lambda_hint) {
    int n = static_cast<int>(ids.size());
    if (n < 2) throw std::invalid_argument("separating ball needs at least 2 points");
    SeparatingBall out;
    double delta = 2.0;
    bool hinted = lambda_hint.has_value();
    if (hinted) delta = std::max(2.0, static_cast<double>(*lambda_hint));
    int rounds = 0;
    for (;;) {
        int m = std::max(1, static_cast<int>(std::ceil(n / (2.0 * delta * delta * delta))));
        // With the true doubling constant a sample succeeds with probability
        // >= 1/(2 delta^3); delta^3 tries per round keep the expected work
        // linear. A hinted delta that is too small escalates after its round.
        long budget = static_cast<long>(std::min(2.0 * delta * delta * delta + 8.0, 1.0e7));
        for (long t = 0; t < budget; ++t) {
            ++rounds;
            PointId p = ids[rng.next_below(ids.size())];
            double r = radius_of_m_nearest(view, ids, p, m);
            int outer = count_within(view, ids, p, 2.0 * r);
            if (outer <= n / 2) {
                out.center = p;
                out.r = r;
                out.inner_count = count_within(view, ids, p, r);
                out.outer_count = outer;
                out.rounds_used = rounds;
                out.delta = delta;
                return out;
            }
        }
        delta *= 2.0;
    }
}

std::pair<double, double> empty_ring_subset(const MetricView& view,
                                            const std::vector<PointId>& ids, PointId center,
                                            double r) {
    if (r <= 0.0) throw std::invalid_argument("empty_ring needs r > 0");
    int n = static_cast<int>(ids.size());
    int buckets = 2 * std::max(1, n);
    double band = r; // the band is [r, 2r]
    std::vector<double> bmin(buckets, kInf), bmax(buckets, -kInf);
    bool any = false;
    for (PointId x : ids) {
        double d = view.distance(center, x);
        if (d <= r || d > 2.0 * r) continue;
        int b = std::min(buckets - 1, static_cast<int>(std::floor((d - r) / band * buckets)));
        bmin[b] = std::min(bmin[b], d);
        bmax[b] = std::max(bmax[b], d);
        any = true;
    }
    if (!any) return {r, r};
    // Largest gap between consecutive occupied distances, with virtual
    // sentinels at r and 2r.
    double best_a = r, best_gap = 0.0;
    double prev = r;
    for (int b = 0; b < buckets; ++b) {
        if (bmin[b] == kInf) continue;
        double gap = bmin[b] - prev;
        if (gap > best_gap) {
            best_gap = gap;
            best_a = prev;
        }
        prev = std::max(prev, bmax[b]);
    }
    double tail = 2.0 * r - prev;
    if (tail > best_gap) {
        best_gap = tail;
        best_a = prev;
        // No point sits at the closed upper end, keep the full width.
        return {best_a, best_gap};
    }
    // The gap's upper end is an occupied distance; shave it so the
    // open-closed annulus (r', r'+h] stays empty.
    return {best_a, best_gap * (1.0 - 1e-12)};
}

void spanner_rec(const MetricView& view, std::vector<PointId>& ids, Rng& rng,
                 std::vector<GraphEdge>& edges, std::vector<EscalationStep>* trace,
                 std::optional<int> lambda_hint) {
    int n = static_cast<int>(ids.size());
    if (n <= 8) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                edges.push_back({ids[i], ids[j], view.distance(ids[i], ids[j])});
        return;
    }
    SeparatingBall sb = separating_ball_subset(view, ids, rng, lambda_hint);
    if (trace) trace->push_back({n, sb.delta, sb.rounds_used});
    // r = 0 means the threshold was one point; the ball is the center alone
    // and any positive distance from it works as the ring.
    double rp = 0.0;
    if (sb.r > 0.0) rp = empty_ring_subset(view, ids, sb.center, sb.r).first;
    // Star from the ball center to every current point, then split at the
    // empty ring.
    std::vector<PointId> inner, outer;
    for (PointId x : ids) {
        double d = view.distance(sb.center, x);
        if (x != sb.center) edges.push_back({sb.center, x, d});
        (d <= rp ? inner : outer).push_back(x);
    }
    ids.clear();
    ids.shrink_to_fit();
    spanner_rec(view, inner, rng, edges, trace, lambda_hint);
    spanner_rec(view, outer, rng, edges, trace, lambda_hint);
}

} // namespace

SeparatingBall separating_ball(const MetricView& view, uint64_t seed,
                               std::optional<int> lambda_hint) {
    std::vector<PointId> ids(view.size());
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng(seed);
    return separating_ball_subset(view, ids, rng, lambda_hint);
}

std::pair<double, double> empty_ring(const MetricView& view, PointId center, double r) {
    std::vector<PointId> ids(view.size());
    std::iota(ids.begin(), ids.end(), 0);
    return empty_ring_subset(view, ids, center, r);
}

WeightedGraph build_low_quality_spanner(const MetricView& view, uint64_t seed) {
    return build_low_quality_spanner_traced(view, seed, nullptr);
}

WeightedGraph build_low_quality_spanner_traced(const MetricView& view, uint64_t seed,
                                               std::vector<EscalationStep>* trace,
                                               std::optional<int> lambda_hint) {
    WeightedGraph g;
    g.n = view.size();
    if (g.n <= 1) return g;
    std::vector<PointId> ids(view.size());
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng(seed);
    spanner_rec(view, ids, rng, g.edges, trace, lambda_hint);
    return g;
}

WeightedGraph minimum_spanning_tree(const WeightedGraph& graph) {
    std::vector<GraphEdge> sorted = graph.edges;
    std::sort(sorted.begin(), sorted.end(), [](const GraphEdge& x, const GraphEdge& y) {
        if (x.w != y.w) return x.w < y.w;
        auto xa = std::minmax(x.a, x.b), ya = std::minmax(y.a, y.b);
        return xa < ya;
    });
    std::vector<int> uf(graph.n);
    std::iota(uf.begin(), uf.end(), 0);
    auto find = [&](int x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
    };
    WeightedGraph mst;
    mst.n = graph.n;
    for (const GraphEdge& e : sorted) {
        int ra = find(e.a), rb = find(e.b);
        if (ra == rb) continue;
        uf[ra] = rb;
        mst.edges.push_back(e);
        if (static_cast<int>(mst.edges.size()) == graph.n - 1) break;
    }
    if (static_cast<int>(mst.edges.size()) != graph.n - 1)
        throw std::invalid_argument("graph is disconnected");
    return mst;
}

Hst mst_to_hst(const WeightedGraph& graph) {
    int n = graph.n;
    Hst h;
    if (n == 0) return h;
    h.nodes.reserve(2 * n);
    h.leaf_of.resize(n);
    for (int i = 0; i < n; ++i) {
        h.nodes.push_back({0.0, static_cast<PointId>(i), -1, -1, -1});
        h.leaf_of[i] = i;
    }
    if (n == 1) {
        h.root = 0;
        return h;
    }
    WeightedGraph mst = minimum_spanning_tree(graph);
    std::vector<GraphEdge> sorted = mst.edges;
    std::sort(sorted.begin(), sorted.end(), [](const GraphEdge& x, const GraphEdge& y) {
        if (x.w != y.w) return x.w < y.w;
        auto xa = std::minmax(x.a, x.b), ya = std::minmax(y.a, y.b);
        return xa < ya;
    });
    std::vector<int> uf(n), comp_root(n);
    std::iota(uf.begin(), uf.end(), 0);
    std::iota(comp_root.begin(), comp_root.end(), 0);
    auto find = [&](int x) {
        while (uf[x] != x) x = uf[x] = uf[uf[x]];
        return x;
    };
    for (const GraphEdge& e : sorted) {
        int ra = find(e.a), rb = find(e.b);
        if (ra == rb) continue;
        int left = comp_root[ra], right = comp_root[rb];
        int id = static_cast<int>(h.nodes.size());
        Hst::Node nd;
        nd.delta = (n - 1) * e.w;
        nd.rep = std::min(h.nodes[left].rep, h.nodes[right].rep);
        nd.left = left;
        nd.right = right;
        h.nodes.push_back(nd);
        h.nodes[left].parent = id;
        h.nodes[right].parent = id;
        uf[ra] = rb;
        comp_root[find(rb)] = id;
    }
    h.root = static_cast<int>(h.nodes.size()) - 1;
    return h;
}

Hst build_coarse_hst(const MetricView& view, uint64_t seed) {
    if (view.size() == 1) {
        Hst h;
        h.nodes.push_back({0.0, 0, -1, -1, -1});
        h.root = 0;
        h.leaf_of = {0};
        return h;
    }
    WeightedGraph g = build_low_quality_spanner(view, seed);
    return mst_to_hst(g);
}

} // namespace dn
