#include "dn/ann.hpp"
#include "dn/rng.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace dn {

namespace {

SeparatingBall subset_separating_ball(const MetricView& view, const std::vector<PointId>& ids,
                                      Rng& rng) {
    // Same escalation as the spanner construction, restricted to ids.
    int n = static_cast<int>(ids.size());
    double delta = 2.0;
    for (;;) {
        int m = std::max(1, static_cast<int>(std::ceil(n / (2.0 * delta * delta * delta))));
        long budget = static_cast<long>(std::min(2.0 * delta * delta * delta + 8.0, 1.0e7));
        for (long t = 0; t < budget; ++t) {
            PointId p = ids[rng.next_below(ids.size())];
            std::vector<double> d;
            d.reserve(ids.size());
            for (PointId x : ids) d.push_back(view.distance(p, x));
            std::nth_element(d.begin(), d.begin() + (m - 1), d.end());
            double r = d[m - 1];
            int outer = 0;
            for (PointId x : ids) outer += view.distance(p, x) <= 2.0 * r;
            if (outer <= n / 2) {
                SeparatingBall sb;
                sb.center = p;
                sb.r = r;
                sb.delta = delta;
                return sb;
            }
        }
        delta *= 2.0;
    }
}

/// Thin empty ring: r' in [(1+1/2n) r, 2r - r/2n) whose annulus
/// ((1-1/2n) r', (1+1/2n) r'] contains no point distance. Existence follows
/// from the pigeonhole over the sorted distances; n is the global count.
double find_thin_ring(const MetricView& view, const std::vector<PointId>& ids, PointId center,
                      double r, int global_n) {
    double half = 0.5 / global_n;
    double lo = (1.0 + half) * r;
    double hi = (2.0 - half) * r;
    std::vector<double> d;
    for (PointId x : ids) {
        double dist = view.distance(center, x);
        if (dist > r * (1.0 - half) * 0.5 && dist <= 2.5 * r) d.push_back(dist);
    }
    std::sort(d.begin(), d.end());
    // Gap candidates between consecutive distances (with sentinels): r' works
    // iff (1-half) r' >= a and (1+half) r' <= b.
    auto try_gap = [&](double a, double b) -> double {
        double cand_lo = std::max(a / (1.0 - half), lo);
        double cand_hi = std::min(b / (1.0 + half), hi);
        if (cand_lo <= cand_hi) return cand_lo;
        return -1.0;
    };
    double prev = 0.0;
    for (double x : d) {
        if (x > prev) {
            double got = try_gap(prev, x);
            if (got > 0) return got;
            prev = x;
        }
    }
    double got = try_gap(prev, kInf);
    if (got > 0) return got;
    throw std::logic_error("no empty thin ring found");
}

int build_ring_rec(const MetricView& view, std::vector<PointId>& ids, Rng& rng,
                   RingSeparatorTree& t) {
    if (ids.size() == 1) {
        t.nodes.push_back({ids[0], -1.0, -1, -1});
        return static_cast<int>(t.nodes.size()) - 1;
    }
    SeparatingBall sb = subset_separating_ball(view, ids, rng);
    double rp;
    if (sb.r > 0.0) {
        rp = find_thin_ring(view, ids, sb.center, sb.r, t.n);
    } else {
        // Singleton ball: split the center off at half the distance to its
        // nearest other point; the annulus around it is empty by choice.
        double nearest = kInf;
        for (PointId x : ids)
            if (x != sb.center) nearest = std::min(nearest, view.distance(sb.center, x));
        rp = nearest / 2.0;
    }
    std::vector<PointId> inner, outer;
    for (PointId x : ids) (view.distance(sb.center, x) <= rp ? inner : outer).push_back(x);
    assert(!inner.empty() && !outer.empty());
    ids.clear();
    ids.shrink_to_fit();
    int me = static_cast<int>(t.nodes.size());
    t.nodes.push_back({sb.center, rp, -1, -1});
    int in = build_ring_rec(view, inner, rng, t);
    int out = build_ring_rec(view, outer, rng, t);
    t.nodes[me].inner = in;
    t.nodes[me].outer = out;
    return me;
}

} // namespace

RingSeparatorTree build_ring_tree(const MetricView& view, uint64_t seed) {
    RingSeparatorTree t;
    t.n = view.size();
    if (t.n == 0) return t;
    std::vector<PointId> ids(view.size());
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng(seed);
    t.root = build_ring_rec(view, ids, rng, t);
    return t;
}

PointId coarse_ann(const RingSeparatorTree& tree, const MetricView& view, const QueryPoint& q) {
    if (tree.n == 0) throw std::invalid_argument("empty index");
    int v = tree.root;
    PointId best = -1;
    double best_d = kInf;
    auto offer = [&](PointId p) {
        double d = query_distance(view, q, p);
        if (d < best_d || (d == best_d && p < best)) {
            best_d = d;
            best = p;
        }
    };
    while (!tree.is_leaf(v)) {
        const auto& nd = tree.nodes[v];
        offer(nd.pivot);
        v = query_distance(view, q, nd.pivot) <= nd.radius ? nd.inner : nd.outer;
    }
    offer(tree.nodes[v].pivot);
    return best;
}

PointId descend_ann(const NetTree& tree, const MetricView& view, const QueryPoint& q, int u,
                    double eps, std::vector<std::vector<int>>* audit) {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");

    struct Cand {
        int vertex;
        double dist; // d(q, rep_vertex)
    };
    std::vector<Cand> frontier;
    auto dist_to = [&](int v) { return query_distance(view, q, tree.verts[v].rep); };
    auto snapshot = [&]() {
        if (!audit) return;
        std::vector<int> ids;
        for (const Cand& c : frontier) ids.push_back(c.vertex);
        audit->push_back(std::move(ids));
    };
    // Current dRel(u), filtered in place of a refresh.
    const int lu = tree.verts[u].level;
    const long double reach = NetTree::kRelFactor * NetTree::scale(lu);
    for (const RelEntry& e : tree.verts[u].rel) {
        int w = e.vertex;
        if (tree.verts[w].level <= lu && lu < tree.parent_level(w) &&
            static_cast<long double>(e.dist) <= reach)
            frontier.push_back({w, dist_to(w)});
    }
    snapshot();

    for (;;) {
        // Best candidate; representative ids break ties.
        const Cand* best = &frontier[0];
        for (const Cand& c : frontier)
            if (c.dist < best->dist ||
                (c.dist == best->dist && tree.verts[c.vertex].rep < tree.verts[best->vertex].rep))
                best = &c;
        if (best->dist == 0.0) return tree.verts[best->vertex].rep;

        int expand_level = kLeafLevel;
        for (const Cand& c : frontier)
            if (!tree.is_leaf(c.vertex)) expand_level = std::max(expand_level, tree.verts[c.vertex].level);
        if (expand_level == kLeafLevel) return tree.verts[best->vertex].rep; // all leaves: exact

        // Certificate: every subtree in the frontier lies within the covering
        // radius R of its representative, so the true nearest distance is at
        // least best - R; once best >= (1/eps + 2) R the best representative
        // is a (1+eps)-ANN because best/(best - R) <= 1 + eps.
        long double cover = NetTree::kCoverFactor * NetTree::scale(expand_level);
        if (static_cast<long double>(best->dist) >= (1.0L / eps + 2.0L) * cover)
            return tree.verts[best->vertex].rep;

        // Expand every vertex at the working level, then filter: a vertex
        // whose subtree could still hold the nearest neighbor satisfies
        // d(q, rep_w) <= best + cover(level(w)).
        std::vector<Cand> next;
        for (const Cand& c : frontier) {
            if (tree.verts[c.vertex].level == expand_level && !tree.is_leaf(c.vertex)) {
                for (int ch : tree.verts[c.vertex].children) next.push_back({ch, dist_to(ch)});
            } else {
                next.push_back(c);
            }
        }
        double new_best = kInf;
        for (const Cand& c : next) new_best = std::min(new_best, c.dist);
        std::vector<Cand> kept;
        for (const Cand& c : next) {
            long double cov_w = tree.is_leaf(c.vertex)
                                    ? 0.0L
                                    : NetTree::kCoverFactor * NetTree::scale(tree.verts[c.vertex].level);
            if (static_cast<long double>(c.dist) <= static_cast<long double>(new_best) + cov_w)
                kept.push_back(c);
        }
        frontier = std::move(kept);
        snapshot();
    }
}

AnnIndex AnnIndex::build(const MetricView& view, uint64_t seed) {
    Rng rng(seed);
    AnnIndex idx;
    idx.tree = build_net_tree(view, rng.fork().next_u64());
    idx.ring = build_ring_tree(view, rng.fork().next_u64());
    return idx;
}

PointId ann_query(const AnnIndex& index, const MetricView& view, const QueryPoint& q, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    if (view.size() == 1) return 0;
    PointId p1 = coarse_ann(index.ring, view, q);
    double d1 = query_distance(view, q, p1);
    if (d1 == 0.0) return p1;
    int target = ceil_log_tau(16.0 * d1);
    int u = index.tree.level_ancestor(p1, target);
    PointId fine = descend_ann(index.tree, view, q, u, eps);
    // The coarse answer is also a candidate.
    double df = query_distance(view, q, fine);
    if (d1 < df || (d1 == df && p1 < fine)) return p1;
    return fine;
}

} // namespace dn
