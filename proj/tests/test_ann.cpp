#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dn/ann.hpp"
#include "test_support.hpp"

using namespace dn;

namespace {

std::pair<PointId, double> brute_nn_query(const MetricView& v, const QueryPoint& q) {
    PointId best = 0;
    double bd = query_distance(v, q, 0);
    for (PointId i = 1; i < v.size(); ++i) {
        double d = query_distance(v, q, i);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return {best, bd};
}

QueryPoint random_query(Rng& rng, int dim, double scale = 1.0) {
    std::vector<double> c;
    for (int k = 0; k < dim; ++k) c.push_back(rng.next_unit() * scale);
    return QueryPoint::coords(std::move(c));
}

} // namespace

TEST_CASE("ring separator tree shape and invariants") {
    SUBCASE("single point") {
        auto v = MetricView::euclidean({1.0}, 1);
        auto t = build_ring_tree(v, 1);
        CHECK(t.nodes.size() == 1);
        CHECK(t.is_leaf(t.root));
    }
    SUBCASE("two points") {
        auto v = test::line_view({0, 1});
        auto t = build_ring_tree(v, 1);
        CHECK(t.nodes.size() == 3);
        CHECK_FALSE(t.is_leaf(t.root));
    }
    SUBCASE("ring emptiness and sizes at every node") {
        int n = 128;
        auto v = test::random_points(n, 2, 3);
        auto t = build_ring_tree(v, 9);
        // recompute subtree point sets
        std::vector<std::vector<PointId>> pts(t.nodes.size());
        // leaves hold one id; internal = union of children
        for (int i = static_cast<int>(t.nodes.size()) - 1; i >= 0; --i) {
            if (t.is_leaf(i)) {
                pts[i] = {t.nodes[i].pivot};
            }
        }
        // children have larger indices than parents in this construction
        for (int i = static_cast<int>(t.nodes.size()) - 1; i >= 0; --i) {
            if (!t.is_leaf(i)) {
                pts[i] = pts[t.nodes[i].inner];
                pts[i].insert(pts[i].end(), pts[t.nodes[i].outer].begin(),
                              pts[t.nodes[i].outer].end());
            }
        }
        double half = 0.5 / n;
        for (size_t i = 0; i < t.nodes.size(); ++i) {
            if (t.is_leaf(static_cast<int>(i))) continue;
            const auto& nd = t.nodes[i];
            int m = static_cast<int>(pts[i].size());
            // inner = exactly the ball, annulus empty, inner <= m/2
            int inner_count = 0;
            for (PointId p : pts[i]) {
                double d = v.distance(nd.pivot, p);
                inner_count += d <= nd.radius;
                bool in_ring = d > (1.0 - half) * nd.radius && d <= (1.0 + half) * nd.radius;
                CHECK_FALSE(in_ring);
            }
            CHECK(inner_count == static_cast<int>(pts[t.nodes[i].inner].size()));
            CHECK(inner_count >= 1);
            CHECK(inner_count <= m / 2 + 1);
        }
    }
}

TEST_CASE("coarse ann is within 2n") {
    int n = 512;
    auto v = test::random_points(n, 2, 8);
    auto t = build_ring_tree(v, 5);
    Rng rng(123);
    for (int q = 0; q < 200; ++q) {
        auto qp = random_query(rng, 2);
        PointId got = coarse_ann(t, v, qp);
        auto [bi, bd] = brute_nn_query(v, qp);
        CHECK(query_distance(v, qp, got) <= 2.0 * n * bd + 1e-300);
        (void)bi;
    }
    SUBCASE("stored point returns itself") {
        for (PointId p = 0; p < 40; ++p) {
            auto qp = query_of_point(v, p);
            PointId got = coarse_ann(t, v, qp);
            CHECK(query_distance(v, qp, got) == 0.0);
            CHECK(got == p);
        }
    }
}

TEST_CASE("descend ann at leaf or zero distance") {
    auto v = test::random_points(64, 2, 4);
    AnnIndex idx = AnnIndex::build(v, 17);
    SUBCASE("query equals a representative") {
        int u = idx.tree.root;
        auto qp = query_of_point(v, idx.tree.verts[u].rep);
        CHECK(descend_ann(idx.tree, v, qp, u, 0.5) == idx.tree.verts[u].rep);
    }
    SUBCASE("leaf start") {
        int leaf = idx.tree.leaf_of[7];
        auto qp = query_of_point(v, 7);
        CHECK(descend_ann(idx.tree, v, qp, leaf, 0.5) == 7);
    }
}

TEST_CASE("full ann queries vs brute force") {
    for (int dim : {2, 5}) {
        int n = 512;
        auto v = test::random_points(n, dim, 100 + dim);
        AnnIndex idx = AnnIndex::build(v, 55);
        Rng rng(777);
        for (double eps : {0.5, 0.1}) {
            for (int q = 0; q < 150; ++q) {
                auto qp = random_query(rng, dim);
                PointId got = ann_query(idx, v, qp, eps);
                auto [bi, bd] = brute_nn_query(v, qp);
                (void)bi;
                CHECK(query_distance(v, qp, got) <= (1.0 + eps) * bd * (1 + 1e-12));
            }
        }
        // stored points come back exactly
        for (PointId p = 0; p < 30; ++p) {
            auto qp = query_of_point(v, p);
            CHECK(ann_query(idx, v, qp, 0.5) == p);
        }
    }
}

TEST_CASE("ann weak sanity envelope at eps = 10") {
    auto v = test::random_points(100, 3, 1);
    AnnIndex idx = AnnIndex::build(v, 2);
    Rng rng(3);
    for (int q = 0; q < 50; ++q) {
        auto qp = random_query(rng, 3);
        PointId got = ann_query(idx, v, qp, 10.0);
        auto [bi, bd] = brute_nn_query(v, qp);
        (void)bi;
        CHECK(query_distance(v, qp, got) <= 11.0 * bd + 1e-300);
    }
}

TEST_CASE("ann on matrix backend with query row") {
    auto v = test::uniform_metric(16, 2.0);
    AnnIndex idx = AnnIndex::build(v, 4);
    // query at distance 1 from point 3, distance 2 from everything else
    std::vector<double> row(16, 2.0);
    row[3] = 1.0;
    auto qp = QueryPoint::distance_row(std::move(row));
    CHECK(ann_query(idx, v, qp, 0.5) == 3);
}

TEST_CASE("descend frontier keeps the true nearest neighbor reachable") {
    auto v = test::random_points(96, 2, 44);
    AnnIndex idx = AnnIndex::build(v, 8);
    Rng rng(15);
    for (int t = 0; t < 40; ++t) {
        std::vector<double> c = {rng.next_unit(), rng.next_unit()};
        auto qp = QueryPoint::coords(c);
        PointId bi = 0;
        double bd = query_distance(v, qp, 0);
        for (PointId i = 1; i < v.size(); ++i) {
            double d = query_distance(v, qp, i);
            if (d < bd) {
                bd = d;
                bi = i;
            }
        }
        std::vector<std::vector<int>> audit;
        descend_ann(idx.tree, v, qp, idx.tree.root, 0.2, &audit);
        REQUIRE(!audit.empty());
        // Every filtered frontier still has the true nearest neighbor in
        // some member's subtree.
        for (const auto& frontier : audit) {
            bool covered = false;
            for (int w : frontier) {
                auto pts = idx.tree.points_under(w);
                if (std::find(pts.begin(), pts.end(), bi) != pts.end()) covered = true;
            }
            CHECK(covered);
        }
    }
}

TEST_CASE("per-query distance calls stay modest (tracked, not asserted)") {
    int n = 1024;
    auto v = test::random_points(n, 2, 5);
    AnnIndex idx = AnnIndex::build(v, 3);
    Rng rng(9);
    uint64_t total = 0;
    int queries = 100;
    for (int t = 0; t < queries; ++t) {
        auto qp = QueryPoint::coords({rng.next_unit(), rng.next_unit()});
        v.reset_distance_calls();
        ann_query(idx, v, qp, 0.1);
        total += v.distance_calls();
    }
    MESSAGE("avg distance calls per ann query (n=1024, eps=0.1): ", total / queries);
    CHECK(total / queries < static_cast<uint64_t>(n)); // far from linear scans
}

TEST_CASE("ann query determinism") {
    auto v = test::random_points(200, 2, 9);
    AnnIndex idx = AnnIndex::build(v, 31);
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        auto qp = random_query(rng, 2);
        PointId a = ann_query(idx, v, qp, 0.3);
        PointId b = ann_query(idx, v, qp, 0.3);
        CHECK(a == b);
    }
}
