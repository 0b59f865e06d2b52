#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dn/wspd.hpp"
#include "test_support.hpp"

using namespace dn;

TEST_CASE("wspd on two points") {
    auto v = test::line_view({0, 1});
    NetTree t = build_net_tree(v, 1);
    auto w = build_wspd(t, v, 1.0);
    REQUIRE(w.size() == 1);
    auto [a, b] = w.pairs[0];
    CHECK(t.is_leaf(a));
    CHECK(t.is_leaf(b));
    CHECK(verify_wspd(w, t, v).passed);
}

TEST_CASE("wspd on uniform metric: all singleton pairs") {
    auto v = test::uniform_metric(4);
    NetTree t = build_net_tree(v, 2);
    auto w = build_wspd(t, v, 1.0);
    CHECK(w.size() == 6); // C(4,2) leaf pairs
    for (auto [a, b] : w.pairs) {
        CHECK(t.is_leaf(a));
        CHECK(t.is_leaf(b));
    }
    CHECK(verify_wspd(w, t, v).passed);
}

TEST_CASE("wspd properties hold exhaustively") {
    for (double eps : {1.0, 0.5, 0.1}) {
        for (uint64_t seed : {0u, 1u}) {
            auto v = test::random_points(100, 2, 40 + seed);
            NetTree t = build_net_tree(v, seed);
            auto w = build_wspd(t, v, eps);
            auto rep = verify_wspd(w, t, v);
            CHECK_MESSAGE(rep.passed, rep.violation);
        }
    }
    SUBCASE("exponential spread") {
        auto v = test::exp_line(24);
        NetTree t = build_net_tree(v, 5);
        auto w = build_wspd(t, v, 0.5);
        auto rep = verify_wspd(w, t, v);
        CHECK_MESSAGE(rep.passed, rep.violation);
    }
}

TEST_CASE("wspd verifier rejects corruptions") {
    auto v = test::random_points(30, 2, 11);
    NetTree t = build_net_tree(v, 3);
    auto w = build_wspd(t, v, 0.5);
    SUBCASE("dropping a pair breaks coverage") {
        auto broken = w;
        broken.pairs.pop_back();
        broken.build_index();
        CHECK_FALSE(verify_wspd(broken, t, v).passed);
    }
    SUBCASE("overlapping pair breaks disjointness") {
        auto broken = w;
        int internal = t.root;
        broken.pairs.push_back({internal, internal});
        broken.build_index();
        CHECK_FALSE(verify_wspd(broken, t, v).passed);
    }
}

TEST_CASE("membership index") {
    auto v = test::random_points(60, 2, 13);
    NetTree t = build_net_tree(v, 1);
    auto w = build_wspd(t, v, 0.5);
    for (auto [a, b] : w.pairs) {
        CHECK(w.contains(a, b));
        CHECK(w.contains(b, a));
    }
    CHECK_FALSE(w.contains(t.root, t.root));
    SUBCASE("no duplicate pairs") {
        auto canon = w.pairs;
        for (auto& [a, b] : canon)
            if (a > b) std::swap(a, b);
        std::sort(canon.begin(), canon.end());
        CHECK(std::adjacent_find(canon.begin(), canon.end()) == canon.end());
    }
}

TEST_CASE("spanner stretch") {
    SUBCASE("n = 2") {
        auto v = test::line_view({0, 5});
        auto g = build_spanner(v, 0.5, 1);
        REQUIRE(g.edges.size() >= 1);
    }
    SUBCASE("collinear equally spaced") {
        std::vector<double> xs;
        for (int i = 0; i < 10; ++i) xs.push_back(i);
        auto v = MetricView::euclidean(std::move(xs), 1);
        auto g = build_spanner(v, 0.5, 3);
        std::vector<std::tuple<int, int, double>> es;
        for (auto& e : g.edges) es.push_back({e.a, e.b, e.w});
        auto d = test::apsp(10, es);
        for (int i = 0; i < 10; ++i)
            for (int j = i + 1; j < 10; ++j)
                CHECK(d[i][j] <= 1.5 * v.distance(i, j) * (1 + 1e-12));
    }
    SUBCASE("random points, both eps") {
        for (double eps : {0.5, 0.1}) {
            int n = 128;
            auto v = test::random_points(n, 3, 71);
            auto g = build_spanner(v, eps, 9);
            std::vector<std::tuple<int, int, double>> es;
            for (auto& e : g.edges) es.push_back({e.a, e.b, e.w});
            auto d = test::apsp(n, es);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    double dm = v.distance(i, j);
                    CHECK(d[i][j] >= dm * (1 - 1e-12)); // domination
                    CHECK(d[i][j] <= (1.0 + eps) * dm * (1 + 1e-12));
                }
        }
    }
}

TEST_CASE("all nearest neighbors") {
    SUBCASE("two points") {
        auto v = test::line_view({0, 1});
        auto nn = all_nearest_neighbors(v, 1);
        CHECK(nn == std::vector<PointId>{1, 0});
    }
    SUBCASE("line 0 1 3") {
        auto v = test::line_view({0, 1, 3});
        auto nn = all_nearest_neighbors(v, 1);
        CHECK(nn == std::vector<PointId>{1, 0, 1});
    }
    SUBCASE("matches brute force with tie rule") {
        int n = 300;
        auto v = test::random_points(n, 2, 17);
        auto nn = all_nearest_neighbors(v, 5);
        for (PointId p = 0; p < n; ++p) {
            PointId want = -1;
            double bd = kInf;
            for (PointId q = 0; q < n; ++q) {
                if (q == p) continue;
                double d = v.distance(p, q);
                if (d < bd || (d == bd && q < want)) {
                    bd = d;
                    want = q;
                }
            }
            CHECK(nn[p] == want);
        }
    }
}

TEST_CASE("approximate mst") {
    SUBCASE("n = 2 exact") {
        auto v = test::line_view({0, 2});
        auto t = approx_mst(v, 0.5, 1);
        REQUIRE(t.edges.size() == 1);
        CHECK(t.edges[0].w == 2.0);
    }
    SUBCASE("collinear equally spaced is exact") {
        std::vector<double> xs;
        for (int i = 0; i < 12; ++i) xs.push_back(i);
        auto v = MetricView::euclidean(std::move(xs), 1);
        auto t = approx_mst(v, 0.5, 2);
        double w = 0;
        for (auto& e : t.edges) w += e.w;
        CHECK(w == doctest::Approx(11.0));
    }
    SUBCASE("weight within (1+eps) of exact") {
        int n = 150;
        auto v = test::random_points(n, 2, 23);
        auto t = approx_mst(v, 0.1, 3);
        REQUIRE(static_cast<int>(t.edges.size()) == n - 1);
        // exact MST over the complete metric
        WeightedGraph full;
        full.n = n;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) full.edges.push_back({i, j, v.distance(i, j)});
        auto exact = minimum_spanning_tree(full);
        double we = 0, wa = 0;
        for (auto& e : exact.edges) we += e.w;
        for (auto& e : t.edges) wa += e.w;
        CHECK(wa >= we * (1 - 1e-12));
        CHECK(wa <= 1.1 * we * (1 + 1e-12));
    }
}
