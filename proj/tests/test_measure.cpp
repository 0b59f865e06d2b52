#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dn/measure.hpp"
#include "test_support.hpp"

using namespace dn;

TEST_CASE("single point measure") {
    auto v = MetricView::euclidean({1.0}, 1);
    NetTree t = build_net_tree(v, 1);
    auto m = build_doubling_measure(t);
    CHECK(m.mu(0) == doctest::Approx(1.0));
    auto rep = measure_doubling_ratio(v, m, 4, 1);
    CHECK(rep.max_ratio == doctest::Approx(1.0));
}

TEST_CASE("hand recursion: root with four uniform children") {
    // Uniform metric on 4 points gives a root with 4 leaf children.
    auto v = test::uniform_metric(4);
    NetTree t = build_net_tree(v, 2);
    REQUIRE(t.verts[t.root].children.size() == 4);
    auto m = build_doubling_measure(t);
    CHECK(m.gamma == 4);
    for (PointId p = 0; p < 4; ++p) CHECK(m.mu(p) == doctest::Approx(0.25));
}

TEST_CASE("hand recursion: two-level tree") {
    // root(deg 2) -> A (rep child, a leaf) and B; B has two leaves.
    // gamma = 2: B gets 1/2, its non-rep leaf 1/4, rep leaf 1/4; A keeps 1/2.
    NetTree t;
    t.leaf_of.assign(3, -1);
    auto add = [&](int level, PointId rep, int parent) {
        NetTreeVertex v;
        v.level = level;
        v.rep = rep;
        v.parent = parent;
        t.verts.push_back(v);
        return static_cast<int>(t.verts.size()) - 1;
    };
    int root = add(2, 0, -1);
    int a = add(kLeafLevel, 0, root);
    int b = add(1, 1, root);
    int b1 = add(kLeafLevel, 1, b);
    int b2 = add(kLeafLevel, 2, b);
    t.verts[root].children = {a, b};
    t.verts[b].children = {b1, b2};
    t.root = root;
    t.leaf_of = {a, b1, b2};
    t.finalize();
    auto m = build_doubling_measure(t);
    CHECK(m.gamma == 2);
    CHECK(m.mu(0) == doctest::Approx(0.5));
    CHECK(m.mu(1) == doctest::Approx(0.25));
    CHECK(m.mu(2) == doctest::Approx(0.25));
}

TEST_CASE("mass conservation: vertex mass aggregates its leaves") {
    auto v = test::random_points(128, 2, 7);
    NetTree t = build_net_tree(v, 3);
    auto m = build_doubling_measure(t);
    // sum mu = 1 via log-sum-exp
    CHECK(std::fabs(std::exp(log_sum_exp(m.log_mu)) - 1.0) < 1e-9);
    // per-vertex mass equals the sum over its leaves
    for (int u = 0; u < t.size(); ++u) {
        std::vector<double> leaf_logs;
        for (PointId p : t.points_under(u)) leaf_logs.push_back(m.log_mu[p]);
        CHECK(log_sum_exp(leaf_logs) == doctest::Approx(m.log_mass[u]).epsilon(1e-9));
        // children masses add up to the parent's
        if (!t.is_leaf(u)) {
            std::vector<double> ch;
            for (int c : t.verts[u].children) ch.push_back(m.log_mass[c]);
            CHECK(log_sum_exp(ch) == doctest::Approx(m.log_mass[u]).epsilon(1e-9));
        }
    }
    // every point carries positive mass
    for (PointId p = 0; p < v.size(); ++p) CHECK(std::isfinite(m.log_mu[p]));
}

TEST_CASE("nearby same-scale vertex masses stay within gamma^5") {
    auto v = test::random_points(96, 2, 11);
    NetTree t = build_net_tree(v, 5);
    auto m = build_doubling_measure(t);
    double lg = std::log(static_cast<double>(m.gamma));
    int checked = 0;
    for (int u = 0; u < t.size(); ++u)
        for (int w = 0; w < t.size(); ++w) {
            if (u == w) continue;
            int lmax = std::max(t.verts[u].level, t.verts[w].level);
            int lmin = std::min(t.parent_level(u), t.parent_level(w));
            // any level l with max < l <= min qualifies; use the smallest
            if (lmax + 1 > lmin) continue;
            for (int l = lmax + 1; l <= std::min(lmin, lmax + 3); ++l) {
                if (NetTree::scale(l) == 0.0L ||
                    NetTree::scale(l) > NetTree::scale(kRootParentLevel - 1))
                    continue;
                double du = v.distance(t.verts[u].rep, t.verts[w].rep);
                if (static_cast<long double>(du) <= 40.0L * NetTree::scale(l)) {
                    CHECK(m.log_mass[u] <= 5.0 * lg + m.log_mass[w] + 1e-9);
                    ++checked;
                }
            }
        }
    CHECK(checked > 0);
}

TEST_CASE("uniform measure doubling ratio matches counting") {
    auto v = test::uniform_metric(16);
    NetTree t = build_net_tree(v, 1);
    auto m = build_doubling_measure(t);
    auto rep = measure_doubling_ratio(v, m, 8, 5);
    CHECK(rep.max_ratio <= 16.0 + 1e-9);
}

TEST_CASE("doubling ratio stays bounded on random planar points") {
    auto v = test::random_points(256, 2, 13);
    NetTree t = build_net_tree(v, 7);
    auto m = build_doubling_measure(t);
    auto rep = measure_doubling_ratio(v, m, 64, 99);
    double gamma = static_cast<double>(m.gamma);
    // frozen battery bound C(gamma) = 2 gamma^2; the gamma^5 mass-balance
    // bound covers the adversarial case, the calibration battery tops out
    // at 1.03 gamma^2
    CHECK(rep.max_ratio <= 2.0 * gamma * gamma);
    CHECK(rep.samples == 256 * 64);
    CHECK(rep.witness_point >= 0);
}

TEST_CASE("deep tree masses stay finite in log space") {
    auto v = test::exp_line(31);
    NetTree t = build_net_tree(v, 1);
    auto m = build_doubling_measure(t);
    CHECK(std::fabs(std::exp(log_sum_exp(m.log_mu)) - 1.0) < 1e-9);
    for (PointId p = 0; p < v.size(); ++p) CHECK(m.log_mu[p] > -kInf);
}
