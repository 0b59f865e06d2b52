#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dn/lipschitz.hpp"
#include "test_support.hpp"

using namespace dn;

TEST_CASE("exact lipschitz") {
    auto dom = test::line_view({0, 1, 2});
    SUBCASE("constant map") {
        auto m = MappingView::scalar_values(dom, {5, 5, 5});
        CHECK(lipschitz_exact(m).constant == 0.0);
    }
    SUBCASE("identity: every ratio 1") {
        auto m = MappingView::metric_codomain(dom, dom);
        CHECK(lipschitz_exact(m).constant == 1.0);
    }
    SUBCASE("hand case with witness") {
        auto m = MappingView::scalar_values(dom, {0, 2, 3});
        auto r = lipschitz_exact(m);
        CHECK(r.constant == 2.0);
        CHECK(r.witness_a == 0);
        CHECK(r.witness_b == 1);
    }
    SUBCASE("duplicates rejected") {
        auto d = test::line_view({0, 0});
        auto m = MappingView::scalar_values(d, {0, 1});
        CHECK_THROWS_AS(lipschitz_exact(m), DuplicatePointsError);
    }
}

TEST_CASE("1d lipschitz equals exact") {
    SUBCASE("constant map") {
        std::vector<double> pts = {0, 1, 2};
        CHECK(lipschitz_1d(pts, [](int, int) { return 0.0; }) == 0.0);
    }
    SUBCASE("hand case") {
        std::vector<double> pts = {0, 1, 2}, vals = {0, 2, 3};
        auto rho = [&](int a, int b) { return std::fabs(vals[a] - vals[b]); };
        CHECK(lipschitz_1d(pts, rho) == 2.0);
    }
    SUBCASE("random instances match the quadratic oracle") {
        Rng rng(9);
        for (int t = 0; t < 30; ++t) {
            int n = 5 + static_cast<int>(rng.next_below(60));
            std::vector<double> pts, vals;
            for (int i = 0; i < n; ++i) {
                pts.push_back(rng.next_unit() * 100.0);
                vals.push_back(rng.next_unit() * 10.0);
            }
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            vals.resize(pts.size());
            auto dom = MetricView::euclidean(std::vector<double>(pts), 1);
            auto m = MappingView::scalar_values(dom, vals);
            auto rho = [&](int a, int b) { return std::fabs(vals[a] - vals[b]); };
            CHECK(lipschitz_1d(pts, rho) == lipschitz_exact(m).constant);
        }
    }
}

TEST_CASE("pointwise 1d lipschitz") {
    SUBCASE("affine map: constant slope everywhere") {
        std::vector<double> pts, vals;
        for (int i = 0; i < 20; ++i) {
            pts.push_back(i * 0.5);
            vals.push_back(-3.0 * (i * 0.5) + 1.0);
        }
        auto got = lipschitz_1d_pointwise(pts, vals);
        for (double g : got) CHECK(g == doctest::Approx(3.0));
    }
    SUBCASE("hand case {0,1,3} -> {0,2,3}") {
        auto got = lipschitz_1d_pointwise({0, 1, 3}, {0, 2, 3});
        REQUIRE(got.size() == 3);
        CHECK(got[0] == doctest::Approx(2.0));
        CHECK(got[1] == doctest::Approx(2.0));
        CHECK(got[2] == doctest::Approx(1.0));
    }
    SUBCASE("random instances match per-point brute force") {
        Rng rng(31);
        for (int t = 0; t < 500; ++t) {
            int n = 2 + static_cast<int>(rng.next_below(50));
            std::vector<double> pts, vals;
            for (int i = 0; i < n; ++i) {
                pts.push_back(rng.next_unit() * 50.0);
                vals.push_back(rng.next_unit() * 20.0 - 10.0);
            }
            std::sort(pts.begin(), pts.end());
            pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
            vals.resize(pts.size());
            n = static_cast<int>(pts.size());
            if (n < 2) continue;
            auto got = lipschitz_1d_pointwise(pts, vals);
            for (int i = 0; i < n; ++i) {
                double want = 0;
                for (int j = 0; j < n; ++j)
                    if (j != i) want = std::max(want, std::fabs(vals[i] - vals[j]) /
                                                          std::fabs(pts[i] - pts[j]));
                CHECK(got[i] == doctest::Approx(want).epsilon(1e-12));
            }
        }
    }
    SUBCASE("pointwise maxima equal the global constant") {
        Rng rng(77);
        std::vector<double> pts, vals;
        for (int i = 0; i < 200; ++i) {
            pts.push_back(rng.next_unit() * 10.0);
            vals.push_back(rng.next_unit());
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        vals.resize(pts.size());
        auto per = lipschitz_1d_pointwise(pts, vals);
        auto rho = [&](int a, int b) { return std::fabs(vals[a] - vals[b]); };
        double global = lipschitz_1d(pts, rho);
        CHECK(*std::max_element(per.begin(), per.end()) == doctest::Approx(global).epsilon(1e-12));
    }
}

TEST_CASE("wspd lipschitz approximation") {
    SUBCASE("identity map gives exactly 1") {
        auto dom = test::random_points(60, 2, 3);
        auto m = MappingView::metric_codomain(dom, dom);
        auto r = lipschitz_wspd(m, 0.1, 1);
        CHECK(r.constant == 1.0);
    }
    SUBCASE("constant map gives 0") {
        auto dom = test::random_points(40, 2, 4);
        auto m = MappingView::scalar_values(dom, std::vector<double>(40, 2.5));
        CHECK(lipschitz_wspd(m, 0.1, 1).constant == 0.0);
    }
    SUBCASE("sandwich bound on smooth-ish values") {
        int n = 300;
        auto dom = test::random_points(n, 2, 21);
        std::vector<double> vals(n);
        for (PointId i = 0; i < n; ++i) {
            const double* p = dom.point(i);
            vals[i] = std::sin(3.0 * p[0]) + 0.5 * p[1] * p[1];
        }
        auto m = MappingView::scalar_values(dom, vals);
        double eps = 0.1;
        auto approx = lipschitz_wspd(m, eps, 7);
        auto exact = lipschitz_exact(m);
        CHECK(approx.constant <= exact.constant * (1 + 1e-12));
        CHECK(exact.constant <= (1 + 2 * eps) / (1 - 2 * eps) * approx.constant * (1 + 1e-12));
    }
    SUBCASE("eps range enforced") {
        auto dom = test::line_view({0, 1});
        auto m = MappingView::scalar_values(dom, {0, 1});
        CHECK_THROWS_AS(lipschitz_wspd(m, 0.3, 1), std::invalid_argument);
    }
}
