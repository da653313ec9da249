#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "growthlab/indices.hpp"

using namespace growthlab;
using namespace growthlab::indices;

namespace {
std::vector<double> geometric_grid(double hi, double lo, int n) {
    std::vector<double> g(n);
    const double ratio = std::pow(lo / hi, 1.0 / (n - 1));
    double v = hi;
    for (int i = 0; i < n; ++i, v *= ratio) g[i] = v;
    return g;
}
}  // namespace

TEST_CASE("example1 vertex index formulas are exact rationals") {
    CHECK(example1_vertex_index_exact({2, 3}, 2) == Rational(1, 4));
    CHECK(example1_vertex_index_exact({1, 2, 4}, 1) == Rational(3, 8));
    // all exponents 1 in d dims: (d-1)/2
    CHECK(example1_vertex_index_exact({1, 1, 1, 1}, 3) == Rational(3, 2));
    CHECK(example1_vertex_index({2, 3}, 2).k == 0);
    CHECK_THROWS_AS(example1_vertex_index({2, 3}, 3), std::invalid_argument);
    CHECK_THROWS_AS(example1_vertex_index({2, 3}, 0), std::invalid_argument);
}

TEST_CASE("vertex index invariant under permutations fixing the off-axis multiset") {
    const auto base = example1_vertex_index_exact({2, 3, 5}, 2);
    CHECK(example1_vertex_index_exact({5, 3, 2}, 2) == base);
}

TEST_CASE("example1 global index: determinate vs indeterminate") {
    const auto g1 = example1_global_index({1, 2, 4});
    CHECK(g1.determinate);
    CHECK(*g1.g_exact == Rational(3, 8));
    CHECK(g1.k == 0);

    const auto g2 = example1_global_index({1, 1});
    CHECK(g2.determinate);
    CHECK(*g2.g_exact == Rational(1, 2));

    const auto g3 = example1_global_index({1, 1, 1});
    CHECK_FALSE(g3.determinate);
    CHECK(*g3.lower_bound == doctest::Approx(0.5));
}

TEST_CASE("powered sum index") {
    CHECK(*powered_sum_index(3, 1, 1).g_exact == Rational(3, 2));
    CHECK(*powered_sum_index(6, 2, 3).g_exact == Rational(1, 2));
    CHECK(*powered_sum_index(1, 1, 1).g_exact == Rational(1, 2));
    // c = 1 connects to the vertex-index arithmetic: both are sums of 1/(2 a_i)
    CHECK(*powered_sum_index(2, 2, 1).g_exact ==
          example1_vertex_index_exact({2, 2, 7}, 3));
}

TEST_CASE("estimate_sublevel_measure closed-form cases") {
    PolynomialFn fx2(Polynomial::axis_power(1, 0, 2));
    const auto m1 = estimate_sublevel_measure(fx2, 1.0, 0.01, 42, 1u << 18);
    CHECK(std::fabs(m1.value - 0.2) <= 3.0 * m1.std_error + 2e-3);

    PolynomialFn fr2(Polynomial::powered_sum(2, 1));
    const auto m2 = estimate_sublevel_measure(fr2, 1.0, 0.1, 42, 1u << 18);
    CHECK(std::fabs(m2.value - 0.1 * std::numbers::pi) <= 3.0 * m2.std_error + 2e-3);
}

TEST_CASE("QMC matches the tensor-grid cross-oracle for x^4 + y^6") {
    Polynomial p = Polynomial::axis_power(2, 0, 4) + Polynomial::axis_power(2, 1, 6);
    PolynomialFn f(p);
    const double eps = 1e-3;
    const auto mc = estimate_sublevel_measure(f, 1.0, eps, 9, 1u << 20);
    const double g1 = grid_sublevel_measure(f, 1.0, eps, 4096);
    const double g2 = grid_sublevel_measure(f, 1.0, eps, 2048);
    const double grid_margin = 2.0 * std::fabs(g1 - g2);
    CHECK(std::fabs(mc.value - g1) <= 3.0 * mc.std_error + grid_margin + 1e-6);
}

TEST_CASE("scaling invariance: same seed, lambda f vs lambda eps") {
    Polynomial p = Polynomial::axis_power(2, 0, 4) + Polynomial::powered_sum(2, 1);
    PolynomialFn f(p);
    for (double lambda : {2.0, 0.5, 3.0}) {
        ScaledFn fl(f, lambda);
        const auto a = estimate_sublevel_measure(f, 0.8, 1e-2, 77, 1u << 16);
        const auto b = estimate_sublevel_measure(fl, 0.8, lambda * 1e-2, 77, 1u << 16);
        CHECK(a.hits == b.hits);
        CHECK(a.value == b.value);
    }
}

TEST_CASE("worker count does not change results") {
    PolynomialFn f(Polynomial::powered_sum(3, 1));
    const auto a = estimate_sublevel_measure(f, 0.5, 1e-3, 5, 1u << 18, 1);
    const auto b = estimate_sublevel_measure(f, 0.5, 1e-3, 5, 1u << 18, 4);
    CHECK(a.value == b.value);
    CHECK(a.hits == b.hits);
}

TEST_CASE("fit_growth on synthetic data") {
    SublevelSamples s;
    s.ambient_dim = 2;
    s.r = 1.0;
    s.eps = geometric_grid(1e-1, 1e-6, 16);
    SUBCASE("pure power 2 sqrt(eps)") {
        for (double e : s.eps) {
            s.measure.push_back(2.0 * std::sqrt(e));
            s.std_error.push_back(0.0);
        }
        const auto fit = fit_growth(s);
        CHECK(fit.g_hat == doctest::Approx(0.5).epsilon(0.01));
        CHECK(fit.k_hat == 0);
        CHECK(fit.c_hat == doctest::Approx(2.0).epsilon(0.02));
    }
    SUBCASE("eps |ln eps| picks k = 1") {
        for (double e : s.eps) {
            s.measure.push_back(e * std::fabs(std::log(e)));
            s.std_error.push_back(0.0);
        }
        const auto fit = fit_growth(s);
        CHECK(fit.g_hat == doctest::Approx(1.0).epsilon(0.02));
        CHECK(fit.k_hat == 1);
    }
}

TEST_CASE("fit_growth recovers planted (g, k) pairs") {
    for (double g : {0.25, 0.5, 1.0, 1.5}) {
        for (int k : {0, 1}) {
            SublevelSamples s;
            s.ambient_dim = 3;
            s.r = 1.0;
            s.eps = geometric_grid(1e-1, 1e-6, 16);
            for (double e : s.eps) {
                s.measure.push_back(1.7 * std::pow(e, g) *
                                    std::pow(std::fabs(std::log(e)), k));
                s.std_error.push_back(0.0);
            }
            const auto fit = fit_growth(s);
            CHECK(std::fabs(fit.g_hat - g) < 0.02);
            CHECK(fit.k_hat == k);
        }
    }
}

TEST_CASE("fit_growth preconditions") {
    SublevelSamples s;
    s.ambient_dim = 2;
    s.eps = {1e-1, 1e-2};
    s.measure = {1.0, 0.5};
    s.std_error = {0.0, 0.0};
    CHECK_THROWS_AS(fit_growth(s), std::invalid_argument);
}

TEST_CASE("MC fit recovers h = 3/2 for the squared norm in 3-D") {
    PolynomialFn f(Polynomial::powered_sum(3, 1));
    const auto grid = geometric_grid(1e-1, 1e-4, 12);
    const auto sweep = sublevel_sweep(f, 0.5, grid, 2025, 1u << 21, 2);
    const auto fit = fit_growth(sweep);
    CHECK(std::fabs(fit.g_hat - 1.5) < 0.05);
    CHECK(fit.k_hat == 0);
}

TEST_CASE("empirical chart index for a=(2,3) at the pole is 1/4") {
    const geometry::Domain dom(geometry::SuperellipsoidSpec{{2, 3}});
    const auto chart = geometry::chart_at(dom, std::vector<double>{0.0, 1.0});
    CallbackFn f(1, [&](std::span<const double> u) { return chart.graph(u); });
    const double r = 0.5 * chart.r_chart();
    // keep the window below saturation: f^-1(eps) must stay inside |u| < r
    const auto grid = geometric_grid(1e-3, 1e-7, 12);
    const auto sweep = sublevel_sweep(f, r, grid, 11, 1u << 16, 2);
    const auto fit = fit_growth(sweep);
    CHECK(std::fabs(fit.g_hat - 0.25) < 0.03);
}

TEST_CASE("tangent distance index") {
    const geometry::Domain disk(geometry::SuperellipsoidSpec{{1, 1}});
    const auto chart = geometry::chart_at(disk, std::vector<double>{0.0, 1.0});
    std::vector<double> grid;
    for (double h = 0.1; h <= 1.45; h += 0.1) grid.push_back(h);

    SUBCASE("circle tangent plane: 1/2") {
        CHECK(tangent_distance_index(chart, grid) == doctest::Approx(0.5).epsilon(0.1));
    }
    SUBCASE("x^4 + y^2 tangent plane: 1/4") {
        const geometry::Domain d21(geometry::SuperellipsoidSpec{{2, 1}});
        const auto c21 = geometry::chart_at(d21, std::vector<double>{0.0, 1.0});
        CHECK(tangent_distance_index(c21, grid) == doctest::Approx(0.25).epsilon(0.2));
    }
    SUBCASE("generic non-tangent hyperplane: 1") {
        const double s = std::sqrt(0.5);
        const geometry::Vec w{s, s};
        CHECK(tangent_distance_index(chart, grid, &w) == doctest::Approx(1.0).epsilon(0.08));
    }
    SUBCASE("grid below the onset is an error") {
        std::vector<double> low{0.1, 0.2, 0.3};
        CHECK_THROWS(tangent_distance_index(chart, low));
    }
}
