#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "growthlab/geometry.hpp"
#include "growthlab/quadrature.hpp"

using namespace growthlab;
using namespace growthlab::geometry;

namespace {
Domain super(std::vector<int> exps) { return Domain(SuperellipsoidSpec{std::move(exps)}); }

Domain disk() { return super({1, 1}); }

Domain polar_bump2d() {
    // h(w) = 1 + 0.25 w0^2 on the unit circle
    const Expr h = Expr::constant(1.0) +
                   Expr::constant(0.25) * Expr::pow(Expr::coord(0), 2);
    return Domain(PolarDomainSpec{2, h});
}
}  // namespace

TEST_CASE("inside / defining_value basics") {
    const auto d = disk();
    CHECK(d.inside(std::vector<double>{0.0, 0.0}));
    CHECK_FALSE(d.inside(std::vector<double>{1.0, 1.0}));
    CHECK(d.defining_value(std::vector<double>{0.0, 1.0}) == doctest::Approx(0.0));
    CHECK(d.defining_value(std::vector<double>{0.0, 0.0}) == doctest::Approx(-1.0));

    const auto d21 = super({2, 1});  // x^4 + y^2 <= 1
    CHECK(d21.defining_value(std::vector<double>{1.0, 1.0}) == doctest::Approx(1.0));

    const auto d23 = super({2, 3});
    // 0.9^4 + 0.9^6 = 1.187541 > 1, evaluated directly
    CHECK_FALSE(d23.inside(std::vector<double>{0.9, 0.9}));
    CHECK(d23.defining_value(std::vector<double>{0.9, 0.9}) ==
          doctest::Approx(std::pow(0.9, 4) + std::pow(0.9, 6) - 1.0));

    CHECK_THROWS_AS(d.inside(std::vector<double>{0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("superellipsoid symmetry under sign flips and exponent-fixing permutations") {
    const auto d = super({2, 3, 2});
    const std::vector<double> p{0.3, -0.5, 0.7};
    const double v = d.defining_value(p);
    CHECK(d.defining_value(std::vector<double>{-0.3, 0.5, -0.7}) == doctest::Approx(v));
    // swapping coordinates 0 and 2 fixes the exponent multiset
    CHECK(d.defining_value(std::vector<double>{0.7, -0.5, 0.3}) == doctest::Approx(v));
}

TEST_CASE("chart at the disk pole reproduces 1 - sqrt(1 - u^2)") {
    const auto d = disk();
    const auto chart = chart_at(d, std::vector<double>{0.0, 1.0});
    CHECK(chart.normal()[0] == doctest::Approx(0.0));
    CHECK(chart.normal()[1] == doctest::Approx(1.0));
    CHECK(chart.r_chart() > 0.3);
    CHECK(chart.graph(std::vector<double>{0.0}) == doctest::Approx(0.0).epsilon(1e-12));
    for (double u : {0.1, -0.2, 0.3}) {
        const double expect = 1.0 - std::sqrt(1.0 - u * u);
        CHECK(chart.graph(std::vector<double>{u}) == doctest::Approx(expect).epsilon(1e-10));
    }
    // grad f(0) = 0 via central difference
    const double h = 1e-5;
    const double d0 = (chart.graph(std::vector<double>{h}) -
                       chart.graph(std::vector<double>{-h})) / (2 * h);
    CHECK(std::fabs(d0) < 1e-9);
}

TEST_CASE("chart of x^4 + y^2 <= 1 at (0,1): f(u) = 1 - sqrt(1 - u^4)") {
    const auto d = super({2, 1});
    const auto chart = chart_at(d, std::vector<double>{0.0, 1.0});
    for (double u : {0.1, 0.3, -0.4}) {
        const double expect = 1.0 - std::sqrt(1.0 - u * u * u * u);
        CHECK(chart.graph(std::vector<double>{u}) == doctest::Approx(expect).epsilon(1e-10));
    }
    // leading term u^4 / 2
    const double u = 0.02;
    CHECK(chart.graph(std::vector<double>{u}) ==
          doctest::Approx(0.5 * u * u * u * u).epsilon(1e-3));
}

TEST_CASE("chart consistency: lifted points satisfy |Phi| < 1e-9") {
    for (auto dom : {super({2, 3}), super({1, 2, 4})}) {
        std::vector<double> pole(dom.dimension(), 0.0);
        pole.back() = 1.0;
        const auto chart = chart_at(dom, pole);
        const int n = dom.dimension() - 1;
        for (double scale : {0.9, 0.5, 0.1}) {
            std::vector<double> u(n, 0.0);
            u[0] = scale * chart.r_chart();
            if (n > 1) {
                u[0] *= std::sqrt(0.5);
                u[1] = u[0];
            }
            CHECK(std::fabs(dom.defining_value(chart.lift(u))) < 1e-9);
        }
    }
}

TEST_CASE("chart_at rejects degenerate input") {
    const auto d = disk();
    CHECK_THROWS_AS(chart_at(d, std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("perturbed superellipsoid: Example-2 style chart at the pole") {
    // p = x1^2, eta = 0.01, d = 3, a = 2
    PerturbedSuperellipsoidSpec spec{3, 2, Polynomial::axis_power(2, 0, 2), 0.01};
    const Domain dom(spec);
    std::vector<double> pole{0.0, 0.0, 1.0};
    CHECK(std::fabs(dom.defining_value(pole)) < 1e-12);
    const auto chart = chart_at(dom, pole);
    CHECK(chart.graph(std::vector<double>{0.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-11));
    const double h = 1e-5;
    for (int i = 0; i < 2; ++i) {
        std::vector<double> up(2, 0.0), um(2, 0.0);
        up[i] = h;
        um[i] = -h;
        CHECK(std::fabs(chart.graph(up) - chart.graph(um)) / (2 * h) < 1e-9);
    }
}

TEST_CASE("perturbed superellipsoid rejects bad specs") {
    CHECK_THROWS(Domain(PerturbedSuperellipsoidSpec{
        3, 2, Polynomial::axis_power(2, 0, 2) + Polynomial(2, {{1.0, {0, 0}}}), 0.01}));
    CHECK_THROWS(Domain(PerturbedSuperellipsoidSpec{
        3, 1, Polynomial::axis_power(2, 0, 2), 0.01}));  // deg p = 2a
}

TEST_CASE("slice_measure closed forms") {
    const auto d = disk();
    CHECK(slice_measure(d, std::vector<double>{0.0, 1.0}, 0.0) == doctest::Approx(2.0));
    CHECK(slice_measure(d, std::vector<double>{0.0, 1.0}, 0.6) == doctest::Approx(1.6));
    const auto d23 = super({2, 3});
    CHECK(slice_measure(d23, std::vector<double>{0.0, 1.0}, 0.5) ==
          doctest::Approx(2.0 * std::pow(1.0 - std::pow(0.5, 6), 0.25)).epsilon(1e-12));
    CHECK(slice_measure(d23, std::vector<double>{0.0, 1.0}, 1.5) == 0.0);
}

TEST_CASE("numeric slice path agrees with closed form on rotated disk directions") {
    const auto d = disk();
    const double s = std::sqrt(0.5);
    for (double off : {0.0, 0.3, 0.8}) {
        CHECK(slice_measure(d, std::vector<double>{s, s}, off) ==
              doctest::Approx(2.0 * std::sqrt(1.0 - off * off)).epsilon(1e-8));
    }
}

TEST_CASE("3-D ball slice area matches pi (1 - o^2)") {
    const auto b = super({1, 1, 1});
    const double s = std::sqrt(1.0 / 3.0);
    for (double off : {0.0, 0.5}) {
        CHECK(slice_measure(b, std::vector<double>{s, s, s}, off, 1e-7) ==
              doctest::Approx(std::numbers::pi * (1 - off * off)).epsilon(1e-5));
    }
}

TEST_CASE("volume closed forms") {
    CHECK(volume(disk()) == doctest::Approx(std::numbers::pi));
    CHECK(volume(super({1, 1, 1})) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
    CHECK(volume(super({2, 2})) == doctest::Approx(3.7081).epsilon(1e-4));
}

TEST_CASE("Dirichlet volume equals QMC volume within 3 standard errors") {
    for (auto exps : {std::vector<int>{1, 1}, std::vector<int>{2, 2},
                      std::vector<int>{1, 2, 4}}) {
        const auto d = super(exps);
        const auto mc = volume_qmc(d, 2024, 1u << 20);
        const double exact = superellipsoid_volume(exps);
        CHECK(std::fabs(mc.value - exact) <= 3.0 * mc.std_error + 1e-4 * exact);
    }
}

TEST_CASE("slice_measure integrates to volume") {
    const auto d23 = super({2, 3});
    auto f2 = [&](double o) { return slice_measure(d23, std::vector<double>{0.0, 1.0}, o); };
    CHECK(adaptive_simpson(f2, -1.0, 1.0, 1e-9) == doctest::Approx(volume(d23)).epsilon(1e-6));

    const auto d3 = super({1, 2, 4});
    auto f3 = [&](double o) { return slice_measure(d3, std::vector<double>{0.0, 0.0, 1.0}, o); };
    CHECK(adaptive_simpson(f3, -1.0, 1.0, 1e-8) == doctest::Approx(volume(d3)).epsilon(1e-4));
}

TEST_CASE("polar domain: membership, volume oracle, support") {
    const auto p = polar_bump2d();
    CHECK(p.inside(std::vector<double>{1.1, 0.0}));   // h(1,0) = 1.25
    CHECK_FALSE(p.inside(std::vector<double>{1.3, 0.0}));
    CHECK(p.defining_value(std::vector<double>{0.0, 0.0}) == doctest::Approx(-1.0));

    // radial quadrature oracle: vol = 1/2 int h(theta)^2 dtheta
    auto h2 = [](double th) {
        const double c = std::cos(th);
        const double h = 1.0 + 0.25 * c * c;
        return 0.5 * h * h;
    };
    const double oracle = trapezoid(h2, 0.0, 2.0 * std::numbers::pi, 1 << 14);
    const auto mc = volume_qmc(p, 99, 1u << 20);
    CHECK(std::fabs(mc.value - oracle) <= 3.0 * mc.std_error + 1e-4 * oracle);

    const auto [lo, hi] = support_interval(p, std::vector<double>{1.0, 0.0});
    CHECK(hi == doctest::Approx(1.25).epsilon(1e-9));
    CHECK(lo == doctest::Approx(-1.25).epsilon(1e-9));
}

TEST_CASE("polar spec validation") {
    CHECK_THROWS(Domain(PolarDomainSpec{2, Expr::constant(-1.0)}));
    CHECK_THROWS(Domain(PolarDomainSpec{4, Expr::constant(1.0)}));
}

TEST_CASE("support interval for superellipsoid axis and rotated directions") {
    const auto d = super({2, 1});
    const auto [lo, hi] = support_interval(d, std::vector<double>{0.0, 1.0});
    CHECK(lo == -1.0);
    CHECK(hi == 1.0);
    const double s = std::sqrt(0.5);
    const auto [lo2, hi2] = support_interval(disk(), std::vector<double>{s, s});
    CHECK(hi2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(lo2 == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("shell condition") {
    const auto d = disk();
    const auto rep = shell_condition_check(d, std::vector<double>{0.0, 0.1}, 7);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].holds);  // delta = 0 holds for any c
    CHECK(rep.rows[1].holds);
    CHECK(rep.rows[1].c <= 2.0);  // triangle inequality gives c = 1 for the ball

    const auto d22 = super({2, 2});
    const auto rep2 = shell_condition_check(d22, std::vector<double>{0.05}, 7);
    CHECK(rep2.rows[0].holds);
    CHECK(rep2.rows[0].c <= 10.0);
}
