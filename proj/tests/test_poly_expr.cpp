#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "growthlab/expr.hpp"
#include "growthlab/polynomial.hpp"

using namespace growthlab;

TEST_CASE("polynomial evaluation and arithmetic") {
    // p = 2 x^2 y - y^3 + 1
    Polynomial p(2, {{2.0, {2, 1}}, {-1.0, {0, 3}}, {1.0, {0, 0}}});
    CHECK(p(std::vector<double>{1.0, 2.0}) == doctest::Approx(2.0 * 2 - 8 + 1));
    CHECK(p.degree() == 3);
    CHECK_FALSE(p.vanishes_at_origin());
    CHECK(Polynomial::axis_power(2, 0, 3)(std::vector<double>{2.0, 5.0}) == 8.0);

    const auto q = p + p * (-1.0);
    CHECK(q.terms().empty());

    const auto sq = Polynomial::powered_sum(2, 1);  // x^2 + y^2
    const auto prod = sq * sq;
    CHECK(prod(std::vector<double>{1.5, -0.5}) ==
          doctest::Approx(std::pow(1.5 * 1.5 + 0.25, 2)));
    CHECK(sq.pow(3)(std::vector<double>{1.0, 1.0}) == doctest::Approx(8.0));
}

TEST_CASE("polynomial derivative") {
    Polynomial p(2, {{3.0, {2, 2}}, {1.0, {1, 0}}});
    const auto dx = p.derivative(0);  // 6 x y^2 + 1
    CHECK(dx(std::vector<double>{2.0, 3.0}) == doctest::Approx(6.0 * 2 * 9 + 1));
    const auto dy = p.derivative(1);  // 6 x^2 y
    CHECK(dy(std::vector<double>{2.0, 3.0}) == doctest::Approx(6.0 * 4 * 3));
}

TEST_CASE("duplicate multi-indices merge; negative exponents rejected") {
    Polynomial p(1, {{1.0, {2}}, {2.5, {2}}});
    REQUIRE(p.terms().size() == 1);
    CHECK(p.terms()[0].coef == doctest::Approx(3.5));
    CHECK_THROWS_AS(Polynomial(1, {{1.0, {-1}}}), std::invalid_argument);
}

TEST_CASE("integer-point evaluation is exact in extended precision") {
    // values stay within exact integer range, so eval_ld is exact
    Polynomial p(2, {{3.0, {4, 0}}, {-7.0, {1, 2}}, {11.0, {0, 0}}});
    const std::vector<long double> x{9.0L, -7.0L};
    const long double expect = 3.0L * 6561.0L - 7.0L * 9.0L * 49.0L + 11.0L;
    CHECK(p.eval_ld(x) == expect);
}

TEST_CASE("batch terms mirror scalar evaluation") {
    Polynomial p(3, {{1.0, {4, 0, 0}}, {1.0, {0, 2, 0}}, {1.0, {0, 0, 2}}});
    const auto terms = p.batch_terms();
    CHECK(terms.size() == 3);
    const double xs[1] = {0.3}, ys[1] = {-0.4}, zs[1] = {0.9};
    const double* coords[3] = {xs, ys, zs};
    double out;
    kernels::poly_eval(coords, 3, terms.data(), terms.size(), 1, &out);
    CHECK(out == doctest::Approx(p(std::vector<double>{0.3, -0.4, 0.9})).epsilon(1e-15));
}

TEST_CASE("expression trees: eval, derivative, printing") {
    // h = 1 + 0.25 * w0^2 * w1
    const Expr h = Expr::constant(1.0) +
                   Expr::constant(0.25) * Expr::pow(Expr::coord(0), 2) * Expr::coord(1);
    const std::vector<double> w{0.6, -0.8};
    CHECK(h.eval(w) == doctest::Approx(1.0 + 0.25 * 0.36 * -0.8));
    CHECK(h.max_coord() == 1);

    const auto d0 = h.derivative(0);  // 0.5 w0 w1 (plus zero terms)
    CHECK(d0.eval(w) == doctest::Approx(0.5 * 0.6 * -0.8));
    const auto d1 = h.derivative(1);  // 0.25 w0^2
    CHECK(d1.eval(w) == doctest::Approx(0.25 * 0.36));
    CHECK_FALSE(h.to_string().empty());
}

TEST_CASE("expression guards") {
    CHECK_THROWS_AS(Expr::pow(Expr::coord(0), -2), std::invalid_argument);
    CHECK_THROWS_AS(Expr::coord(-1), std::invalid_argument);
    const Expr c = Expr::coord(3);
    CHECK_THROWS_AS(c.eval(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}
