#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "growthlab/oscint.hpp"
#include "growthlab/quadrature.hpp"
#include "growthlab/rng.hpp"

using namespace growthlab;
using namespace growthlab::oscint;

namespace {

OscillatoryIntegrand unit_amplitude(double a, double b) {
    OscillatoryIntegrand ig;
    ig.amplitude = [](double) { return 1.0; };
    ig.amplitude_deriv = [](double) { return 0.0; };
    ig.a = a;
    ig.b = b;
    return ig;
}

/// Independent oracle: brute-force complex Simpson with a fine fixed grid.
std::complex<double> dense_simpson(const std::function<double(double)>& amp, double t,
                                   double a, double b, int n) {
    // n even
    const double h = (b - a) / n;
    std::complex<double> s{0.0, 0.0};
    auto f = [&](double x) {
        return std::complex<double>(amp(x) * std::cos(t * x), -amp(x) * std::sin(t * x));
    };
    s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * (h / 3.0);
}

}  // namespace

TEST_CASE("constant amplitude closed form at t = 100") {
    const auto ig = unit_amplitude(0.0, 1.0);
    const auto q = osc_integrate(ig, 100.0);
    const std::complex<double> i1(0.0, 1.0);
    const std::complex<double> expect = (1.0 - std::exp(-100.0 * i1)) / (100.0 * i1);
    CHECK(std::abs(q.value - expect) < 1e-10);
    CHECK(q.error_estimate < 1e-7);
}

TEST_CASE("osc_integrate at t = 0 is plain quadrature") {
    OscillatoryIntegrand ig;
    ig.amplitude = [](double x) { return std::exp(x) * std::cos(3.0 * x); };
    ig.a = 0.0;
    ig.b = 2.0;
    const auto q = osc_integrate(ig, 0.0);
    const double expect =
        adaptive_simpson([](double x) { return std::exp(x) * std::cos(3.0 * x); }, 0.0, 2.0,
                         1e-12);
    CHECK(std::abs(q.value - std::complex<double>(expect, 0.0)) < 1e-9);
}

TEST_CASE("sqrt amplitude matches the dense-Simpson oracle at moderate t") {
    OscillatoryIntegrand ig;
    ig.amplitude = [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; };
    ig.a = 0.0;
    ig.b = 1.0;
    ig.left_hint = EndpointHint{0.5, 0};
    for (double t : {50.0, 200.0}) {
        const auto q = osc_integrate(ig, t);
        const auto oracle = dense_simpson(ig.amplitude, t, 0.0, 1.0, 1 << 22);
        CHECK(std::abs(q.value - oracle) < 1e-6);
    }
}

TEST_CASE("sqrt amplitude decays like t^{-3/2}") {
    OscillatoryIntegrand ig;
    ig.amplitude = [](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; };
    ig.a = 0.0;
    ig.b = 1.0;
    ig.left_hint = EndpointHint{0.5, 0};
    // |I(4t)| / |I(t)| ~ 4^{-3/2}; the right endpoint contributes at order
    // t^{-1}, so compare the singular parts with the endpoint term removed:
    // I_sing(t) = I(t) - e^{-it} / (-it)  (boundary term of phi(1) = 1).
    auto singular_part = [&](double t) {
        const auto q = osc_integrate(ig, t);
        const std::complex<double> i1(0.0, 1.0);
        return q.value - std::exp(-i1 * t) / (-i1 * t);
    };
    const double r = std::abs(singular_part(4e4)) / std::abs(singular_part(1e4));
    CHECK(r == doctest::Approx(std::pow(4.0, -1.5)).epsilon(0.05));
}

TEST_CASE("smooth bump with no endpoint contact decays faster than t^-8") {
    OscillatoryIntegrand ig;
    ig.amplitude = [](double x) {
        // C-infinity bump supported on [0.2, 0.8]
        const double u = std::fabs((x - 0.5) / 0.3);
        return smooth_cutoff(u, 0.0, 1.0);
    };
    ig.a = 0.0;
    ig.b = 1.0;
    // the transform oscillates, so compare envelope maxima per octave block
    auto envelope = [&](double t0) {
        double env = 0.0;
        for (int j = 0; j < 8; ++j)
            env = std::max(env, std::abs(osc_integrate(ig, t0 * std::pow(2.0, j / 8.0)).value));
        return env;
    };
    CHECK(envelope(1600.0) / envelope(200.0) < std::pow(8.0, -8.0));
    CHECK(std::abs(osc_integrate(ig, 1e4).value) < 1e-11);
}

TEST_CASE("conjugation and linearity") {
    OscillatoryIntegrand ig;
    ig.amplitude = [](double x) { return 1.0 + x * x; };
    ig.a = -0.5;
    ig.b = 1.0;
    const auto plus = osc_integrate(ig, 37.0);
    const auto minus = osc_integrate(ig, -37.0);
    CHECK(std::abs(minus.value - std::conj(plus.value)) < 1e-12);

    OscillatoryIntegrand f1 = ig;
    OscillatoryIntegrand f2 = ig;
    f2.amplitude = [](double x) { return std::cos(2.0 * x); };
    OscillatoryIntegrand combo = ig;
    combo.amplitude = [&](double x) { return 2.0 * (1.0 + x * x) - 3.0 * std::cos(2.0 * x); };
    const auto qc = osc_integrate(combo, 37.0);
    const auto q1 = osc_integrate(f1, 37.0);
    const auto q2 = osc_integrate(f2, 37.0);
    CHECK(std::abs(qc.value - (2.0 * q1.value - 3.0 * q2.value)) <
          10.0 * (qc.error_estimate + q1.error_estimate + q2.error_estimate) + 1e-12);
}

TEST_CASE("model integral scaling: |I(2t)|/|I(t)| ~ 2^{-(1+g)}") {
    const std::vector<double> ts{2000.0, 4000.0};
    const auto series = model_asymptotic_1d(0.5, 0, ts);
    const double ratio = std::abs(series.value[1]) / std::abs(series.value[0]);
    CHECK(ratio == doctest::Approx(std::pow(2.0, -1.5)).epsilon(0.02));
}

TEST_CASE("vdc_bound_check: Fresnel-type phase, k = 2") {
    for (double t : {1e2, 1e3, 1e4, 1e5}) {
        auto ig = unit_amplitude(0.0, 1.0);
        ig.phase = [t](double x, int order) {
            switch (order) {
                case 0: return t * x * x;
                case 1: return 2.0 * t * x;
                case 2: return 2.0 * t;
                default: return 0.0;
            }
        };
        const auto rep = vdc_bound_check(ig, 2, 2.0 * t);
        CHECK(rep.pass);
        CHECK(rep.ratio <= 2.0);
        // |int_0^1 e^{itx^2} dx| -> (1/2) sqrt(pi / t) for large t
        if (t >= 1e4)
            CHECK(rep.lhs == doctest::Approx(0.5 * std::sqrt(std::numbers::pi / t))
                                 .epsilon(0.02));
    }
}

TEST_CASE("vdc_bound_check: cubic phase, k = 3") {
    for (double t : {1e3, 1e4}) {
        auto ig = unit_amplitude(0.0, 1.0);
        ig.phase = [t](double x, int order) {
            switch (order) {
                case 0: return t * x * x * x;
                case 1: return 3.0 * t * x * x;
                case 2: return 6.0 * t * x;
                case 3: return 6.0 * t;
                default: return 0.0;
            }
        };
        const auto rep = vdc_bound_check(ig, 3, 6.0 * t);
        CHECK(rep.pass);
        CHECK(rep.ratio <= 2.5);
    }
}

TEST_CASE("vdc rhs scaling: doubling A scales rhs_core by 2^{-1/k}") {
    auto ig = unit_amplitude(0.0, 1.0);
    const double t = 500.0;
    ig.phase = [t](double x, int order) {
        switch (order) {
            case 0: return t * x * x;
            case 1: return 2.0 * t * x;
            case 2: return 2.0 * t;
            default: return 0.0;
        }
    };
    const auto r1 = vdc_bound_check(ig, 2, t);
    const auto r2 = vdc_bound_check(ig, 2, 2.0 * t);
    CHECK(r2.rhs_core == doctest::Approx(r1.rhs_core * std::pow(2.0, -0.5)).epsilon(1e-12));
}

TEST_CASE("vdc ratio invariant under phase shift") {
    auto make = [](double shift) {
        auto ig = unit_amplitude(0.0, 1.0);
        ig.phase = [shift](double x, int order) {
            switch (order) {
                case 0: return 300.0 * x * x + shift;
                case 1: return 600.0 * x;
                case 2: return 600.0;
                default: return 0.0;
            }
        };
        return ig;
    };
    const auto r0 = vdc_bound_check(make(0.0), 2, 600.0);
    const auto r1 = vdc_bound_check(make(17.5), 2, 600.0);
    CHECK(r0.lhs == doctest::Approx(r1.lhs).epsilon(1e-10));
}

TEST_CASE("vdc hypothesis violation is rejected") {
    auto ig = unit_amplitude(0.0, 1.0);
    ig.phase = [](double x, int order) {
        switch (order) {
            case 0: return x * x;
            case 1: return 2.0 * x;
            case 2: return 2.0;
            default: return 0.0;
        }
    };
    CHECK_THROWS_AS(vdc_bound_check(ig, 2, 5.0), std::invalid_argument);
}

TEST_CASE("vdc_first_order_check") {
    SUBCASE("linear phase") {
        for (double t : {10.0, 1e3}) {
            auto ig = unit_amplitude(0.0, 1.0);
            ig.phase = [t](double x, int order) { return order == 0 ? t * x : (order == 1 ? t : 0.0); };
            const auto rep = vdc_first_order_check(ig, t, 0.01);
            CHECK(rep.pass);
            const std::complex<double> i1(0.0, 1.0);
            CHECK(rep.lhs == doctest::Approx(std::abs((std::exp(i1 * t) - 1.0) / t)).epsilon(1e-8));
        }
    }
    SUBCASE("mildly curved phase") {
        for (double t : {10.0, 1e2, 1e3, 1e4}) {
            auto ig = unit_amplitude(0.0, 1.0);
            ig.phase = [t](double x, int order) {
                switch (order) {
                    case 0: return t * (x + 0.1 * x * x);
                    case 1: return t * (1.0 + 0.2 * x);
                    case 2: return 0.2 * t;
                    default: return 0.0;
                }
            };
            CHECK(vdc_first_order_check(ig, t, 0.2).pass);
        }
    }
    SUBCASE("zero amplitude") {
        auto ig = unit_amplitude(0.0, 1.0);
        ig.amplitude = [](double) { return 0.0; };
        ig.phase = [](double x, int order) { return order == 0 ? 50.0 * x : (order == 1 ? 50.0 : 0.0); };
        const auto rep = vdc_first_order_check(ig, 50.0, 0.1);
        CHECK(rep.lhs == doctest::Approx(0.0));
        CHECK(rep.pass);
    }
}

TEST_CASE("sublevel vdc: linear and quadratic closed forms") {
    std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
    SUBCASE("f = x, k = 1") {
        const auto rep = sublevel_vdc_check([](double x) { return x; },
                                            [](double) { return 1.0; }, 1, 1.0, -1.0, 1.0,
                                            eps);
        CHECK(rep.envelope_pass);
        CHECK(rep.slope_pass);
        CHECK(rep.rows[0].measure == doctest::Approx(0.2).epsilon(1e-6));
        CHECK(rep.slope == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("f = x^2, k = 2") {
        const auto rep = sublevel_vdc_check([](double x) { return x * x; },
                                            [](double) { return 2.0; }, 2, 2.0, -1.0, 1.0,
                                            eps);
        CHECK(rep.envelope_pass);
        CHECK(rep.slope_pass);
        // measure = 2 sqrt(eps) <= (2k+2) (2)^{-1/2} sqrt(eps)
        CHECK(rep.rows[1].measure == doctest::Approx(0.2).epsilon(1e-6));
        CHECK(rep.max_ratio <= 2.0 * std::sqrt(2.0) / 6.0 + 1e-9);
    }
    SUBCASE("seeded monic cubics, k = 3") {
        std::uint64_t s = 314159;
        for (int inst = 0; inst < 20; ++inst) {
            const double c2 = uniform01(s) - 0.5;
            const double c1 = uniform01(s) - 0.5;
            const double c0 = uniform01(s) - 0.5;
            auto f = [=](double x) { return ((x + c2) * x + c1) * x + c0; };
            const auto rep = sublevel_vdc_check(f, [](double) { return 6.0; }, 3, 6.0,
                                                -1.0, 1.0, eps);
            CHECK(rep.envelope_pass);
        }
    }
}
