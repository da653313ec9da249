#pragma once

#include <complex>
#include <cstddef>
#include <functional>

namespace growthlab {

/// 15-point Kronrod rule with embedded 7-point Gauss rule on [-1, 1].
/// The difference of the pair is the per-panel error estimate.
struct GaussKronrod15 {
    static const double nodes[15];    // ascending
    static const double wk[15];       // Kronrod weights
    static const double wg[15];       // Gauss weights (zero on Kronrod-only nodes)
};

struct PanelEstimate {
    std::complex<double> kronrod;
    double error;  // |K15 - G7|
};

template <class F>
PanelEstimate gk15_panel(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::complex<double> sk{0.0, 0.0}, sg{0.0, 0.0};
    for (int i = 0; i < 15; ++i) {
        const std::complex<double> v = f(c + h * GaussKronrod15::nodes[i]);
        sk += GaussKronrod15::wk[i] * v;
        if (GaussKronrod15::wg[i] != 0.0) sg += GaussKronrod15::wg[i] * v;
    }
    return {h * sk, std::abs(h * (sk - sg))};
}

/// Adaptive Simpson to absolute tolerance; used for non-oscillatory 1-D
/// integrals and as an independent oracle in tests.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

/// Simple trapezoid on n+1 uniform nodes.
double trapezoid(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace growthlab
