#include "growthlab/oscint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "growthlab/quadrature.hpp"

namespace growthlab::oscint {

namespace {
constexpr double kPi = std::numbers::pi;

struct ComplexAccumulator {
    long double re = 0.0L, im = 0.0L;
    void add(std::complex<double> v) {
        re += v.real();
        im += v.imag();
    }
    std::complex<double> value() const { return {double(re), double(im)}; }
};
}  // namespace

double smooth_cutoff(double x, double flat_until, double support_end) {
    if (x <= flat_until) return 1.0;
    if (x >= support_end) return 0.0;
    const double s = (x - flat_until) / (support_end - flat_until);
    const double e0 = std::exp(-1.0 / s);
    const double e1 = std::exp(-1.0 / (1.0 - s));
    return e1 / (e0 + e1);
}

double vdc_ck(int k) { return 2.5 * k; }
double vdc_Bk(int k) { return 2.0 * k + 2.0; }

// ---------------------------------------------------------------------------
// Linear-phase panels

QuadratureResult osc_integrate(const OscillatoryIntegrand& ig, double t,
                               const OscBudget& budget) {
    const double a = ig.a, b = ig.b;
    if (!(b > a)) return {};
    const double len = b - a;
    const double abst = std::fabs(t);

    const double lspan = ig.left_hint ? 0.25 * len : 0.0;
    const double rspan = ig.right_hint ? 0.25 * len : 0.0;
    int depth = 0;
    if (lspan > 0.0 || rspan > 0.0) {
        // The floor of 40 keeps the uncaptured singular sliver below 1e-10
        // even for nearly logarithmic endpoint exponents.
        depth = int(std::ceil(std::log2(std::max(abst * len, 2.0)))) + 8;
        depth = std::clamp(depth, 40, 60);
    }

    std::vector<double> pts;
    pts.push_back(a);
    if (lspan > 0.0) {
        for (int j = depth; j >= 0; --j) pts.push_back(a + std::ldexp(lspan, -j));
    }
    if (rspan > 0.0) {
        for (int j = 0; j <= depth; ++j) pts.push_back(b - std::ldexp(rspan, -j));
    }
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const double wosc = abst > 0.0 ? 2.0 * kPi / abst : len;
    const double wmax = std::min(wosc, len / 8.0);

    long npanels = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        npanels += long(std::ceil((pts[i + 1] - pts[i]) / wmax));
    if (npanels > budget.max_panels)
        throw BudgetError("osc_integrate: panel budget exceeded");

    ComplexAccumulator sum;
    double err = 0.0;
    long panels = 0;
    auto f = [&](double x) {
        const double ph = -t * x;
        return std::complex<double>(ig.amplitude(x), 0.0) *
               std::complex<double>(std::cos(ph), std::sin(ph));
    };
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        const int m = std::max(1, int(std::ceil((hi - lo) / wmax)));
        const double w = (hi - lo) / m;
        for (int j = 0; j < m; ++j) {
            const auto panel = gk15_panel(f, lo + j * w, lo + (j + 1) * w);
            sum.add(panel.kronrod);
            err += panel.error;
            ++panels;
        }
    }
    return {sum.value(), err, panels};
}

// ---------------------------------------------------------------------------
// General-phase marching

QuadratureResult osc_integrate_phase(const std::function<double(double)>& amplitude,
                                     const std::function<double(double)>& phase,
                                     double a, double b,
                                     std::span<const double> breakpoints,
                                     const OscBudget& budget) {
    if (!(b > a)) return {};
    std::vector<double> seg{a, b};
    for (double p : breakpoints)
        if (p > a && p < b) seg.push_back(p);
    std::sort(seg.begin(), seg.end());
    seg.erase(std::unique(seg.begin(), seg.end()), seg.end());

    auto f = [&](double x) {
        const double ph = phase(x);
        return std::complex<double>(amplitude(x), 0.0) *
               std::complex<double>(std::cos(ph), std::sin(ph));
    };

    ComplexAccumulator sum;
    double err = 0.0;
    long panels = 0;
    for (std::size_t s = 0; s + 1 < seg.size(); ++s) {
        const double s0 = seg[s], s1 = seg[s + 1];
        const double wmax = (s1 - s0) / 8.0;
        const double wmin = (b - a) * 1e-14;
        double x = s0;
        double w = (s1 - s0) / 64.0;
        while (x < s1 - wmin) {
            w = std::min({w, wmax, s1 - x});
            const double p0 = phase(x);
            const double p2 = phase(x + w);
            const double p1 = phase(x + 0.5 * w);
            const double span = std::fabs(p2 - p0);
            const double dev = std::fabs(p1 - 0.5 * (p0 + p2));
            if (span > kPi || dev > kPi / 8.0) {
                w *= 0.5;
                if (w < wmin)
                    throw BudgetError("osc_integrate_phase: panel width collapsed");
                continue;
            }
            const auto panel = gk15_panel(f, x, x + w);
            sum.add(panel.kronrod);
            err += panel.error;
            if (++panels > budget.max_panels)
                throw BudgetError("osc_integrate_phase: panel budget exceeded");
            x += w;
            w *= 2.0;
        }
    }
    return {sum.value(), err, panels};
}

// ---------------------------------------------------------------------------
// Model integral

DecaySeries model_asymptotic_1d(double g, int k, std::span<const double> t_grid) {
    if (!(g > 0.0) || k < 0)
        throw std::invalid_argument("model_asymptotic_1d: need g > 0, k >= 0");
    OscillatoryIntegrand ig;
    ig.a = 0.0;
    ig.b = 1.0;
    ig.left_hint = EndpointHint{g, k};
    ig.amplitude = [g, k](double x) {
        if (x <= 0.0) return 0.0;
        double v = std::pow(x, g) * smooth_cutoff(x, 0.5, 1.0);
        for (int i = 0; i < k; ++i) v *= std::fabs(std::log(x));
        return v;
    };
    DecaySeries out;
    for (double t : t_grid) {
        const auto q = osc_integrate(ig, t);
        out.freq.push_back(t);
        out.value.push_back(q.value);
        out.error.push_back(q.error_estimate);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Van der Corput checks

namespace {
constexpr int kGrid = 4096;

void require_kth_derivative_bound(const OscillatoryIntegrand& ig, int k, double A) {
    if (!ig.phase) throw std::invalid_argument("vdc: integrand has no phase oracle");
    double prev_d1 = 0.0;
    bool monotone = true;
    for (int i = 0; i <= kGrid; ++i) {
        const double x = ig.a + (ig.b - ig.a) * i / kGrid;
        if (std::fabs(ig.phase(x, k)) < A)
            throw std::invalid_argument("vdc: |h^(k)| >= A violated on verification grid");
        if (k == 1) {
            const double d1 = ig.phase(x, 1);
            if (i > 0 && (d1 - prev_d1) * (ig.phase(ig.b, 1) - ig.phase(ig.a, 1)) < 0.0)
                monotone = false;
            prev_d1 = d1;
        }
    }
    if (k == 1 && !monotone)
        throw std::invalid_argument("vdc: h' not monotone (k = 1 case)");
}

double amplitude_total_variation(const OscillatoryIntegrand& ig) {
    if (!ig.amplitude_deriv)
        throw std::invalid_argument("vdc: integrand has no amplitude derivative");
    return adaptive_simpson([&](double x) { return std::fabs(ig.amplitude_deriv(x)); },
                            ig.a, ig.b, 1e-11);
}
}  // namespace

VdcOscReport vdc_bound_check(const OscillatoryIntegrand& ig, int k, double A) {
    if (k < 1) throw std::invalid_argument("vdc_bound_check: k >= 1");
    require_kth_derivative_bound(ig, k, A);
    const auto q = osc_integrate_phase(ig.amplitude, [&](double x) { return ig.phase(x, 0); },
                                       ig.a, ig.b);
    const double lhs = std::abs(q.value);
    const double rhs_core = std::pow(A, -1.0 / k) *
                            (std::fabs(ig.amplitude(ig.b)) + amplitude_total_variation(ig));
    const double ratio = lhs / rhs_core;
    return {lhs, rhs_core, ratio, ratio <= vdc_ck(k)};
}

VdcFirstOrderReport vdc_first_order_check(const OscillatoryIntegrand& ig, double A,
                                          double B) {
    if (!ig.phase) throw std::invalid_argument("vdc: integrand has no phase oracle");
    const double h2_bound = B * A / (ig.b - ig.a);
    double sup_phi = 0.0;
    for (int i = 0; i <= kGrid; ++i) {
        const double x = ig.a + (ig.b - ig.a) * i / kGrid;
        if (std::fabs(ig.phase(x, 1)) < A)
            throw std::invalid_argument("vdc: |h'| >= A violated on verification grid");
        if (std::fabs(ig.phase(x, 2)) > h2_bound)
            throw std::invalid_argument("vdc: |h''| <= B A / (b-a) violated on grid");
        sup_phi = std::max(sup_phi, std::fabs(ig.amplitude(x)));
    }
    const auto q = osc_integrate_phase(ig.amplitude, [&](double x) { return ig.phase(x, 0); },
                                       ig.a, ig.b);
    const double lhs = std::abs(q.value);
    const double rhs = ((B + 2.0) * sup_phi + amplitude_total_variation(ig)) / A;
    return {lhs, rhs, lhs <= rhs};
}

SublevelVdcReport sublevel_vdc_check(const std::function<double(double)>& f,
                                     const std::function<double(double)>& f_kth,
                                     int k, double A, double a, double b,
                                     std::span<const double> eps_grid) {
    if (k < 1) throw std::invalid_argument("sublevel_vdc_check: k >= 1");
    for (int i = 0; i <= kGrid; ++i) {
        const double x = a + (b - a) * i / kGrid;
        if (std::fabs(f_kth(x)) < A)
            throw std::invalid_argument("vdc: |f^(k)| >= A violated on verification grid");
    }

    SublevelVdcReport report;
    const double Bk = vdc_Bk(k);
    std::vector<double> lx, ly;
    for (double eps : eps_grid) {
        // breakpoints where |f| crosses eps
        std::vector<double> cross;
        double xprev = a;
        double fp = f(a);
        for (int i = 1; i <= kGrid; ++i) {
            const double x = a + (b - a) * i / kGrid;
            const double fx = f(x);
            for (double level : {eps, -eps}) {
                if ((fp - level) * (fx - level) < 0.0) {
                    double lo = xprev, hi = x, flo = fp - level;
                    for (int it = 0; it < 52; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const double fm = f(mid) - level;
                        if ((flo < 0.0) != (fm < 0.0)) hi = mid;
                        else { lo = mid; flo = fm; }
                    }
                    cross.push_back(0.5 * (lo + hi));
                }
            }
            xprev = x;
            fp = fx;
        }
        std::sort(cross.begin(), cross.end());
        std::vector<double> pts{a};
        pts.insert(pts.end(), cross.begin(), cross.end());
        pts.push_back(b);
        double measure = 0.0;
        bool touches_boundary = false;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double mid = 0.5 * (pts[i] + pts[i + 1]);
            if (std::fabs(f(mid)) < eps) {
                measure += pts[i + 1] - pts[i];
                if (i == 0 || i + 2 == pts.size()) touches_boundary = true;
            }
        }
        const double bound = Bk * std::pow(A, -1.0 / k) * std::pow(eps, 1.0 / k);
        report.rows.push_back({eps, measure, bound, !touches_boundary && measure > 0.0});
        if (measure > 0.0)
            report.max_ratio = std::max(report.max_ratio, measure / bound);
        if (measure > 0.0 && !touches_boundary) {
            lx.push_back(std::log(eps));
            ly.push_back(std::log(measure));
        }
    }
    report.envelope_pass = report.max_ratio <= 1.0;
    if (lx.size() >= 3) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = double(lx.size());
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
        }
        report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        report.slope_pass = std::fabs(report.slope - 1.0 / k) <= 0.05;
    }
    return report;
}

}  // namespace growthlab::oscint
