#include "growthlab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "growthlab/parallel.hpp"
#include "growthlab/quadrature.hpp"

namespace growthlab::fourier {

using geometry::Domain;
using oscint::EndpointHint;
using oscint::OscillatoryIntegrand;

// ---------------------------------------------------------------------------
// Indicator transform via the slice reduction

std::complex<double> indicator_ft_slice(const Domain& domain, std::span<const double> v,
                                        double t) {
    if (std::fabs(geometry::norm(v) - 1.0) > 1e-12)
        throw std::invalid_argument("indicator_ft_slice: direction must be a unit vector");
    std::vector<double> dir(v.begin(), v.end());
    auto amplitude = [&domain, dir](double r) {
        return geometry::slice_measure(domain, dir, r);
    };

    if (domain.axis_symmetric()) {
        const auto [lo, hi] = geometry::support_interval(domain, v);
        (void)lo;
        OscillatoryIntegrand ig;
        ig.amplitude = amplitude;
        ig.a = 0.0;
        ig.b = hi;
        ig.right_hint = EndpointHint{0.5, 0};
        const auto q = osc_integrate(ig, t);
        return {2.0 * q.value.real(), 0.0};
    }

    const auto [lo, hi] = geometry::support_interval(domain, v);
    OscillatoryIntegrand ig;
    ig.amplitude = amplitude;
    ig.a = lo;
    ig.b = hi;
    ig.left_hint = EndpointHint{0.5, 0};
    ig.right_hint = EndpointHint{0.5, 0};
    return osc_integrate(ig, t).value;
}

// ---------------------------------------------------------------------------
// Sampled graphs

SampledGraph::SampledGraph(const geometry::BoundaryChart& chart, int nodes) {
    if (chart.surface_dim() != 1)
        throw std::invalid_argument("SampledGraph: curve charts only");
    r_ = 0.9 * chart.r_chart();
    du_ = 2.0 * r_ / nodes;
    f_.resize(nodes + 1);
    for (int i = 0; i <= nodes; ++i)
        f_[i] = chart.graph(std::vector<double>{-r_ + i * du_});
    // Monotone growth of f away from u = 0 on each side keeps the sublevel
    // measure a two-sided inverse lookup.
    const int mid = nodes / 2;
    for (int i = 0; i < nodes; ++i) {
        const bool ok = (i < mid) ? f_[i] + 1e-14 >= f_[i + 1] : f_[i] <= f_[i + 1] + 1e-14;
        if (!ok)
            throw std::invalid_argument("SampledGraph: graph not monotone away from base point");
    }
    smax_ = std::min(f_.front(), f_.back());

    // Inverse tables on a geometric level grid, one per side.
    const int ninv = 2048;
    const double s_lo = std::max(smax_ * 1e-14, 1e-300);
    for (int j = 0; j <= ninv; ++j) {
        const double s = smax_ * std::pow(s_lo / smax_, double(ninv - j) / ninv);
        inv_s_.push_back(s);
        // bisect on the interpolant on each side
        auto solve = [&](double ulo, double uhi) {
            for (int it = 0; it < 60; ++it) {
                const double um = 0.5 * (ulo + uhi);
                if (interp(um) < s) ulo = um; else uhi = um;
            }
            return 0.5 * (ulo + uhi);
        };
        inv_pos_u_.push_back(solve(0.0, r_));
        // mirrored logic on the negative side (f decreasing toward u = 0)
        double ulo = -r_, uhi = 0.0;
        for (int it = 0; it < 60; ++it) {
            const double um = 0.5 * (ulo + uhi);
            if (interp(um) < s) uhi = um; else ulo = um;
        }
        inv_neg_u_.push_back(0.5 * (ulo + uhi));
    }
}

double SampledGraph::interp(double u) const {
    const int n = int(f_.size()) - 1;
    double pos = (u + r_) / du_;
    int i = int(std::floor(pos)) - 1;  // 4-point stencil start
    i = std::clamp(i, 0, n - 3);
    const double x = pos - i;
    // cubic Lagrange on nodes i..i+3 (local coordinates 0..3)
    const double f0 = f_[i], f1 = f_[i + 1], f2 = f_[i + 2], f3 = f_[i + 3];
    const double c0 = -(x - 1) * (x - 2) * (x - 3) / 6.0;
    const double c1 = x * (x - 2) * (x - 3) / 2.0;
    const double c2 = -x * (x - 1) * (x - 3) / 2.0;
    const double c3 = x * (x - 1) * (x - 2) / 6.0;
    return c0 * f0 + c1 * f1 + c2 * f2 + c3 * f3;
}

double SampledGraph::operator()(double u) const {
    if (u < -r_ || u > r_)
        throw std::invalid_argument("SampledGraph: outside sampled range");
    return interp(u);
}

double SampledGraph::sublevel_measure(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= smax_) return 2.0 * r_;  // callers keep s below smax_
    // locate s in the geometric level table and interpolate u(s) linearly in log s
    const auto it = std::lower_bound(inv_s_.begin(), inv_s_.end(), s);
    if (it == inv_s_.begin()) {
        // below the table: scale by the local power behavior u ~ s^alpha
        const double u0 = inv_pos_u_[0] - inv_neg_u_[0];
        const double u1 = inv_pos_u_[1] - inv_neg_u_[1];
        const double alpha = std::log(u1 / u0) / std::log(inv_s_[1] / inv_s_[0]);
        return u0 * std::pow(s / inv_s_[0], alpha);
    }
    const std::size_t j = std::size_t(it - inv_s_.begin());
    const double s1 = inv_s_[j - 1], s2 = inv_s_[j];
    const double w = std::log(s / s1) / std::log(s2 / s1);
    const double lo = inv_neg_u_[j - 1] + w * (inv_neg_u_[j] - inv_neg_u_[j - 1]);
    const double hi = inv_pos_u_[j - 1] + w * (inv_pos_u_[j] - inv_pos_u_[j - 1]);
    return hi - lo;
}

// ---------------------------------------------------------------------------
// Surface transforms

std::complex<double> surface_ft_graph(
    const geometry::BoundaryChart& chart,
    const std::function<double(std::span<const double>)>& cutoff,
    std::span<const double> xi, const SampledGraph* cache) {
    const int n = chart.surface_dim();
    if (int(xi.size()) != n + 1)
        throw std::invalid_argument("surface_ft_graph: xi must have chart dimension + 1");
    if (n == 1) {
        const double r = cache ? cache->r() : 0.9 * chart.r_chart();
        auto f = [&](double u) {
            return cache ? (*cache)(u) : chart.graph(std::vector<double>{u});
        };
        auto amp = [&](double u) { return cutoff(std::vector<double>{u}); };
        auto phase = [&](double u) { return -(xi[1] * f(u) + xi[0] * u); };
        return oscint::osc_integrate_phase(amp, phase, -r, r).value;
    }
    if (n == 2) {
        // Integrate over the validity disk of radius R (the cutoff must be
        // supported inside it); graph evaluations never leave the chart.
        const double R = 0.95 * chart.r_chart();
        double lip = 0.0;
        for (int i = 0; i <= 24; ++i) {
            const double u2 = -0.85 * R + 1.7 * R * i / 24.0;
            const double ub = std::sqrt(std::max(0.0, 0.81 * R * R - u2 * u2));
            if (ub < 1e-6 * R) continue;
            const double e = std::min(0.01 * R, 0.5 * ub);
            const double fp = chart.graph(std::vector<double>{e, u2});
            const double fm = chart.graph(std::vector<double>{-e, u2});
            lip = std::max(lip, std::fabs(fp - fm) / (2.0 * e));
            const double gp = chart.graph(std::vector<double>{u2, e});
            const double gm = chart.graph(std::vector<double>{u2, -e});
            lip = std::max(lip, std::fabs(gp - gm) / (2.0 * e));
        }
        const double wfreq = std::fabs(xi[1]) + std::fabs(xi[2]) * (lip + 1.0);
        const double wosc = wfreq > 0.0 ? 2.0 * std::numbers::pi / wfreq : 2.0 * R;
        const int m = std::max(8, int(std::ceil(2.0 * R / wosc)));
        const double w = 2.0 * R / m;
        auto inner = [&](double u2) {
            const double half = std::sqrt(std::max(0.0, R * R - u2 * u2));
            if (half < 1e-12 * R) return std::complex<double>{0.0, 0.0};
            auto amp = [&](double u1) { return cutoff(std::vector<double>{u1, u2}); };
            auto phase = [&](double u1) {
                const double f = chart.graph(std::vector<double>{u1, u2});
                return -(xi[2] * f + xi[0] * u1 + xi[1] * u2);
            };
            return oscint::osc_integrate_phase(amp, phase, -half, half).value;
        };
        std::complex<double> total{0.0, 0.0};
        for (int j = 0; j < m; ++j)
            total += gk15_panel(inner, -R + j * w, -R + (j + 1) * w).kronrod;
        return total;
    }
    throw std::invalid_argument("surface_ft_graph: chart dimension must be 1 or 2");
}

// ---------------------------------------------------------------------------
// Integration-by-parts identity

IbpReport ibp_identity_check(const Domain& domain, const geometry::BoundaryChart& chart,
                             std::span<const double> v, std::span<const double> t_grid) {
    (void)domain;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::fabs(v[i] - chart.normal()[i]) > 1e-9)
            throw std::invalid_argument("ibp_identity_check: v must be the chart normal");

    const SampledGraph graph(chart);
    const double smax = graph.max_level();
    const double s_cut = 0.9 * smax;
    auto beta = [&](double s) { return oscint::smooth_cutoff(s / s_cut, 0.5, 1.0); };

    IbpReport report;
    DecaySeries remainder_series;
    for (double t : t_grid) {
        OscillatoryIntegrand ig;
        ig.amplitude = [&](double s) { return s <= 0.0 ? 0.0 : graph.sublevel_measure(s) * beta(s); };
        ig.a = 0.0;
        ig.b = s_cut;
        ig.left_hint = EndpointHint{0.5, 0};
        const auto indicator = osc_integrate(ig, -t);  // int M(s) beta(s) e^{its} ds

        auto amp = [&](double u) { return beta(graph(u)); };
        auto phase = [&](double u) { return t * graph(u); };
        const auto surface = oscint::osc_integrate_phase(amp, phase, -graph.r(), graph.r());

        const std::complex<double> it(0.0, t);
        const std::complex<double> rem = indicator.value + surface.value / it;
        report.t.push_back(t);
        report.remainder.push_back(std::abs(rem));
        report.indicator_abs.push_back(std::abs(indicator.value));
        remainder_series.freq.push_back(t);
        remainder_series.value.push_back(rem);
        remainder_series.error.push_back(indicator.error_estimate + surface.error_estimate);
    }
    const auto fit = fit_decay(remainder_series);
    report.remainder_exponent = fit.delta_hat;
    report.pass = fit.delta_hat >= 1.9;
    return report;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {
std::vector<double> geometric(double lo, double hi, int points) {
    std::vector<double> g(points);
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    const double ratio = std::pow(hi / lo, 1.0 / (points - 1));
    double v = lo;
    for (int i = 0; i < points; ++i, v *= ratio) g[i] = v;
    return g;
}
}  // namespace

DecaySeries decay_sweep(const Domain& domain, std::span<const double> v, double R_min,
                        double R_max, int points, int workers) {
    if (!(R_min > 2.0))
        throw std::invalid_argument("decay_sweep: R_min must exceed 2");
    if (domain.dimension() >= 3 && R_max > 1e4)
        throw std::invalid_argument("decay_sweep: 3-D sweeps are capped at R = 1e4");
    DecaySeries out;
    out.direction.assign(v.begin(), v.end());
    out.freq = geometric(R_min, R_max, points);
    out.value.resize(points);
    out.error.resize(points);
    parallel_for(points, workers, [&](std::size_t i) {
        out.value[i] = indicator_ft_slice(domain, v, out.freq[i]);
        out.error[i] = 0.0;
    });
    return out;
}

DecaySeries surface_decay_sweep(const geometry::BoundaryChart& chart, double R_min,
                                double R_max, int points, int workers) {
    if (!(R_min > 2.0))
        throw std::invalid_argument("surface_decay_sweep: R_min must exceed 2");
    const SampledGraph graph(chart);
    const double r = graph.r();
    auto cutoff = [r](std::span<const double> u) {
        return oscint::smooth_cutoff(std::fabs(u[0]) / r, 0.55, 0.95);
    };
    DecaySeries out;
    out.direction = chart.normal();
    out.freq = geometric(R_min, R_max, points);
    out.value.resize(points);
    out.error.resize(points);
    parallel_for(points, workers, [&](std::size_t i) {
        std::vector<double> xi{0.0, out.freq[i]};
        out.value[i] = surface_ft_graph(chart, cutoff, xi, &graph);
        out.error[i] = 0.0;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Envelope fit

DecayFit fit_decay(const DecaySeries& series) {
    const std::size_t n = series.freq.size();
    if (n < 16) throw std::invalid_argument("fit_decay: need at least 16 points");
    double fmin = series.freq.front(), fmax = series.freq.back();
    if (fmax / fmin < 0.999e2)
        throw std::invalid_argument("fit_decay: grid must span at least 2 decades");

    // octave-block maxima of |F|
    std::map<int, std::pair<double, double>> blocks;  // block -> (maxabs, freq at max)
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(series.value[i]);
        if (!(a > 0.0)) continue;
        const int b = int(std::floor(std::log2(series.freq[i])));
        auto [it, inserted] = blocks.try_emplace(b, a, series.freq[i]);
        if (!inserted && a > it->second.first) it->second = {a, series.freq[i]};
    }
    if (blocks.size() < 4)
        throw std::invalid_argument("fit_decay: fewer than 4 octave blocks");

    std::vector<double> lr, lf;
    for (const auto& [b, mv] : blocks) {
        lr.push_back(std::log(mv.second));
        lf.push_back(std::log(mv.first));
    }
    DecayFit best;
    bool have = false;
    const double m = double(lr.size());
    for (int l = 0; l <= 2; ++l) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::vector<double> y(lr.size());
        for (std::size_t i = 0; i < lr.size(); ++i) {
            y[i] = lf[i] - l * std::log(lr[i]);  // log R > 0 on the sweep grids
            sx += lr[i];
            sy += y[i];
            sxx += lr[i] * lr[i];
            sxy += lr[i] * y[i];
        }
        const double det = m * sxx - sx * sx;
        const double slope = (m * sxy - sx * sy) / det;
        const double b0 = (sxx * sy - sx * sxy) / det;
        double rss = 0.0;
        for (std::size_t i = 0; i < lr.size(); ++i) {
            const double res = y[i] - (b0 + slope * lr[i]);
            rss += res * res;
        }
        const double residual = std::sqrt(rss / m);
        // same selection rule as the growth fit: larger l needs a material
        // residual improvement, not a within-noise one
        if (!have || residual < 0.75 * best.residual) {
            best.delta_hat = -slope;
            best.l_hat = l;
            best.C_hat = std::exp(b0);
            best.residual = residual;
            best.blocks_used = int(lr.size());
            have = true;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Predictions

DecayPrediction predicted_decay(const indices::GrowthIndex& gi, int n,
                                TransformKind kind) {
    const double shift = kind == TransformKind::indicator ? 1.0 : 0.0;
    const double threshold = 1.0 / (n + 1);
    if (!gi.determinate) {
        if (gi.lower_bound && *gi.lower_bound > threshold + 1e-15)
            return {threshold + shift, 0};
        throw UndecidablePrediction(
            "predicted_decay: indeterminate index with lower bound <= 1/(n+1)");
    }
    int cmp;  // -1, 0, +1 against 1/(n+1)
    if (gi.g_exact) {
        const Rational th(1, n + 1);
        cmp = (*gi.g_exact < th) ? -1 : (*gi.g_exact == th ? 0 : 1);
    } else {
        cmp = (gi.g < threshold - 1e-12) ? -1 : (gi.g <= threshold + 1e-12 ? 0 : 1);
    }
    if (cmp < 0) return {gi.g + shift, gi.k};
    if (cmp == 0) return {gi.g + shift, gi.k + 1};
    return {threshold + shift, 0};
}

}  // namespace growthlab::fourier
