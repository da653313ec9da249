#include "growthlab/indices.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "growthlab/parallel.hpp"
#include "growthlab/rng.hpp"

namespace growthlab::indices {

// ---------------------------------------------------------------------------
// Closed-form indices

Rational example1_vertex_index_exact(const std::vector<int>& a, int j) {
    if (j < 1 || j > int(a.size()))
        throw std::invalid_argument("example1_vertex_index: axis index out of range");
    Rational g(0);
    for (int i = 0; i < int(a.size()); ++i)
        if (i != j - 1) g = g + Rational(1, 2 * std::int64_t(a[i]));
    return g;
}

GrowthIndex example1_vertex_index(const std::vector<int>& a, int j) {
    return GrowthIndex::exact(example1_vertex_index_exact(a, j), 0);
}

GrowthIndex example1_global_index(const std::vector<int>& a) {
    if (a.empty()) throw std::invalid_argument("example1_global_index: empty exponents");
    Rational sum(0);
    int amin = a[0];
    for (int ai : a) {
        sum = sum + Rational(1, 2 * std::int64_t(ai));
        amin = std::min(amin, ai);
    }
    const Rational g0 = sum - Rational(1, 2 * std::int64_t(amin));
    if (g0 <= Rational(1, 2)) return GrowthIndex::exact(g0, 0);
    return GrowthIndex::at_least(Rational(1, 2));
}

GrowthIndex powered_sum_index(int n, int k, int c) {
    if (n < 1 || k < 1 || c < 1)
        throw std::invalid_argument("powered_sum_index: n, k, c must be positive");
    return GrowthIndex::exact(Rational(n, 2 * std::int64_t(k) * c), 0);
}

// ---------------------------------------------------------------------------
// Batch functions

double BatchFn::eval1(std::span<const double> x) const {
    if (int(x.size()) != arity()) throw std::invalid_argument("BatchFn: arity mismatch");
    std::vector<const double*> ptrs(arity());
    for (int d = 0; d < arity(); ++d) ptrs[d] = &x[d];
    double out;
    eval(ptrs.data(), 1, &out);
    return out;
}

PolynomialFn::PolynomialFn(Polynomial p) : poly_(std::move(p)), terms_(poly_.batch_terms()) {}

void PolynomialFn::eval(const double* const* coords, std::size_t n, double* out) const {
    kernels::poly_eval(coords, poly_.arity(), terms_.data(), terms_.size(), n, out);
}

PoweredSumPowFn::PoweredSumPowFn(int n, int k, int c, double delta)
    : n_(n), k_(k), c_(c), delta_(delta), half_exps_(n, k) {
    if (n < 1 || k < 1 || c < 1)
        throw std::invalid_argument("PoweredSumPowFn: n, k, c must be positive");
}

void PoweredSumPowFn::eval(const double* const* coords, std::size_t n, double* out) const {
    kernels::powered_sum(coords, n_, half_exps_.data(), n, out);
    kernels::axpy_pow(out, delta_, coords[0], c_, n, out);
}

void CallbackFn::eval(const double* const* coords, std::size_t n, double* out) const {
    std::vector<double> x(arity_);
    for (std::size_t i = 0; i < n; ++i) {
        for (int d = 0; d < arity_; ++d) x[d] = coords[d][i];
        out[i] = f_(x);
    }
}

void ScaledFn::eval(const double* const* coords, std::size_t n, double* out) const {
    base_.eval(coords, n, out);
    for (std::size_t i = 0; i < n; ++i) out[i] *= scale_;
}

// ---------------------------------------------------------------------------
// QMC sublevel measurement

namespace {
constexpr int kReplicates = 16;

struct ReplicateCount {
    std::uint64_t hits = 0;
    std::uint64_t total = 0;
};

ReplicateCount run_replicate(const BatchFn& f, double r, double eps,
                             std::uint64_t stream_seed, std::size_t points) {
    const int dim = f.arity();
    HaltonSampler sampler(dim, stream_seed);
    constexpr std::size_t kBlock = 8192;
    std::vector<std::vector<double>> soa(dim, std::vector<double>(kBlock));
    std::vector<double*> mptrs(dim);
    std::vector<const double*> ptrs(dim);
    for (int d = 0; d < dim; ++d) { mptrs[d] = soa[d].data(); ptrs[d] = soa[d].data(); }
    std::vector<double> vals(kBlock), r2(kBlock);

    ReplicateCount out;
    out.total = points;
    const double r2bound = r * r;
    std::size_t remaining = points;
    while (remaining > 0) {
        const std::size_t nb = std::min(kBlock, remaining);
        sampler.fill(mptrs.data(), nb, -r, r);
        f.eval(ptrs.data(), nb, vals.data());
        kernels::radius_sq(ptrs.data(), dim, nb, r2.data());
        out.hits += kernels::count_below(vals.data(), r2.data(), r2bound, eps, nb);
        remaining -= nb;
    }
    return out;
}
}  // namespace

McMeasure estimate_sublevel_measure(const BatchFn& f, double r, double eps,
                                    std::uint64_t seed, std::size_t budget, int workers) {
    if (!(eps > 0.0) || !(r > 0.0))
        throw std::invalid_argument("estimate_sublevel_measure: eps and r must be > 0");
    const int dim = f.arity();
    const std::size_t per_rep = std::max<std::size_t>(budget / kReplicates, 256);
    const double boxvol = std::pow(2.0 * r, dim);

    std::vector<ReplicateCount> counts(kReplicates);
    parallel_for(kReplicates, workers, [&](std::size_t rep) {
        counts[rep] = run_replicate(f, r, eps, mix_seed(seed, 1000 + rep), per_rep);
    });

    double mean = 0.0;
    std::uint64_t hits = 0;
    std::vector<double> est(kReplicates);
    for (int rep = 0; rep < kReplicates; ++rep) {
        est[rep] = boxvol * double(counts[rep].hits) / double(counts[rep].total);
        mean += est[rep];
        hits += counts[rep].hits;
    }
    mean /= kReplicates;
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    var /= (kReplicates - 1);
    return {mean, std::sqrt(var / kReplicates), hits};
}

SublevelSamples sublevel_sweep(const BatchFn& f, double r,
                               std::span<const double> eps_grid, std::uint64_t seed,
                               std::size_t budget, int workers, std::string description) {
    SublevelSamples out;
    out.ambient_dim = f.arity();
    out.r = r;
    out.seed = seed;
    out.description = std::move(description);
    out.eps.assign(eps_grid.begin(), eps_grid.end());
    out.measure.resize(out.eps.size());
    out.std_error.resize(out.eps.size());
    out.hits.resize(out.eps.size());
    // Parallelism lives inside each estimate (over replicates); the eps loop
    // stays ordered so every eps gets the same streams regardless of workers.
    for (std::size_t i = 0; i < out.eps.size(); ++i) {
        const auto m = estimate_sublevel_measure(f, r, out.eps[i], seed, budget, workers);
        out.measure[i] = m.value;
        out.std_error[i] = m.std_error;
        out.hits[i] = m.hits;
    }
    return out;
}

double grid_sublevel_measure(const BatchFn& f, double r, double eps, int cells_per_axis) {
    const int dim = f.arity();
    if (dim > 2)
        throw std::invalid_argument("grid_sublevel_measure: supported for n <= 2");
    const double h = 2.0 * r / cells_per_axis;
    const double cell = std::pow(h, dim);
    std::size_t hits = 0;
    std::vector<double> x(dim);
    if (dim == 1) {
        for (int i = 0; i < cells_per_axis; ++i) {
            x[0] = -r + (i + 0.5) * h;
            if (x[0] * x[0] < r * r && std::fabs(f.eval1(x)) < eps) ++hits;
        }
    } else {
        std::vector<double> row(cells_per_axis), vals(cells_per_axis);
        std::vector<double> ycol(cells_per_axis);
        for (int i = 0; i < cells_per_axis; ++i) row[i] = -r + (i + 0.5) * h;
        const double* ptrs[2];
        for (int j = 0; j < cells_per_axis; ++j) {
            const double y = -r + (j + 0.5) * h;
            std::fill(ycol.begin(), ycol.end(), y);
            ptrs[0] = row.data();
            ptrs[1] = ycol.data();
            f.eval(ptrs, cells_per_axis, vals.data());
            for (int i = 0; i < cells_per_axis; ++i)
                if (row[i] * row[i] + y * y < r * r && std::fabs(vals[i]) < eps) ++hits;
        }
    }
    return double(hits) * cell;
}

// ---------------------------------------------------------------------------
// Growth fitting

FitResult fit_growth(const SublevelSamples& samples) {
    const std::size_t n = samples.eps.size();
    if (n < 8) throw std::invalid_argument("fit_growth: need at least 8 eps points");
    double emin = samples.eps[0], emax = samples.eps[0];
    for (double e : samples.eps) { emin = std::min(emin, e); emax = std::max(emax, e); }
    if (emax / emin < 0.999e3)
        throw std::invalid_argument("fit_growth: eps grid must span >= 3 decades");

    std::vector<double> x, logm, w;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(samples.measure[i] > 0.0)) continue;
        // Counting estimates below ~32 hits say nothing about log m; censor.
        if (i < samples.hits.size() && samples.hits[i] < 32) continue;
        const double rel = samples.std_error[i] > 0.0
                               ? samples.std_error[i] / samples.measure[i]
                               : 0.0;
        x.push_back(std::log(samples.eps[i]));
        logm.push_back(std::log(samples.measure[i]));
        // Floor the log-space sigma: QMC replicate spreads underestimate the
        // error badly when a window saturates, and exact synthetic data
        // should reduce to an unweighted fit.
        const double sigma = std::max(rel, 1e-3);
        w.push_back(1.0 / (sigma * sigma));
    }
    if (x.size() < 3) throw std::runtime_error("fit_growth: degenerate grid");

    const int kmax = std::max(samples.ambient_dim - 1, 0);
    FitResult best;
    best.candidates.resize(kmax + 1);
    bool have = false;
    for (int k = 0; k <= kmax; ++k) {
        // y = log m - k log|log eps| = log c + g log eps
        double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            y[i] = logm[i] - k * std::log(-x[i]);  // eps < 1 so log eps < 0
            sw += w[i];
            sx += w[i] * x[i];
            sy += w[i] * y[i];
            sxx += w[i] * x[i] * x[i];
            sxy += w[i] * x[i] * y[i];
        }
        const double det = sw * sxx - sx * sx;
        if (std::fabs(det) < 1e-12 * sw * sxx)
            throw std::runtime_error("fit_growth: singular design matrix");
        const double g = (sw * sxy - sx * sy) / det;
        const double b = (sxx * sy - sx * sxy) / det;
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double res = y[i] - (b + g * x[i]);
            rss += w[i] * res * res;
        }
        const double residual = std::sqrt(rss / sw);
        best.candidates[k] = {g, std::exp(b), residual};
        // A larger log power must buy a material residual drop; within noise
        // the smaller k wins (a genuine log factor cuts the residual by far
        // more than this margin on any multi-decade grid).
        if (!have || residual < 0.75 * best.residual) {
            best.g_hat = g;
            best.k_hat = k;
            best.c_hat = std::exp(b);
            best.residual = residual;
            best.g_std_error = std::sqrt(sw / det);
            best.points_used = int(x.size());
            have = true;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Tangent-distance index

double tangent_distance_index(const geometry::BoundaryChart& chart,
                              std::span<const double> h_grid,
                              const geometry::Vec* plane_normal) {
    if (chart.surface_dim() != 1)
        throw std::invalid_argument("tangent_distance_index: implemented for curve charts");
    if (h_grid.size() < 3)
        throw std::invalid_argument("tangent_distance_index: h grid too small");

    const double r = 0.9 * chart.r_chart();
    const int N = 16384;
    const double du = 2.0 * r / N;
    std::vector<double> dist(N), weight(N);
    const auto& x0 = chart.base_point();
    double dmax = 0.0;
    for (int i = 0; i < N; ++i) {
        const double u = -r + (i + 0.5) * du;
        const auto p = chart.lift(std::vector<double>{u});
        double d;
        if (plane_normal) {
            d = 0.0;
            for (std::size_t j = 0; j < p.size(); ++j)
                d += (p[j] - x0[j]) * (*plane_normal)[j];
            d = std::fabs(d);
        } else {
            d = std::fabs(chart.graph(std::vector<double>{u}));
        }
        dist[i] = d;
        dmax = std::max(dmax, d);
        // surface element from the graph slope
        const double up = u + 0.25 * du, um = u - 0.25 * du;
        const double fp = chart.graph(std::vector<double>{up});
        const double fm = chart.graph(std::vector<double>{um});
        const double slope = (fp - fm) / (0.5 * du);
        weight[i] = std::sqrt(1.0 + slope * slope) * du;
    }

    // Truncated integrals I_tau(h) = sum_{d > tau} d^{-h} dmu; the slope of
    // log I against log(1/tau) estimates max(0, h - g).  The ladder stops
    // above the smallest resolved distance, otherwise the truncation stalls
    // and every h looks convergent.
    double dmin_pos = dmax;
    for (double d : dist)
        if (d > 0.0) dmin_pos = std::min(dmin_pos, d);
    const double tau_hi = dmax / 16.0;
    const double tau_lo = std::max(4.0 * dmin_pos, dmax * std::pow(2.0, -26));
    if (!(tau_lo < tau_hi))
        throw std::runtime_error("tangent_distance_index: distance range too narrow");
    const int ntau = 20;
    const double tau_ratio = std::pow(tau_lo / tau_hi, 1.0 / (ntau - 1));
    std::vector<double> slopes(h_grid.size());
    for (std::size_t ih = 0; ih < h_grid.size(); ++ih) {
        const double h = h_grid[ih];
        std::vector<double> li, lt;
        for (int j = 0; j < ntau; ++j) {
            const double tau = tau_hi * std::pow(tau_ratio, j);
            double integral = 0.0;
            for (int i = 0; i < N; ++i)
                if (dist[i] > tau) integral += std::pow(dist[i], -h) * weight[i];
            li.push_back(std::log(integral));
            lt.push_back(std::log(1.0 / tau));
        }
        const int tail = 8;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int j = ntau - tail; j < ntau; ++j) {
            sx += lt[j]; sy += li[j]; sxx += lt[j] * lt[j]; sxy += lt[j] * li[j];
        }
        slopes[ih] = (tail * sxy - sx * sy) / (tail * sxx - sx * sx);
    }

    std::vector<double> estimates;
    bool any_convergent = false;
    for (std::size_t ih = 0; ih < h_grid.size(); ++ih) {
        if (slopes[ih] > 0.05)
            estimates.push_back(h_grid[ih] - slopes[ih]);
        else
            any_convergent = true;
    }
    if (estimates.empty() || !any_convergent)
        throw std::runtime_error(
            "tangent_distance_index: h grid does not bracket the divergence onset");
    std::sort(estimates.begin(), estimates.end());
    return estimates[estimates.size() / 2];
}

}  // namespace growthlab::indices
