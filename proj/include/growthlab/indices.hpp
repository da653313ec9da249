#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "growthlab/geometry.hpp"
#include "growthlab/kernels.hpp"
#include "growthlab/polynomial.hpp"
#include "growthlab/rational.hpp"

namespace growthlab::indices {

/// Growth index (g, k): m({|x| < r, |f| < eps}) ~ c eps^g |ln eps|^k.
/// `determinate = false` carries only a lower bound on g (never a guess).
struct GrowthIndex {
    double g = 0.0;
    int k = 0;
    bool determinate = true;
    std::optional<double> lower_bound;
    std::optional<Rational> g_exact;

    static GrowthIndex exact(Rational gr, int k) {
        GrowthIndex out;
        out.g = gr.value();
        out.k = k;
        out.g_exact = gr;
        return out;
    }
    static GrowthIndex at_least(Rational lb) {
        GrowthIndex out;
        out.g = lb.value();
        out.k = 0;
        out.determinate = false;
        out.lower_bound = lb.value();
        return out;
    }
};

/// Index at the superellipsoid pole on axis j (1-based): sum_{i != j} 1/(2 a_i).
GrowthIndex example1_vertex_index(const std::vector<int>& a, int j);
Rational example1_vertex_index_exact(const std::vector<int>& a, int j);

/// Global index of the superellipsoid family: g0 = sum 1/(2 a_i) - 1/(2 min a_i)
/// when g0 <= 1/2; otherwise indeterminate with lower bound 1/2.
GrowthIndex example1_global_index(const std::vector<int>& a);

/// Index of (sum_{i=1..n} x_i^{2k})^c: (n / (2 k c), 0).
GrowthIndex powered_sum_index(int n, int k, int c);

// ---------------------------------------------------------------------------
// Batch-evaluable functions (the SIMD-dispatched sublevel oracles)

class BatchFn {
public:
    virtual ~BatchFn() = default;
    virtual int arity() const = 0;
    /// out[i] = f(coords[0][i], ..., coords[arity-1][i])
    virtual void eval(const double* const* coords, std::size_t n, double* out) const = 0;
    double eval1(std::span<const double> x) const;
};

class PolynomialFn : public BatchFn {
public:
    explicit PolynomialFn(Polynomial p);
    int arity() const override { return poly_.arity(); }
    void eval(const double* const* coords, std::size_t n, double* out) const override;
    const Polynomial& poly() const { return poly_; }

private:
    Polynomial poly_;
    std::vector<kernels::Term> terms_;
};

/// (sum_{i=1..n} x_i^{2k} + delta * x_1)^c
class PoweredSumPowFn : public BatchFn {
public:
    PoweredSumPowFn(int n, int k, int c, double delta = 0.0);
    int arity() const override { return n_; }
    void eval(const double* const* coords, std::size_t n, double* out) const override;

private:
    int n_, k_, c_;
    double delta_;
    std::vector<int> half_exps_;
};

/// Scalar fallback for black-box oracles (chart graphs and test functions).
class CallbackFn : public BatchFn {
public:
    CallbackFn(int arity, std::function<double(std::span<const double>)> f)
        : arity_(arity), f_(std::move(f)) {}
    int arity() const override { return arity_; }
    void eval(const double* const* coords, std::size_t n, double* out) const override;

private:
    int arity_;
    std::function<double(std::span<const double>)> f_;
};

/// base scaled by `scale` (exact per-value multiply).
class ScaledFn : public BatchFn {
public:
    ScaledFn(const BatchFn& base, double scale) : base_(base), scale_(scale) {}
    int arity() const override { return base_.arity(); }
    void eval(const double* const* coords, std::size_t n, double* out) const override;

private:
    const BatchFn& base_;
    double scale_;
};

// ---------------------------------------------------------------------------
// Sublevel measurement

struct McMeasure {
    double value;
    double std_error;
    std::uint64_t hits;
};

/// QMC estimate of m({ |x| < r, |f(x)| < eps }).  16 Halton replicates with
/// distinct rotations; deterministic given (seed, budget) and independent of
/// the worker count.
McMeasure estimate_sublevel_measure(const BatchFn& f, double r, double eps,
                                    std::uint64_t seed, std::size_t budget,
                                    int workers = 1);

struct SublevelSamples {
    int ambient_dim = 0;
    double r = 0.0;
    std::vector<double> eps;      // decreasing
    std::vector<double> measure;
    std::vector<double> std_error;
    std::vector<std::uint64_t> hits;
    std::string description;
    std::uint64_t seed = 0;
};

SublevelSamples sublevel_sweep(const BatchFn& f, double r,
                               std::span<const double> eps_grid, std::uint64_t seed,
                               std::size_t budget, int workers = 1,
                               std::string description = {});

/// Tensor-grid midpoint counting for n <= 2; the independent cross-oracle.
double grid_sublevel_measure(const BatchFn& f, double r, double eps,
                             int cells_per_axis);

// ---------------------------------------------------------------------------
// Exponent fitting

struct FitCandidate {
    double g = 0.0;
    double c = 0.0;
    double residual = 0.0;
};

struct FitResult {
    double g_hat = 0.0;
    int k_hat = 0;
    double c_hat = 0.0;
    double residual = 0.0;   // weighted RMS in log space
    double g_std_error = 0.0;
    int points_used = 0;
    std::vector<FitCandidate> candidates;  // indexed by k; g_hat is the argmin

    /// Exponent fitted with the log power pinned to k (hypothesis checks
    /// against a predicted (g, k) pair); falls back to the argmin.
    double g_at(int k) const {
        return k >= 0 && k < int(candidates.size()) ? candidates[k].g : g_hat;
    }
};

/// Weighted least squares of log m = log c + g log eps + k log|log eps| with
/// integer k enumerated over [0, n-1]; smallest k wins ties.
FitResult fit_growth(const SublevelSamples& samples);

/// sup { h : int d(x, P)^{-h} dmu < infty } over a chart patch, estimated from
/// the growth of truncated integrals.  P defaults to the tangent plane at the
/// base point; pass `plane_normal` for other hyperplanes through x0.
double tangent_distance_index(const geometry::BoundaryChart& chart,
                              std::span<const double> h_grid,
                              const geometry::Vec* plane_normal = nullptr);

}  // namespace growthlab::indices
