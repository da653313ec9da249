#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "growthlab/geometry.hpp"
#include "growthlab/indices.hpp"
#include "growthlab/oscint.hpp"
#include "growthlab/series.hpp"

namespace growthlab::fourier {

/// Thrown when a decay prediction cannot be decided from an indeterminate
/// index (lower bound does not clear 1/(n+1)); callers report, never guess.
struct UndecidablePrediction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DecayFit {
    double delta_hat = 0.0;
    int l_hat = 0;
    double C_hat = 0.0;
    double residual = 0.0;
    int blocks_used = 0;
};

struct DecayPrediction {
    double delta;
    int l;
};

/// Indicator transform along v via the slice reduction: the 1-D oscillatory
/// integral of the cross-section measure function.  Even-symmetric domains
/// fold to a cosine transform, so their values are exactly real.
std::complex<double> indicator_ft_slice(const geometry::Domain& domain,
                                        std::span<const double> v, double t);

/// Uniformly sampled graph of a curve chart (surface_dim 1) for fast sweeps;
/// validates that |f| grows monotonically away from the base point.
class SampledGraph {
public:
    explicit SampledGraph(const geometry::BoundaryChart& chart, int nodes = 8192);
    double operator()(double u) const;
    double r() const { return r_; }
    /// measure of { |u| < r : f(u) < s } (graph assumed nonnegative here)
    double sublevel_measure(double s) const;
    double max_level() const { return smax_; }

private:
    double interp(double u) const;
    double r_ = 0.0;
    double du_ = 0.0;
    double smax_ = 0.0;
    std::vector<double> f_;
    std::vector<double> inv_s_, inv_neg_u_, inv_pos_u_;  // inverse tables per side
};

/// Graph-form surface measure transform
///   int phi(u) exp(-i (xi_{n+1} f(u) + xi' . u)) du
/// for chart dimension n <= 2.
std::complex<double> surface_ft_graph(
    const geometry::BoundaryChart& chart,
    const std::function<double(std::span<const double>)>& cutoff,
    std::span<const double> xi, const SampledGraph* cache = nullptr);

struct IbpReport {
    std::vector<double> t;
    std::vector<double> remainder;      // |I + S/(it)|
    std::vector<double> indicator_abs;  // |I|
    double remainder_exponent = 0.0;    // envelope decay exponent of the remainder
    bool pass = false;                  // exponent >= 1.9
};

/// Verifies the localized integration-by-parts identity: the indicator
/// transform equals (1/(-it)) x surface term up to an O(t^-2) remainder.
IbpReport ibp_identity_check(const geometry::Domain& domain,
                             const geometry::BoundaryChart& chart,
                             std::span<const double> v,
                             std::span<const double> t_grid);

/// Geometric R grid of indicator_ft_slice values.  R_min > 2 required.
DecaySeries decay_sweep(const geometry::Domain& domain, std::span<const double> v,
                        double R_min, double R_max, int points, int workers = 1);

/// Geometric R grid of surface_ft_graph values along the chart normal.
DecaySeries surface_decay_sweep(const geometry::BoundaryChart& chart, double R_min,
                                double R_max, int points, int workers = 1);

/// Envelope fit over octave-block maxima: log|F| = log C - delta log R
/// + l log log R with integer l enumerated; raw regression through the
/// oscillation zeros would be meaningless.
DecayFit fit_decay(const DecaySeries& series);

enum class TransformKind { indicator, surface };

/// Three-case prediction: g below / at / above 1/(n+1) gives
/// (g + shift, k), (g + shift, k + 1), (1/(n+1) + shift, 0); shift is 1 for
/// indicator transforms and 0 for surface transforms.
DecayPrediction predicted_decay(const indices::GrowthIndex& g_index, int n,
                                TransformKind kind);

}  // namespace growthlab::fourier
