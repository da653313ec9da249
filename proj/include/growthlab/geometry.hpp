#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "growthlab/expr.hpp"
#include "growthlab/polynomial.hpp"

namespace growthlab::geometry {

using Vec = std::vector<double>;

/// Numeric-budget failure (quadrature or sampling could not reach its target).
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// D = { sum_i x_i^{2 a_i} <= 1 }.
struct SuperellipsoidSpec {
    std::vector<int> exponents;  // a_1..a_d, each >= 1, d >= 2
};

/// D = { sum_i x_i^{2a} - eta * p(x_1..x_{d-1}) <= 1 }, p(0) = 0, deg p < 2a.
struct PerturbedSuperellipsoidSpec {
    int dimension;
    int base_exponent;
    Polynomial perturbation;
    double eta;
};

/// D = { r * omega : 0 <= r < h(omega) }, h > 0 on the unit sphere, d in {2,3}.
struct PolarDomainSpec {
    int dimension;
    Expr radius;
};

using DomainSpec =
    std::variant<SuperellipsoidSpec, PerturbedSuperellipsoidSpec, PolarDomainSpec>;

enum class DomainKind { superellipsoid, perturbed, polar };

/// Validated domain with membership / defining-function / gradient oracles.
/// Construction throws std::invalid_argument on spec violations (including the
/// empirical smoothness guard for perturbed superellipsoids).
class Domain {
public:
    explicit Domain(DomainSpec spec);

    int dimension() const { return dim_; }
    DomainKind kind() const;
    const DomainSpec& spec() const { return spec_; }

    /// Phi(x): negative inside, zero on the boundary, positive outside.
    /// Boundary classification width in floating mode is 1e-12: |Phi| below
    /// that cannot be distinguished from the boundary, and `inside` simply
    /// reports the sign.
    double defining_value(std::span<const double> x) const;
    bool inside(std::span<const double> x) const { return defining_value(x) < 0.0; }
    Vec gradient(std::span<const double> x) const;

    /// Half-width of the centered bounding box used by samplers.
    double box_halfwidth() const { return box_halfwidth_; }
    /// Upper bound on |x| over the closure of D.
    double circumradius() const { return circumradius_; }

    bool axis_symmetric() const { return kind() == DomainKind::superellipsoid; }

private:
    void validate_superellipsoid();
    void validate_perturbed();
    void validate_polar();

    DomainSpec spec_;
    int dim_ = 0;
    double box_halfwidth_ = 1.0;
    double circumradius_ = 1.0;
    double polar_h_min_ = 0.0;
    std::vector<Polynomial> perturb_grad_;  // cached dp/dx_i
};

/// Graph chart of the boundary at a point: orthonormal frame whose last
/// vector is the outward normal, plus the graph function f over tangent
/// coordinates (f(0) = 0, grad f(0) = 0, valid for |u| < r_chart).
class BoundaryChart {
public:
    BoundaryChart(Domain domain, Vec base_point, std::vector<Vec> tangents, Vec normal,
                  double r_chart)
        : domain_(std::move(domain)),
          base_(std::move(base_point)),
          tangents_(std::move(tangents)),
          normal_(std::move(normal)),
          r_chart_(r_chart) {}

    const Domain& domain() const { return domain_; }
    const Vec& base_point() const { return base_; }
    const Vec& normal() const { return normal_; }
    const std::vector<Vec>& tangents() const { return tangents_; }
    double r_chart() const { return r_chart_; }
    int surface_dim() const { return int(base_.size()) - 1; }

    /// Graph height below the tangent plane: the root s of
    /// Phi(x0 + sum u_i t_i - s n) = 0 nearest to zero.
    double graph(std::span<const double> u) const;
    /// Boundary point for tangent coordinates u.
    Vec lift(std::span<const double> u) const;

private:
    Domain domain_;
    Vec base_;
    std::vector<Vec> tangents_;
    Vec normal_;
    double r_chart_;
};

BoundaryChart chart_at(const Domain& domain, std::span<const double> boundary_point);

/// n-dimensional measure of D cut by the hyperplane { x . v = offset }.
/// Closed form for superellipsoid axis directions; root-scanned quadrature
/// otherwise (absolute tolerance `tol` for the d = 3 area integral).
double slice_measure(const Domain& domain, std::span<const double> direction,
                     double offset, double tol = 1e-9);

/// [min, max] of x . v over the closure of D.
std::pair<double, double> support_interval(const Domain& domain,
                                           std::span<const double> direction);

/// Dirichlet product formula 2^d prod Gamma(1 + 1/(2 a_i)) / Gamma(1 + sum 1/(2 a_i)).
double superellipsoid_volume(const std::vector<int>& exponents);

/// Volume: closed form for superellipsoids, seeded QMC otherwise
/// (fixed internal seed; use volume_qmc for control over seed and budget).
double volume(const Domain& domain);

struct McEstimate {
    double value;
    double std_error;
};

McEstimate volume_qmc(const Domain& domain, std::uint64_t seed, std::size_t budget);

struct ShellConditionRow {
    double delta;
    double c;     // smallest admissible constant found on the ladder
    bool holds;
};

struct ShellConditionReport {
    std::vector<ShellConditionRow> rows;
    bool all_hold;
};

/// Empirically exhibits a constant c with x + y in (1 + c*delta) D for
/// sampled x in D, |y| < delta.  Report-only; never throws on failure.
ShellConditionReport shell_condition_check(const Domain& domain,
                                           std::span<const double> deltas,
                                           std::uint64_t seed);

// Small vector helpers shared across modules.
double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
/// Orthonormal frame whose last column is `n` (Householder construction).
std::vector<Vec> frame_with_last(const Vec& n);

}  // namespace growthlab::geometry
