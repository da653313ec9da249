#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "growthlab/indices.hpp"
#include "growthlab/polynomial.hpp"
#include "growthlab/rational.hpp"

namespace growthlab::stability {

/// Finite-dimensional perturbation family around a base function q.
/// Members must vanish at the origin and be linearly independent (rank check
/// on a sampled matrix at construction).
struct PerturbationFamily {
    Polynomial base;
    indices::GrowthIndex base_index;  // (h, l) of the base function
    std::vector<Polynomial> members;
    double delta = 0.05;  // coefficient box
    double r1 = 0.5;      // measurement radius

    PerturbationFamily(Polynomial q, indices::GrowthIndex idx,
                       std::vector<Polynomial> s, double delta_box, double radius);

    /// Largest family size covered by the uniform bound: ceil(1/h) - 1
    /// (the gamma = 0 case is excluded by construction of this count).
    int part1_max_members() const;
    bool part1_applicable() const { return int(members.size()) <= part1_max_members(); }
};

struct FamilyFitRow {
    std::vector<double> eta;
    indices::FitResult fit;
    std::uint64_t effective_seed;   // stream used for this row's estimates
    double max_ratio;               // max over eps of m / (eps^h |ln eps|^l)
};

struct StabilityReport {
    std::vector<FamilyFitRow> rows;
    double uniformity_stat = 0.0;   // max over (eta, eps) of the ratio
    double ratio_growth_slope = 0.0;  // slope of log max-ratio vs log(1/eps)
    bool part1_applicable = false;
    bool uniform_pass = false;      // ratio does not grow as eps -> 0
};

/// Measures m({|x| < r1, |q + sum eta_i s_i| < eps}) over the eta grid and
/// fits (h, l) per row; eta rows own derived seed streams keyed by row index.
StabilityReport family_sweep(const PerturbationFamily& family,
                             std::span<const std::vector<double>> eta_grid,
                             std::span<const double> eps_grid, std::uint64_t seed,
                             std::size_t budget, int workers = 1);

/// Tensor grid of eta vectors covering 0, per_axis points per member in
/// [-delta, delta].
std::vector<std::vector<double>> eta_tensor_grid(int members, int per_axis, double delta);

/// The sharpness construction for rational t = a/b: c smallest with c t > 1,
/// q = (sum_{i=1..n} x_i^{2k})^c with n = 2 c a, k = b, family
/// { f^j x_1^{c-j} : 0 <= j <= c-1 }, degraded index h' = 1/c.
struct Counterexample {
    Rational t;
    int c = 0, n = 0, k = 0;
    Polynomial q;
    std::vector<Polynomial> family;
    double h_prime = 0.0;
    indices::GrowthIndex q_index;

    Counterexample() : q(1) {}
};

Counterexample counterexample_construct(Rational t);

struct DegradationReport {
    indices::FitResult fit_base;       // expect h = t
    indices::FitResult fit_perturbed;  // expect h = 1/c
    double h_prime = 0.0;
    double h_test = 0.0;               // the h' the ratio test runs against
    std::vector<double> eps;
    std::vector<double> ratio;         // m(eps) / eps^{h_test}
    std::vector<double> ratio_sigma;
    bool ratio_monotone_2sigma = false;
    double ratio_growth_factor = 0.0;  // last / first
};

/// Runs the construction at coefficient delta on the x_1 direction and shows
/// the ratio m(eps)/eps^{h_test} growing without bound for h' in (1/c, t).
DegradationReport degradation_demo(Rational t, double delta,
                                   std::span<const double> eps_grid, double h_test,
                                   std::uint64_t seed, std::size_t budget,
                                   int workers = 1);

struct IntegrabilityReport {
    std::vector<std::vector<double>> eta;
    std::vector<double> integral;   // layer-cake estimates of int |q+s|^{-t}
    double max_min_ratio = 0.0;
    bool uniform_pass = false;      // max/min <= 1.5 over the eta grid
};

/// Layer-cake estimate of int_{|x|<r1} |q + s|^{-t_exp} from measured
/// sublevel values over the eps grid, swept over the eta grid.
IntegrabilityReport integrability_bound(const PerturbationFamily& family, double t_exp,
                                        std::span<const std::vector<double>> eta_grid,
                                        std::span<const double> eps_grid,
                                        std::uint64_t seed, std::size_t budget,
                                        int workers = 1);

}  // namespace growthlab::stability
