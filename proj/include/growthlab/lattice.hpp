#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "growthlab/geometry.hpp"
#include "growthlab/indices.hpp"
#include "growthlab/rational.hpp"

namespace growthlab::lattice {

/// Positive rational dilation factor.
struct Dilation {
    std::int64_t num = 1;
    std::int64_t den = 1;
    double value() const { return double(num) / double(den); }
};

struct CountResult {
    Dilation s;
    std::int64_t count = 0;        // exact
    double volume_term = 0.0;      // s^{n+1} vol(D)
    double discrepancy = 0.0;      // count - volume_term
};

struct DiscrepancySeries {
    std::vector<CountResult> results;  // s strictly increasing
};

enum class CountingPath { automatic, exact, guarded };

/// Exact count of integer points in sD for superellipsoids with rational s:
/// the membership test sum x_i^{2a_i} Q^{2a_i} P^{2A-2a_i} <= P^{2A} runs in
/// 128-bit integers, sliced over the outer coordinates with the innermost
/// range found by monotone integer root bracketing.  Polar and perturbed
/// domains use a guarded floating path: points with |Phi| below the guard are
/// re-evaluated in long double and reported if still unresolved.
std::int64_t count_lattice_points(const geometry::Domain& domain, Dilation s,
                                  int workers = 1,
                                  CountingPath path = CountingPath::automatic);

/// Test oracle: full bounding-box enumeration with the same exact test.
std::int64_t count_lattice_points_bruteforce(const geometry::Domain& domain, Dilation s);

/// `progress` (when set) receives one line per dilation on a side channel;
/// it never feeds back into results.
DiscrepancySeries discrepancy_series(const geometry::Domain& domain,
                                     std::span<const Dilation> grid, int workers = 1,
                                     CountingPath path = CountingPath::automatic,
                                     void (*progress)(const CountResult&) = nullptr);

/// Envelope-growth estimate: least-squares slope of log(per-octave max |D|)
/// against log s.  Needs >= 5 octave blocks; zero-max blocks are dropped and
/// at least 4 must survive.
double fit_discrepancy_exponent(const DiscrepancySeries& series);

struct DiscrepancyPrediction {
    double theta;
    bool epsilon_loss;  // bound holds only with an extra s^epsilon
};

/// Three-case prediction for the discrepancy exponent from the growth index.
DiscrepancyPrediction predicted_discrepancy_exponent(const indices::GrowthIndex& g_index,
                                                     int n);

/// Geometric grid of integer dilations, `per_octave` samples per doubling.
std::vector<Dilation> octave_dilations(std::int64_t s_min, std::int64_t s_max,
                                       int per_octave);

}  // namespace growthlab::lattice
