#include "growthlab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "growthlab/rng.hpp"

namespace growthlab::stability {

using indices::PolynomialFn;
using indices::PoweredSumPowFn;

PerturbationFamily::PerturbationFamily(Polynomial q, indices::GrowthIndex idx,
                                       std::vector<Polynomial> s, double delta_box,
                                       double radius)
    : base(std::move(q)), base_index(idx), members(std::move(s)), delta(delta_box),
      r1(radius) {
    if (!(delta > 0.0) || !(r1 > 0.0))
        throw std::invalid_argument("PerturbationFamily: delta and r1 must be > 0");
    for (const auto& m : members) {
        if (m.arity() != base.arity())
            throw std::invalid_argument("PerturbationFamily: member arity mismatch");
        if (!m.vanishes_at_origin())
            throw std::invalid_argument("PerturbationFamily: members must vanish at 0");
    }
    // Linear independence: rank of the member-by-sample evaluation matrix.
    if (!members.empty()) {
        const int m = int(members.size());
        const int cols = 4 * m + 8;
        std::vector<std::vector<double>> mat(m, std::vector<double>(cols));
        std::uint64_t s0 = 0x7065727475726221ULL;
        std::vector<double> x(base.arity());
        for (int j = 0; j < cols; ++j) {
            for (auto& c : x) c = r1 * (2.0 * uniform01(s0) - 1.0);
            for (int i = 0; i < m; ++i) mat[i][j] = members[i](x);
        }
        int rank = 0;
        for (int col = 0; col < cols && rank < m; ++col) {
            int pivot = -1;
            double best = 1e-10;
            for (int i = rank; i < m; ++i)
                if (std::fabs(mat[i][col]) > best) { best = std::fabs(mat[i][col]); pivot = i; }
            if (pivot < 0) continue;
            std::swap(mat[rank], mat[pivot]);
            for (int i = rank + 1; i < m; ++i) {
                const double f = mat[i][col] / mat[rank][col];
                for (int j = col; j < cols; ++j) mat[i][j] -= f * mat[rank][j];
            }
            ++rank;
        }
        if (rank < m)
            throw std::invalid_argument("PerturbationFamily: members linearly dependent");
    }
}

int PerturbationFamily::part1_max_members() const {
    const double h = base_index.g;
    return std::max(0, int(std::ceil(1.0 / h - 1e-12)) - 1);
}

// ---------------------------------------------------------------------------

namespace {

Polynomial combine(const PerturbationFamily& family, std::span<const double> eta) {
    Polynomial f = family.base;
    for (std::size_t i = 0; i < eta.size(); ++i)
        f = f + family.members[i] * eta[i];
    return f;
}

double log_ratio_slope(std::span<const double> eps, std::span<const double> ratio) {
    // slope of log ratio against log(1/eps); positive means growth as eps -> 0
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(ratio[i] > 0.0)) continue;
        const double lx = std::log(1.0 / eps[i]);
        const double ly = std::log(ratio[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    if (n < 3) return 0.0;
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

StabilityReport family_sweep(const PerturbationFamily& family,
                             std::span<const std::vector<double>> eta_grid,
                             std::span<const double> eps_grid, std::uint64_t seed,
                             std::size_t budget, int workers) {
    const int m = int(family.members.size());
    bool covers_zero = false;
    for (const auto& eta : eta_grid) {
        if (int(eta.size()) != m)
            throw std::invalid_argument("family_sweep: eta vector arity mismatch");
        bool zero = true;
        for (double e : eta) {
            if (std::fabs(e) > family.delta + 1e-15)
                throw std::invalid_argument("family_sweep: |eta_i| <= delta violated");
            if (e != 0.0) zero = false;
        }
        covers_zero = covers_zero || zero;
    }
    if (!covers_zero)
        throw std::invalid_argument("family_sweep: eta grid must cover eta = 0");

    const double h = family.base_index.g;
    const int l = family.base_index.k;

    StabilityReport report;
    report.part1_applicable = family.part1_applicable();
    std::vector<double> max_ratio_per_eps(eps_grid.size(), 0.0);
    for (std::size_t row = 0; row < eta_grid.size(); ++row) {
        const auto& eta = eta_grid[row];
        const std::uint64_t row_seed = mix_seed(seed, row);
        PolynomialFn f(combine(family, eta));
        const auto sweep = indices::sublevel_sweep(f, family.r1, eps_grid, row_seed,
                                                   budget, workers);
        FamilyFitRow out;
        out.eta = eta;
        out.effective_seed = row_seed;
        out.fit = indices::fit_growth(sweep);
        out.max_ratio = 0.0;
        for (std::size_t i = 0; i < sweep.eps.size(); ++i) {
            const double eps = sweep.eps[i];
            const double denom = std::pow(eps, h) * std::pow(std::fabs(std::log(eps)), l);
            const double ratio = sweep.measure[i] / denom;
            out.max_ratio = std::max(out.max_ratio, ratio);
            max_ratio_per_eps[i] = std::max(max_ratio_per_eps[i], ratio);
        }
        report.uniformity_stat = std::max(report.uniformity_stat, out.max_ratio);
        report.rows.push_back(std::move(out));
    }
    report.ratio_growth_slope = log_ratio_slope(eps_grid, max_ratio_per_eps);
    report.uniform_pass = report.ratio_growth_slope <= 0.05;
    return report;
}

std::vector<std::vector<double>> eta_tensor_grid(int members, int per_axis, double delta) {
    if (members < 0 || per_axis < 1)
        throw std::invalid_argument("eta_tensor_grid: bad shape");
    std::vector<std::vector<double>> out;
    if (members == 0) {
        out.push_back({});
        return out;
    }
    const long total = long(std::pow(double(per_axis), members));
    for (long idx = 0; idx < total; ++idx) {
        std::vector<double> eta(members);
        long rem = idx;
        for (int i = 0; i < members; ++i) {
            const int pos = int(rem % per_axis);
            rem /= per_axis;
            eta[i] = per_axis == 1 ? 0.0
                                   : -delta + 2.0 * delta * pos / (per_axis - 1);
            if (std::fabs(eta[i]) < 1e-15) eta[i] = 0.0;
        }
        out.push_back(std::move(eta));
    }
    // ensure exact zero is present (odd per_axis grids hit it already)
    bool has_zero = false;
    for (const auto& eta : out) {
        bool z = true;
        for (double e : eta) z = z && e == 0.0;
        if (z) { has_zero = true; break; }
    }
    if (!has_zero) out.push_back(std::vector<double>(members, 0.0));
    return out;
}

// ---------------------------------------------------------------------------

Counterexample counterexample_construct(Rational t) {
    if (t.num <= 0)
        throw std::invalid_argument("counterexample_construct: t must be positive");
    const std::int64_t a = t.num, b = t.den;
    const std::int64_t c = b / a + 1;  // smallest c with c a > b
    if (c == 1)
        throw std::invalid_argument(
            "counterexample_construct: t > 1 gives c = 1 (no room for degradation)");
    Counterexample out;
    out.t = t;
    out.c = int(c);
    out.n = int(2 * c * a);
    out.k = int(b);
    const Polynomial f = Polynomial::powered_sum(out.n, out.k);
    out.q = f.pow(out.c);
    for (int j = 0; j < out.c; ++j)
        out.family.push_back(f.pow(j) * Polynomial::axis_power(out.n, 0, out.c - j));
    out.h_prime = 1.0 / double(out.c);
    out.q_index = indices::powered_sum_index(out.n, out.k, out.c);
    if (!(*out.q_index.g_exact == t))
        throw std::logic_error("counterexample_construct: index arithmetic mismatch");
    return out;
}

DegradationReport degradation_demo(Rational t, double delta,
                                   std::span<const double> eps_grid, double h_test,
                                   std::uint64_t seed, std::size_t budget, int workers) {
    const auto ce = counterexample_construct(t);
    if (ce.n > 6)
        throw std::invalid_argument(
            "degradation_demo: dimension exceeds the desk-scale MC limit (n <= 6)");
    const double r1 = 0.5;

    DegradationReport report;
    report.h_prime = ce.h_prime;
    report.h_test = h_test;

    PoweredSumPowFn base(ce.n, ce.k, ce.c, 0.0);
    const auto sweep0 = indices::sublevel_sweep(base, r1, eps_grid, mix_seed(seed, 0),
                                                budget, workers);
    report.fit_base = indices::fit_growth(sweep0);

    PoweredSumPowFn perturbed(ce.n, ce.k, ce.c, delta);
    const auto sweep1 = indices::sublevel_sweep(perturbed, r1, eps_grid, mix_seed(seed, 1),
                                                budget, workers);
    report.fit_perturbed = indices::fit_growth(sweep1);

    report.eps.assign(sweep1.eps.begin(), sweep1.eps.end());
    for (std::size_t i = 0; i < sweep1.eps.size(); ++i) {
        const double scale = std::pow(sweep1.eps[i], h_test);
        report.ratio.push_back(sweep1.measure[i] / scale);
        report.ratio_sigma.push_back(sweep1.std_error[i] / scale);
    }
    report.ratio_monotone_2sigma = true;
    for (std::size_t i = 0; i + 1 < report.ratio.size(); ++i) {
        // eps grid is decreasing, so the ratio should rise along the list
        if (report.ratio[i + 1] <
            report.ratio[i] - 2.0 * (report.ratio_sigma[i] + report.ratio_sigma[i + 1]))
            report.ratio_monotone_2sigma = false;
    }
    report.ratio_growth_factor =
        report.ratio.front() > 0.0 ? report.ratio.back() / report.ratio.front() : 0.0;
    return report;
}

// ---------------------------------------------------------------------------

IntegrabilityReport integrability_bound(const PerturbationFamily& family, double t_exp,
                                        std::span<const std::vector<double>> eta_grid,
                                        std::span<const double> eps_grid,
                                        std::uint64_t seed, std::size_t budget,
                                        int workers) {
    if (!(t_exp >= 0.0) || !(t_exp < family.base_index.g))
        throw std::invalid_argument(
            "integrability_bound: need 0 <= t_exp < h so the base integral converges");
    // ascending eps for the Stieltjes sum
    std::vector<double> eps(eps_grid.begin(), eps_grid.end());
    std::sort(eps.begin(), eps.end());

    const int n = family.base.arity();
    const double ball_vol = std::pow(std::numbers::pi, 0.5 * n) /
                            std::tgamma(0.5 * n + 1.0) * std::pow(family.r1, n);

    IntegrabilityReport report;
    for (std::size_t row = 0; row < eta_grid.size(); ++row) {
        const auto& eta = eta_grid[row];
        PolynomialFn f(combine(family, eta));
        const auto sweep = indices::sublevel_sweep(f, family.r1, eps, mix_seed(seed, row),
                                                   budget, workers);
        double integral = sweep.measure.front() * std::pow(eps.front(), -t_exp);
        for (std::size_t j = 0; j + 1 < eps.size(); ++j) {
            const double dm = sweep.measure[j + 1] - sweep.measure[j];
            const double mid = std::sqrt(eps[j] * eps[j + 1]);
            integral += std::max(dm, 0.0) * std::pow(mid, -t_exp);
        }
        // mass above the top level contributes less than eps_max^{-t} each
        const double tail = std::max(ball_vol - sweep.measure.back(), 0.0);
        integral += tail * std::pow(eps.back(), -t_exp);
        report.eta.push_back(eta);
        report.integral.push_back(integral);
    }
    const auto [lo, hi] = std::minmax_element(report.integral.begin(),
                                              report.integral.end());
    report.max_min_ratio = *lo > 0.0 ? *hi / *lo : 0.0;
    report.uniform_pass = report.max_min_ratio <= 1.5;
    return report;
}

}  // namespace growthlab::stability
