#include "growthlab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <numeric>
#include <stdexcept>

#include "growthlab/parallel.hpp"

namespace growthlab::lattice {

namespace {

using u128 = unsigned __int128;

u128 u128_pow(u128 base, int e) {
    u128 acc = 1;
    while (e) {
        if (e & 1) acc *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return acc;
}

/// floor(v^(1/m)) by floating seed plus exact fixup.
std::int64_t iroot(u128 v, int m) {
    if (v == 0) return 0;
    double seed = std::pow(double(v), 1.0 / m);
    std::int64_t r = std::int64_t(seed);
    while (r > 0 && u128_pow(u128(r), m) > v) --r;
    while (u128_pow(u128(r + 1), m) <= v) ++r;
    return r;
}

struct ExactSetup {
    std::vector<int> exps;       // a_i
    std::vector<u128> coef;      // Q^{2a_i} P^{2A-2a_i}
    u128 budget;                 // P^{2A}
    std::vector<std::int64_t> xmax;
};

ExactSetup exact_setup(const std::vector<int>& exps, Dilation s) {
    if (s.num <= 0 || s.den <= 0)
        throw std::invalid_argument("count_lattice_points: dilation must be positive");
    const std::int64_t g = std::gcd(s.num, s.den);
    const std::int64_t P = s.num / g, Q = s.den / g;
    const int A = *std::max_element(exps.begin(), exps.end());
    // overflow guard: all quantities stay below P^{2A} Q^{2A} * d
    const double bits = 2.0 * A * (std::log2(double(P)) + std::log2(double(Q)));
    if (bits > 116.0)
        throw std::invalid_argument(
            "count_lattice_points: dilation exceeds the 128-bit exact range");
    ExactSetup setup;
    setup.exps = exps;
    setup.budget = u128_pow(u128(P), 2 * A);
    for (int a : exps)
        setup.coef.push_back(u128_pow(u128(Q), 2 * a) * u128_pow(u128(P), 2 * (A - a)));
    for (std::size_t i = 0; i < exps.size(); ++i)
        setup.xmax.push_back(iroot(setup.budget / setup.coef[i], 2 * exps[i]));
    return setup;
}

/// Count over coordinates [level..d) given the remaining budget; the last
/// coordinate is resolved by integer root bracketing.
std::int64_t count_tail(const ExactSetup& st, std::size_t level, u128 budget) {
    const std::size_t d = st.exps.size();
    if (level + 1 == d) {
        const std::int64_t m = iroot(budget / st.coef[level], 2 * st.exps[level]);
        return 2 * m + 1;
    }
    std::int64_t total = 0;
    for (std::int64_t x = 0;; ++x) {
        const u128 term = st.coef[level] * u128_pow(u128(x), 2 * st.exps[level]);
        if (term > budget) break;
        const std::int64_t inner = count_tail(st, level + 1, budget - term);
        total += (x == 0) ? inner : 2 * inner;
    }
    return total;
}

std::int64_t count_superellipsoid(const std::vector<int>& exps, Dilation s, int workers) {
    const auto st = exact_setup(exps, s);
    const std::int64_t x0max = st.xmax[0];
    // Slices x_0 = const distribute over workers; integer sums are
    // order-independent, so any worker count gives the same total.
    std::vector<std::int64_t> partial(std::size_t(x0max) + 1, 0);
    parallel_for(std::size_t(x0max) + 1, workers, [&](std::size_t ix) {
        const std::int64_t x = std::int64_t(ix);
        const u128 term = st.coef[0] * u128_pow(u128(x), 2 * st.exps[0]);
        if (term > st.budget) return;
        const std::int64_t inner = count_tail(st, 1, st.budget - term);
        partial[ix] = (x == 0) ? inner : 2 * inner;
    });
    std::int64_t total = 0;
    for (std::int64_t p : partial) total += p;
    return total;
}

/// Guarded floating membership for non-polynomial domains.
std::int64_t count_guarded(const geometry::Domain& domain, Dilation s, int workers) {
    const int d = domain.dimension();
    const double sv = s.value();
    const double guard = 1e-9 * std::max(1.0, sv) / sv;  // width in Phi units
    const std::int64_t xmax = std::int64_t(std::ceil(domain.box_halfwidth() * sv)) + 1;

    auto phi_extended = [&](const std::vector<std::int64_t>& pt) {
        std::vector<long double> xl(d);
        for (int k = 0; k < d; ++k)
            xl[k] = (long double)(pt[k]) * (long double)(s.den) / (long double)(s.num);
        if (domain.kind() == geometry::DomainKind::polar) {
            const auto& spec = std::get<geometry::PolarDomainSpec>(domain.spec());
            long double r2 = 0.0L;
            for (int k = 0; k < d; ++k) r2 += xl[k] * xl[k];
            const long double r = std::sqrt(r2);
            if (r == 0.0L) return -1.0;
            std::vector<long double> w(d);
            for (int k = 0; k < d; ++k) w[k] = xl[k] / r;
            return double(r - spec.radius.eval_ld(w));
        }
        if (domain.kind() == geometry::DomainKind::superellipsoid) {
            const auto& spec = std::get<geometry::SuperellipsoidSpec>(domain.spec());
            long double acc = 0.0L;
            for (int k = 0; k < d; ++k) {
                long double t = 1.0L;
                for (int e = 0; e < 2 * spec.exponents[k]; ++e) t *= xl[k];
                acc += t;
            }
            return double(acc - 1.0L);
        }
        const auto& spec = std::get<geometry::PerturbedSuperellipsoidSpec>(domain.spec());
        long double acc = 0.0L;
        for (int k = 0; k < d; ++k) {
            long double t = 1.0L;
            for (int e = 0; e < 2 * spec.base_exponent; ++e) t *= xl[k];
            acc += t;
        }
        acc -= (long double)spec.eta *
               spec.perturbation.eval_ld(std::span<const long double>(xl.data(), d - 1));
        return double(acc - 1.0L);
    };

    const std::size_t nslices = std::size_t(2 * xmax + 1);
    std::vector<std::int64_t> partial(nslices, 0);
    std::vector<std::vector<std::int64_t>> unresolved;
    std::mutex unresolved_mutex;

    parallel_for(nslices, workers, [&](std::size_t ix) {
        std::vector<std::int64_t> pt(d, 0);
        pt[0] = std::int64_t(ix) - xmax;
        std::vector<double> x(d);
        std::vector<std::int64_t> idx(std::size_t(d) - 1, -xmax);
        std::int64_t local = 0;
        for (;;) {
            for (int k = 1; k < d; ++k) pt[k] = idx[k - 1];
            for (int k = 0; k < d; ++k) x[k] = double(pt[k]) / sv;
            const double phi = domain.defining_value(x);
            bool in = false;
            if (phi < -guard) {
                in = true;
            } else if (phi <= guard) {
                const double phi_ld = phi_extended(pt);
                if (std::fabs(phi_ld) < 1e-13) {
                    std::lock_guard<std::mutex> lock(unresolved_mutex);
                    unresolved.push_back(pt);
                } else {
                    in = phi_ld < 0.0;
                }
            }
            if (in) ++local;
            int k = 0;
            for (; k < d - 1; ++k) {
                if (++idx[k] <= xmax) break;
                idx[k] = -xmax;
            }
            if (k == d - 1) break;
        }
        partial[ix] = local;
    });

    if (!unresolved.empty()) {
        std::string msg = "count_lattice_points: guard could not certify point (";
        for (int k = 0; k < d; ++k)
            msg += std::to_string(unresolved.front()[k]) + (k + 1 < d ? ", " : ")");
        throw std::runtime_error(msg);
    }
    std::int64_t total = 0;
    for (std::int64_t p : partial) total += p;
    return total;
}

}  // namespace

std::int64_t count_lattice_points(const geometry::Domain& domain, Dilation s,
                                  int workers, CountingPath path) {
    if (s.num <= 0 || s.den <= 0)
        throw std::invalid_argument("count_lattice_points: s must be positive");
    const bool super = domain.kind() == geometry::DomainKind::superellipsoid;
    if (path == CountingPath::exact && !super)
        throw std::invalid_argument(
            "count_lattice_points: exact path needs a superellipsoid");
    if (path == CountingPath::guarded || (path == CountingPath::automatic && !super))
        return count_guarded(domain, s, workers);
    return count_superellipsoid(
        std::get<geometry::SuperellipsoidSpec>(domain.spec()).exponents, s, workers);
}

std::int64_t count_lattice_points_bruteforce(const geometry::Domain& domain, Dilation s) {
    if (domain.kind() != geometry::DomainKind::superellipsoid)
        throw std::invalid_argument("bruteforce oracle: superellipsoids only");
    const auto& exps = std::get<geometry::SuperellipsoidSpec>(domain.spec()).exponents;
    const auto st = exact_setup(exps, s);
    const int d = int(exps.size());
    const std::int64_t m = st.xmax[0] + 1;
    std::vector<std::int64_t> idx(d, -m);
    std::int64_t total = 0;
    for (;;) {
        u128 acc = 0;
        bool inside = true;
        for (int k = 0; k < d; ++k) {
            const std::int64_t a = idx[k] < 0 ? -idx[k] : idx[k];
            acc += st.coef[k] * u128_pow(u128(a), 2 * exps[k]);
            if (acc > st.budget) { inside = false; break; }
        }
        if (inside && acc <= st.budget) ++total;
        int k = 0;
        for (; k < d; ++k) {
            if (++idx[k] <= m) break;
            idx[k] = -m;
        }
        if (k == d) break;
    }
    return total;
}

DiscrepancySeries discrepancy_series(const geometry::Domain& domain,
                                     std::span<const Dilation> grid, int workers,
                                     CountingPath path,
                                     void (*progress)(const CountResult&)) {
    DiscrepancySeries out;
    double prev = 0.0;
    const double vol = geometry::volume(domain);
    const int d = domain.dimension();
    for (const auto& s : grid) {
        if (!(s.value() > prev))
            throw std::invalid_argument("discrepancy_series: s grid must increase");
        prev = s.value();
        CountResult r;
        r.s = s;
        r.count = count_lattice_points(domain, s, workers, path);
        r.volume_term = std::pow(s.value(), d) * vol;
        r.discrepancy = double(r.count) - r.volume_term;
        if (progress) progress(r);
        out.results.push_back(r);
    }
    return out;
}

double fit_discrepancy_exponent(const DiscrepancySeries& series) {
    std::map<int, std::pair<double, double>> blocks;  // octave -> (max|D|, s at max)
    for (const auto& r : series.results) {
        const double a = std::fabs(r.discrepancy);
        const int b = int(std::floor(std::log2(r.s.value())));
        auto [it, inserted] = blocks.try_emplace(b, a, r.s.value());
        if (!inserted && a > it->second.first) it->second = {a, r.s.value()};
    }
    if (blocks.size() < 5)
        throw std::invalid_argument("fit_discrepancy_exponent: need >= 5 octave blocks");
    std::vector<double> lx, ly;
    for (const auto& [b, mv] : blocks) {
        if (mv.first == 0.0) continue;  // zero-max block dropped
        lx.push_back(std::log(mv.second));
        ly.push_back(std::log(mv.first));
    }
    if (lx.size() < 4)
        throw std::runtime_error("fit_discrepancy_exponent: fewer than 4 usable blocks");
    const double n = double(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DiscrepancyPrediction predicted_discrepancy_exponent(const indices::GrowthIndex& gi,
                                                     int n) {
    const double threshold = 1.0 / (n + 1);
    if (!gi.determinate) {
        if (gi.lower_bound && *gi.lower_bound > threshold + 1e-15)
            return {n - 1.0 / (double(n) * n + 2.0 * n), false};
        throw std::runtime_error(
            "predicted_discrepancy_exponent: indeterminate index below 1/(n+1)");
    }
    int cmp;
    if (gi.g_exact) {
        const Rational th(1, n + 1);
        cmp = (*gi.g_exact < th) ? -1 : (*gi.g_exact == th ? 0 : 1);
    } else {
        cmp = (gi.g < threshold - 1e-12) ? -1 : (gi.g <= threshold + 1e-12 ? 0 : 1);
    }
    if (cmp > 0) return {n - 1.0 / (double(n) * n + 2.0 * n), false};
    const double theta = n - gi.g / (n + 1.0 - gi.g);
    if (cmp == 0 || gi.k > 0) return {theta, true};
    return {theta, false};
}

std::vector<Dilation> octave_dilations(std::int64_t s_min, std::int64_t s_max,
                                       int per_octave) {
    if (s_min < 1 || s_max < s_min || per_octave < 1)
        throw std::invalid_argument("octave_dilations: bad range");
    std::vector<Dilation> out;
    std::int64_t last = 0;
    const double ratio = std::pow(2.0, 1.0 / per_octave);
    for (double v = double(s_min); v <= double(s_max) * 1.0000001; v *= ratio) {
        const std::int64_t s = std::int64_t(std::llround(v));
        if (s > last && s <= s_max) {
            out.push_back({s, 1});
            last = s;
        }
    }
    if (out.empty() || out.back().num != s_max) out.push_back({s_max, 1});
    return out;
}

}  // namespace growthlab::lattice
