#include "growthlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "growthlab/quadrature.hpp"
#include "growthlab/rng.hpp"

namespace growthlab::geometry {

namespace {

template <class T>
T ipow(T x, int e) {
    T acc = T(1);
    T base = x;
    while (e) {
        if (e & 1) acc *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return acc;
}

/// Deterministic unit directions: uniform angles in 2-D, Fibonacci lattice in 3-D.
std::vector<Vec> sphere_grid(int dim, int count) {
    std::vector<Vec> out;
    out.reserve(count);
    if (dim == 2) {
        for (int k = 0; k < count; ++k) {
            const double th = 2.0 * std::numbers::pi * k / count;
            out.push_back({std::cos(th), std::sin(th)});
        }
    } else if (dim == 3) {
        const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            out.push_back({r * std::cos(ga * k), r * std::sin(ga * k), z});
        }
    } else {
        // Higher dimensions only need a rough cover; use a seeded stream.
        std::uint64_t s = 0x5bd1e9955bd1e995ULL + dim;
        for (int k = 0; k < count; ++k) {
            Vec v(dim);
            double n2 = 0.0;
            for (int d = 0; d < dim; ++d) {
                // Box-Muller pairs from the stream.
                const double u1 = std::max(uniform01(s), 1e-300);
                const double u2 = uniform01(s);
                v[d] = std::sqrt(-2.0 * std::log(u1)) *
                       std::cos(2.0 * std::numbers::pi * u2);
                n2 += v[d] * v[d];
            }
            const double inv = 1.0 / std::sqrt(n2);
            for (auto& c : v) c *= inv;
            out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

std::vector<Vec> frame_with_last(const Vec& n) {
    const int d = int(n.size());
    std::vector<Vec> frame(d, Vec(d, 0.0));
    Vec w(d, 0.0);
    double delta2 = 0.0;
    for (int i = 0; i < d; ++i) {
        w[i] = (i == d - 1 ? 1.0 : 0.0) - n[i];
        delta2 += w[i] * w[i];
    }
    if (delta2 < 1e-18) {
        for (int i = 0; i < d; ++i) frame[i][i] = 1.0;
        frame[d - 1] = n;
        return frame;
    }
    const double inv = std::sqrt(2.0 / delta2);
    for (auto& c : w) c *= inv;  // |w| = sqrt(2), so H = I - w w^T
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j)
            frame[i][j] = (i == j ? 1.0 : 0.0) - w[j] * w[i];
    }
    // Columns H e_i: frame[i] is the i-th column; the last equals n by
    // construction (up to roundoff), which we pin exactly.
    frame[d - 1] = n;
    return frame;
}

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(DomainSpec spec) : spec_(std::move(spec)) {
    if (std::holds_alternative<SuperellipsoidSpec>(spec_)) {
        validate_superellipsoid();
    } else if (std::holds_alternative<PerturbedSuperellipsoidSpec>(spec_)) {
        validate_perturbed();
    } else {
        validate_polar();
    }
}

DomainKind Domain::kind() const {
    if (std::holds_alternative<SuperellipsoidSpec>(spec_)) return DomainKind::superellipsoid;
    if (std::holds_alternative<PerturbedSuperellipsoidSpec>(spec_)) return DomainKind::perturbed;
    return DomainKind::polar;
}

void Domain::validate_superellipsoid() {
    const auto& s = std::get<SuperellipsoidSpec>(spec_);
    dim_ = int(s.exponents.size());
    if (dim_ < 2) throw std::invalid_argument("superellipsoid: dimension must be >= 2");
    for (int a : s.exponents)
        if (a < 1) throw std::invalid_argument("superellipsoid: exponents must be >= 1");
    box_halfwidth_ = 1.0;
    circumradius_ = std::sqrt(double(dim_));
}

void Domain::validate_perturbed() {
    const auto& s = std::get<PerturbedSuperellipsoidSpec>(spec_);
    dim_ = s.dimension;
    if (dim_ < 2) throw std::invalid_argument("perturbed superellipsoid: dimension must be >= 2");
    if (s.base_exponent < 1)
        throw std::invalid_argument("perturbed superellipsoid: base exponent must be >= 1");
    if (s.eta <= 0.0) throw std::invalid_argument("perturbed superellipsoid: eta must be > 0");
    if (s.perturbation.arity() != dim_ - 1)
        throw std::invalid_argument("perturbed superellipsoid: perturbation arity must be d-1");
    if (!s.perturbation.vanishes_at_origin())
        throw std::invalid_argument("perturbed superellipsoid: p(0) must be 0");
    if (s.perturbation.degree() >= 2 * s.base_exponent)
        throw std::invalid_argument("perturbed superellipsoid: deg p must be < 2a");

    for (int i = 0; i < dim_ - 1; ++i)
        perturb_grad_.push_back(s.perturbation.derivative(i));

    // Bounding box: iterate |x_i|^{2a} <= 1 + eta * max|p| over the box.
    double hw = 1.5;
    for (int it = 0; it < 4; ++it) {
        double pmax = 0.0;
        for (const auto& t : s.perturbation.terms()) {
            double m = std::fabs(t.coef);
            for (int d = 0; d < dim_ - 1; ++d) m *= ipow(hw, t.exps[d]);
            pmax += m;
        }
        hw = std::pow(1.0 + s.eta * pmax, 1.0 / (2.0 * s.base_exponent));
    }
    box_halfwidth_ = hw * 1.0001;
    circumradius_ = box_halfwidth_ * std::sqrt(double(dim_));

    // Smoothness guard: the gradient must not vanish on a boundary sample.
    const auto dirs = sphere_grid(dim_, dim_ == 2 ? 256 : 512);
    for (const auto& w : dirs) {
        double lo = 0.0, hi = 1.0;
        int grow = 0;
        Vec x(dim_);
        auto phi_at = [&](double r) {
            for (int d = 0; d < dim_; ++d) x[d] = r * w[d];
            return defining_value(x);
        };
        while (phi_at(hi) < 0.0 && grow++ < 24) hi *= 1.5;
        if (phi_at(hi) < 0.0)
            throw std::invalid_argument("perturbed superellipsoid: unbounded defining set");
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (phi_at(mid) < 0.0 ? lo : hi) = mid;
        }
        phi_at(0.5 * (lo + hi));
        if (norm(gradient(x)) < 1e-6)
            throw std::invalid_argument(
                "perturbed superellipsoid: gradient vanishes on boundary sample "
                "(eta too large)");
    }
}

void Domain::validate_polar() {
    const auto& s = std::get<PolarDomainSpec>(spec_);
    dim_ = s.dimension;
    if (dim_ != 2 && dim_ != 3)
        throw std::invalid_argument("polar domain: dimension must be 2 or 3");
    if (s.radius.max_coord() >= dim_)
        throw std::invalid_argument("polar domain: radius expression uses too many coordinates");
    const auto dirs = sphere_grid(dim_, dim_ == 2 ? 4096 : 8192);
    double hmin = 1e300, hmax = 0.0;
    for (const auto& w : dirs) {
        const double h = s.radius.eval(w);
        if (!(h > 1e-9))
            throw std::invalid_argument("polar domain: radius must be positive on the sphere");
        hmin = std::min(hmin, h);
        hmax = std::max(hmax, h);
    }
    polar_h_min_ = hmin;
    box_halfwidth_ = hmax * 1.0001;
    circumradius_ = hmax * 1.0001;
}

double Domain::defining_value(std::span<const double> x) const {
    if (int(x.size()) != dim_)
        throw std::invalid_argument("defining_value: dimension mismatch");
    switch (kind()) {
        case DomainKind::superellipsoid: {
            const auto& s = std::get<SuperellipsoidSpec>(spec_);
            double acc = 0.0;
            for (int d = 0; d < dim_; ++d) acc += ipow(x[d], 2 * s.exponents[d]);
            return acc - 1.0;
        }
        case DomainKind::perturbed: {
            const auto& s = std::get<PerturbedSuperellipsoidSpec>(spec_);
            double acc = 0.0;
            for (int d = 0; d < dim_; ++d) acc += ipow(x[d], 2 * s.base_exponent);
            return acc - s.eta * s.perturbation(x.subspan(0, dim_ - 1)) - 1.0;
        }
        case DomainKind::polar: {
            const auto& s = std::get<PolarDomainSpec>(spec_);
            const double r = norm(x);
            if (r == 0.0) return -polar_h_min_;
            Vec w(dim_);
            for (int d = 0; d < dim_; ++d) w[d] = x[d] / r;
            return r - s.radius.eval(w);
        }
    }
    throw std::logic_error("bad domain kind");
}

Vec Domain::gradient(std::span<const double> x) const {
    if (int(x.size()) != dim_)
        throw std::invalid_argument("gradient: dimension mismatch");
    Vec g(dim_, 0.0);
    switch (kind()) {
        case DomainKind::superellipsoid: {
            const auto& s = std::get<SuperellipsoidSpec>(spec_);
            for (int d = 0; d < dim_; ++d)
                g[d] = 2.0 * s.exponents[d] * ipow(x[d], 2 * s.exponents[d] - 1);
            return g;
        }
        case DomainKind::perturbed: {
            const auto& s = std::get<PerturbedSuperellipsoidSpec>(spec_);
            for (int d = 0; d < dim_; ++d)
                g[d] = 2.0 * s.base_exponent * ipow(x[d], 2 * s.base_exponent - 1);
            for (int d = 0; d < dim_ - 1; ++d)
                g[d] -= s.eta * perturb_grad_[d](x.subspan(0, dim_ - 1));
            return g;
        }
        case DomainKind::polar: {
            const auto& s = std::get<PolarDomainSpec>(spec_);
            const double r = norm(x);
            if (r == 0.0) throw std::invalid_argument("gradient: undefined at origin");
            Vec w(dim_);
            for (int d = 0; d < dim_; ++d) w[d] = x[d] / r;
            Vec hg(dim_);
            for (int d = 0; d < dim_; ++d) hg[d] = s.radius.derivative(d).eval(w);
            const double radial = dot(hg, w);
            for (int d = 0; d < dim_; ++d)
                g[d] = w[d] - (hg[d] - radial * w[d]) / r;
            return g;
        }
    }
    throw std::logic_error("bad domain kind");
}

// ---------------------------------------------------------------------------
// Charts

namespace {

/// Root of Phi along the inward normal line through x0 + u, bracketed in
/// [-2, 2]: bisection to localize, Newton to polish.
double normal_root(const Domain& dom, const Vec& point_on_plane, const Vec& n) {
    const int d = dom.dimension();
    Vec x(d);
    auto psi = [&](double s) {
        for (int i = 0; i < d; ++i) x[i] = point_on_plane[i] - s * n[i];
        return dom.defining_value(x);
    };
    const double p0 = psi(0.0);
    if (std::fabs(p0) < 1e-15) return 0.0;
    // psi decreases moving inward (s > 0), so the root sits on the side
    // indicated by the sign at s = 0.
    const double step = p0 > 0.0 ? 0.05 : -0.05;
    double lo = 0.0, hi = step;
    bool bracketed = false;
    while (std::fabs(hi) <= 2.0) {
        if (psi(hi) * p0 < 0.0) { bracketed = true; break; }
        lo = hi;
        hi += step;
    }
    if (!bracketed)
        throw std::runtime_error("chart graph: root solve failed to bracket in [-2, 2]");
    if (lo > hi) std::swap(lo, hi);
    for (int it = 0; it < 64; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid) > 0.0) lo = mid; else hi = mid;  // psi(lo) > 0 > psi(hi)
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        for (int i = 0; i < d; ++i) x[i] = point_on_plane[i] - s * n[i];
        const double val = dom.defining_value(x);
        const double slope = -dot(dom.gradient(x), n);
        if (slope == 0.0) break;
        const double snew = s - val / slope;
        if (snew > lo && snew < hi) s = snew; else break;
    }
    return s;
}

}  // namespace

double BoundaryChart::graph(std::span<const double> u) const {
    const int d = int(base_.size());
    if (int(u.size()) != d - 1) throw std::invalid_argument("chart graph: bad arity");
    Vec p = base_;
    for (int i = 0; i < d - 1; ++i)
        for (int j = 0; j < d; ++j) p[j] += u[i] * tangents_[i][j];
    return normal_root(domain_, p, normal_);
}

Vec BoundaryChart::lift(std::span<const double> u) const {
    const int d = int(base_.size());
    Vec p = base_;
    for (int i = 0; i < d - 1; ++i)
        for (int j = 0; j < d; ++j) p[j] += u[i] * tangents_[i][j];
    const double f = normal_root(domain_, p, normal_);
    for (int j = 0; j < d; ++j) p[j] -= f * normal_[j];
    return p;
}

BoundaryChart chart_at(const Domain& domain, std::span<const double> boundary_point) {
    const int d = domain.dimension();
    if (int(boundary_point.size()) != d)
        throw std::invalid_argument("chart_at: dimension mismatch");
    if (std::fabs(domain.defining_value(boundary_point)) >= 1e-10)
        throw std::invalid_argument("chart_at: point is not on the boundary");
    Vec g = domain.gradient(boundary_point);
    const double gn = norm(g);
    if (gn < 1e-8)
        throw std::invalid_argument("chart_at: degenerate boundary point (gradient ~ 0)");
    for (auto& c : g) c /= gn;

    auto frame = frame_with_last(g);
    std::vector<Vec> tangents(frame.begin(), frame.end() - 1);
    Vec x0(boundary_point.begin(), boundary_point.end());
    BoundaryChart chart(domain, x0, tangents, g, 0.0);

    // Validate the graph on rings of shrinking radius; keep the largest
    // radius where the root solve lands back on the boundary.
    const int nsurf = d - 1;
    double r = 1.2;
    const auto ring = sphere_grid(std::max(nsurf, 2), nsurf == 1 ? 2 : 16);
    for (int step = 0; step < 40; ++step, r *= 0.85) {
        bool ok = true;
        for (double scale : {1.0, 0.5, 0.25}) {
            for (const auto& w : ring) {
                Vec u(nsurf);
                for (int i = 0; i < nsurf; ++i) u[i] = scale * r * w[i];
                try {
                    Vec p = chart.lift(u);
                    if (std::fabs(domain.defining_value(p)) > 1e-10) ok = false;
                } catch (const std::runtime_error&) {
                    ok = false;
                }
                if (!ok) break;
            }
            if (!ok) break;
        }
        if (ok) return BoundaryChart(domain, x0, tangents, g, r);
    }
    throw std::runtime_error("chart_at: no validated chart radius found");
}

// ---------------------------------------------------------------------------
// Slices and support

namespace {

/// 1-D measure of { t : phi(line(t)) < 0 } for t in [-T, T]; coarse scan plus
/// bisection on every sign change.
double line_measure(const std::function<double(double)>& phi, double T, int coarse) {
    std::vector<double> breaks;
    double prev = phi(-T);
    double tprev = -T;
    const double h = 2.0 * T / coarse;
    for (int k = 1; k <= coarse; ++k) {
        const double t = -T + k * h;
        const double cur = phi(t);
        if ((prev < 0.0) != (cur < 0.0)) {
            double lo = tprev, hi = t, flo = prev;
            for (int it = 0; it < 52; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = phi(mid);
                if ((flo < 0.0) != (fm < 0.0)) hi = mid; else { lo = mid; flo = fm; }
            }
            breaks.push_back(0.5 * (lo + hi));
        }
        prev = cur;
        tprev = t;
    }
    // Endpoints are outside by construction, so inside runs pair up.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); i += 2)
        total += breaks[i + 1] - breaks[i];
    return total;
}

int axis_of(std::span<const double> v) {
    int axis = -1;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::fabs(std::fabs(v[i]) - 1.0) < 1e-12) {
            if (axis >= 0) return -1;
            axis = int(i);
        } else if (std::fabs(v[i]) > 1e-12) {
            return -1;
        }
    }
    return axis;
}

}  // namespace

double superellipsoid_volume(const std::vector<int>& exponents) {
    double prod = 1.0, ssum = 0.0;
    for (int a : exponents) {
        prod *= std::tgamma(1.0 + 0.5 / a);
        ssum += 0.5 / a;
    }
    return std::ldexp(1.0, int(exponents.size())) * prod / std::tgamma(1.0 + ssum);
}

double slice_measure(const Domain& domain, std::span<const double> direction,
                     double offset, double tol) {
    const int d = domain.dimension();
    if (int(direction.size()) != d)
        throw std::invalid_argument("slice_measure: dimension mismatch");
    if (std::fabs(norm(direction) - 1.0) > 1e-12)
        throw std::invalid_argument("slice_measure: direction must be a unit vector");

    if (domain.kind() == DomainKind::superellipsoid) {
        const int axis = axis_of(direction);
        if (axis >= 0) {
            const auto& exps = std::get<SuperellipsoidSpec>(domain.spec()).exponents;
            const double lambda = 1.0 - ipow(std::fabs(offset), 2 * exps[axis]);
            if (lambda <= 0.0) return 0.0;
            std::vector<int> rest;
            double gsum = 0.0;
            for (int i = 0; i < d; ++i)
                if (i != axis) {
                    rest.push_back(exps[i]);
                    gsum += 0.5 / exps[i];
                }
            if (rest.empty()) return 0.0;
            const double vcross = rest.size() == 1
                                      ? 2.0
                                      : superellipsoid_volume(rest);
            return std::pow(lambda, gsum) * vcross;
        }
    }

    const double T = domain.circumradius() * 1.01;
    Vec n(direction.begin(), direction.end());
    auto frame = frame_with_last(n);
    Vec x(d);
    if (d == 2) {
        const Vec& w = frame[0];
        auto phi = [&](double t) {
            for (int i = 0; i < 2; ++i) x[i] = offset * n[i] + t * w[i];
            return domain.defining_value(x);
        };
        return line_measure(phi, T, 1024);
    }
    if (d == 3) {
        const Vec& w1 = frame[0];
        const Vec& w2 = frame[1];
        auto len = [&](double t1) {
            Vec y(3);
            auto phi = [&](double t2) {
                for (int i = 0; i < 3; ++i)
                    y[i] = offset * n[i] + t1 * w1[i] + t2 * w2[i];
                return domain.defining_value(y);
            };
            return line_measure(phi, T, 512);
        };
        return adaptive_simpson(len, -T, T, tol, 18);
    }
    throw std::invalid_argument("slice_measure: numeric path supports d <= 3");
}

std::pair<double, double> support_interval(const Domain& domain,
                                           std::span<const double> direction) {
    const int d = domain.dimension();
    if (int(direction.size()) != d)
        throw std::invalid_argument("support_interval: dimension mismatch");
    if (domain.kind() == DomainKind::superellipsoid) {
        const int axis = axis_of(direction);
        if (axis >= 0) return {-1.0, 1.0};
    }

    // Star-shaped support: maximize rho(omega) * (omega . v) over the sphere.
    auto boundary_radius = [&](const Vec& w) {
        if (domain.kind() == DomainKind::polar)
            return std::get<PolarDomainSpec>(domain.spec()).radius.eval(w);
        Vec x(d);
        auto phi = [&](double r) {
            for (int i = 0; i < d; ++i) x[i] = r * w[i];
            return domain.defining_value(x);
        };
        double hi = 1.0;
        int grow = 0;
        while (phi(hi) < 0.0 && grow++ < 40) hi *= 1.5;
        double lo = 0.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (phi(mid) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    auto extremum = [&](int sign) {
        Vec v(direction.begin(), direction.end());
        if (sign < 0)
            for (auto& c : v) c = -c;
        if (d == 2) {
            const int K = 2048;
            double best = -1e300, best_th = 0.0;
            for (int k = 0; k < K; ++k) {
                const double th = 2.0 * std::numbers::pi * k / K;
                Vec w{std::cos(th), std::sin(th)};
                const double val = boundary_radius(w) * dot(w, v);
                if (val > best) { best = val; best_th = th; }
            }
            double lo = best_th - 2.0 * std::numbers::pi / K;
            double hi = best_th + 2.0 * std::numbers::pi / K;
            auto g = [&](double th) {
                Vec w{std::cos(th), std::sin(th)};
                return boundary_radius(w) * dot(w, v);
            };
            const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
            double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
            double f1 = g(x1), f2 = g(x2);
            for (int it = 0; it < 80; ++it) {
                if (f1 < f2) {
                    lo = x1; x1 = x2; f1 = f2;
                    x2 = lo + gr * (hi - lo); f2 = g(x2);
                } else {
                    hi = x2; x2 = x1; f2 = f1;
                    x1 = hi - gr * (hi - lo); f1 = g(x1);
                }
            }
            return g(0.5 * (lo + hi));
        }
        // d == 3: dense cover, then local refinement in a tangent frame.
        const auto dirs = sphere_grid(d, 8192);
        double best = -1e300;
        Vec bw;
        for (const auto& w : dirs) {
            const double val = boundary_radius(w) * dot(w, v);
            if (val > best) { best = val; bw = w; }
        }
        auto frame = frame_with_last(bw);
        double span = 0.05;
        for (int round = 0; round < 60; ++round) {
            bool improved = false;
            for (int i = 0; i < d - 1; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    Vec w(d);
                    double n2 = 0.0;
                    for (int j = 0; j < d; ++j) {
                        w[j] = bw[j] + sgn * span * frame[i][j];
                        n2 += w[j] * w[j];
                    }
                    const double inv = 1.0 / std::sqrt(n2);
                    for (auto& c : w) c *= inv;
                    const double val = boundary_radius(w) * dot(w, v);
                    if (val > best) { best = val; bw = w; improved = true; }
                }
            }
            if (!improved) span *= 0.5;
            if (span < 1e-12) break;
        }
        return best;
    };

    const double hi = extremum(+1);
    const double lo = -extremum(-1);
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Volume

McEstimate volume_qmc(const Domain& domain, std::uint64_t seed, std::size_t budget) {
    const int d = domain.dimension();
    const double hw = domain.box_halfwidth();
    const double boxvol = ipow(2.0 * hw, d);
    constexpr int kReplicates = 16;
    const std::size_t per_rep = std::max<std::size_t>(budget / kReplicates, 1);

    const bool batched = domain.kind() != DomainKind::polar;
    std::vector<double> estimates(kReplicates);
    for (int rep = 0; rep < kReplicates; ++rep) {
        HaltonSampler sampler(d, mix_seed(seed, 1000 + rep));
        constexpr std::size_t kBlock = 8192;
        std::vector<std::vector<double>> soa(d, std::vector<double>(kBlock));
        std::vector<double> vals(kBlock);
        std::vector<const double*> ptrs(d);
        std::vector<double*> mptrs(d);
        for (int i = 0; i < d; ++i) { ptrs[i] = soa[i].data(); mptrs[i] = soa[i].data(); }
        std::size_t remaining = per_rep, hits = 0;
        Vec x(d);
        while (remaining > 0) {
            const std::size_t nb = std::min(kBlock, remaining);
            sampler.fill(mptrs.data(), nb, -hw, hw);
            if (batched) {
                if (domain.kind() == DomainKind::superellipsoid) {
                    const auto& exps = std::get<SuperellipsoidSpec>(domain.spec()).exponents;
                    kernels::powered_sum(ptrs.data(), d, exps.data(), nb, vals.data());
                } else {
                    const auto& s = std::get<PerturbedSuperellipsoidSpec>(domain.spec());
                    std::vector<int> exps(d, s.base_exponent);
                    kernels::powered_sum(ptrs.data(), d, exps.data(), nb, vals.data());
                    const auto terms = s.perturbation.batch_terms();
                    std::vector<double> pv(nb);
                    kernels::poly_eval(ptrs.data(), d - 1, terms.data(), terms.size(), nb,
                                       pv.data());
                    for (std::size_t i = 0; i < nb; ++i)
                        vals[i] = vals[i] - s.eta * pv[i];
                }
                for (std::size_t i = 0; i < nb; ++i) hits += vals[i] < 1.0;
            } else {
                for (std::size_t i = 0; i < nb; ++i) {
                    for (int dd = 0; dd < d; ++dd) x[dd] = soa[dd][i];
                    hits += domain.inside(x);
                }
            }
            remaining -= nb;
        }
        estimates[rep] = boxvol * double(hits) / double(per_rep);
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= kReplicates;
    double var = 0.0;
    for (double e : estimates) var += (e - mean) * (e - mean);
    var /= (kReplicates - 1);
    return {mean, std::sqrt(var / kReplicates)};
}

double volume(const Domain& domain) {
    if (domain.kind() == DomainKind::superellipsoid)
        return superellipsoid_volume(std::get<SuperellipsoidSpec>(domain.spec()).exponents);
    // Fixed stream so that volume() is a pure function of the spec.
    return volume_qmc(domain, 0x67726f7774686cULL, 1u << 22).value;
}

// ---------------------------------------------------------------------------
// Shell condition

ShellConditionReport shell_condition_check(const Domain& domain,
                                           std::span<const double> deltas,
                                           std::uint64_t seed) {
    const int d = domain.dimension();
    const double hw = domain.box_halfwidth();
    ShellConditionReport report;
    report.all_hold = true;

    // Interior sample, reused across deltas.
    std::vector<Vec> xs;
    {
        HaltonSampler sampler(d, mix_seed(seed, 7));
        std::vector<std::vector<double>> soa(d, std::vector<double>(4096));
        std::vector<double*> mptrs(d);
        for (int i = 0; i < d; ++i) mptrs[i] = soa[i].data();
        sampler.fill(mptrs.data(), 4096, -hw, hw);
        Vec x(d);
        for (std::size_t i = 0; i < 4096 && xs.size() < 256; ++i) {
            for (int dd = 0; dd < d; ++dd) x[dd] = soa[dd][i];
            if (domain.inside(x)) xs.push_back(x);
        }
    }

    const double ladder[] = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    for (double delta : deltas) {
        std::vector<Vec> ys;
        {
            HaltonSampler sampler(d, mix_seed(seed, 11));
            std::vector<std::vector<double>> soa(d, std::vector<double>(256));
            std::vector<double*> mptrs(d);
            for (int i = 0; i < d; ++i) mptrs[i] = soa[i].data();
            sampler.fill(mptrs.data(), 256, -delta, delta);
            Vec y(d);
            for (std::size_t i = 0; i < 256 && ys.size() < 32; ++i) {
                for (int dd = 0; dd < d; ++dd) y[dd] = soa[dd][i];
                if (norm(y) < delta || delta == 0.0) ys.push_back(y);
            }
            if (ys.empty()) ys.push_back(Vec(d, 0.0));
        }
        ShellConditionRow row{delta, 0.0, false};
        for (double c : ladder) {
            bool ok = true;
            Vec z(d);
            for (const auto& x : xs) {
                for (const auto& y : ys) {
                    const double scale = 1.0 + c * delta;
                    for (int dd = 0; dd < d; ++dd) z[dd] = (x[dd] + y[dd]) / scale;
                    if (domain.defining_value(z) > 1e-12) { ok = false; break; }
                }
                if (!ok) break;
            }
            if (ok) {
                row.c = c;
                row.holds = true;
                break;
            }
        }
        report.all_hold = report.all_hold && row.holds;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace growthlab::geometry
