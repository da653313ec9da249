#include "growthlab/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace growthlab {

Polynomial::Polynomial(int arity, std::vector<Monomial> terms) : arity_(arity) {
    for (auto& t : terms) add_term(t.coef, t.exps);
}

void Polynomial::add_term(double coef, const std::vector<int>& exps) {
    if (int(exps.size()) != arity_)
        throw std::invalid_argument("Polynomial: exponent arity mismatch");
    for (int e : exps)
        if (e < 0) throw std::invalid_argument("Polynomial: negative exponent");
    if (coef == 0.0) return;
    for (auto& t : terms_) {
        if (t.exps == exps) {
            t.coef += coef;
            if (t.coef == 0.0) {
                t.exps = terms_.back().exps;
                t.coef = terms_.back().coef;
                terms_.pop_back();
            }
            return;
        }
    }
    terms_.push_back({coef, exps});
}

int Polynomial::degree() const {
    int deg = 0;
    for (const auto& t : terms_)
        deg = std::max(deg, std::accumulate(t.exps.begin(), t.exps.end(), 0));
    return deg;
}

bool Polynomial::vanishes_at_origin() const {
    for (const auto& t : terms_) {
        bool constant = true;
        for (int e : t.exps)
            if (e > 0) { constant = false; break; }
        if (constant && t.coef != 0.0) return false;
    }
    return true;
}

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
}  // namespace

double Polynomial::operator()(std::span<const double> x) const {
    if (int(x.size()) != arity_)
        throw std::invalid_argument("Polynomial: point arity mismatch");
    double acc = 0.0;
    for (const auto& t : terms_) {
        double mono = 1.0;
        for (int d = 0; d < arity_; ++d)
            if (t.exps[d]) mono *= ipow(x[d], t.exps[d]);
        acc = std::fma(t.coef, mono, acc);
    }
    return acc;
}

long double Polynomial::eval_ld(std::span<const long double> x) const {
    if (int(x.size()) != arity_)
        throw std::invalid_argument("Polynomial: point arity mismatch");
    long double acc = 0.0L;
    for (const auto& t : terms_) {
        long double mono = 1.0L;
        for (int d = 0; d < arity_; ++d)
            if (t.exps[d]) mono *= ipow(x[d], t.exps[d]);
        acc += (long double)t.coef * mono;
    }
    return acc;
}

Polynomial Polynomial::derivative(int var) const {
    if (var < 0 || var >= arity_)
        throw std::invalid_argument("Polynomial: derivative variable out of range");
    Polynomial out(arity_);
    for (const auto& t : terms_) {
        if (t.exps[var] == 0) continue;
        auto e = t.exps;
        const double c = t.coef * e[var];
        e[var] -= 1;
        out.add_term(c, e);
    }
    return out;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
    if (other.arity_ != arity_)
        throw std::invalid_argument("Polynomial: arity mismatch in +");
    Polynomial out = *this;
    for (const auto& t : other.terms_) out.add_term(t.coef, t.exps);
    return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
    if (other.arity_ != arity_)
        throw std::invalid_argument("Polynomial: arity mismatch in *");
    // Merge through a map; pairwise products can collide heavily.
    std::map<std::vector<int>, double> acc;
    for (const auto& a : terms_) {
        for (const auto& b : other.terms_) {
            std::vector<int> e(arity_);
            for (int d = 0; d < arity_; ++d) e[d] = a.exps[d] + b.exps[d];
            acc[e] += a.coef * b.coef;
        }
    }
    Polynomial out(arity_);
    for (const auto& [e, c] : acc)
        if (c != 0.0) out.terms_.push_back({c, e});
    return out;
}

Polynomial Polynomial::operator*(double scale) const {
    Polynomial out(arity_);
    if (scale == 0.0) return out;
    out.terms_ = terms_;
    for (auto& t : out.terms_) t.coef *= scale;
    return out;
}

Polynomial Polynomial::pow(int c) const {
    if (c < 0) throw std::invalid_argument("Polynomial: negative power");
    Polynomial acc(arity_);
    acc.terms_.push_back({1.0, std::vector<int>(arity_, 0)});
    for (int i = 0; i < c; ++i) acc = acc * (*this);
    return acc;
}

Polynomial Polynomial::axis_power(int arity, int var, int e, double coef) {
    Polynomial out(arity);
    std::vector<int> exps(arity, 0);
    exps.at(var) = e;
    out.add_term(coef, exps);
    return out;
}

Polynomial Polynomial::powered_sum(int arity, int k) {
    Polynomial out(arity);
    for (int d = 0; d < arity; ++d) {
        std::vector<int> exps(arity, 0);
        exps[d] = 2 * k;
        out.add_term(1.0, exps);
    }
    return out;
}

std::vector<kernels::Term> Polynomial::batch_terms() const {
    if (arity_ > 8)
        throw std::invalid_argument("Polynomial: batch evaluation limited to arity 8");
    std::vector<kernels::Term> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) {
        kernels::Term kt{};
        kt.coef = t.coef;
        for (int d = 0; d < arity_; ++d) {
            if (t.exps[d] > 255)
                throw std::invalid_argument("Polynomial: exponent too large for batch kernel");
            kt.exps[d] = std::uint8_t(t.exps[d]);
        }
        out.push_back(kt);
    }
    return out;
}

}  // namespace growthlab
