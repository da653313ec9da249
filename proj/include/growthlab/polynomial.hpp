#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "growthlab/kernels.hpp"

namespace growthlab {

struct Monomial {
    double coef = 0.0;
    std::vector<int> exps;  // one exponent per variable
};

/// Sparse multivariate polynomial with unique multi-indices.
/// Holds the perturbation polynomials p(x), the stability bases q(x), s_i(x),
/// and everything the counterexample recipe assembles.
class Polynomial {
public:
    explicit Polynomial(int arity) : arity_(arity) {}
    Polynomial(int arity, std::vector<Monomial> terms);

    int arity() const { return arity_; }
    const std::vector<Monomial>& terms() const { return terms_; }
    int degree() const;
    bool vanishes_at_origin() const;

    double operator()(std::span<const double> x) const;
    long double eval_ld(std::span<const long double> x) const;

    Polynomial derivative(int var) const;
    Polynomial operator+(const Polynomial& other) const;
    Polynomial operator*(const Polynomial& other) const;
    Polynomial operator*(double scale) const;
    Polynomial pow(int c) const;

    /// x_{var}^e as a polynomial of the given arity.
    static Polynomial axis_power(int arity, int var, int e, double coef = 1.0);
    /// sum_i x_i^{2k} over all arity variables.
    static Polynomial powered_sum(int arity, int k);

    /// Term list for the batch kernels (requires arity <= 8, exponents <= 255).
    std::vector<kernels::Term> batch_terms() const;

private:
    void add_term(double coef, const std::vector<int>& exps);

    int arity_;
    std::vector<Monomial> terms_;
};

}  // namespace growthlab
