#include "growthlab/kernels.hpp"

#include <cmath>

// Reference kernels.  Each element is a fixed sequence of correctly rounded
// IEEE operations (pow by squaring with 1.0 seed, fma accumulation), matching
// the AVX2 variants operation for operation.  This file is compiled with
// -ffp-contract=off so the compiler cannot fuse or reorder anything.

namespace growthlab::kernels::detail {

namespace {

// x^e by binary exponentiation; the multiply sequence depends only on e.
inline double pow_u(double x, unsigned e) {
    double acc = 1.0;
    double base = x;
    while (e) {
        if (e & 1u) acc = acc * base;
        e >>= 1u;
        if (e) base = base * base;
    }
    return acc;
}

}  // namespace

void powered_sum_scalar(const double* const* coords, int dim, const int* half_exps,
                        std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int d = 0; d < dim; ++d)
            acc = acc + pow_u(coords[d][i], 2u * unsigned(half_exps[d]));
        out[i] = acc;
    }
}

void poly_eval_scalar(const double* const* coords, int arity, const Term* terms,
                      std::size_t nterms, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t < nterms; ++t) {
            double mono = 1.0;
            for (int d = 0; d < arity; ++d) {
                const unsigned e = terms[t].exps[d];
                if (e) mono = mono * pow_u(coords[d][i], e);
            }
            acc = std::fma(terms[t].coef, mono, acc);
        }
        out[i] = acc;
    }
}

void radius_sq_scalar(const double* const* coords, int dim, std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double x = coords[d][i];
            acc = std::fma(x, x, acc);
        }
        out[i] = acc;
    }
}

void axpy_pow_scalar(const double* vals, double coef, const double* x, int c,
                     std::size_t n, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        const double w = std::fma(coef, x[i], vals[i]);
        out[i] = pow_u(w, unsigned(c));
    }
}

std::size_t count_below_scalar(const double* vals, const double* gate, double gate_bound,
                               double eps, std::size_t n) {
    std::size_t count = 0;
    if (gate) {
        for (std::size_t i = 0; i < n; ++i)
            count += (std::fabs(vals[i]) < eps) && (gate[i] < gate_bound);
    } else {
        for (std::size_t i = 0; i < n; ++i)
            count += std::fabs(vals[i]) < eps;
    }
    return count;
}

}  // namespace growthlab::kernels::detail
