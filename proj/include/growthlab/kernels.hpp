#pragma once

#include <cstddef>
#include <cstdint>

namespace growthlab::kernels {

/// Batch kernels for the data-parallel inner loops: even-power sums for
/// domain membership, multivariate monomial accumulation for sublevel
/// sampling, and threshold counting.
///
/// Every kernel is specified as an exact sequence of IEEE operations per
/// element (mul / add / fma in a fixed order), so the scalar reference and
/// the AVX2 variant produce bit-identical outputs.  Equivalence is enforced
/// by tests; runtime selection never changes results.

enum class Backend { scalar, avx2 };

/// Backend chosen at startup from CPU capabilities (AVX2+FMA when present).
Backend active_backend();

/// Force a backend; throws std::invalid_argument if unsupported on this CPU.
void force_backend(Backend b);

bool cpu_supports_avx2();

/// One monomial term of a polynomial in `arity` variables.
struct Term {
    double coef;
    std::uint8_t exps[8];  // exponents per variable, arity <= 8
};

/// out[i] = sum_d coords[d][i]^(2*half_exps[d]), d = 0..dim-1.
void powered_sum(const double* const* coords, int dim, const int* half_exps,
                 std::size_t n, double* out);

/// out[i] = sum over terms of coef * prod_d coords[d][i]^exps[d].
/// Terms are accumulated with fma in term order.
void poly_eval(const double* const* coords, int arity, const Term* terms,
               std::size_t nterms, std::size_t n, double* out);

/// out[i] = sum_d coords[d][i]^2.
void radius_sq(const double* const* coords, int dim, std::size_t n, double* out);

/// out[i] = (vals[i] + coef * x[i])^c, c >= 1 integer; in place allowed.
void axpy_pow(const double* vals, double coef, const double* x, int c,
              std::size_t n, double* out);

/// Count of i with |vals[i]| < eps and gate[i] < gate_bound.
/// Pass gate == nullptr to count on vals alone.
std::size_t count_below(const double* vals, const double* gate, double gate_bound,
                        double eps, std::size_t n);

}  // namespace growthlab::kernels

namespace growthlab::kernels::detail {
// Reference implementations (always compiled).
void powered_sum_scalar(const double* const* coords, int dim, const int* half_exps,
                        std::size_t n, double* out);
void poly_eval_scalar(const double* const* coords, int arity, const Term* terms,
                      std::size_t nterms, std::size_t n, double* out);
void radius_sq_scalar(const double* const* coords, int dim, std::size_t n, double* out);
void axpy_pow_scalar(const double* vals, double coef, const double* x, int c,
                     std::size_t n, double* out);
std::size_t count_below_scalar(const double* vals, const double* gate, double gate_bound,
                               double eps, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
void powered_sum_avx2(const double* const* coords, int dim, const int* half_exps,
                      std::size_t n, double* out);
void poly_eval_avx2(const double* const* coords, int arity, const Term* terms,
                    std::size_t nterms, std::size_t n, double* out);
void radius_sq_avx2(const double* const* coords, int dim, std::size_t n, double* out);
void axpy_pow_avx2(const double* vals, double coef, const double* x, int c,
                   std::size_t n, double* out);
std::size_t count_below_avx2(const double* vals, const double* gate, double gate_bound,
                             double eps, std::size_t n);
#endif
}  // namespace growthlab::kernels::detail
