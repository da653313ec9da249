#include "growthlab/kernels.hpp"

#include <atomic>
#include <stdexcept>

namespace growthlab::kernels {

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
std::atomic<Backend> g_backend{cpu_supports_avx2() ? Backend::avx2 : Backend::scalar};
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void force_backend(Backend b) {
    if (b == Backend::avx2 && !cpu_supports_avx2())
        throw std::invalid_argument("kernels: AVX2 backend not supported on this CPU");
    g_backend.store(b, std::memory_order_relaxed);
}

void powered_sum(const double* const* coords, int dim, const int* half_exps,
                 std::size_t n, double* out) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::powered_sum_avx2(coords, dim, half_exps, n, out);
#endif
    detail::powered_sum_scalar(coords, dim, half_exps, n, out);
}

void poly_eval(const double* const* coords, int arity, const Term* terms,
               std::size_t nterms, std::size_t n, double* out) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::poly_eval_avx2(coords, arity, terms, nterms, n, out);
#endif
    detail::poly_eval_scalar(coords, arity, terms, nterms, n, out);
}

void radius_sq(const double* const* coords, int dim, std::size_t n, double* out) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::radius_sq_avx2(coords, dim, n, out);
#endif
    detail::radius_sq_scalar(coords, dim, n, out);
}

void axpy_pow(const double* vals, double coef, const double* x, int c,
              std::size_t n, double* out) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::axpy_pow_avx2(vals, coef, x, c, n, out);
#endif
    detail::axpy_pow_scalar(vals, coef, x, c, n, out);
}

std::size_t count_below(const double* vals, const double* gate, double gate_bound,
                        double eps, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_backend() == Backend::avx2)
        return detail::count_below_avx2(vals, gate, gate_bound, eps, n);
#endif
    return detail::count_below_scalar(vals, gate, gate_bound, eps, n);
}

}  // namespace growthlab::kernels
