#include "growthlab/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

// AVX2+FMA variants.  Operation sequence per lane mirrors kernels_scalar.cpp
// exactly: pow by squaring, additions in dimension/term order, fma for the
// same products the scalar path fuses.  Tails fall through to the scalar code.

namespace growthlab::kernels::detail {

namespace {

inline __m256d pow_u4(__m256d x, unsigned e) {
    __m256d acc = _mm256_set1_pd(1.0);
    __m256d base = x;
    while (e) {
        if (e & 1u) acc = _mm256_mul_pd(acc, base);
        e >>= 1u;
        if (e) base = _mm256_mul_pd(base, base);
    }
    return acc;
}

inline __m256d abs4(__m256d x) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return _mm256_and_pd(x, mask);
}

}  // namespace

void powered_sum_avx2(const double* const* coords, int dim, const int* half_exps,
                      std::size_t n, double* out) {
    const std::size_t nv = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nv; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (int d = 0; d < dim; ++d) {
            const __m256d x = _mm256_loadu_pd(coords[d] + i);
            acc = _mm256_add_pd(acc, pow_u4(x, 2u * unsigned(half_exps[d])));
        }
        _mm256_storeu_pd(out + i, acc);
    }
    if (nv < n) {
        const double* tail[8];
        for (int d = 0; d < dim; ++d) tail[d] = coords[d] + nv;
        powered_sum_scalar(tail, dim, half_exps, n - nv, out + nv);
    }
}

void poly_eval_avx2(const double* const* coords, int arity, const Term* terms,
                    std::size_t nterms, std::size_t n, double* out) {
    const std::size_t nv = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nv; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t t = 0; t < nterms; ++t) {
            __m256d mono = _mm256_set1_pd(1.0);
            for (int d = 0; d < arity; ++d) {
                const unsigned e = terms[t].exps[d];
                if (e) {
                    const __m256d x = _mm256_loadu_pd(coords[d] + i);
                    mono = _mm256_mul_pd(mono, pow_u4(x, e));
                }
            }
            acc = _mm256_fmadd_pd(_mm256_set1_pd(terms[t].coef), mono, acc);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    if (nv < n) {
        const double* tail[8];
        for (int d = 0; d < arity; ++d) tail[d] = coords[d] + nv;
        poly_eval_scalar(tail, arity, terms, nterms, n - nv, out + nv);
    }
}

void radius_sq_avx2(const double* const* coords, int dim, std::size_t n, double* out) {
    const std::size_t nv = n & ~std::size_t(3);
    for (std::size_t i = 0; i < nv; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (int d = 0; d < dim; ++d) {
            const __m256d x = _mm256_loadu_pd(coords[d] + i);
            acc = _mm256_fmadd_pd(x, x, acc);
        }
        _mm256_storeu_pd(out + i, acc);
    }
    if (nv < n) {
        const double* tail[8];
        for (int d = 0; d < dim; ++d) tail[d] = coords[d] + nv;
        radius_sq_scalar(tail, dim, n - nv, out + nv);
    }
}

void axpy_pow_avx2(const double* vals, double coef, const double* x, int c,
                   std::size_t n, double* out) {
    const std::size_t nv = n & ~std::size_t(3);
    const __m256d vc = _mm256_set1_pd(coef);
    for (std::size_t i = 0; i < nv; i += 4) {
        const __m256d w =
            _mm256_fmadd_pd(vc, _mm256_loadu_pd(x + i), _mm256_loadu_pd(vals + i));
        _mm256_storeu_pd(out + i, pow_u4(w, unsigned(c)));
    }
    if (nv < n) axpy_pow_scalar(vals + nv, coef, x + nv, c, n - nv, out + nv);
}

std::size_t count_below_avx2(const double* vals, const double* gate, double gate_bound,
                             double eps, std::size_t n) {
    const std::size_t nv = n & ~std::size_t(3);
    const __m256d veps = _mm256_set1_pd(eps);
    std::size_t count = 0;
    if (gate) {
        const __m256d vgb = _mm256_set1_pd(gate_bound);
        for (std::size_t i = 0; i < nv; i += 4) {
            const __m256d hit = _mm256_and_pd(
                _mm256_cmp_pd(abs4(_mm256_loadu_pd(vals + i)), veps, _CMP_LT_OQ),
                _mm256_cmp_pd(_mm256_loadu_pd(gate + i), vgb, _CMP_LT_OQ));
            count += std::size_t(_mm_popcnt_u32(unsigned(_mm256_movemask_pd(hit))));
        }
        count += count_below_scalar(vals + nv, gate + nv, gate_bound, eps, n - nv);
    } else {
        for (std::size_t i = 0; i < nv; i += 4) {
            const __m256d hit = _mm256_cmp_pd(abs4(_mm256_loadu_pd(vals + i)), veps, _CMP_LT_OQ);
            count += std::size_t(_mm_popcnt_u32(unsigned(_mm256_movemask_pd(hit))));
        }
        count += count_below_scalar(vals + nv, nullptr, gate_bound, eps, n - nv);
    }
    return count;
}

}  // namespace growthlab::kernels::detail

#endif  // x86_64
