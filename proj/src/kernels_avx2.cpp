// AVX2 variants of the double-precision kernels. Compiled with -mavx2 in its
// own translation unit; only reached through runtime dispatch after a cpuid
// check, so the rest of the binary stays baseline-ISA clean.
#include "arena/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <limits>

namespace arena::kernels {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline __m256d abs_pd(__m256d v) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffll));
    return _mm256_and_pd(v, mask);
}

double k_sum(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
    double out = hsum(acc);
    for (; i < n; ++i) out += v[i];
    return out;
}

double k_sum_sq(const double* v, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d x = _mm256_loadu_pd(v + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(x, x));
    }
    double out = hsum(acc);
    for (; i < n; ++i) out += v[i] * v[i];
    return out;
}

double k_dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    double out = hsum(acc);
    for (; i < n; ++i) out += a[i] * b[i];
    return out;
}

double k_sum_abs_diff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, abs_pd(d));
    }
    double out = hsum(acc);
    for (; i < n; ++i) out += std::fabs(a[i] - b[i]);
    return out;
}

double k_sum_sq_diff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double out = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        out += d * d;
    }
    return out;
}

double k_sum_abs_rel_diff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d av = _mm256_loadu_pd(a + i);
        const __m256d d = _mm256_sub_pd(av, _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_div_pd(abs_pd(d), abs_pd(av)));
    }
    double out = hsum(acc);
    for (; i < n; ++i) out += std::fabs(a[i] - b[i]) / std::fabs(a[i]);
    return out;
}

void k_min_max(const double* v, std::size_t n, double* mn, double* mx) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    if (n >= 4) {
        __m256d vlo = _mm256_loadu_pd(v);
        __m256d vhi = vlo;
        for (i = 4; i + 4 <= n; i += 4) {
            const __m256d x = _mm256_loadu_pd(v + i);
            vlo = _mm256_min_pd(vlo, x);
            vhi = _mm256_max_pd(vhi, x);
        }
        alignas(32) double tmp[4];
        _mm256_store_pd(tmp, vlo);
        for (double t : tmp) lo = t < lo ? t : lo;
        _mm256_store_pd(tmp, vhi);
        for (double t : tmp) hi = t > hi ? t : hi;
    }
    for (; i < n; ++i) {
        if (v[i] < lo) lo = v[i];
        if (v[i] > hi) hi = v[i];
    }
    *mn = lo;
    *mx = hi;
}

void k_weighted_accumulate(double* acc, double w, const double* x, std::size_t n) {
    const __m256d wv = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r =
            _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(wv, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(acc + i, r);
    }
    for (; i < n; ++i) acc[i] += w * x[i];
}

constexpr KernelTable kAvx2 = {
    k_sum, k_sum_sq, k_dot, k_sum_abs_diff, k_sum_sq_diff, k_sum_abs_rel_diff,
    k_min_max, k_weighted_accumulate,
};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace arena::kernels
