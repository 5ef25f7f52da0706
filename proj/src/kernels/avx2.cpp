// AVX2 variants of the numeric kernels. Four-lane partial accumulators, so
// results can differ from the scalar reference only by summation order;
// equivalence tests bound that difference. Tails run scalar.

#include "ecgauth/kernels.hpp"

#include <immintrin.h>

namespace ecgauth::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

} // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double out = hsum(acc);
    for (; i < n; ++i)
        out += a[i] * b[i];
    return out;
}

double sum(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double out = hsum(acc);
    for (; i < n; ++i)
        out += a[i];
    return out;
}

CenteredMoments centered_moments(const double* a, const double* b, std::size_t n,
                                 double mean_a, double mean_b) {
    const __m256d va_mean = _mm256_set1_pd(mean_a);
    const __m256d vb_mean = _mm256_set1_pd(mean_b);
    __m256d sxy = _mm256_setzero_pd();
    __m256d sxx = _mm256_setzero_pd();
    __m256d syy = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d da = _mm256_sub_pd(_mm256_loadu_pd(a + i), va_mean);
        const __m256d db = _mm256_sub_pd(_mm256_loadu_pd(b + i), vb_mean);
        sxy = _mm256_add_pd(sxy, _mm256_mul_pd(da, db));
        sxx = _mm256_add_pd(sxx, _mm256_mul_pd(da, da));
        syy = _mm256_add_pd(syy, _mm256_mul_pd(db, db));
    }
    CenteredMoments m{hsum(sxy), hsum(sxx), hsum(syy)};
    for (; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        m.sxy += da * db;
        m.sxx += da * da;
        m.syy += db * db;
    }
    return m;
}

void scale_offset(const double* in, double* out, std::size_t n, double scale, double offset) {
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vo = _mm256_set1_pd(offset);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(in + i);
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(v, vs), vo));
    }
    for (; i < n; ++i)
        out[i] = in[i] * scale + offset;
}

} // namespace ecgauth::kernels::avx2
