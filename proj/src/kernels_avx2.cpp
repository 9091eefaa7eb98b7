// AVX2+FMA variants of the contraction kernels. This translation unit is
// compiled with -mavx2 -mfma and must only be entered after the runtime
// CPU check in kernels.cpp.

#if defined(__x86_64__) || defined(_M_X64)

#include "irrmap/kernels.hpp"

#include <immintrin.h>

namespace irrmap::kern::detail {

namespace {

// Two interleaved complex products at once: (a*b) with a,b = [r0 i0 r1 i1].
inline __m256d cmul2(__m256d a, __m256d b) {
    const __m256d breal = _mm256_movedup_pd(b);
    const __m256d bimag = _mm256_permute_pd(b, 0xF);
    const __m256d aswap = _mm256_permute_pd(a, 0x5);
    const __m256d t = _mm256_mul_pd(aswap, bimag);
    return _mm256_fmaddsub_pd(a, breal, t);
}

inline cdouble hsum2(__m256d acc) {
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    alignas(16) double out[2];
    _mm_store_pd(out, s);
    return {out[0], out[1]};
}

} // namespace

void matvec_avx2(const cdouble* q, std::size_t rows, std::size_t cols,
                 const cdouble* b, cdouble* y) {
    const double* qq = reinterpret_cast<const double*>(q);
    const double* bb = reinterpret_cast<const double*>(b);
    const std::size_t pairs = cols / 2;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = qq + 2 * r * cols;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t p = 0; p < pairs; ++p) {
            const __m256d qv = _mm256_loadu_pd(row + 4 * p);
            const __m256d bv = _mm256_loadu_pd(bb + 4 * p);
            acc = _mm256_add_pd(acc, cmul2(qv, bv));
        }
        cdouble s = hsum2(acc);
        if (cols & 1) {
            const std::size_t j = cols - 1;
            const double qr = row[2 * j], qi = row[2 * j + 1];
            const double br = bb[2 * j], bi = bb[2 * j + 1];
            s += cdouble{qr * br - qi * bi, qr * bi + qi * br};
        }
        y[r] = s;
    }
}

void dual_matvec_avx2(const cdouble* q, std::size_t rows, std::size_t cols,
                      const cdouble* b0, const cdouble* b1,
                      cdouble* y0, cdouble* y1) {
    const double* qq = reinterpret_cast<const double*>(q);
    const double* b0d = reinterpret_cast<const double*>(b0);
    const double* b1d = reinterpret_cast<const double*>(b1);
    const std::size_t pairs = cols / 2;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = qq + 2 * r * cols;
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        for (std::size_t p = 0; p < pairs; ++p) {
            const __m256d qv = _mm256_loadu_pd(row + 4 * p);
            acc0 = _mm256_add_pd(acc0, cmul2(qv, _mm256_loadu_pd(b0d + 4 * p)));
            acc1 = _mm256_add_pd(acc1, cmul2(qv, _mm256_loadu_pd(b1d + 4 * p)));
        }
        cdouble s0 = hsum2(acc0);
        cdouble s1 = hsum2(acc1);
        if (cols & 1) {
            const std::size_t j = cols - 1;
            const double qr = row[2 * j], qi = row[2 * j + 1];
            s0 += cdouble{qr * b0d[2 * j] - qi * b0d[2 * j + 1],
                          qr * b0d[2 * j + 1] + qi * b0d[2 * j]};
            s1 += cdouble{qr * b1d[2 * j] - qi * b1d[2 * j + 1],
                          qr * b1d[2 * j + 1] + qi * b1d[2 * j]};
        }
        y0[r] = s0;
        y1[r] = s1;
    }
}

cdouble cdot_avx2(const cdouble* a, const cdouble* b, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    const std::size_t pairs = n / 2;
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t p = 0; p < pairs; ++p) {
        acc = _mm256_add_pd(acc, cmul2(_mm256_loadu_pd(ad + 4 * p), _mm256_loadu_pd(bd + 4 * p)));
    }
    cdouble s = hsum2(acc);
    if (n & 1) {
        const std::size_t j = n - 1;
        const double ar = ad[2 * j], ai = ad[2 * j + 1];
        const double br = bd[2 * j], bi = bd[2 * j + 1];
        s += cdouble{ar * br - ai * bi, ar * bi + ai * br};
    }
    return s;
}

} // namespace irrmap::kern::detail

#endif // x86_64
