#include "irrmap/kernels.hpp"

#include <atomic>

namespace irrmap::kern {

namespace detail {

// std::complex operator* routes through __muldc3 on libstdc++; the kernels
// spell out the arithmetic so scalar and SIMD paths compute the same thing.
void matvec_scalar(const cdouble* q, std::size_t rows, std::size_t cols,
                   const cdouble* b, cdouble* y) {
    const double* qq = reinterpret_cast<const double*>(q);
    const double* bb = reinterpret_cast<const double*>(b);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = qq + 2 * r * cols;
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double qr = row[2 * j], qi = row[2 * j + 1];
            const double br = bb[2 * j], bi = bb[2 * j + 1];
            re += qr * br - qi * bi;
            im += qr * bi + qi * br;
        }
        y[r] = {re, im};
    }
}

void dual_matvec_scalar(const cdouble* q, std::size_t rows, std::size_t cols,
                        const cdouble* b0, const cdouble* b1,
                        cdouble* y0, cdouble* y1) {
    const double* qq = reinterpret_cast<const double*>(q);
    const double* b0d = reinterpret_cast<const double*>(b0);
    const double* b1d = reinterpret_cast<const double*>(b1);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = qq + 2 * r * cols;
        double re0 = 0.0, im0 = 0.0, re1 = 0.0, im1 = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            const double qr = row[2 * j], qi = row[2 * j + 1];
            {
                const double br = b0d[2 * j], bi = b0d[2 * j + 1];
                re0 += qr * br - qi * bi;
                im0 += qr * bi + qi * br;
            }
            {
                const double br = b1d[2 * j], bi = b1d[2 * j + 1];
                re1 += qr * br - qi * bi;
                im1 += qr * bi + qi * br;
            }
        }
        y0[r] = {re0, im0};
        y1[r] = {re1, im1};
    }
}

cdouble cdot_scalar(const cdouble* a, const cdouble* b, std::size_t n) {
    const double* ad = reinterpret_cast<const double*>(a);
    const double* bd = reinterpret_cast<const double*>(b);
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double ar = ad[2 * j], ai = ad[2 * j + 1];
        const double br = bd[2 * j], bi = bd[2 * j + 1];
        re += ar * br - ai * bi;
        im += ar * bi + ai * br;
    }
    return {re, im};
}

} // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::atomic<backend> g_backend{cpu_has_avx2() ? backend::avx2 : backend::scalar};

} // namespace

backend active() { return g_backend.load(std::memory_order_relaxed); }

const char* name(backend b) { return b == backend::avx2 ? "avx2" : "scalar"; }

bool supported(backend b) {
    if (b == backend::scalar) return true;
    return cpu_has_avx2();
}

bool force(backend b) {
    if (!supported(b)) return false;
    g_backend.store(b, std::memory_order_relaxed);
    return true;
}

void matvec(const cdouble* q, std::size_t rows, std::size_t cols,
            const cdouble* b, cdouble* y) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active() == backend::avx2) {
        detail::matvec_avx2(q, rows, cols, b, y);
        return;
    }
#endif
    detail::matvec_scalar(q, rows, cols, b, y);
}

void dual_matvec(const cdouble* q, std::size_t rows, std::size_t cols,
                 const cdouble* b0, const cdouble* b1,
                 cdouble* y0, cdouble* y1) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active() == backend::avx2) {
        detail::dual_matvec_avx2(q, rows, cols, b0, b1, y0, y1);
        return;
    }
#endif
    detail::dual_matvec_scalar(q, rows, cols, b0, b1, y0, y1);
}

cdouble cdot(const cdouble* a, const cdouble* b, std::size_t n) {
#if defined(__x86_64__) || defined(_M_X64)
    if (active() == backend::avx2) return detail::cdot_avx2(a, b, n);
#endif
    return detail::cdot_scalar(a, b, n);
}

} // namespace irrmap::kern
