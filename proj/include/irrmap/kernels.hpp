#pragma once

#include <complex>
#include <cstddef>

namespace irrmap::kern {

using cdouble = std::complex<double>;

/// Arithmetic backends for the contraction kernels. `scalar` is the
/// portable reference; `avx2` is selected automatically at startup when
/// the CPU supports AVX2+FMA. The two are equivalence-tested.
enum class backend { scalar, avx2 };

backend active();
const char* name(backend b);

/// Force a backend (tests). Returns false if unsupported on this CPU.
bool force(backend b);

/// True if this build/CPU can run the given backend.
bool supported(backend b);

/// y[r] = sum_j q[r*cols + j] * b[j]   (complex, no conjugation)
void matvec(const cdouble* q, std::size_t rows, std::size_t cols,
            const cdouble* b, cdouble* y);

/// Fused two-vector variant sharing one pass over q:
/// y0[r] = sum_j q[r*cols + j] * b0[j],  y1[r] = sum_j q[r*cols + j] * b1[j]
void dual_matvec(const cdouble* q, std::size_t rows, std::size_t cols,
                 const cdouble* b0, const cdouble* b1,
                 cdouble* y0, cdouble* y1);

/// Unconjugated complex dot product sum_j a[j] * b[j].
cdouble cdot(const cdouble* a, const cdouble* b, std::size_t n);

namespace detail {
void matvec_scalar(const cdouble*, std::size_t, std::size_t, const cdouble*, cdouble*);
void dual_matvec_scalar(const cdouble*, std::size_t, std::size_t,
                        const cdouble*, const cdouble*, cdouble*, cdouble*);
cdouble cdot_scalar(const cdouble*, const cdouble*, std::size_t);
#if defined(__x86_64__) || defined(_M_X64)
void matvec_avx2(const cdouble*, std::size_t, std::size_t, const cdouble*, cdouble*);
void dual_matvec_avx2(const cdouble*, std::size_t, std::size_t,
                      const cdouble*, const cdouble*, cdouble*, cdouble*);
cdouble cdot_avx2(const cdouble*, const cdouble*, std::size_t);
#endif
} // namespace detail

} // namespace irrmap::kern
