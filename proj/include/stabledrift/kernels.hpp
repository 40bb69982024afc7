#pragma once

// Data-parallel lattice kernels. `serial` is the reference implementation,
// `parallel` the OpenMP one used by the library. Reductions are pairwise with
// a fixed block size so results do not depend on the thread count.

#include <complex>
#include <cstddef>
#include <vector>

namespace sd::kernels {

using cplx = std::complex<double>;

inline constexpr std::size_t kPairwiseBase = 64;
inline constexpr std::size_t kBlock = 4096;

namespace detail {

template <class F>
double pairwise(std::size_t lo, std::size_t hi, const F& f) {
    std::size_t n = hi - lo;
    if (n <= kPairwiseBase) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += f(i);
        return s;
    }
    std::size_t mid = lo + n / 2;
    return pairwise(lo, mid, f) + pairwise(mid, hi, f);
}

}  // namespace detail

namespace serial {

void mul(cplx* out, const cplx* a, const cplx* b, std::size_t n);
void mul_real(cplx* out, const cplx* a, const double* w, std::size_t n);
void axpy(cplx* y, cplx a, const cplx* x, std::size_t n);
void scale(cplx* y, cplx a, std::size_t n);
double sum_abs_pow(const cplx* x, std::size_t n, double p);
double max_abs(const cplx* x, std::size_t n);
cplx dot(const cplx* a, const cplx* b, std::size_t n);

template <class F>
double sum_of(std::size_t n, const F& f) {
    return detail::pairwise(0, n, f);
}

}  // namespace serial

namespace parallel {

void mul(cplx* out, const cplx* a, const cplx* b, std::size_t n);
void mul_real(cplx* out, const cplx* a, const double* w, std::size_t n);
void axpy(cplx* y, cplx a, const cplx* x, std::size_t n);
void scale(cplx* y, cplx a, std::size_t n);
double sum_abs_pow(const cplx* x, std::size_t n, double p);
double max_abs(const cplx* x, std::size_t n);
cplx dot(const cplx* a, const cplx* b, std::size_t n);

template <class F>
double sum_of(std::size_t n, const F& f) {
    if (n <= kBlock) return detail::pairwise(0, n, f);
    const std::size_t nb = (n + kBlock - 1) / kBlock;
    std::vector<double> part(nb);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        std::size_t lo = static_cast<std::size_t>(b) * kBlock;
        std::size_t hi = lo + kBlock < n ? lo + kBlock : n;
        part[b] = detail::pairwise(lo, hi, f);
    }
    return detail::pairwise(0, nb, [&](std::size_t i) { return part[i]; });
}

}  // namespace parallel

}  // namespace sd::kernels
