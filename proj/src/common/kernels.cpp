#include "stabledrift/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace sd::kernels {

namespace {

inline double abs_pow(const cplx& z, double p) {
    double a = std::abs(z);
    if (p == 2.0) return a * a;
    if (p == 1.0) return a;
    return a == 0.0 ? 0.0 : std::pow(a, p);
}

}  // namespace

namespace serial {

void mul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void mul_real(cplx* out, const cplx* a, const double* w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * w[i];
}

void axpy(cplx* y, cplx a, const cplx* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(cplx* y, cplx a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] *= a;
}

double sum_abs_pow(const cplx* x, std::size_t n, double p) {
    return sum_of(n, [&](std::size_t i) { return abs_pow(x[i], p); });
}

double max_abs(const cplx* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

cplx dot(const cplx* a, const cplx* b, std::size_t n) {
    double re = sum_of(n, [&](std::size_t i) { return (a[i] * std::conj(b[i])).real(); });
    double im = sum_of(n, [&](std::size_t i) { return (a[i] * std::conj(b[i])).imag(); });
    return {re, im};
}

}  // namespace serial

namespace parallel {

void mul(cplx* out, const cplx* a, const cplx* b, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) out[i] = a[i] * b[i];
}

void mul_real(cplx* out, const cplx* a, const double* w, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) out[i] = a[i] * w[i];
}

void axpy(cplx* y, cplx a, const cplx* x, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) y[i] += a * x[i];
}

void scale(cplx* y, cplx a, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) y[i] *= a;
}

double sum_abs_pow(const cplx* x, std::size_t n, double p) {
    return sum_of(n, [&](std::size_t i) { return abs_pow(x[i], p); });
}

double max_abs(const cplx* x, std::size_t n) {
    double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

cplx dot(const cplx* a, const cplx* b, std::size_t n) {
    double re = sum_of(n, [&](std::size_t i) { return (a[i] * std::conj(b[i])).real(); });
    double im = sum_of(n, [&](std::size_t i) { return (a[i] * std::conj(b[i])).imag(); });
    return {re, im};
}

}  // namespace parallel

}  // namespace sd::kernels
