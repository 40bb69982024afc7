#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "stabledrift/kernels.hpp"

namespace k = sd::kernels;
using cplx = std::complex<double>;

namespace {

struct Data {
    std::vector<cplx> a, b, out;
    std::vector<double> w;

    explicit Data(std::size_t n) : a(n), b(n), out(n), w(n) {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> g;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = {g(rng), g(rng)};
            b[i] = {g(rng), g(rng)};
            w[i] = g(rng);
        }
    }
};

template <bool Par>
void BM_mul(benchmark::State& st) {
    Data d(st.range(0));
    for (auto _ : st) {
        if constexpr (Par) k::parallel::mul(d.out.data(), d.a.data(), d.b.data(), d.a.size());
        else k::serial::mul(d.out.data(), d.a.data(), d.b.data(), d.a.size());
        benchmark::DoNotOptimize(d.out.data());
    }
    st.SetBytesProcessed(st.iterations() * st.range(0) * 3 * sizeof(cplx));
}

template <bool Par>
void BM_mul_real(benchmark::State& st) {
    Data d(st.range(0));
    for (auto _ : st) {
        if constexpr (Par) k::parallel::mul_real(d.out.data(), d.a.data(), d.w.data(), d.a.size());
        else k::serial::mul_real(d.out.data(), d.a.data(), d.w.data(), d.a.size());
        benchmark::DoNotOptimize(d.out.data());
    }
}

template <bool Par>
void BM_axpy(benchmark::State& st) {
    Data d(st.range(0));
    for (auto _ : st) {
        if constexpr (Par) k::parallel::axpy(d.out.data(), cplx(0.5, -1.0), d.a.data(), d.a.size());
        else k::serial::axpy(d.out.data(), cplx(0.5, -1.0), d.a.data(), d.a.size());
        benchmark::DoNotOptimize(d.out.data());
    }
}

template <bool Par>
void BM_sum_abs_pow(benchmark::State& st) {
    Data d(st.range(0));
    for (auto _ : st) {
        double s = Par ? k::parallel::sum_abs_pow(d.a.data(), d.a.size(), 4.5)
                       : k::serial::sum_abs_pow(d.a.data(), d.a.size(), 4.5);
        benchmark::DoNotOptimize(s);
    }
}

template <bool Par>
void BM_max_abs(benchmark::State& st) {
    Data d(st.range(0));
    for (auto _ : st) {
        double s = Par ? k::parallel::max_abs(d.a.data(), d.a.size()) : k::serial::max_abs(d.a.data(), d.a.size());
        benchmark::DoNotOptimize(s);
    }
}

template <bool Par>
void BM_dot(benchmark::State& st) {
    Data d(st.range(0));
    for (auto _ : st) {
        cplx s = Par ? k::parallel::dot(d.a.data(), d.b.data(), d.a.size())
                     : k::serial::dot(d.a.data(), d.b.data(), d.a.size());
        benchmark::DoNotOptimize(s);
    }
}

// 32^3 and 64^3 lattices
#define SIZES ->Arg(32768)->Arg(262144)->UseRealTime()

}  // namespace

BENCHMARK(BM_mul<false>) SIZES;
BENCHMARK(BM_mul<true>) SIZES;
BENCHMARK(BM_mul_real<false>) SIZES;
BENCHMARK(BM_mul_real<true>) SIZES;
BENCHMARK(BM_axpy<false>) SIZES;
BENCHMARK(BM_axpy<true>) SIZES;
BENCHMARK(BM_sum_abs_pow<false>) SIZES;
BENCHMARK(BM_sum_abs_pow<true>) SIZES;
BENCHMARK(BM_max_abs<false>) SIZES;
BENCHMARK(BM_max_abs<true>) SIZES;
BENCHMARK(BM_dot<false>) SIZES;
BENCHMARK(BM_dot<true>) SIZES;

BENCHMARK_MAIN();
