#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "stabledrift/errors.hpp"
#include "stabledrift/sampler.hpp"

using namespace sd;
using namespace sd::sampler;

namespace {
std::vector<double> column(const IncrementBatch& b, int a) {
    std::vector<double> c(b.n);
    for (std::size_t i = 0; i < b.n; ++i) c[i] = b(i, a);
    return c;
}
}  // namespace

TEST_CASE("same seed gives identical batches, independent of thread count") {
    StableParams p{1.5, 3, 42};
    auto a = sample_increments(p, 0.3, 10000);
    auto b = sample_increments(p, 0.3, 10000);
    CHECK(a.values == b.values);
    int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    auto c = sample_increments(p, 0.3, 10000);
    omp_set_num_threads(saved);
    CHECK(a.values == c.values);
    p.seed = 43;
    CHECK(sample_increments(p, 0.3, 10000).values != a.values);
}

TEST_CASE("increment mean is zero within three standard errors") {
    auto b = sample_increments({1.5, 3, 7}, 1.0, 100000);
    for (int a = 0; a < 3; ++a) {
        auto m = mean_stderr(column(b, a));
        CHECK(std::abs(m.mean) <= 3.0 * m.stderr);
    }
}

TEST_CASE("characteristic function at |k| = 1, dt = 1 matches exp(-1)") {
    auto b = sample_increments({1.5, 3, 11}, 1.0, 100000);
    auto e = empirical_charfn(b.values, 3, {0.0, 0.6, 0.8});
    CHECK(std::abs(e.value.real() - std::exp(-1.0)) <= 3.0 * e.stderr_re);
    CHECK(std::abs(e.value.imag()) <= 3.0 * e.stderr_im);
}

TEST_CASE("isotropy: rotated increments have the same characteristic function") {
    auto b = sample_increments({1.5, 3, 5}, 0.5, 100000);
    const double s = 1.0 / std::sqrt(2.0);
    auto e1 = empirical_charfn(b.values, 3, {1.2, 0.0, 0.0});
    auto e2 = empirical_charfn(b.values, 3, {1.2 * s, 0.0, 1.2 * s});
    CHECK(std::abs(e1.value - e2.value) <= 3.0 * std::hypot(e1.stderr, e2.stderr));
}

TEST_CASE("1D marginal passes KS against the Fourier-inverted stable CDF") {
    auto b = sample_increments({1.5, 3, 17}, 1.0, 10000);
    double pv = oracle::ks_pvalue(column(b, 1), [](double x) { return oracle::stable_cdf_1d(x, 1.5); });
    CHECK(pv > 0.01);
}

TEST_CASE("self-similarity: dt = c equals c^{1/alpha} times dt = 1 in law") {
    const double c = 0.2, alpha = 1.5;
    auto a = sample_increments({alpha, 3, 21}, c, 20000);
    auto b = sample_increments({alpha, 3, 22}, 1.0, 20000);
    auto xa = column(a, 0);
    auto xb = column(b, 0);
    for (auto& v : xb) v *= std::pow(c, 1.0 / alpha);
    CHECK(oracle::ks2_pvalue(xa, xb) > 0.01);
}

TEST_CASE("subordinator: Laplace transform and positivity") {
    auto s = sample_subordinator(0.75, 1.0, 100000, 3);
    std::vector<double> e(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        REQUIRE(s[i] > 0.0);
        e[i] = std::exp(-s[i]);
    }
    auto m = mean_stderr(e);
    CHECK(std::abs(m.mean - std::exp(-1.0)) <= 3.0 * m.stderr);
    CHECK(sample_subordinator(0.75, 1.0, 0, 3).empty());
    for (std::uint64_t seed = 100; seed < 110; ++seed)
        for (double v : sample_subordinator(0.6, 0.01, 1000, seed)) REQUIRE(v > 0.0);
}

TEST_CASE("parameter and capacity errors") {
    CHECK_THROWS_AS(sample_increments({2.0, 3, 1}, 1.0, 10), ParameterError);
    CHECK_THROWS_AS(sample_increments({1.0, 3, 1}, 1.0, 10), ParameterError);
    CHECK_THROWS_AS(sample_increments({1.5, 3, 1}, 1.0, 0), ParameterError);
    CHECK_THROWS_AS(sample_increments({1.5, 3, 1}, 0.0, 10), ParameterError);
    CHECK_THROWS_AS(sample_increments({1.5, 3, 1}, 1.0, std::size_t(-1) / 2), CapacityError);
    CHECK_THROWS_AS(sample_subordinator(0.4, 1.0, 10, 1), ParameterError);
    CHECK_THROWS_AS(sample_subordinator(1.0, 1.0, 10, 1), ParameterError);
}
