#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "stabledrift/errors.hpp"
#include "stabledrift/sde.hpp"

using namespace sd;
using namespace sd::sde;

namespace {
const TorusGrid g32(3, 8.0, 32);
drift::MollifiedDrift zero_b() { return drift::sample_bounded(drift::zero(), g32); }

std::vector<double> axis(const std::vector<double>& rows, int a) {
    std::vector<double> v(rows.size() / 3);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = rows[i * 3 + a];
    return v;
}

Vec3 rk4(const drift::DriftSpec& b, Vec3 x, double t, int n) {
    const double h = t / n;
    auto f = [&](const Vec3& y) {
        auto v = b(y);
        return Vec3{-v[0], -v[1], -v[2]};
    };
    auto add = [](const Vec3& a, const Vec3& d, double s) { return Vec3{a[0] + s * d[0], a[1] + s * d[1], a[2] + s * d[2]}; };
    for (int k = 0; k < n; ++k) {
        auto k1 = f(x), k2 = f(add(x, k1, h / 2)), k3 = f(add(x, k2, h / 2)), k4 = f(add(x, k3, h));
        for (int a = 0; a < 3; ++a) x[a] += h / 6 * (k1[a] + 2 * k2[a] + 2 * k3[a] + k4[a]);
    }
    return x;
}
}  // namespace

TEST_CASE("zero drift: recovered noise has the stable characteristic function") {
    auto e = integrate(zero_b(), 1.5, {0, 0, 0}, 0.5, 0.05, 40000, 3);
    auto probes = identify_driving_noise(e, 1.5, {{0.5, 0, 0}, {0, 1, 0}, {0.6, 0.8, 0.0}, {0, 0, 0}});
    for (const auto& p : probes) {
        CHECK(p.target == doctest::Approx(std::exp(-0.5 * std::pow(std::hypot(p.kappa[0], p.kappa[1], p.kappa[2]), 1.5))));
        CHECK(std::abs(p.w_hat - p.target) <= 4.0 * p.stderr + 1e-15);
    }
    CHECK(probes.back().w_hat == std::complex<double>(1.0, 0.0));
}

TEST_CASE("zero drift: recovered noise passes KS against the stable marginal") {
    auto e = integrate(zero_b(), 1.5, {0, 0, 0}, 0.5, 0.05, 10000, 5);
    auto z = axis(e.recovered_noise(e.n_times() - 1), 2);
    CHECK(oracle::ks_pvalue(z, [](double x) { return oracle::stable_cdf_1d(x, 1.5, 0.5); }) > 0.01);
}

TEST_CASE("different seeds agree in law, equal seeds agree exactly") {
    auto b = drift::sample_bounded(drift::bounded_smooth(1.0, 1.5, 0.5), g32);
    auto e1 = integrate(b, 1.5, {0.5, 0, 0}, 0.5, 0.05, 10000, 11);
    auto e2 = integrate(b, 1.5, {0.5, 0, 0}, 0.5, 0.05, 10000, 12);
    auto e3 = integrate(b, 1.5, {0.5, 0, 0}, 0.5, 0.05, 10000, 11);
    CHECK(e1.states == e3.states);
    CHECK(e1.drift_integral == e3.drift_integral);
    auto s1 = e1.slice(e1.n_times() - 1), s2 = e2.slice(e2.n_times() - 1);
    for (int a = 0; a < 3; ++a) CHECK(oracle::ks2_pvalue(axis(s1, a), axis(s2, a)) > 0.01);
}

TEST_CASE("frozen noise reduces to Euler for the ODE") {
    const TorusGrid g(3, 8.0, 64);
    auto spec = drift::bounded_smooth(1.0, 1.5, 0.5);
    auto b = drift::sample_bounded(spec, g);
    IntegrateOptions opt;
    opt.freeze_noise = true;
    Vec3 x0{0.7, -0.4, 0.2};
    auto e = integrate(b, 1.5, x0, 0.5, 0.001, 4, 1, opt);
    Vec3 ref = rk4(spec, x0, 0.5, 1000);
    auto last = e.n_times() - 1;
    for (std::size_t p = 0; p < 4; ++p)
        for (int a = 0; a < 3; ++a) CHECK(std::abs(e.states[e.at(p, last, a)] - ref[a]) < 1e-2);
    // X_t - x0 = -int b ds exactly when Z = 0
    for (double v : e.recovered_noise(last)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("mean of f = 1 is exact") {
    auto e = integrate(zero_b(), 1.5, {0, 0, 0}, 0.2, 0.05, 1000, 2);
    auto m = mc_mean(e, e.n_times() - 1, [](const Vec3&) { return 1.0; });
    CHECK(m.mean == 1.0);
    CHECK(m.stderr == 0.0);
}

TEST_CASE("drift integral accumulates over recorded times") {
    auto b = drift::sample_bounded(drift::bounded_smooth(1.0, 1.5, 0.5), g32);
    IntegrateOptions opt;
    opt.record_stride = 2;
    auto e = integrate(b, 1.5, {0.5, 0.5, 0}, 0.4, 0.05, 200, 4, opt);
    REQUIRE(e.n_times() == 5);
    for (std::size_t p = 0; p < e.n_paths; ++p) {
        for (std::size_t ti = 1; ti < e.n_times(); ++ti) {
            double prev = e.abs_drift_integral[p * e.n_times() + ti - 1];
            double cur = e.abs_drift_integral[p * e.n_times() + ti];
            REQUIRE(cur >= prev);
            double d = 0.0;
            for (int a = 0; a < 3; ++a)
                d += std::pow(e.drift_integral[e.at(p, ti, a)] - e.drift_integral[e.at(p, ti - 1, a)], 2);
            REQUIRE(std::sqrt(d) <= cur - prev + 1e-12);
        }
    }
}

TEST_CASE("contraction ratio vanishes without drift") {
    auto w = weighted::make_weight(g32, 0.675, 1.5);
    CHECK(contraction_ratio_H(zero_b(), 1.5, w, 4.5, 0.1, {4, 3, 1, {1, 0, 0}, 1}) == 0.0);
}

TEST_CASE("integrator guards") {
    CHECK_THROWS_AS(integrate(zero_b(), 1.5, {0, 0, 0}, 0.5, 0.05, 0, 1), ParameterError);
    CHECK_THROWS_AS(integrate(zero_b(), 1.5, {0, 0, 0}, 0.5, 0.3, 10, 1), ParameterError);
    auto big = drift::sample_bounded(drift::bounded_smooth(500.0, 1.5, 0.5), g32);
    CHECK_THROWS_AS(integrate(big, 1.5, {0, 0, 0}, 0.5, 0.05, 10, 1), ParameterError);
}

TEST_CASE("char-function CSV layout") {
    auto e = integrate(zero_b(), 1.5, {0, 0, 0}, 0.5, 0.05, 100, 3);
    auto probes = identify_driving_noise(e, 1.5, {{0.5, 0, 0}});
    std::ostringstream os;
    write_charfn_csv(os, probes, 3);
    auto s = os.str();
    CHECK(s.rfind("kappa,t,re,im,stderr", 0) == 0);
}
