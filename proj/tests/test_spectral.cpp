#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "stabledrift/errors.hpp"
#include "stabledrift/kernels.hpp"
#include "stabledrift/radial.hpp"
#include "stabledrift/spectral.hpp"

using namespace sd;
using doctest::Approx;

namespace {
const TorusGrid g16(3, 8.0, 16);

double rel(const Field& a, const Field& b) { return norm2(a - b) / norm2(b); }

Field plane_wave(const TorusGrid& g, const Vec3& k) {
    return Field::from_function(g, [&](const Vec3& x) { return cplx(std::cos(k[0] * x[0] + k[1] * x[1] + k[2] * x[2])); });
}
}  // namespace

TEST_CASE("fractional Laplacian kills constants and scales eigenmodes") {
    auto A = spectral::frac_laplacian(g16, 1.5);
    CHECK(norm_inf(A(Field::constant(g16, 3.0))) < 1e-12);
    const double q = oracle::pi / 8.0;
    Vec3 k{q, 2 * q, 0.0};
    auto f = plane_wave(g16, k);
    double lam = std::pow(std::hypot(k[0], k[1]), 1.5);
    CHECK(rel(A(f), lam * f) < 1e-12);
}

TEST_CASE("alpha close to 2 approaches minus the Laplacian") {
    auto f = probes::smooth(g16, 3, 2.0);
    auto A = spectral::frac_laplacian(g16, 1.999);
    auto lap = Operator::multiplier(g16, [](const Vec3& k) { return cplx(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }, "k2");
    CHECK(rel(A(f), lap(f)) < 1e-2);
}

TEST_CASE("resolvent inverts mu + A and maps 1 to 1/mu") {
    auto f = probes::gaussian(g16, 9);
    for (double mu : {0.1, 1.0, 10.0}) {
        auto R = spectral::resolvent_power(g16, 1.5, mu, 1.0);
        auto M = spectral::mass_power(g16, 1.5, cplx(mu), 1.0);
        CHECK(rel(R(M(f)), f) < 1e-12);
        CHECK(norm_inf(R(Field::constant(g16, 1.0)) - Field::constant(g16, 1.0 / mu)) < 1e-12);
    }
}

TEST_CASE("Balakrishnan quadrature reproduces fractional resolvent powers") {
    auto f = probes::smooth(g16, 4, 3.0);
    for (double tau : {0.25, 0.5, 0.75}) {
        auto ref = spectral::resolvent_power(g16, 1.5, 1.0, tau)(f);
        CHECK(rel(spectral::balakrishnan_apply(g16, 1.5, 1.0, tau, f), ref) < 1e-8);
    }
}

TEST_CASE("lattice heat kernel at the origin matches the closed form") {
    const TorusGrid g(3, 8.0, 32);
    Field delta(g);
    delta[g.origin()] = 1.0 / g.cell_volume();
    auto p = spectral::heat_semigroup(g, 1.5, 1.0)(delta);
    double ref = oracle::heat_kernel_at_origin(1.5, 3, 1.0);
    CHECK(p[g.origin()].real() == Approx(ref).epsilon(1e-4));
}

TEST_CASE("radial heat kernel agrees with its Taylor series") {
    for (double r : {0.0, 0.25, 0.5, 1.0, 1.5})
        CHECK(radial::heat_kernel_value(1.5, 3, 1.0, r) == Approx(oracle::stable_density_3d_series(r, 1.5)).epsilon(1e-7));
    CHECK(radial::heat_kernel_value(1.5, 3, 1.0, 0.0) == Approx(oracle::heat_kernel_at_origin(1.5, 3, 1.0)).epsilon(1e-9));
}

TEST_CASE("radial kernel derivative agrees with the series oracles") {
    for (double r : {0.25, 0.75, 1.5})
        CHECK(radial::heat_kernel_derivative(1.5, 3, 1.0, r) ==
              Approx(oracle::stable_density_3d_series_derivative(r, 1.5)).epsilon(1e-6));
    for (double r : {30.0, 60.0})
        CHECK(radial::heat_kernel_derivative(1.5, 3, 1.0, r) ==
              Approx(oracle::stable_density_3d_asymptotic_derivative(r, 1.5, 6)).epsilon(1e-5));
}

TEST_CASE("heat kernel scaling p_t(r) = t^{-d/alpha} p_1(t^{-1/alpha} r)") {
    for (double t : {0.1, 0.5, 2.0})
        for (double r : {0.3, 1.0, 4.0}) {
            double s = std::pow(t, -1.0 / 1.5);
            CHECK(radial::heat_kernel_value(1.5, 3, t, r) ==
                  Approx(std::pow(s, 3) * radial::heat_kernel_value(1.5, 3, 1.0, s * r)).epsilon(1e-7));
        }
}

TEST_CASE("heat kernel tail approaches the Levy density constant") {
    const double c = oracle::stable_tail_constant(1.5, 3);
    double prev = 1e9;
    for (double r : {5.0, 10.0, 20.0, 50.0}) {
        double err = std::abs(std::pow(r, 4.5) * radial::heat_kernel_value(1.5, 3, 1.0, r) / c - 1.0);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 2e-2);
    for (double r : {20.0, 50.0, 100.0})
        CHECK(radial::heat_kernel_value(1.5, 3, 1.0, r) == Approx(oracle::stable_density_3d_asymptotic(r, 1.5, 4)).epsilon(1e-5));
    CHECK(oracle::stable_density_3d_asymptotic(1e3, 1.5, 1) * std::pow(1e3, 4.5) == Approx(c).epsilon(1e-12));
}

TEST_CASE("semigroup property, self-adjointness and contraction") {
    auto f = probes::gaussian(g16, 1);
    auto h = probes::gaussian(g16, 2);
    auto P = [](double t) { return spectral::heat_semigroup(g16, 1.5, t); };
    CHECK(rel(P(0.2)(P(0.3)(f)), P(0.5)(f)) < 1e-12);
    auto A = spectral::frac_laplacian(g16, 1.5);
    CHECK(std::abs(inner(A(f), h) - inner(f, A(h))) < 1e-10 * norm2(f) * norm2(h) * spectral::max_wavenumber(g16));
    CHECK(norm2(P(0.5)(f)) <= norm2(f));
}

TEST_CASE("binary and CSV field export") {
    auto f = probes::smooth(g16, 5, 2.0);
    f[7] = cplx(1.25, -0.5);
    std::stringstream ss;
    write_binary(ss, f, true);
    CHECK(ss.str().size() == 4 + 4 + 8 + 4 + 16 * g16.size());
    auto back = read_binary(ss);
    CHECK(back.grid() == g16);
    CHECK(back.values() == f.values());

    std::stringstream sr;
    write_binary(sr, f, false);
    auto re = read_binary(sr);
    CHECK(re.values() == f.real_part().values());

    std::stringstream bad("garbage");
    CHECK_THROWS(read_binary(bad));

    std::stringstream csv;
    write_csv(csv, f);
    std::string line;
    std::getline(csv, line);
    CHECK(line == "x,y,z,re,im\r");
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == g16.size());
}

TEST_CASE("m_dalpha estimate respects the analytic bound and is stable under sampling") {
    auto a = radial::estimate_m_dalpha(1.5, 3, radial::default_m_sample(20));
    auto b = radial::estimate_m_dalpha(1.5, 3, radial::default_m_sample(40));
    CHECK(a.m_kappa1 <= a.analytic_bound);
    CHECK(a.min_residual >= 0.0);
    CHECK(std::abs(a.m_est - b.m_est) <= 0.05 * b.m_est);
}

TEST_CASE("serial and parallel kernels agree") {
    const std::size_t n = 100003;
    auto f = probes::gaussian(TorusGrid(3, 8.0, 48), 3);
    auto h = probes::gaussian(TorusGrid(3, 8.0, 48), 4);
    const cplx* x = f.data();
    const cplx* y = h.data();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = x[i].real();
    std::vector<cplx> s(n), p(n);
    kernels::serial::mul(s.data(), x, y, n);
    kernels::parallel::mul(p.data(), x, y, n);
    CHECK(s == p);
    kernels::serial::mul_real(s.data(), x, w.data(), n);
    kernels::parallel::mul_real(p.data(), x, w.data(), n);
    CHECK(s == p);
    kernels::serial::axpy(s.data(), cplx(0.5, 1), y, n);
    kernels::parallel::axpy(p.data(), cplx(0.5, 1), y, n);
    CHECK(s == p);
    kernels::serial::scale(s.data(), 3.0, n);
    kernels::parallel::scale(p.data(), 3.0, n);
    CHECK(s == p);
    CHECK(kernels::serial::sum_abs_pow(x, n, 3.0) == kernels::parallel::sum_abs_pow(x, n, 3.0));
    CHECK(kernels::serial::max_abs(x, n) == kernels::parallel::max_abs(x, n));
    CHECK(std::abs(kernels::serial::dot(x, y, n) - kernels::parallel::dot(x, y, n)) < 1e-9);
    auto g = [&](std::size_t i) { return w[i] * w[i]; };
    CHECK(kernels::serial::sum_of(n, g) == Approx(kernels::parallel::sum_of(n, g)).epsilon(1e-13));
}
