#include <doctest.h>

#include <cmath>

#include "stabledrift/errors.hpp"
#include "stabledrift/spectral.hpp"
#include "stabledrift/weighted.hpp"

using namespace sd;
using namespace sd::weighted;
using doctest::Approx;

namespace {
const TorusGrid g16(3, 8.0, 16);
double rel(const Field& a, const Field& b) { return norm2(a - b) / norm2(b); }
}  // namespace

TEST_CASE("theta blend") {
    CHECK(theta(0.5) == 0.5);
    CHECK(theta(1.0) == Approx(1.0));
    CHECK(theta(2.0) == Approx(2.0));
    CHECK(theta(7.0) == 2.0);
    for (double s = 0.0; s < 3.0; s += 0.01) {
        REQUIRE(theta_prime(s) >= -1e-12);
        REQUIRE(theta(s + 0.01) >= theta(s));
    }
    CHECK(theta_n(30.0, 10.0) == Approx(20.0));
}

TEST_CASE("weight definition and small nu") {
    auto w = make_weight(g16, 0.675, 1.5);
    auto x = g16.point(123);
    CHECK(w.lattice[123].real() == Approx(std::pow(1 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2], 0.675)));
    auto tiny = make_weight(g16, 1e-9, 1.5);
    CHECK(norm_inf(tiny.lattice - Field::constant(g16, 1.0)) < 1e-6);
    auto f = probes::gaussian(g16, 1);
    CHECK(weighted_norm(f, 2.0, tiny) == Approx(norm_p(f, 2.0)).epsilon(1e-6));
    CHECK_THROWS_AS(make_weight(g16, 0.8, 1.5), ParameterError);
    CHECK_THROWS_AS(make_weight(g16, 0.0, 1.5), ParameterError);
}

TEST_CASE("conjugated semigroup is symmetric in L^2(eta^2)") {
    auto w = make_weight(g16, 0.675, 1.5);
    auto P = conjugated_semigroup(w, 1.5, 0.3);
    auto f = probes::smooth(g16, 2, 2.0);
    auto h = probes::smooth(g16, 3, 2.0);
    Field w2 = hadamard(w.lattice, w.lattice);
    cplx a = inner(P(f), h, &w2);
    cplx b = inner(f, P(h), &w2);
    CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
}

TEST_CASE("conjugation with a small weight is nearly the identity map") {
    auto w = make_weight(g16, 1e-9, 1.5);
    auto f = probes::smooth(g16, 4, 2.0);
    CHECK(rel(conjugated_generator(w, 1.5)(f), spectral::frac_laplacian(g16, 1.5)(f)) < 1e-6);
}

TEST_CASE("eta_b norm: zero drift and Hardy drift") {
    CHECK(eta_b_norm(drift::zero(), g16, 0.675, 2.0) == 0.0);
    double n16 = eta_b_norm(drift::hardy_drift(0.05, 1.5, 3), g16, 0.675, 4.5);
    double n32 = eta_b_norm(drift::hardy_drift(0.05, 1.5, 3), TorusGrid(3, 8.0, 32), 0.675, 4.5);
    CHECK(std::isfinite(n16));
    CHECK(n16 > 0.0);
    CHECK(std::abs(n32 - n16) < 0.1 * n32);
}

TEST_CASE("weighted estimates are finite for h = 0 and a small ladder") {
    auto w = make_weight(g16, 0.675, 1.5);
    EstimateOptions opt;
    opt.m_levels = {4};
    opt.n_star = 8;
    opt.probes = 3;
    auto r = weighted_estimate_ratios(drift::bounded_smooth(1, 1.5, 0.5), w, 1.5, 4.5, {100.0}, opt);
    REQUIRE(r.size() == 1);
    CHECK(std::isfinite(r[0].e1));
    CHECK(std::isfinite(r[0].e2));
    CHECK(std::isfinite(r[0].e3));
}

TEST_CASE("weighted assembly equals the conjugated assembly") {
    auto b = drift::sample_bounded(drift::bounded_smooth(1.0, 1.5, 0.5), g16).lattice;
    auto a = resolvent::assemble_theta_p(b, 1.5, 1.0, 2.5, 3.0, 2.0);
    auto w = make_weight(g16, 0.675, 1.5);
    auto h = probes::smooth(g16, 5, 2.0);
    Field inv = w.lattice.map([](cplx v) { return 1.0 / v; });
    Field ref = hadamard(inv, a.apply(hadamard(w.lattice, h)));
    CHECK(rel(weighted_assembly_apply(a, w, h), ref) < 1e-8);
    CHECK(norm_inf(weighted_assembly_apply(a, w, Field(g16))) == 0.0);
}
