#include <doctest.h>

#include <cmath>

#include "stabledrift/drift.hpp"
#include "stabledrift/errors.hpp"
#include "stabledrift/resolvent.hpp"
#include "stabledrift/spectral.hpp"

using namespace sd;
using namespace sd::resolvent;

namespace {
const TorusGrid g16(3, 8.0, 16);
double rel(const Field& a, const Field& b) { return norm2(a - b) / norm2(b); }
VectorField bounded(double amp) { return drift::sample_bounded(drift::bounded_smooth(amp, 1.5, 0.5), g16).lattice; }
}  // namespace

TEST_CASE("zero drift reduces both resolvents to (mu + A)^{-1}") {
    VectorField b(g16);
    auto f = probes::smooth(g16, 1, 2.0);
    auto ref = spectral::resolvent_power(g16, 1.5, 1.0, 1.0)(f);
    CHECK(rel(assemble_theta2(b, 1.5, 1.0).apply(f), ref) < 1e-12);
    CHECK(rel(assemble_theta_p(b, 1.5, 1.0, 2.5, 3.0, 2.0).apply(f), ref) < 1e-12);
}

TEST_CASE("Theta2 inverts the generator") {
    auto b = bounded(1.0);
    auto f = probes::smooth(g16, 2, 2.0);
    auto th = assemble_theta2(b, 1.5, 1.0);
    CHECK(th.hs_norm < 1.0);
    auto u = th.apply(f);
    CHECK(rel(apply_generator(b, 1.5, 1.0, u), f) < 1e-8);
}

TEST_CASE("pseudo-resolvent identity and Theta_p / Theta2 consistency") {
    auto b = bounded(1.0);
    auto f = probes::smooth(g16, 3, 2.0);
    const double mu = 1.0;
    auto R1 = assemble_theta2(b, 1.5, mu);
    auto R2 = assemble_theta2(b, 1.5, 2 * mu);
    auto lhs = R1.apply(f) - R2.apply(f);
    auto rhs = cplx(mu) * R1.apply(R2.apply(f));
    CHECK(rel(lhs, rhs) < 1e-8);
    auto tp = assemble_theta_p(b, 1.5, mu, 2.5, 3.0, 2.0);
    CHECK(rel(tp.apply(f), R1.apply(f)) < 1e-8);
}

TEST_CASE("verification report on a bounded drift passes") {
    auto rep = verify_resolvent(bounded(1.0), 1.5, 1.0, 2.5, 3.0, 2.0, 2);
    CHECK(rep.verdict() == Verdict::pass);
}

TEST_CASE("strong drift makes the series diverge") {
    CHECK_THROWS_AS(assemble_theta2(bounded(200.0), 1.5, 0.01), DivergenceError);
    CHECK_THROWS_AS(assemble_theta_p(bounded(200.0), 1.5, 0.01, 2.5, 3.0, 2.0), DivergenceError);
}

TEST_CASE("exponent ordering and p range") {
    VectorField b(g16);
    CHECK_THROWS_AS(assemble_theta_p(b, 1.5, 1.0, 2.5, 2.0, 2.0), ParameterError);
    CHECK_THROWS_AS(assemble_theta_p(b, 1.5, 1.0, 2.5, 3.0, 2.5), ParameterError);
    CHECK_THROWS_AS(assemble_theta_p(b, 1.5, 1.0, 5.0, 6.0, 3.0, std::pair{1.5, 4.0}), AdmissibilityError);
    CHECK_NOTHROW(assemble_theta_p(b, 1.5, 1.0, 3.0, 6.0, 2.0, std::pair{1.5, 4.0}));
}

TEST_CASE("zero weight gives zero L^p ratios") {
    Field V(g16);
    auto r = lp_inequalities(V, 1.5, 2.0, 1.0, 1.0, {4, 10, 3, 0.0});
    CHECK(r.norm_a == 0.0);
    CHECK(r.norm_b == 0.0);
    CHECK(r.norm_c == 0.0);
}

TEST_CASE("L^p probe of a positive multiplier") {
    auto P = spectral::resolvent_power(g16, 1.5, 2.0, 1.0);
    double n2 = lp_norm_probe(P, 2.0, {4, 30, 3, 0.0});
    CHECK(n2 <= 0.5 * (1 + 1e-9));
    CHECK(n2 >= 0.45);
}
