#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stabledrift/errors.hpp"
#include "stabledrift/evolution.hpp"
#include "stabledrift/resolvent.hpp"
#include "stabledrift/spectral.hpp"

using namespace sd;
using namespace sd::evolution;

namespace {
const TorusGrid g16(3, 8.0, 16);
double rel(const Field& a, const Field& b) { return norm2(a - b) / norm2(b); }

PropagatorConfig config(const drift::MollifiedDrift& b, double t, int steps, Scheme s = Scheme::splitstep_spectral) {
    PropagatorConfig c;
    c.drift = b;
    c.t_final = t;
    c.steps = steps;
    c.scheme = s;
    return c;
}
drift::MollifiedDrift zero_b() { return drift::sample_bounded(drift::zero(), g16); }
drift::MollifiedDrift smooth_b() { return drift::sample_bounded(drift::bounded_smooth(1.0, 1.5, 0.5), g16); }
}  // namespace

TEST_CASE("zero drift: eigenmodes decay at rate |k|^alpha") {
    const double q = std::numbers::pi / 8.0;
    auto f = Field::from_function(g16, [&](const Vec3& x) { return cplx(std::cos(q * x[0] + 2 * q * x[2])); });
    double rate = std::pow(std::sqrt(5.0) * q, 1.5);
    for (auto s : {Scheme::splitstep_spectral, Scheme::splitstep_semilagrangian, Scheme::expm_krylov}) {
        auto u = propagate(config(zero_b(), 0.5, 10, s), f);
        CHECK(rel(u, std::exp(-0.5 * rate) * f) < 1e-10);
    }
}

TEST_CASE("t = 0 is the identity and f = 0 stays 0") {
    auto f = probes::gaussian(g16, 1);
    CHECK(rel(propagate(config(smooth_b(), 0.0, 1), f), f) < 1e-14);
    CHECK(norm_inf(propagate(config(smooth_b(), 0.3, 10), Field(g16))) == 0.0);
}

TEST_CASE("Duhamel residual vanishes for zero drift and shrinks with dt") {
    auto f = probes::smooth(g16, 2, 2.0);
    CHECK(duhamel_residual(config(zero_b(), 0.5, 20), f) <= 1e-10);
    double a = duhamel_residual(config(smooth_b(), 0.5, 20), f);
    double b = duhamel_residual(config(smooth_b(), 0.5, 40), f);
    CHECK(b < a);
}

TEST_CASE("constants are preserved and shifts commute") {
    for (auto s : {Scheme::splitstep_spectral, Scheme::splitstep_semilagrangian, Scheme::expm_krylov}) {
        auto c = config(smooth_b(), 0.3, 15, s);
        auto one = Field::constant(g16, 2.5);
        CHECK(norm_inf(propagate(c, one) - one) < 1e-9);
        auto f = probes::smooth(g16, 3, 2.0);
        auto lhs = propagate(c, f + one);
        auto rhs = propagate(c, f) + one;
        CHECK(norm_inf(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("semigroup property on a common step") {
    auto f = probes::smooth(g16, 4, 2.0);
    auto a = propagate(config(smooth_b(), 0.2, 8), f);
    a = propagate(config(smooth_b(), 0.3, 12), a);
    auto b = propagate(config(smooth_b(), 0.5, 20), f);
    CHECK(rel(a, b) < 1e-12);
}

TEST_CASE("sup-norm contraction") {
    auto f = probes::bumps(g16, 5, 4.0);
    double s0 = norm_inf(f);
    auto u = propagate(config(smooth_b(), 0.5, 25), f);
    CHECK(norm_inf(u) <= s0 * (1.0 + 1e-3));
}

TEST_CASE("Laplace transform of the semigroup is the resolvent") {
    auto b = smooth_b();
    auto f = probes::smooth(g16, 6, 2.0);
    auto ref = resolvent::assemble_theta2(b.lattice, 1.5, 1.0).apply(f);
    auto lap = laplace_resolvent(config(b, 0.5, 25), 1.0, f, 400);
    CHECK(rel(lap, ref) <= 1e-3);
}

TEST_CASE("configuration errors") {
    auto big = drift::sample_bounded(drift::bounded_smooth(500.0, 1.5, 0.5), g16);
    CHECK_THROWS_AS(validate(config(big, 1.0, 2)), ConfigError);
    CHECK_THROWS_AS(validate(config(smooth_b(), 1.0, 0)), ConfigError);
    CHECK_THROWS_AS(validate(config(smooth_b(), -1.0, 5)), ConfigError);
    CHECK_THROWS_AS(cutoff_masses(config(smooth_b(), 0.1, 5), g16.origin(), {9.0}), ParameterError);
    CHECK_THROWS_AS(scheme_from_string("leapfrog"), ConfigError);
}

TEST_CASE("cutoff masses approach one as k grows") {
    auto m = cutoff_masses(config(smooth_b(), 0.05, 5), g16.origin(), {2.0, 4.0, 6.0});
    CHECK(m[0] < m[1]);
    CHECK(m[1] <= m[2] + 1e-12);
    CHECK(std::abs(1.0 - m[2]) < 1e-2);
}
