#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stabledrift/errors.hpp"
#include "stabledrift/formbound.hpp"
#include "stabledrift/spectral.hpp"

using namespace sd;
using namespace sd::formbound;
using doctest::Approx;

namespace {
const TorusGrid g16(3, 8.0, 16);
}

TEST_CASE("zero weight has zero form-bound") {
    Field V(g16);
    CHECK(estimate_weak_formbound(V, 1.5, 0.1).delta_est == 0.0);
    CHECK(estimate_kato_norm(V, 1.5, 0.1) == 0.0);
}

TEST_CASE("constant weight: delta = c lambda^{-(alpha-1)/alpha}") {
    for (double lam : {0.1, 1.0}) {
        Field V = Field::constant(g16, 0.3);
        double ref = 0.3 * std::pow(lam, -(1.5 - 1.0) / 1.5);
        CHECK(estimate_weak_formbound(V, 1.5, lam).delta_est == Approx(ref).epsilon(1e-6));
        CHECK(estimate_formbound(V, 1.5, lam).delta_est == Approx(ref).epsilon(1e-6));
        CHECK(estimate_kato_norm(V, 1.5, lam) == Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("form-bound is invariant under the critical rescaling") {
    auto V = drift::magnitude_lattice(drift::hardy_drift(0.05, 1.5, 3), g16);
    const double s = 2.0, lam = 0.05;
    TorusGrid big(3, s * 8.0, 16);
    Field W(big, V.values());
    W *= std::pow(s, -(1.5 - 1.0));
    double a = estimate_weak_formbound(V, 1.5, lam).delta_est;
    double b = estimate_weak_formbound(W, 1.5, lam * std::pow(s, -1.5)).delta_est;
    CHECK(b == Approx(a).epsilon(1e-5));
}

TEST_CASE("delta decreases as lambda grows") {
    auto V = drift::magnitude_lattice(drift::hardy_drift(0.05, 1.5, 3), g16);
    auto lad = lambda_ladder(V, 1.5, {1e-3, 1e-2, 1e-1, 1.0});
    for (std::size_t i = 1; i < lad.with_zero_mode.size(); ++i)
        CHECK(lad.with_zero_mode[i].second < lad.with_zero_mode[i - 1].second);
    CHECK(lad.projected <= lad.with_zero_mode.front().second);
}

TEST_CASE("weak form-bound never exceeds the form-bound") {
    auto V = probes::bumps(g16, 3, 3.0).abs();
    double w = estimate_weak_formbound(V, 1.5, 0.2).delta_est;
    double f = estimate_formbound(V, 1.5, 0.2).delta_est;
    CHECK(w <= f * (1.0 + 1e-6));
}

TEST_CASE("admissible threshold and p interval") {
    for (double m : {1.0, 3.0}) {
        auto a = admissible_delta_threshold(3, 1.5, m);
        double first = 1.5 / 6.25, second = 1.5 * 4.5 / 36.0;
        CHECK(a.first_term == Approx(first));
        CHECK(a.second_term == Approx(second));
        CHECK(a.threshold == Approx(0.75 / m));
    }
    auto [lo, hi] = p_interval(3.0, 0.25);
    CHECK(lo == Approx(4.0 / 3.0));
    CHECK(hi == Approx(4.0));
    CHECK_THROWS_AS(p_interval(3.0, 0.0), ParameterError);
    CHECK_THROWS_AS(p_interval(3.0, 0.5), AdmissibilityError);
    auto [lo1, hi1] = p_interval(1.0, 1.0);
    CHECK(lo1 == Approx(2.0));
    CHECK(hi1 == Approx(2.0));
}

TEST_CASE("power iteration finds the top of a known spectrum") {
    auto R = spectral::resolvent_power(g16, 1.5, 0.5, 1.0);
    auto top = largest_eigenvalue(R, probes::gaussian(g16, 1));
    CHECK(top.value == Approx(2.0).epsilon(1e-6));
}
