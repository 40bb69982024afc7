#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "stabledrift/drift.hpp"
#include "stabledrift/errors.hpp"

using namespace sd;
using namespace sd::drift;
using doctest::Approx;

TEST_CASE("kappa matches the Gamma ratio") {
    for (double a : {1.2, 1.5, 1.8}) CHECK(kappa(a, 3) == Approx(oracle::kappa(a, 3)).epsilon(1e-14));
    CHECK(kappa(1.5, 3) == Approx(0.9033).epsilon(1e-4));
}

TEST_CASE("Hardy drift: magnitude, direction, oddness") {
    auto b = hardy_drift(0.05, 1.5, 3);
    const double c = 0.05 * std::pow(oracle::kappa(1.5, 3), 2);
    CHECK(b.param("coefficient") == Approx(c));
    Vec3 x{0.3, -1.1, 0.7};
    double r = std::sqrt(0.09 + 1.21 + 0.49);
    CHECK(b.magnitude(x) == Approx(c * std::pow(r, -0.5)).epsilon(1e-13));
    auto v = b(x);
    auto w = b({-x[0], -x[1], -x[2]});
    for (int a = 0; a < 3; ++a) {
        CHECK(v[a] == Approx(c * std::pow(r, -1.5) * x[a]).epsilon(1e-13));
        CHECK(w[a] == Approx(-v[a]).epsilon(1e-14));
    }
    CHECK(b.is_singular({0, 0, 0}));
    CHECK_THROWS_AS(b({0, 0, 0}), ParameterError);
    auto lit = hardy_drift(0.05, 1.5, 3, HardyScaling::literal);
    CHECK(lit.param("coefficient") == Approx(std::sqrt(0.05) * oracle::kappa(1.5, 3)));
}

TEST_CASE("Hardy drift needs three dimensions") {
    CHECK_THROWS_AS(hardy_drift(0.05, 1.5, 2), ParameterError);
    CHECK_THROWS_AS(hardy_drift(0.05, 2.5, 3), ParameterError);
}

TEST_CASE("bounded smooth drift is odd") {
    auto b = bounded_smooth(1.0, 1.5, 0.5);
    Vec3 x{0.4, 0.2, -0.9};
    auto v = b(x);
    auto w = b({-0.4, -0.2, 0.9});
    for (int a = 0; a < 3; ++a) CHECK(w[a] == Approx(-v[a]));
}

TEST_CASE("mollifier constant, normalisation and support") {
    CHECK(mollifier_constant(3) == Approx(oracle::mollifier_constant_3d()).epsilon(1e-8));
    const TorusGrid g(3, 4.0, 32);
    for (double eps : {0.75, 1.5}) {
        auto m = mollifier(eps, g);
        CHECK(std::abs(lattice_integral(m) - 1.0) < 1e-8);
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto x = g.point(i);
            if (std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) >= eps) REQUIRE(m[i] == cplx(0.0));
            REQUIRE(m[i].real() >= 0.0);
        }
    }
}

TEST_CASE("mollified bounded drift converges to the drift") {
    const TorusGrid g(3, 8.0, 32);
    auto b = bounded_smooth(1.0, 1.5, 0.5);
    auto exact = sample_bounded(b, g);
    double prev = 1e9;
    for (double eps : {2.0, 1.0, 0.5}) {
        auto bn = mollify(b, 100, eps, g);
        double err = 0.0;
        for (int a = 0; a < 3; ++a) err = std::max(err, norm_inf(bn.lattice.comp[a] - exact.lattice.comp[a]));
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("mollified Hardy drift approaches the drift in local L1") {
    const TorusGrid g(3, 4.0, 16);
    auto b = hardy_drift(0.05, 1.5, 3);
    double prev = 1e9;
    for (int n : {1, 2, 4}) {
        auto bn = mollify(b, n, g);
        CHECK(bn.sup_norm() < 1e6);
        double d = l1_distance(b, bn, 2.0);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("zero drift") {
    auto z = zero();
    CHECK(z.is_zero());
    const TorusGrid g(3, 8.0, 16);
    CHECK(mollify(z, 4, g).sup_norm() == 0.0);
    CHECK(z.magnitude({1, 2, 3}) == 0.0);
}

TEST_CASE("drift spec JSON roundtrip") {
    for (const auto& d : {hardy_drift(0.05, 1.5, 3), bounded_smooth(1, 1.5, 0.5), lp_radial(0.5, 0.3, 2.0),
                          kato_example(0.2, 0.25, 1.0)}) {
        auto j = d.to_json();
        CHECK(j.contains("kind"));
        CHECK(j.contains("parameters"));
        CHECK(j.contains("singular_points"));
        auto back = DriftSpec::from_json(j);
        CHECK(back.kind == d.kind);
        CHECK(back.parameters == d.parameters);
        CHECK(back.singular_points == d.singular_points);
    }
    CHECK_THROWS(DriftSpec::from_json(json::object()));
    CHECK_THROWS(DriftSpec::from_json(json{{"kind", "nonsense"}}));
}
