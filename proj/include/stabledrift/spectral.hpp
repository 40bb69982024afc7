#pragma once

#include <cstdint>

#include "stabledrift/operator.hpp"

namespace sd::spectral {

void check_alpha(double alpha);

/// (-Delta)^{alpha/2}: multiplier |k|^alpha.
Operator frac_laplacian(const TorusGrid& g, double alpha);
/// (zeta + |k|^alpha)^s, principal branch; any real s.
Operator mass_power(const TorusGrid& g, double alpha, cplx zeta, double s);
/// (mu + A)^{-gamma}, gamma in (0, 1].
Operator resolvent_power(const TorusGrid& g, double alpha, double mu, double gamma);
Operator resolvent_power(const TorusGrid& g, double alpha, cplx zeta, double gamma);
/// e^{-tA}.
Operator heat_semigroup(const TorusGrid& g, double alpha, double t);
/// Partial derivative along `axis`: multiplier i k_axis, zero at the Nyquist index.
Operator gradient(const TorusGrid& g, int axis);
/// (lambda + |k|^2)^s, used by the Laplacian variant of the form-bound.
Operator laplace_mass_power(const TorusGrid& g, double lambda, double s);
/// Removes the constant (k = 0) mode.
Operator drop_zero_mode(const TorusGrid& g);

/// b . grad as an operator, b a vector field on the same grid.
Operator advection(const VectorField& b);
/// grad f as a vector field.
VectorField grad(const Field& f);

struct BalakrishnanOptions {
    double step = 0.5;       ///< trapezoid step in s = log t
    double tail_tol = 1e-15; ///< truncation level for the integrand tails
};

/// (mu + A)^{-tau} f by trapezoid quadrature in log t of
/// (sin(pi tau)/pi) int_0^inf t^{-tau} (t + mu + A)^{-1} f dt, with every
/// node applied as a resolvent operator.
Field balakrishnan_apply(const TorusGrid& g, double alpha, double mu, double tau, const Field& f,
                         const BalakrishnanOptions& opt = {});

/// Largest |k| on the lattice.
double max_wavenumber(const TorusGrid& g);

}  // namespace sd::spectral

namespace sd::probes {

/// Independent standard normal values at each site (real).
Field gaussian(const TorusGrid& g, std::uint64_t seed);
/// Random signs +-1.
Field signs(const TorusGrid& g, std::uint64_t seed);
/// Real band-limited random field: Gaussian Fourier coefficients damped by exp(-(|k|/k_c)^2).
Field smooth(const TorusGrid& g, std::uint64_t seed, double k_cut);
/// Sum of a few random smooth compactly supported bumps inside |x| <= radius.
Field bumps(const TorusGrid& g, std::uint64_t seed, double radius, int count = 3);

}  // namespace sd::probes
