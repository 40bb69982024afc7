#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stabledrift/operator.hpp"
#include "stabledrift/report.hpp"

namespace sd::resolvent {

/// b^{s} = b |b|^{s-1} componentwise-scaled, 0 where b = 0.
VectorField signed_power(const VectorField& b, double s);
/// |b|^s, 0 where b = 0.
Field magnitude_power(const VectorField& b, double s);

/// (zeta + A + b.grad) u applied directly.
Field apply_generator(const VectorField& b, double alpha, cplx zeta, const Field& u);

struct NeumannOptions {
    double rel_tol = 1e-12;  ///< stop when a term is below rel_tol * first term
    int max_terms = 2000;
};

struct NeumannStats {
    std::vector<double> term_norms;
    bool converged = false;
};

/// (1 + X)^{-1} g by the Neumann series; throws DivergenceError when terms stop shrinking.
Field neumann_inverse(const Operator& X, const Field& g, const NeumannOptions& opt, NeumannStats* stats,
                      double p = 2.0);

/// Largest singular value of op on the lattice L^2 (power iteration on op* op).
double l2_norm_estimate(const Operator& op, const Field& start, int iterations = 200, double rel_tol = 1e-8);

struct Theta2 {
    double alpha = 1.5;
    cplx zeta;
    Operator left;    ///< (zeta+A)^{-(alpha+1)/(2 alpha)}
    Operator right;   ///< (zeta+A)^{-(alpha-1)/(2 alpha)}
    Operator H;       ///< |b|^{1/2} (conj(zeta)+A)^{-(alpha-1)/(2 alpha)}
    Operator S;       ///< b^{1/2}.grad (zeta+A)^{-(alpha+1)/(2 alpha)}
    Operator HS;      ///< H* S
    double hs_norm = 0.0;
    NeumannOptions opt;

    Field apply(const Field& f, NeumannStats* stats = nullptr) const;
    Operator handle() const;
};

/// Throws DivergenceError if the estimate of ||H* S|| is >= 1.
Theta2 assemble_theta2(const VectorField& b, double alpha, cplx zeta, const NeumannOptions& opt = {});

struct ResolventAssembly {
    double alpha = 1.5, mu = 1.0, p = 2.0, q = 3.0, r = 1.5;
    Operator resolvent;  ///< (mu+A)^{-1}
    Operator T;          ///< b^{1/p}.grad (mu+A)^{-1} |b|^{1/p'}
    Operator G;          ///< b^{1/p}.grad (mu+A)^{-1/alpha + (-1+1/alpha)/r}
    Operator Q;          ///< (mu+A)^{(-1+1/alpha)/q'} |b|^{1/p'}
    Operator outer_left; ///< (mu+A)^{-1/alpha + (-1+1/alpha)/q}
    Operator outer_right;///< (mu+A)^{(-1+1/alpha)/r'}
    double t_norm_probe = 0.0;  ///< p->p probe of ||T||
    NeumannOptions opt;

    Field apply(const Field& f, NeumannStats* stats = nullptr) const;
    Operator handle() const;
};

/// Requires r < p < q; if `p_range` is given, p must lie strictly inside it
/// (AdmissibilityError otherwise). The T probe must be < 1 (DivergenceError).
ResolventAssembly assemble_theta_p(const VectorField& b, double alpha, double mu, double p, double q, double r,
                                   std::optional<std::pair<double, double>> p_range = std::nullopt,
                                   int probes = 10, std::uint64_t seed = 7, const NeumannOptions& opt = {});

struct LpNormOptions {
    int probes = 10;
    int iterations = 20;
    std::uint64_t seed = 11;
    /// Probe starts are |gaussian| restricted to this radius (0: whole torus).
    double support_radius = 0.0;
};

/// Boyd's p-norm power method from random probe starts; returns the largest
/// ||M f||_p / ||f||_p seen. M must map real fields to real fields.
double lp_norm_probe(const Operator& M, double p, const LpNormOptions& opt, std::vector<double>* per_probe = nullptr);

struct LpInequalityResult {
    double delta = 0.0;
    double ratio_a = 0.0, ratio_b = 0.0, ratio_c = 0.0;            ///< with c_p = p p'/4
    double ratio_a_alt = 0.0, ratio_b_alt = 0.0, ratio_c_alt = 0.0; ///< with c_p = 4/(p p')
    double norm_a = 0.0, norm_b = 0.0, norm_c = 0.0;
};

/// Probe the three L^p bounds for the weight V, with delta the weak form-bound of V at lambda.
/// `generator_conj` optionally conjugates every resolvent (weighted variant): R -> W^{-1} R W,
/// norms taken in L^p(eta^2).
LpInequalityResult lp_inequalities(const Field& V, double alpha, double p, double mu, double lambda,
                                   const LpNormOptions& opt, const Field* weight = nullptr);
VerificationReport verify_lp_inequalities(const Field& V, double alpha, double p, double mu, double lambda,
                                          int probes, std::uint64_t seed = 11, const Field* weight = nullptr);

/// Spectral (mu+A)^{-tau} against the Balakrishnan quadrature on random smooth fields;
/// relative L^2 error <= 1e-6 for every (tau, mu).
VerificationReport verify_balakrishnan(const TorusGrid& g, double alpha, const std::vector<double>& taus,
                                       const std::vector<double>& mus, int probes = 3, std::uint64_t seed = 3);

/// Generator residuals of Theta_2 and Theta_p, the pseudo-resolvent identity between mu
/// and 2 mu, and Theta_p / Theta_2 consistency, over random smooth fields.
VerificationReport verify_resolvent(const VectorField& b, double alpha, double mu, double p, double q, double r,
                                    int probes = 3, std::uint64_t seed = 13);

}  // namespace sd::resolvent
