#pragma once

#include <string>
#include <utility>
#include <vector>

#include "stabledrift/drift.hpp"
#include "stabledrift/operator.hpp"
#include "stabledrift/report.hpp"

namespace sd::formbound {

enum class ClassTag { weak_formbound, formbound, kato, weak_ld };
std::string to_string(ClassTag t);

/// Which resolvent the quadratic form is measured against.
enum class Variant {
    fractional,  ///< (lambda + A)^{-(alpha-1)/alpha}
    laplace,     ///< (lambda - Laplacian)^{-(alpha-1)/2}
};

struct FormBoundEstimate {
    ClassTag class_tag = ClassTag::weak_formbound;
    Variant variant = Variant::fractional;
    double delta_est = 0.0;
    double lambda = 0.0;
    bool zero_mode_removed = false;
    std::vector<std::pair<int, double>> grid_levels;  ///< (N, estimate)
    bool converged = false;
    int iterations = 0;
    double power_estimate = 0.0;   ///< Rayleigh quotient from power iteration alone
    double lanczos_estimate = 0.0; ///< largest Ritz value (0 if disabled)

    json to_json() const;
};

struct PowerOptions {
    double rel_tol = 1e-6;
    int max_iter = 10000;
    int lanczos_steps = 20;  ///< 0 disables the Lanczos refinement
    bool remove_zero_mode = false;
    Variant variant = Variant::fractional;
};

/// Largest eigenvalue of a symmetric positive semidefinite lattice operator.
/// Throws ConvergenceError after max_iter iterations.
struct EigenResult {
    double value = 0.0;
    double power_value = 0.0;
    double lanczos_value = 0.0;
    int iterations = 0;
    Field vector;
};
EigenResult largest_eigenvalue(const Operator& op, const Field& start, const PowerOptions& opt = {});

/// The resolvent (lambda + A)^{-(alpha-1)/alpha} or its Laplacian counterpart.
Operator form_resolvent(const TorusGrid& g, double alpha, double lambda, Variant v, bool remove_zero_mode);

/// delta = ||V^{1/2} R V^{1/2}||_{2->2} for the lattice weight V = |b|.
FormBoundEstimate estimate_weak_formbound(const Field& V, double alpha, double lambda, const PowerOptions& opt = {});
FormBoundEstimate estimate_weak_formbound(const drift::MollifiedDrift& b, double alpha, double lambda,
                                          const PowerOptions& opt = {});
FormBoundEstimate estimate_weak_formbound(const drift::DriftSpec& b, const TorusGrid& g, double alpha,
                                          double lambda, const PowerOptions& opt = {});

/// ||V R||_{2->2}, the (stronger) form-bound.
FormBoundEstimate estimate_formbound(const Field& V, double alpha, double lambda, const PowerOptions& opt = {});

/// sup of (lambda + A)^{-(alpha-1)/alpha} |b| on the lattice.
double estimate_kato_norm(const Field& V, double alpha, double lambda);
double estimate_kato_norm(const drift::DriftSpec& b, const TorusGrid& g, double alpha, double lambda);

struct LadderResult {
    std::vector<std::pair<double, double>> with_zero_mode;  ///< (lambda, delta) with the constant mode kept
    double small_lambda = 1e-3;
    double projected = 0.0;  ///< zero mode removed, at small_lambda: the lambda -> 0+ value
};
/// lambda -> 0+ behaviour of the weak form-bound for a raw drift on one grid.
LadderResult lambda_ladder(const Field& V, double alpha, const std::vector<double>& lambdas = {1e-1, 1e-2, 1e-3},
                           const PowerOptions& opt = {});

/// Grid refinement of the lambda -> 0+ estimate for a raw drift.
FormBoundEstimate refine_weak_formbound(const drift::DriftSpec& b, double alpha, double L,
                                        const std::vector<int>& N_list, double lambda = 1e-3,
                                        const PowerOptions& opt = {});

struct Admissibility {
    double threshold = 0.0;        ///< delta must lie strictly below
    double holder_threshold = 0.0; ///< 4 (d-alpha)/(d-alpha+1)^2 / m
    double first_term = 0.0;      ///< (d-alpha)/(d-alpha+1)^2
    double second_term = 0.0;      ///< alpha (d+alpha)/(d+2 alpha)^2
};
Admissibility admissible_delta_threshold(int dim, double alpha, double m);

/// (p_-, p_+) = 2/(1 -+ sqrt(1 - m delta)); requires 0 < m delta <= 1.
std::pair<double, double> p_interval(double m, double delta);

/// Form-bound predicted by the weak-L^{d/(alpha-1)} norm of |b|.
double weak_ld_reference(double alpha, int dim, double weak_norm);
/// Weak L^{d/(alpha-1)} quasi-norm of c |x|^{1-alpha}.
double hardy_weak_norm(double coefficient, double alpha, int dim);

}  // namespace sd::formbound
