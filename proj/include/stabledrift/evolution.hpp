#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stabledrift/drift.hpp"
#include "stabledrift/grid.hpp"
#include "stabledrift/operator.hpp"
#include "stabledrift/report.hpp"

namespace sd::evolution {

enum class Scheme {
    splitstep_spectral,        ///< Strang: exact half heat steps, order-4 series for exp(-dt b.grad)
    splitstep_semilagrangian,  ///< Strang with RK2 backtracking + trilinear interpolation
    expm_krylov,               ///< Arnoldi exponential of the full generator per step
};

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct PropagatorConfig {
    drift::MollifiedDrift drift;
    double alpha = 1.5;
    double t_final = 0.5;
    int steps = 50;
    Scheme scheme = Scheme::splitstep_spectral;
    int krylov_dim = 24;

    double dt() const { return t_final / steps; }
    const TorusGrid& grid() const { return drift.grid(); }
};

/// dt ||b||_inf pi N / (2L).
double cfl_number(const PropagatorConfig& c);
/// Throws ConfigError on bad steps/time or a CFL violation of a split-step scheme.
void validate(const PropagatorConfig& c);

/// One-step map T ~ e^{-dt Lambda(b_n)} and its powers.
class Propagator {
public:
    explicit Propagator(const PropagatorConfig& c);

    const PropagatorConfig& config() const { return cfg_; }
    double dt() const { return cfg_.dt(); }
    Field step(const Field& f) const;
    /// T^k f.
    Field advance(const Field& f, int k) const;
    /// T^steps f, i.e. e^{-t_final Lambda} f.
    Field apply(const Field& f) const { return advance(f, cfg_.steps); }
    /// Last Arnoldi error estimate (expm_krylov only).
    double krylov_error() const { return krylov_err_; }

private:
    Field advect(const Field& f) const;
    Field krylov_step(const Field& f) const;

    PropagatorConfig cfg_;
    Operator half_heat_;
    Operator adv_;
    Operator frac_;
    mutable double krylov_err_ = 0.0;
};

Field propagate(const PropagatorConfig& c, const Field& f);

/// Solution at every `every`-th step, starting with f at t=0.
std::vector<Field> propagate_series(const PropagatorConfig& c, const Field& f, int every = 1);

/// ||e^{-t Lambda}f - e^{-tA}f + int_0^t e^{-(t-s)Lambda}(b.grad e^{-sA} f) ds||_2 / ||f||_2,
/// time integral by composite Simpson on the step grid.
double duhamel_residual(const PropagatorConfig& c, const Field& f);

/// int_0^inf e^{-mu t} e^{-t Lambda} f dt by composite Simpson on [0, 40/mu] with
/// `nodes` intervals, each propagated in substeps no longer than c.dt().
Field laplace_resolvent(const PropagatorConfig& c, double mu, const Field& f, int nodes = 200);

/// Smooth profile: 1 on [0,1], 0 on [2,inf).
double cutoff_profile(double s);
/// xi_k(y) = 1 for |y| <= k, profile(|y| + 1 - k) beyond.
Field cutoff(const TorusGrid& g, double k);

/// (e^{-t Lambda} xi_k)(x) for each k: the pairing of the kernel row at x with xi_k.
std::vector<double> cutoff_masses(const PropagatorConfig& c, std::size_t x_index, const std::vector<double>& k_list);

/// Whole-space mass int (1 - xi_k) p_t of the free kernel (radial quadrature).
double free_cutoff_defect(double alpha, int dim, double t, double k);

struct ConservativenessOptions {
    double t = 0.01;
    int steps = 10;
    std::vector<int> n_list = {8, 16};
    Scheme scheme = Scheme::splitstep_spectral;
    double tolerance = 1e-3;
};

VerificationReport conservativeness_check(const drift::DriftSpec& base, const TorusGrid& g, double alpha,
                                          std::size_t x_index, const std::vector<double>& k_list,
                                          const ConservativenessOptions& opt = {});

/// Sup-norm differences between consecutive approximants at time t.
std::vector<double> cauchy_differences(const std::vector<drift::MollifiedDrift>& approximants, double alpha, double t,
                                       int steps, const Field& f, Scheme scheme = Scheme::splitstep_spectral);

struct FellerOptions {
    double t = 0.25;
    int steps = 25;
    Scheme scheme = Scheme::splitstep_spectral;
    std::vector<double> mu_ladder = {1.0, 10.0, 100.0};
};

/// Cauchy differences over n_list (strictly decreasing) and ||mu (mu+Lambda)^{-1} f - f||_inf
/// along the mu ladder for the finest approximant (strictly decreasing).
VerificationReport feller_convergence_check(const drift::DriftSpec& base, const TorusGrid& g, double alpha,
                                            const std::vector<int>& n_list, const Field& f,
                                            const FellerOptions& opt = {});
VerificationReport feller_convergence_check(const std::vector<drift::MollifiedDrift>& approximants, double alpha,
                                            const Field& f, const FellerOptions& opt = {});

/// Values along the first axis through the lattice site `through`: columns x,re,im.
void write_slice_csv(std::ostream& os, const Field& f, std::size_t through);
/// Columns t,<name> for a scalar time series.
void write_series_csv(std::ostream& os, const std::vector<double>& t, const std::vector<double>& v,
                      const std::string& name);

}  // namespace sd::evolution
