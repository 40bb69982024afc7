#pragma once

#include <optional>
#include <vector>

#include "stabledrift/drift.hpp"
#include "stabledrift/operator.hpp"
#include "stabledrift/report.hpp"
#include "stabledrift/resolvent.hpp"

namespace sd::weighted {

/// theta(s) = s on (0,1], 2 on [2,inf), quintic C^2 blend in between.
double theta(double s);
double theta_prime(double s);
/// theta_n(s) = n theta(s/n).
double theta_n(double s, double n);

struct WeightSpec {
    double nu = 0.675;
    std::optional<double> level;  ///< truncation level n of theta_n, if any
    Field lattice;                ///< eta (or eta_n) on the grid

    const TorusGrid& grid() const { return lattice.grid(); }
};

/// eta = (1+|x|^2)^nu, optionally truncated by theta_n. Requires 0 < nu < alpha/2.
WeightSpec make_weight(const TorusGrid& g, double nu, double alpha, std::optional<double> level = std::nullopt);

/// ||f||_{p,eta} = (sum |f|^p eta^2 h^d)^{1/p}.
double weighted_norm(const Field& f, double p, const WeightSpec& w);

/// eta^{-1} A eta.
Operator conjugated_generator(const WeightSpec& w, double alpha);
/// eta^{-1} e^{-tA} eta.
Operator conjugated_semigroup(const WeightSpec& w, double alpha, double t);
/// eta^{-1} X eta for any lattice operator.
Operator conjugate(const Operator& X, const WeightSpec& w);

/// p->p norm probe of M in L^p(eta^2).
double weighted_lp_norm_probe(const Operator& M, const WeightSpec& w, double p, const resolvent::LpNormOptions& opt);

struct MarkovFit {
    std::vector<double> levels;
    std::vector<double> omega;           ///< per level: max_t log(ratio)/t
    std::vector<double> l1_ratio_exact;  ///< per (level, t): sup (e^{-tA} eta_n)/eta_n
    std::vector<double> l1_ratio_probe;  ///< per (level, t): probe max of ||eta_n e^{-tA} eta_n^{-1} f||_1/||f||_1
    double min_positive = 0.0;           ///< min over probes of eta_n e^{-tA} eta_n^{-1} f for f >= 0 (relative)
    double lobe_allowance = 0.0;         ///< max over (t, level) of sup eta_n (K_- * eta_n^{-1}), K_- the kernel's negative part
    double positivity_margin = 0.0;      ///< min over probes of the relative minimum plus its (t, level) allowance
    double contraction = 0.0;            ///< max over probes of |e^{-t(omega+A_eta)} f| for |f| <= 1
};

MarkovFit fit_weighted_markov(double nu, double alpha, const std::vector<double>& t_list, const TorusGrid& g,
                              const std::vector<double>& level_factors = {1.0, 2.0, 4.0}, int probes = 8,
                              std::uint64_t seed = 5);
VerificationReport verify_weighted_markov(double nu, double alpha, const std::vector<double>& t_list,
                                          const TorusGrid& g, const std::vector<double>& level_factors = {1.0, 2.0, 4.0},
                                          int probes = 8, std::uint64_t seed = 5);

struct EstimateOptions {
    std::vector<int> m_levels = {8, 16};
    int n_star = 32;       ///< mollification level of the drift inside the resolvent
    int probes = 20;
    std::uint64_t seed = 19;
    double q = 0.0;        ///< 0: 2p
    double r = 0.0;        ///< 0: (1+p)/2
    double support_radius = 0.0;  ///< 0: L/4
};

struct EstimateRatios {
    double mu = 0.0;
    int m = 0;
    double e1 = 0.0, e2 = 0.0, e3 = 0.0;
};

/// Probe ratios of the three weighted resolvent estimates for each (mu, m).
std::vector<EstimateRatios> weighted_estimate_ratios(const drift::DriftSpec& b, const WeightSpec& w, double alpha,
                                                    double p, const std::vector<double>& mu_list,
                                                    const EstimateOptions& opt = {});
VerificationReport verify_weighted_estimates(const drift::DriftSpec& b, const WeightSpec& w, double alpha, double p,
                                             const std::vector<double>& mu_list, const EstimateOptions& opt = {});

/// ||eta^{-1} |b|^{1/p}||_{p,eta} on one lattice.
double eta_b_norm(const drift::DriftSpec& b, const TorusGrid& g, double nu, double p);
VerificationReport verify_eta_b_integrability(const drift::DriftSpec& b, double nu, double alpha, double p, double L,
                                              const std::vector<int>& N_list = {32, 64});

/// Weighted counterpart of a resolvent assembly, every factor conjugated by eta.
Field weighted_assembly_apply(const resolvent::ResolventAssembly& a, const WeightSpec& w, const Field& h);

}  // namespace sd::weighted
