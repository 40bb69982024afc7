#pragma once

#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace sd::radial {

using Symbol = std::function<std::complex<double>(std::complex<double>)>;

/// Whole-space radial kernel of a radial Fourier symbol m(|k|) in dimension
/// 1 or 3, K(r) = (2 pi)^{-d} int m(|k|) e^{ik.x} dk at |x| = r > 0. The
/// integral runs along a ray arg k = theta in the upper half plane where m must
/// be analytic; `k_scale` is the symbol's natural wavenumber scale.
double transform(const Symbol& m, int dim, double r, double k_scale, double theta);
/// dK/dr.
double transform_derivative(const Symbol& m, int dim, double r, double k_scale, double theta);
/// K(0) from the real-axis integral (2 pi)^{-d} |S^{d-1}| int_0^inf m(k) k^{d-1} dk.
double transform_at_origin(const std::function<double(double)>& m, int dim, double k_scale);

/// Heat kernel p_t(r) of e^{-tA} on R^d.
double heat_kernel_value(double alpha, int dim, double t, double r);
/// d/dr p_t(r).
double heat_kernel_derivative(double alpha, int dim, double t, double r);
/// Resolvent-power kernel (mu + A)^{-gamma}(r), r > 0.
double resolvent_kernel(double alpha, int dim, double mu, double gamma, double r);
double resolvent_kernel_derivative(double alpha, int dim, double mu, double gamma, double r);
/// Same kernel through (1/Gamma(gamma)) int e^{-mu t} t^{gamma-1} p_t(r) dt.
double resolvent_kernel_subordinated(double alpha, int dim, double mu, double gamma, double r);

/// Two-sided envelope t^{-d/alpha} ^ t/r^{d+alpha}.
double envelope(double alpha, int dim, double t, double r);

struct KernelBoundFit {
    double C = 0.0;                ///< lower-bound constant fitted on the sample grid
    double K = 0.0;                ///< gradient-bound constant fitted on the sample grid
    int lower_violations = 0;
    int gradient_violations = 0;
    double profile_C = 0.0;        ///< inf of p_1/env over the wide scaling profile
    double profile_K = 0.0;        ///< sup of |p_1'|/env over the wide scaling profile
    std::vector<double> lower_ratio;     ///< per sample, row-major in (t, r)
    std::vector<double> gradient_ratio;
};

/// Fit C in p_t(r) >= C env and K in |d_r p_t(r)| <= K t^{-1/alpha} env over
/// the (t, r) grid; the profile values scan rho = t^{-1/alpha} r over [1e-4, 1e4].
KernelBoundFit fit_kernel_bounds(double alpha, int dim, const std::vector<double>& t_list,
                                 const std::vector<double>& r_list);

struct MEstimate {
    double m_est = 0.0;       ///< smallest m over the kappa ladder
    double kappa_est = 0.0;   ///< companion kappa
    double m_kappa1 = 0.0;    ///< m at kappa = 1
    double analytic_bound = 0.0;       ///< (K/C) Gamma(1 - 1/alpha) from the profile constants
    double literal_product_bound = 0.0; ///< K*C*Gamma(1 - 1/alpha), the product form as printed
    double C = 0.0, K = 0.0;
    double min_residual = 0.0;         ///< min over samples of m_est*rhs - lhs (>= 0)
    std::vector<std::pair<double, double>> per_kappa;  ///< (kappa, m)
};

/// Smallest m with |d_r (mu+A)^{-1}(r)| <= m (mu/kappa + A)^{-(alpha-1)/alpha}(r) on the
/// sampled (mu, r) pairs, for each kappa of the ladder.
MEstimate estimate_m_dalpha(double alpha, int dim, const std::vector<std::pair<double, double>>& mu_r,
                            const std::vector<double>& kappa_ladder = {1.0, 2.0, 4.0, 8.0, 16.0});

/// Default sample: mu and r log-spaced, `n` x `n` pairs.
std::vector<std::pair<double, double>> default_m_sample(int n = 20);

}  // namespace sd::radial
