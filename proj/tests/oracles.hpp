#pragma once
// Reference values computed independently of the library: series, closed forms
// and direct quadrature written for the tests only.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace oracle {

constexpr double pi = std::numbers::pi;

/// CDF of the symmetric 1D stable law with E e^{ikX} = e^{-t|k|^alpha} (Gil-Pelaez).
inline double stable_cdf_1d(double x, double alpha, double t = 1.0) {
    if (x == 0.0) return 0.5;
    auto f = [&](double k) { return k == 0.0 ? x : std::sin(k * x) * std::exp(-t * std::pow(k, alpha)) / k; };
    double upper = std::pow(40.0 / t, 1.0 / alpha);
    double s = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, upper, 15, 1e-13);
    return 0.5 + s / pi;
}

/// Two-sided Kolmogorov distribution tail P(K > lambda).
inline double kolmogorov_tail(double lambda) {
    if (lambda < 0.2) return 1.0;
    double s = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = std::exp(-2.0 * j * j * lambda * lambda);
        s += (j % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(s, 0.0, 1.0);
}

/// One-sample KS p-value of `x` against a continuous CDF.
template <class Cdf>
double ks_pvalue(std::vector<double> x, const Cdf& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double F = cdf(x[i]);
        d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    double sn = std::sqrt(n);
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

/// Two-sample KS p-value.
inline double ks2_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    double ne = std::sqrt(na * nb / (na + nb));
    return kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d);
}

/// 3D heat kernel p_1(r) of (-Delta)^{alpha/2} from its Taylor series in r (entire for alpha > 1).
inline double stable_density_3d_series(double r, double alpha) {
    double s = 0.0;
    for (int n = 0; n < 200; ++n) {
        double lg = std::lgamma((2.0 * n + 3.0) / alpha) - std::lgamma(2.0 * n + 2.0);
        double term = std::exp(lg + (n ? 2.0 * n * std::log(r) : 0.0)) / alpha;
        s += (n % 2 ? -term : term);
        if (n > 5 && term < 1e-18 * std::abs(s)) break;
    }
    return s / (2.0 * pi * pi);
}

/// d/dr of the Taylor series above.
inline double stable_density_3d_series_derivative(double r, double alpha) {
    if (r == 0.0) return 0.0;
    double s = 0.0;
    for (int n = 1; n < 200; ++n) {
        double lg = std::lgamma((2.0 * n + 3.0) / alpha) - std::lgamma(2.0 * n + 2.0);
        double term = 2.0 * n * std::exp(lg + (2.0 * n - 1.0) * std::log(r)) / alpha;
        s += (n % 2 ? -term : term);
        if (n > 5 && term < 1e-18 * std::abs(s)) break;
    }
    return s / (2.0 * pi * pi);
}

/// p_t(0) = (2 pi)^{-d} |S^{d-1}| Gamma(d/alpha) / alpha * t^{-d/alpha}.
inline double heat_kernel_at_origin(double alpha, int d, double t) {
    double sphere = 2.0 * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0);
    return std::pow(2.0 * pi, -d) * sphere * std::tgamma(d / alpha) / alpha * std::pow(t, -d / alpha);
}

/// lim r^{d+alpha} p_1(r): the Levy density constant of the isotropic stable law.
inline double stable_tail_constant(double alpha, int d) {
    return alpha * std::pow(2.0, alpha - 1.0) * std::pow(pi, -d / 2.0 - 1.0) * std::tgamma((d + alpha) / 2.0) *
           std::tgamma(alpha / 2.0) * std::sin(pi * alpha / 2.0);
}

/// Large-r expansion of the 3D p_1(r):
/// (2 pi^2)^{-1} sum_n (-1)^{n+1} Gamma(n alpha + 1)(n alpha + 1) sin(n pi alpha / 2) / n! r^{-n alpha - 3}.
inline double stable_density_3d_asymptotic(double r, double alpha, int terms) {
    double s = 0.0;
    for (int n = 1; n <= terms; ++n) {
        double na = n * alpha;
        double term = std::tgamma(na + 1.0) * (na + 1.0) * std::sin(n * pi * alpha / 2.0) / std::tgamma(n + 1.0) *
                      std::pow(r, -na - 3.0);
        s += (n % 2 ? term : -term);
    }
    return s / (2.0 * pi * pi);
}

inline double stable_density_3d_asymptotic_derivative(double r, double alpha, int terms) {
    double s = 0.0;
    for (int n = 1; n <= terms; ++n) {
        double na = n * alpha;
        double term = std::tgamma(na + 1.0) * (na + 1.0) * std::sin(n * pi * alpha / 2.0) / std::tgamma(n + 1.0) *
                      -(na + 3.0) * std::pow(r, -na - 4.0);
        s += (n % 2 ? term : -term);
    }
    return s / (2.0 * pi * pi);
}

/// Constant c with int_{|x|<1} c exp(-1/(1-|x|^2)) dx = 1 in d = 3.
inline double mollifier_constant_3d() {
    auto f = [](double r) { return r >= 1.0 ? 0.0 : r * r * std::exp(-1.0 / (1.0 - r * r)); };
    double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-14);
    return 1.0 / (4.0 * pi * I);
}

inline double kappa(double alpha, int d) {
    return std::pow(2.0, (alpha - 1.0) / 2.0) * std::tgamma((d + alpha - 1.0) / 4.0) /
           std::tgamma((d - alpha + 1.0) / 4.0);
}

}  // namespace oracle
