#include "stabledrift/radial.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stabledrift/errors.hpp"

namespace sd::radial {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

double sphere_area(int dim) { return 2.0 * std::pow(pi, 0.5 * dim) / std::tgamma(0.5 * dim); }

void check_dim(int dim) {
    if (dim != 1 && dim != 3) throw ParameterError("radial kernels are implemented for dim 1 and 3");
}

/// int_0^inf g(y) dy along the ray y -> y e^{i theta}, y = u * scale.
cplx ray_integral(const std::function<cplx(cplx)>& g, double scale, double theta, const char* what) {
    const cplx dir = std::polar(1.0, theta);
    boost::math::quadrature::exp_sinh<double> integrator;
    auto part = [&](bool imag) {
        auto f = [&](double u) {
            cplx k = dir * (u * scale);
            cplx v = g(k) * dir * scale;
            return imag ? v.imag() : v.real();
        };
        double err = 0.0, l1 = 0.0;
        double val = integrator.integrate(f, 1e-14, &err, &l1);
        if (!std::isfinite(val) || err > 1e-9 * l1 + 1e-300)
            throw NumericalError(std::string("radial quadrature did not converge (") + what +
                                 "): value=" + std::to_string(val) + " err=" + std::to_string(err) +
                                 " L1=" + std::to_string(l1));
        return val;
    };
    return {part(false), part(true)};
}

cplx kpow(cplx k, double a) { return std::exp(a * std::log(k)); }

}  // namespace

double transform(const Symbol& m, int dim, double r, double k_scale, double theta) {
    check_dim(dim);
    require(r > 0.0, "radial transform needs r > 0");
    const double scale = std::min(1.0 / r, k_scale);
    if (dim == 3) {
        cplx j1 = ray_integral([&](cplx k) { return m(k) * k * std::exp(cplx(0.0, 1.0) * k * r); }, scale, theta,
                               "d=3 value");
        return j1.imag() / (2.0 * pi * pi * r);
    }
    cplx j0 = ray_integral([&](cplx k) { return m(k) * std::exp(cplx(0.0, 1.0) * k * r); }, scale, theta,
                           "d=1 value");
    return j0.real() / pi;
}

double transform_derivative(const Symbol& m, int dim, double r, double k_scale, double theta) {
    check_dim(dim);
    require(r > 0.0, "radial transform needs r > 0");
    const double scale = std::min(1.0 / r, k_scale);
    const cplx I(0.0, 1.0);
    if (dim == 3) {
        cplx j1 = ray_integral([&](cplx k) { return m(k) * k * std::exp(I * k * r); }, scale, theta, "d=3 value");
        cplx j2 = ray_integral([&](cplx k) { return m(k) * k * k * std::exp(I * k * r); }, scale, theta,
                               "d=3 derivative");
        double val = j1.imag() / (2.0 * pi * pi * r);
        return -val / r + j2.real() / (2.0 * pi * pi * r);
    }
    cplx j1 = ray_integral([&](cplx k) { return m(k) * k * std::exp(I * k * r); }, scale, theta, "d=1 derivative");
    return -j1.imag() / pi;
}

double transform_at_origin(const std::function<double(double)>& m, int dim, double k_scale) {
    require(dim >= 1, "dimension must be positive");
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0, l1 = 0.0;
    double val = integrator.integrate(
        [&](double u) {
            double k = u * k_scale;
            return m(k) * std::pow(k, dim - 1) * k_scale;
        },
        1e-14, &err, &l1);
    if (!std::isfinite(val) || err > 1e-9 * l1 + 1e-300) throw NumericalError("origin quadrature did not converge");
    return val * sphere_area(dim) / std::pow(2.0 * pi, dim);
}

namespace {

double theta_for(double alpha) { return pi / (4.0 * alpha); }

Symbol heat_symbol(double alpha, double t) {
    return [=](cplx k) { return std::exp(-t * kpow(k, alpha)); };
}

Symbol resolvent_symbol(double alpha, double mu, double gamma) {
    return [=](cplx k) { return kpow(mu + kpow(k, alpha), -gamma); };
}

}  // namespace

double heat_kernel_value(double alpha, int dim, double t, double r) {
    require(t > 0.0, "heat kernel time must be positive");
    require(r >= 0.0, "radius must be nonnegative");
    const double ks = std::pow(t, -1.0 / alpha);
    if (r == 0.0) return transform_at_origin([=](double k) { return std::exp(-t * std::pow(k, alpha)); }, dim, ks);
    return transform(heat_symbol(alpha, t), dim, r, ks, theta_for(alpha));
}

double heat_kernel_derivative(double alpha, int dim, double t, double r) {
    require(t > 0.0, "heat kernel time must be positive");
    if (r == 0.0) return 0.0;
    return transform_derivative(heat_symbol(alpha, t), dim, r, std::pow(t, -1.0 / alpha), theta_for(alpha));
}

double resolvent_kernel(double alpha, int dim, double mu, double gamma, double r) {
    require(mu > 0.0 && gamma > 0.0, "resolvent kernel needs mu > 0, gamma > 0");
    require(r > 0.0, "resolvent kernel is singular at r = 0");
    return transform(resolvent_symbol(alpha, mu, gamma), dim, r, 1.0 / r, theta_for(alpha));
}

double resolvent_kernel_derivative(double alpha, int dim, double mu, double gamma, double r) {
    require(mu > 0.0 && gamma > 0.0, "resolvent kernel needs mu > 0, gamma > 0");
    require(r > 0.0, "resolvent kernel is singular at r = 0");
    return transform_derivative(resolvent_symbol(alpha, mu, gamma), dim, r, 1.0 / r, theta_for(alpha));
}

double resolvent_kernel_subordinated(double alpha, int dim, double mu, double gamma, double r) {
    require(mu > 0.0 && gamma > 0.0 && r > 0.0, "invalid resolvent kernel arguments");
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    double val = integrator.integrate(
        [&](double t) {
            if (t <= 0.0 || !std::isfinite(t)) return 0.0;
            double w = std::exp(-mu * t) * std::pow(t, gamma - 1.0);
            if (w == 0.0) return 0.0;
            return w * heat_kernel_value(alpha, dim, t, r);
        },
        1e-11, &err);
    return val / std::tgamma(gamma);
}

double envelope(double alpha, int dim, double t, double r) {
    double a = std::pow(t, -dim / alpha);
    if (r == 0.0) return a;
    return std::min(a, t / std::pow(r, dim + alpha));
}

KernelBoundFit fit_kernel_bounds(double alpha, int dim, const std::vector<double>& t_list,
                                 const std::vector<double>& r_list) {
    require(!t_list.empty() && !r_list.empty(), "kernel-bound grid is empty");
    KernelBoundFit fit;
    fit.C = std::numeric_limits<double>::infinity();
    fit.K = 0.0;
    for (double t : t_list) {
        for (double r : r_list) {
            double env = envelope(alpha, dim, t, r);
            double lo = heat_kernel_value(alpha, dim, t, r) / env;
            double gr = std::abs(heat_kernel_derivative(alpha, dim, t, r)) / (std::pow(t, -1.0 / alpha) * env);
            fit.lower_ratio.push_back(lo);
            fit.gradient_ratio.push_back(gr);
            fit.C = std::min(fit.C, lo);
            fit.K = std::max(fit.K, gr);
        }
    }
    for (std::size_t i = 0; i < fit.lower_ratio.size(); ++i) {
        if (fit.lower_ratio[i] < fit.C) ++fit.lower_violations;
        if (fit.gradient_ratio[i] > fit.K) ++fit.gradient_violations;
    }
    fit.profile_C = heat_kernel_value(alpha, dim, 1.0, 0.0);
    fit.profile_K = 0.0;
    for (int i = 0; i <= 160; ++i) {
        double rho = std::pow(10.0, -4.0 + 0.05 * i);
        double env = envelope(alpha, dim, 1.0, rho);
        fit.profile_C = std::min(fit.profile_C, heat_kernel_value(alpha, dim, 1.0, rho) / env);
        fit.profile_K = std::max(fit.profile_K, std::abs(heat_kernel_derivative(alpha, dim, 1.0, rho)) / env);
    }
    return fit;
}

std::vector<std::pair<double, double>> default_m_sample(int n) {
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i < n; ++i) {
        double mu = std::pow(10.0, -2.0 + 4.0 * i / (n - 1));
        for (int j = 0; j < n; ++j) {
            double r = std::pow(10.0, -2.0 + 3.0 * j / (n - 1));
            s.emplace_back(mu, r);
        }
    }
    return s;
}

MEstimate estimate_m_dalpha(double alpha, int dim, const std::vector<std::pair<double, double>>& mu_r,
                            const std::vector<double>& kappa_ladder) {
    if (mu_r.empty()) throw ParameterError("estimate_m_dalpha: empty sample specification");
    require(!kappa_ladder.empty(), "kappa ladder is empty");
    const double gamma = (alpha - 1.0) / alpha;
    std::vector<double> lhs;
    for (auto [mu, r] : mu_r) lhs.push_back(std::abs(resolvent_kernel_derivative(alpha, dim, mu, 1.0, r)));
    MEstimate out;
    out.m_est = std::numeric_limits<double>::infinity();
    std::vector<double> best_rhs;
    for (double kappa : kappa_ladder) {
        double m = 0.0;
        std::vector<double> rhs;
        for (std::size_t i = 0; i < mu_r.size(); ++i) {
            auto [mu, r] = mu_r[i];
            rhs.push_back(resolvent_kernel(alpha, dim, mu / kappa, gamma, r));
            m = std::max(m, lhs[i] / rhs.back());
        }
        out.per_kappa.emplace_back(kappa, m);
        if (kappa == 1.0) out.m_kappa1 = m;
        if (m < out.m_est) {
            out.m_est = m;
            out.kappa_est = kappa;
            best_rhs = rhs;
        }
    }
    out.min_residual = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lhs.size(); ++i)
        out.min_residual = std::min(out.min_residual, out.m_est * best_rhs[i] - lhs[i]);
    auto prof = fit_kernel_bounds(alpha, dim, {1.0}, {1.0});
    out.C = prof.profile_C;
    out.K = prof.profile_K;
    const double g = std::tgamma(1.0 - 1.0 / alpha);
    out.analytic_bound = out.K / out.C * g;
    out.literal_product_bound = out.K * out.C * g;
    return out;
}

}  // namespace sd::radial
