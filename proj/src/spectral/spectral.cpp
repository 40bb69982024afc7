#include "stabledrift/spectral.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "stabledrift/errors.hpp"
#include "stabledrift/fft.hpp"

namespace sd::spectral {

namespace {

double knorm(const Vec3& k) { return std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

void check_alpha(double alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw ParameterError("alpha must lie in (1,2)");
}

Operator frac_laplacian(const TorusGrid& g, double alpha) {
    require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0,2]");
    return Operator::multiplier(
        g, [alpha](const Vec3& k) { return cplx(std::pow(knorm(k), alpha), 0.0); }, "A^" + fmt(alpha));
}

Operator mass_power(const TorusGrid& g, double alpha, cplx zeta, double s) {
    require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0,2]");
    return Operator::multiplier(
        g,
        [=](const Vec3& k) {
            cplx base = zeta + std::pow(knorm(k), alpha);
            if (base == cplx(0.0, 0.0)) {
                if (s > 0.0) return cplx(0.0, 0.0);
                throw ParameterError("mass_power: zero symbol raised to a non-positive power");
            }
            return std::pow(base, s);
        },
        "(" + fmt(zeta.real()) + (zeta.imag() != 0.0 ? "+" + fmt(zeta.imag()) + "i" : "") + "+A)^" + fmt(s));
}

Operator resolvent_power(const TorusGrid& g, double alpha, double mu, double gamma) {
    require(mu > 0.0, "resolvent mass must be positive");
    return resolvent_power(g, alpha, cplx(mu, 0.0), gamma);
}

Operator resolvent_power(const TorusGrid& g, double alpha, cplx zeta, double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ParameterError("resolvent power gamma must lie in (0,1]");
    require(zeta.real() > 0.0, "resolvent requires Re zeta > 0");
    return mass_power(g, alpha, zeta, -gamma);
}

Operator heat_semigroup(const TorusGrid& g, double alpha, double t) {
    require(t >= 0.0, "time must be nonnegative");
    return Operator::multiplier(
        g, [=](const Vec3& k) { return cplx(std::exp(-t * std::pow(knorm(k), alpha)), 0.0); },
        "exp(-" + fmt(t) + "A)");
}

Operator gradient(const TorusGrid& g, int axis) {
    require(axis >= 0 && axis < g.dim, "gradient axis out of range");
    std::vector<cplx> t(g.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        auto ijk = g.unravel(i);
        t[i] = g.is_nyquist(ijk[axis]) ? cplx(0.0, 0.0) : cplx(0.0, g.wavenumber(ijk[axis]));
    }
    return Operator::multiplier_table(g, std::move(t), "d" + std::to_string(axis));
}

Operator laplace_mass_power(const TorusGrid& g, double lambda, double s) {
    return Operator::multiplier(
        g,
        [=](const Vec3& k) {
            double kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            return cplx(std::pow(lambda + kk, s), 0.0);
        },
        "(" + fmt(lambda) + "-Lap)^" + fmt(s));
}

Operator drop_zero_mode(const TorusGrid& g) {
    std::vector<cplx> t(g.size(), cplx(1.0, 0.0));
    t[0] = 0.0;
    return Operator::multiplier_table(g, std::move(t), "P0");
}

Operator advection(const VectorField& b) {
    const auto& g = b.grid;
    require(static_cast<int>(b.comp.size()) == g.dim, "drift must have dim components");
    Operator op = Operator::multiply(b.comp[0], "b0") * gradient(g, 0);
    for (int a = 1; a < g.dim; ++a) op = op + Operator::multiply(b.comp[a], "b" + std::to_string(a)) * gradient(g, a);
    return op;
}

VectorField grad(const Field& f) {
    const auto& g = f.grid();
    VectorField out(g);
    Field fh = f;
    fft::forward(fh);
    for (int a = 0; a < g.dim; ++a) {
        Field c(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto ijk = g.unravel(i);
            c[i] = g.is_nyquist(ijk[a]) ? cplx(0.0, 0.0) : cplx(0.0, g.wavenumber(ijk[a])) * fh[i];
        }
        fft::backward(c);
        out.comp[static_cast<std::size_t>(a)] = std::move(c);
    }
    return out;
}

double max_wavenumber(const TorusGrid& g) { return std::sqrt(static_cast<double>(g.dim)) * std::numbers::pi / g.h(); }

Field balakrishnan_apply(const TorusGrid& g, double alpha, double mu, double tau, const Field& f,
                         const BalakrishnanOptions& opt) {
    require(tau > 0.0 && tau < 1.0, "Balakrishnan exponent must lie in (0,1)");
    require(mu > 0.0, "mass must be positive");
    // spectrum of mu + A lies in [lo, hi]; integrand in s: e^{(1-tau)s}/(e^s + lam)
    const double lo = mu;
    const double hi = mu + std::pow(max_wavenumber(g), alpha);
    const double cut = -std::log(opt.tail_tol);
    const double s_min = std::log(lo) - cut / (1.0 - tau);
    const double s_max = std::log(hi) + cut / tau;
    const int n = static_cast<int>(std::ceil((s_max - s_min) / opt.step));
    const double h = (s_max - s_min) / n;
    Field acc(g);
    for (int j = 0; j <= n; ++j) {
        double s = s_min + j * h;
        double t = std::exp(s);
        double w = (j == 0 || j == n ? 0.5 : 1.0) * h * std::exp((1.0 - tau) * s);
        Operator res = resolvent_power(g, alpha, t + mu, 1.0);
        acc.axpy(w, res.apply(f));
    }
    acc *= std::sin(std::numbers::pi * tau) / std::numbers::pi;
    return acc;
}

}  // namespace sd::spectral

namespace sd::probes {

Field gaussian(const TorusGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Field f(g);
    for (auto& z : f.values()) z = nd(rng);
    return f;
}

Field signs(const TorusGrid& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution bd(0.5);
    Field f(g);
    for (auto& z : f.values()) z = bd(rng) ? 1.0 : -1.0;
    return f;
}

Field smooth(const TorusGrid& g, std::uint64_t seed, double k_cut) {
    Field f = gaussian(g, seed);
    fft::forward(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto k = g.wavevector(i);
        double kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) / (k_cut * k_cut);
        f[i] *= std::exp(-kk);
    }
    fft::backward(f);
    return f.real_part();
}

Field bumps(const TorusGrid& g, std::uint64_t seed, double radius, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    Field f(g);
    for (int c = 0; c < count; ++c) {
        double width = radius * (0.3 + 0.3 * (ud(rng) + 1.0));
        Vec3 center{0.0, 0.0, 0.0};
        double cn = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            center[a] = ud(rng) * (radius - width) / std::sqrt(static_cast<double>(g.dim));
            cn += center[a] * center[a];
        }
        double amp = 0.5 + 0.5 * (ud(rng) + 1.0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto x = g.point(i);
            double r2 = 0.0;
            for (int a = 0; a < g.dim; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
            double u = r2 / (width * width);
            if (u < 1.0) f[i] += amp * std::exp(1.0 - 1.0 / (1.0 - u));
        }
    }
    return f;
}

}  // namespace sd::probes
