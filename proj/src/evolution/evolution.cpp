#include "stabledrift/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "stabledrift/errors.hpp"
#include "stabledrift/radial.hpp"
#include "stabledrift/resolvent.hpp"
#include "stabledrift/spectral.hpp"

namespace sd::evolution {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::splitstep_spectral: return "splitstep_spectral";
        case Scheme::splitstep_semilagrangian: return "splitstep_semilagrangian";
        case Scheme::expm_krylov: return "expm_krylov";
    }
    return "?";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "splitstep_spectral" || s == "splitstep") return Scheme::splitstep_spectral;
    if (s == "splitstep_semilagrangian") return Scheme::splitstep_semilagrangian;
    if (s == "expm_krylov") return Scheme::expm_krylov;
    throw ConfigError("unknown propagation scheme '" + s + "'");
}

double cfl_number(const PropagatorConfig& c) {
    const TorusGrid& g = c.grid();
    return c.dt() * c.drift.sup_norm() * std::numbers::pi * g.N / (2.0 * g.L);
}

void validate(const PropagatorConfig& c) {
    if (c.steps < 1) throw ConfigError("steps must be >= 1");
    if (!(c.t_final >= 0.0) || !std::isfinite(c.t_final)) throw ConfigError("t_final must be finite and >= 0");
    if (c.drift.lattice.comp.empty()) throw ConfigError("propagator has no drift lattice");
    spectral::check_alpha(c.alpha);
    if (c.scheme != Scheme::expm_krylov) {
        double cfl = cfl_number(c);
        if (cfl > 1.0)
            throw ConfigError("CFL guard violated: dt*|b|*pi*N/(2L) = " + std::to_string(cfl) + " > 1");
    }
    if (c.scheme == Scheme::expm_krylov && c.krylov_dim < 2) throw ConfigError("krylov_dim must be >= 2");
}

namespace {

cplx interp(const Field& f, const Vec3& x) {
    const TorusGrid& g = f.grid();
    const double h = g.h();
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> frac{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) {
        double u = (wrap_coord(x[a], g.L) + g.L) / h;
        double fl = std::floor(u);
        base[a] = static_cast<int>(fl);
        frac[a] = u - fl;
    }
    cplx acc = 0.0;
    for (int c = 0; c < (1 << g.dim); ++c) {
        std::array<int, 3> ijk = base;
        double w = 1.0;
        for (int a = 0; a < g.dim; ++a) {
            int bit = (c >> a) & 1;
            ijk[a] += bit;
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        if (w != 0.0) acc += w * f[g.ravel(ijk)];
    }
    return acc;
}

}  // namespace

Propagator::Propagator(const PropagatorConfig& c) : cfg_(c) {
    validate(cfg_);
    const TorusGrid& g = cfg_.grid();
    half_heat_ = spectral::heat_semigroup(g, cfg_.alpha, 0.5 * cfg_.dt());
    adv_ = spectral::advection(cfg_.drift.lattice);
    frac_ = spectral::frac_laplacian(g, cfg_.alpha);
}

Field Propagator::advect(const Field& f) const {
    const double dt = cfg_.dt();
    if (cfg_.scheme == Scheme::splitstep_spectral) {
        // sum_{k<=4} (-dt B)^k / k!
        Field out = f, term = f;
        for (int k = 1; k <= 4; ++k) {
            term = adv_(term);
            term *= cplx(-dt / k, 0.0);
            out += term;
        }
        return out;
    }
    const TorusGrid& g = f.grid();
    const auto& b = cfg_.drift.lattice;
    Field out(g);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        Vec3 x = g.point(idx), mid = x, dep = x;
        for (int a = 0; a < g.dim; ++a) mid[a] = x[a] - 0.5 * dt * b.comp[a][idx].real();
        Vec3 vm = drift::interpolate(b, mid);
        for (int a = 0; a < g.dim; ++a) dep[a] = x[a] - dt * vm[a];
        out[idx] = interp(f, dep);
    }
    return out;
}

Field Propagator::krylov_step(const Field& f) const {
    const int m = cfg_.krylov_dim;
    const double beta = norm2(f);
    if (beta == 0.0) return f;
    auto gen = [&](const Field& u) {
        Field w = frac_(u);
        w += adv_(u);
        w *= cplx(-1.0, 0.0);
        return w;
    };
    std::vector<Field> V;
    V.push_back((1.0 / beta) * f);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    int k = m;
    for (int j = 0; j < m; ++j) {
        Field w = gen(V[j]);
        for (int i = 0; i <= j; ++i) {
            cplx hij = inner(w, V[i]);
            H(i, j) = hij;
            w.axpy(-hij, V[i]);
        }
        // one reorthogonalisation pass
        for (int i = 0; i <= j; ++i) {
            cplx c = inner(w, V[i]);
            H(i, j) += c;
            w.axpy(-c, V[i]);
        }
        double hn = norm2(w);
        H(j + 1, j) = hn;
        if (hn <= 1e-13 * beta) {
            k = j + 1;
            break;
        }
        V.push_back((1.0 / hn) * w);
    }
    Eigen::MatrixXcd Hk = cfg_.dt() * H.topLeftCorner(k, k);
    Eigen::MatrixXcd E = Hk.exp();
    krylov_err_ = k < m ? 0.0 : beta * std::abs(H(m, m - 1)) * std::abs(E(m - 1, 0)) * cfg_.dt();
    Field out(f.grid());
    for (int i = 0; i < k; ++i) out.axpy(beta * E(i, 0), V[static_cast<std::size_t>(i)]);
    return out;
}

Field Propagator::step(const Field& f) const {
    if (cfg_.t_final == 0.0) return f;
    if (cfg_.scheme == Scheme::expm_krylov) return krylov_step(f);
    Field u = half_heat_(f);
    u = advect(u);
    return half_heat_(u);
}

Field Propagator::advance(const Field& f, int k) const {
    require(k >= 0, "step count must be nonnegative");
    Field u = f;
    for (int s = 0; s < k; ++s) u = step(u);
    return u;
}

Field propagate(const PropagatorConfig& c, const Field& f) { return Propagator(c).apply(f); }

std::vector<Field> propagate_series(const PropagatorConfig& c, const Field& f, int every) {
    require(every >= 1, "series stride must be >= 1");
    Propagator P(c);
    std::vector<Field> out{f};
    Field u = f;
    for (int s = 1; s <= c.steps; ++s) {
        u = P.step(u);
        if (s % every == 0) out.push_back(u);
    }
    return out;
}

namespace {

// composite Simpson on m intervals (3/8 rule on the last three if m is odd), unit step
std::vector<double> simpson_weights(int m) {
    std::vector<double> w(static_cast<std::size_t>(m) + 1, 0.0);
    if (m == 1) {
        w[0] = w[1] = 0.5;
        return w;
    }
    int even = m % 2 == 0 ? m : m - 3;
    for (int i = 0; i + 2 <= even; i += 2) {
        w[i] += 1.0 / 3.0;
        w[i + 1] += 4.0 / 3.0;
        w[i + 2] += 1.0 / 3.0;
    }
    if (even != m) {
        w[even] += 3.0 / 8.0;
        w[even + 1] += 9.0 / 8.0;
        w[even + 2] += 9.0 / 8.0;
        w[even + 3] += 3.0 / 8.0;
    }
    return w;
}

}  // namespace

double duhamel_residual(const PropagatorConfig& c, const Field& f) {
    Propagator P(c);
    const TorusGrid& g = c.grid();
    const double fn = norm2(f);
    if (fn == 0.0) return 0.0;
    const int m = c.steps;
    const double dt = c.dt();
    auto w = simpson_weights(m);
    Operator B = spectral::advection(c.drift.lattice);
    Operator heat_dt = spectral::heat_semigroup(g, c.alpha, dt);
    // acc = sum_j w_j T^{m-j} g_j with g_j = B e^{-j dt A} f, by Horner
    Field free = f;
    Field acc = B(free);
    acc *= cplx(w[0] * dt, 0.0);
    for (int j = 1; j <= m; ++j) {
        free = heat_dt(free);
        acc = P.step(acc);
        acc.axpy(w[static_cast<std::size_t>(j)] * dt, B(free));
    }
    Field r = P.apply(f);
    r -= spectral::heat_semigroup(g, c.alpha, c.t_final)(f);
    r += acc;
    return norm2(r) / fn;
}

Field laplace_resolvent(const PropagatorConfig& c, double mu, const Field& f, int nodes) {
    require(mu > 0.0, "Laplace mass must be positive");
    require(nodes >= 2, "need at least two quadrature intervals");
    const double T = 40.0 / mu;
    const double H = T / nodes;
    PropagatorConfig sub = c;
    sub.steps = std::max(1, static_cast<int>(std::ceil(H / c.dt() - 1e-12)));
    sub.t_final = H;
    Propagator P(sub);
    auto w = simpson_weights(nodes);
    Field u = f;
    Field acc = f;
    acc *= cplx(w[0] * H, 0.0);
    for (int j = 1; j <= nodes; ++j) {
        u = P.apply(u);
        acc.axpy(w[static_cast<std::size_t>(j)] * H * std::exp(-mu * j * H), u);
    }
    return acc;
}

double cutoff_profile(double s) {
    if (s <= 1.0) return 1.0;
    if (s >= 2.0) return 0.0;
    auto psi = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
    double a = psi(2.0 - s), b = psi(s - 1.0);
    return a / (a + b);
}

Field cutoff(const TorusGrid& g, double k) {
    require(k > 0.0, "cutoff radius must be positive");
    return Field::from_function(g, [k](const Vec3& y) {
        double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
        return cplx(r <= k ? 1.0 : cutoff_profile(r + 1.0 - k), 0.0);
    });
}

std::vector<double> cutoff_masses(const PropagatorConfig& c, std::size_t x_index, const std::vector<double>& k_list) {
    const TorusGrid& g = c.grid();
    require(x_index < g.size(), "lattice site out of range");
    Propagator P(c);
    std::vector<double> out;
    for (double k : k_list) {
        if (!(k > 0.0 && k < g.L)) throw ParameterError("cutoff radius must lie in (0, L)");
        out.push_back(P.apply(cutoff(g, k))[x_index].real());
    }
    return out;
}

double free_cutoff_defect(double alpha, int dim, double t, double k) {
    require(dim == 3 || dim == 1, "radial tail oracle supports dim 1 and 3");
    auto shell = [&](double r) {
        double area = dim == 3 ? 4.0 * std::numbers::pi * r * r : 2.0;
        return area * radial::heat_kernel_value(alpha, dim, t, r);
    };
    using boost::math::quadrature::gauss_kronrod;
    double band = gauss_kronrod<double, 31>::integrate(
        [&](double r) { return (1.0 - cutoff_profile(r + 1.0 - k)) * shell(r); }, k, k + 1.0, 8, 1e-12);
    boost::math::quadrature::exp_sinh<double> es;
    double tail = es.integrate([&](double u) { return shell(k + 1.0 + u); }, 1e-13);
    return band + tail;
}

VerificationReport conservativeness_check(const drift::DriftSpec& base, const TorusGrid& g, double alpha,
                                          std::size_t x_index, const std::vector<double>& k_list,
                                          const ConservativenessOptions& opt) {
    require(!k_list.empty(), "k list is empty");
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        if (!(k_list[i] > 0.0 && k_list[i] < g.L)) throw ParameterError("cutoff radius must lie in (0, L)");
        if (i > 0) require(k_list[i] > k_list[i - 1], "k list must be increasing");
    }
    require(!opt.n_list.empty(), "n list is empty");
    VerificationReport rep("conservativeness");
    rep.input("t", opt.t);
    rep.input("steps", opt.steps);
    rep.input("k_list", k_list);
    rep.input("n_list", opt.n_list);
    rep.input("x", g.point(x_index));
    rep.input("scheme", to_string(opt.scheme));
    rep.input("N", g.N);
    rep.input("L", g.L);

    auto config_for = [&](const drift::MollifiedDrift& bn) {
        PropagatorConfig c;
        c.drift = bn;
        c.alpha = alpha;
        c.t_final = opt.t;
        c.steps = opt.steps;
        c.scheme = opt.scheme;
        return c;
    };
    // b = 0 baseline separates the scheme's and the torus' share from the drift's
    auto free_cfg = config_for(drift::mollify(drift::zero(g.dim), 1, g));
    auto free_vals = cutoff_masses(free_cfg, x_index, k_list);
    std::vector<double> oracle;
    for (double k : k_list) oracle.push_back(free_cutoff_defect(alpha, g.dim, opt.t, k));
    std::vector<double> free_def;
    for (double v : free_vals) free_def.push_back(1.0 - v);
    rep.metric("free_defect", free_def);
    rep.metric("free_defect_oracle", oracle);

    double worst_last = 0.0;
    std::vector<double> last_values;
    for (int n : opt.n_list) {
        auto cfg = config_for(drift::mollify(base, n, g));
        auto vals = cutoff_masses(cfg, x_index, k_list);
        const std::string tag = "n" + std::to_string(n);
        rep.metric(tag + "_values", vals);
        bool mono = true;
        for (std::size_t i = 1; i < vals.size(); ++i) mono = mono && vals[i] > vals[i - 1];
        if (vals.size() > 1) rep.check(tag + "_monotone_in_k", mono, vals.back() - vals.front());
        // tail defect = whole-space free defect + what the drift moves relative to the b = 0 run
        const double tail = std::abs(oracle.back() + free_vals.back() - vals.back());
        rep.metric(tag + "_raw_defect_at_largest_k", std::abs(1.0 - vals.back()));
        rep.check_le(tag + "_defect_at_largest_k", tail, opt.tolerance);
        double total = Propagator(cfg).apply(Field::constant(g, 1.0))[x_index].real();
        rep.check_le(tag + "_total_mass_error", std::abs(total - 1.0), 1e-8);
        worst_last = std::max(worst_last, tail);
        last_values.push_back(vals.back());
    }
    rep.metric("max_defect_at_largest_k_over_n", worst_last);
    rep.metric("largest_k_values_over_n", last_values);
    rep.provenance("grid_levels", json::array({g.N}));
    return rep;
}

std::vector<double> cauchy_differences(const std::vector<drift::MollifiedDrift>& approximants, double alpha, double t,
                                       int steps, const Field& f, Scheme scheme) {
    std::vector<Field> sols;
    for (const auto& bn : approximants) {
        PropagatorConfig c;
        c.drift = bn;
        c.alpha = alpha;
        c.t_final = t;
        c.steps = steps;
        c.scheme = scheme;
        sols.push_back(propagate(c, f));
    }
    std::vector<double> out;
    for (std::size_t i = 1; i < sols.size(); ++i) out.push_back(norm_inf(sols[i] - sols[i - 1]));
    return out;
}

VerificationReport feller_convergence_check(const std::vector<drift::MollifiedDrift>& approximants, double alpha,
                                            const Field& f, const FellerOptions& opt) {
    require(approximants.size() >= 2, "need at least two approximants");
    VerificationReport rep("feller_convergence");
    std::vector<int> ns;
    for (const auto& a : approximants) ns.push_back(a.n);
    rep.input("n_list", ns);
    rep.input("t", opt.t);
    rep.input("steps", opt.steps);
    rep.input("scheme", to_string(opt.scheme));
    rep.input("mu_ladder", opt.mu_ladder);
    auto diffs = cauchy_differences(approximants, alpha, opt.t, opt.steps, f, opt.scheme);
    rep.metric("cauchy_differences", diffs);
    bool dec = true;
    for (std::size_t i = 1; i < diffs.size(); ++i) dec = dec && (diffs[i] < diffs[i - 1] || diffs[i - 1] == 0.0);
    if (diffs.size() > 1) rep.check("cauchy_strictly_decreasing", dec, diffs.back());
    rep.check("cauchy_finite", std::all_of(diffs.begin(), diffs.end(), [](double d) { return std::isfinite(d); }),
              diffs.back());

    if (!opt.mu_ladder.empty()) {
        const auto& fine = approximants.back().lattice;
        std::vector<double> gaps;
        for (double mu : opt.mu_ladder) {
            auto th = resolvent::assemble_theta2(fine, alpha, cplx(mu, 0.0));
            Field u = th.apply(f);
            u *= cplx(mu, 0.0);
            gaps.push_back(norm_inf(u - f));
        }
        rep.metric("resolvent_gap_sup", gaps);
        bool gdec = true;
        for (std::size_t i = 1; i < gaps.size(); ++i) gdec = gdec && (gaps[i] < gaps[i - 1] || gaps[i - 1] == 0.0);
        rep.check("resolvent_gap_decreasing", gdec, gaps.back());
    }
    rep.provenance("grid_levels", json::array({approximants.front().grid().N}));
    return rep;
}

VerificationReport feller_convergence_check(const drift::DriftSpec& base, const TorusGrid& g, double alpha,
                                            const std::vector<int>& n_list, const Field& f,
                                            const FellerOptions& opt) {
    for (std::size_t i = 1; i < n_list.size(); ++i) require(n_list[i] > n_list[i - 1], "n list must be increasing");
    std::vector<drift::MollifiedDrift> approx;
    for (int n : n_list) approx.push_back(drift::mollify(base, n, g));
    auto rep = feller_convergence_check(approx, alpha, f, opt);
    rep.input("drift", base.to_json());
    return rep;
}

void write_slice_csv(std::ostream& os, const Field& f, std::size_t through) {
    const TorusGrid& g = f.grid();
    require(through < g.size(), "lattice site out of range");
    auto ijk = g.unravel(through);
    os.precision(17);
    os << "x,re,im\r\n";
    for (int j = 0; j < g.N; ++j) {
        ijk[0] = j;
        const cplx v = f[g.ravel(ijk)];
        os << g.coord(j) << ',' << v.real() << ',' << v.imag() << "\r\n";
    }
}

void write_series_csv(std::ostream& os, const std::vector<double>& t, const std::vector<double>& v,
                      const std::string& name) {
    require(t.size() == v.size(), "series lengths differ");
    os.precision(17);
    os << "t," << name << "\r\n";
    for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << ',' << v[i] << "\r\n";
}

}  // namespace sd::evolution
