#include "stabledrift/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stabledrift/errors.hpp"
#include "stabledrift/formbound.hpp"
#include "stabledrift/spectral.hpp"

namespace sd::resolvent {

VectorField signed_power(const VectorField& b, double s) {
    VectorField out(b.grid);
    Field mag = b.magnitude();
    for (std::size_t i = 0; i < mag.size(); ++i) {
        double m = mag[i].real();
        double scale = m > 0.0 ? std::pow(m, s - 1.0) : 0.0;
        for (int a = 0; a < b.grid.dim; ++a) out.comp[a][i] = scale * b.comp[a][i].real();
    }
    return out;
}

Field magnitude_power(const VectorField& b, double s) {
    return b.magnitude().map([s](cplx z) { return cplx(z.real() > 0.0 ? std::pow(z.real(), s) : 0.0, 0.0); });
}

Field apply_generator(const VectorField& b, double alpha, cplx zeta, const Field& u) {
    const TorusGrid& g = u.grid();
    Field out = spectral::frac_laplacian(g, alpha)(u);
    out.axpy(zeta, u);
    out += spectral::advection(b)(u);
    return out;
}

Field neumann_inverse(const Operator& X, const Field& g, const NeumannOptions& opt, NeumannStats* stats, double p) {
    Field sum = g;
    Field term = g;
    const double first = norm_p(g, p);
    NeumannStats local;
    NeumannStats& st = stats ? *stats : local;
    st.term_norms.clear();
    st.term_norms.push_back(first);
    st.converged = first == 0.0;
    if (st.converged) return sum;
    int growth = 0;
    for (int k = 1; k <= opt.max_terms; ++k) {
        term = X(term);
        term *= -1.0;
        sum += term;
        double tn = norm_p(term, p);
        st.term_norms.push_back(tn);
        if (tn <= opt.rel_tol * first) {
            st.converged = true;
            return sum;
        }
        double prev = st.term_norms[st.term_norms.size() - 2];
        growth = tn >= prev ? growth + 1 : 0;
        if (growth >= 5) throw DivergenceError("Neumann series terms stopped shrinking", tn / prev);
    }
    throw ConvergenceError("Neumann series did not reach its tolerance", st.term_norms.back() / first);
}

double l2_norm_estimate(const Operator& op, const Field& start, int iterations, double rel_tol) {
    Operator G = op.adjoint() * op;
    Field x = start;
    double nx = norm2(x);
    if (nx == 0.0) return 0.0;
    x *= 1.0 / nx;
    double rho = 0.0, prev = -1.0;
    for (int it = 0; it < iterations; ++it) {
        Field y = G(x);
        rho = inner(y, x).real();
        double ny = norm2(y);
        if (ny == 0.0) return 0.0;
        x = (1.0 / ny) * y;
        if (prev > 0.0 && std::abs(rho - prev) <= rel_tol * rho) break;
        prev = rho;
    }
    return std::sqrt(std::max(rho, 0.0));
}

Field Theta2::apply(const Field& f, NeumannStats* stats) const {
    Field g = right(f);
    Field w = neumann_inverse(HS, g, opt, stats);
    return left(w);
}

Operator Theta2::handle() const {
    Theta2 copy = *this;
    auto fwd = [copy](const Field& f) { return copy.apply(f); };
    return Operator::custom(left.grid(), fwd, nullptr, "Theta2");
}

Theta2 assemble_theta2(const VectorField& b, double alpha, cplx zeta, const NeumannOptions& opt) {
    spectral::check_alpha(alpha);
    require(zeta.real() > 0.0, "Theta2 needs Re zeta > 0");
    const TorusGrid& g = b.grid;
    Theta2 t;
    t.alpha = alpha;
    t.zeta = zeta;
    t.opt = opt;
    const double sl = -(alpha + 1.0) / (2.0 * alpha), sr = -(alpha - 1.0) / (2.0 * alpha);
    t.left = spectral::mass_power(g, alpha, zeta, sl);
    t.right = spectral::mass_power(g, alpha, zeta, sr);
    Field half = magnitude_power(b, 0.5);
    t.H = Operator::multiply(half, "|b|^1/2") * spectral::mass_power(g, alpha, std::conj(zeta), sr);
    t.S = spectral::advection(signed_power(b, 0.5)) * t.left;
    t.HS = t.H.adjoint() * t.S;
    Field start = probes::smooth(g, 3, 0.5 * spectral::max_wavenumber(g));
    start += Field::constant(g, 0.0);
    t.hs_norm = l2_norm_estimate(t.HS, start);
    if (t.hs_norm >= 1.0) throw DivergenceError("||H* S|| estimate is >= 1", t.hs_norm);
    return t;
}

Field ResolventAssembly::apply(const Field& f, NeumannStats* stats) const {
    Field base = resolvent(f);
    Field g = G(outer_right(f));
    Field w = neumann_inverse(T, g, opt, stats, p);
    base -= outer_left(Q(w));
    return base;
}

Operator ResolventAssembly::handle() const {
    ResolventAssembly copy = *this;
    return Operator::custom(resolvent.grid(), [copy](const Field& f) { return copy.apply(f); }, nullptr,
                            "Theta_p");
}

ResolventAssembly assemble_theta_p(const VectorField& b, double alpha, double mu, double p, double q, double r,
                                   std::optional<std::pair<double, double>> p_range, int probes,
                                   std::uint64_t seed, const NeumannOptions& opt) {
    spectral::check_alpha(alpha);
    require(mu > 0.0, "mu must be positive");
    require(r > 1.0 && r < p && p < q, "need 1 < r < p < q");
    if (p_range && !(p > p_range->first && p < p_range->second))
        throw AdmissibilityError("p lies outside (p_-, p_+)");
    const TorusGrid& g = b.grid;
    const double pp = p / (p - 1.0), qq = q / (q - 1.0), rr = r / (r - 1.0);
    const double e = -1.0 + 1.0 / alpha;
    ResolventAssembly a;
    a.alpha = alpha;
    a.mu = mu;
    a.p = p;
    a.q = q;
    a.r = r;
    a.opt = opt;
    a.resolvent = spectral::mass_power(g, alpha, mu, -1.0);
    Operator bp = spectral::advection(signed_power(b, 1.0 / p));
    Operator bq = Operator::multiply(magnitude_power(b, 1.0 / pp), "|b|^1/p'");
    a.T = bp * a.resolvent * bq;
    a.G = bp * spectral::mass_power(g, alpha, mu, -1.0 / alpha + e / r);
    a.Q = spectral::mass_power(g, alpha, mu, e / qq) * bq;
    a.outer_left = spectral::mass_power(g, alpha, mu, -1.0 / alpha + e / q);
    a.outer_right = spectral::mass_power(g, alpha, mu, e / rr);
    LpNormOptions lo;
    lo.probes = probes;
    lo.seed = seed;
    a.t_norm_probe = lp_norm_probe(a.T, p, lo);
    if (a.t_norm_probe >= 1.0) throw DivergenceError("||T_p|| probe is >= 1", a.t_norm_probe);
    return a;
}

namespace {

Field psi(const Field& y, double p) {
    return y.map([p](cplx z) {
        double v = z.real();
        return cplx(v == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(v), p - 1.0), v), 0.0);
    });
}

double plain_pnorm(const Field& f, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i].real()), p);
    return std::pow(s, 1.0 / p);
}

}  // namespace

double lp_norm_probe(const Operator& M, double p, const LpNormOptions& opt, std::vector<double>* per_probe) {
    require(p > 1.0, "p must exceed 1");
    const TorusGrid& g = M.grid();
    const double pp = p / (p - 1.0);
    Operator Mt = M.adjoint();
    double best = 0.0;
    if (per_probe) per_probe->clear();
    for (int s = 0; s < opt.probes; ++s) {
        Field f = probes::gaussian(g, opt.seed + static_cast<std::uint64_t>(s)).abs();
        if (opt.support_radius > 0.0) {
            for (std::size_t i = 0; i < f.size(); ++i) {
                Vec3 x = g.point(i);
                if (std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) > opt.support_radius) f[i] = 0.0;
            }
        }
        double local = 0.0;
        for (int it = 0; it <= opt.iterations; ++it) {
            double nf = plain_pnorm(f, p);
            if (nf == 0.0) break;
            f *= 1.0 / nf;
            Field y = M(f).real_part();
            double ny = plain_pnorm(y, p);
            local = std::max(local, ny);
            if (ny == 0.0 || it == opt.iterations) break;
            Field z = Mt(psi(y, p)).real_part();
            f = psi(z, pp);
        }
        if (per_probe) per_probe->push_back(local);
        best = std::max(best, local);
    }
    return best;
}

LpInequalityResult lp_inequalities(const Field& V, double alpha, double p, double mu, double lambda,
                                   const LpNormOptions& opt, const Field* weight) {
    require(p > 1.0, "p must exceed 1");
    require(mu >= lambda && lambda > 0.0, "need mu >= lambda > 0");
    const TorusGrid& g = V.grid();
    const double pp = p / (p - 1.0);
    const double gam = (alpha - 1.0) / alpha;
    LpInequalityResult res;
    Field Va = V.abs();
    if (norm_inf(Va) == 0.0) return res;
    formbound::PowerOptions po;
    po.rel_tol = 1e-11;
    po.lanczos_steps = 30;
    res.delta = formbound::estimate_weak_formbound(Va, alpha, lambda, po).delta_est;
    auto vpow = [&](double s) {
        return Operator::multiply(Va.map([s](cplx z) { return cplx(z.real() > 0 ? std::pow(z.real(), s) : 0.0, 0.0); }),
                                  "V^s");
    };
    Operator R = spectral::mass_power(g, alpha, mu, -gam);
    Operator Ma = vpow(1.0 / p) * R;
    Operator Mb = vpow(1.0 / p) * R * vpow(1.0 / pp);
    Operator Mc = R * vpow(1.0 / pp);
    if (weight) {
        // ||eta^{-1} M eta||_{L^p(eta^2)} = ||eta^{2/p-1} M eta^{1-2/p}||_{L^p}
        Field w = weight->real_part();
        Field left = w.map([p](cplx z) { return cplx(std::pow(z.real(), 2.0 / p - 1.0), 0.0); });
        Field right = w.map([p](cplx z) { return cplx(std::pow(z.real(), 1.0 - 2.0 / p), 0.0); });
        Operator L = Operator::multiply(left, "eta^(2/p-1)"), Rr = Operator::multiply(right, "eta^(1-2/p)");
        Ma = L * Ma * Rr;
        Mb = L * Mb * Rr;
        Mc = L * Mc * Rr;
    }
    res.norm_a = lp_norm_probe(Ma, p, opt);
    res.norm_b = lp_norm_probe(Mb, p, opt);
    res.norm_c = lp_norm_probe(Mc, p, opt);
    auto fill = [&](double cp, double& ra, double& rb, double& rc) {
        const double dc = res.delta * cp;
        ra = res.norm_a / (std::pow(dc, 1.0 / p) * std::pow(mu, -gam / pp));
        rb = res.norm_b / dc;
        rc = res.norm_c / (std::pow(dc, 1.0 / pp) * std::pow(mu, -gam / p));
    };
    fill(p * pp / 4.0, res.ratio_a, res.ratio_b, res.ratio_c);
    fill(4.0 / (p * pp), res.ratio_a_alt, res.ratio_b_alt, res.ratio_c_alt);
    return res;
}

VerificationReport verify_lp_inequalities(const Field& V, double alpha, double p, double mu, double lambda,
                                          int probes, std::uint64_t seed, const Field* weight) {
    LpNormOptions opt;
    opt.probes = probes;
    opt.seed = seed;
    auto r = lp_inequalities(V, alpha, p, mu, lambda, opt, weight);
    VerificationReport rep(weight ? "weighted_lp_inequalities" : "lp_inequalities");
    rep.input("p", p);
    rep.input("mu", mu);
    rep.input("lambda", lambda);
    rep.input("probes", probes);
    rep.input("N", V.grid().N);
    rep.metric("delta", r.delta);
    rep.metric("c_p", p * (p / (p - 1.0)) / 4.0);
    rep.metric("c_p_alt", 4.0 / (p * (p / (p - 1.0))));
    rep.metric("ratio_a_alt", r.ratio_a_alt);
    rep.metric("ratio_b_alt", r.ratio_b_alt);
    rep.metric("ratio_c_alt", r.ratio_c_alt);
    const double tol = 1.0 + 1e-6;
    rep.check_le("ratio_a", r.ratio_a, tol);
    rep.check_le("ratio_b", r.ratio_b, tol);
    rep.check_le("ratio_c", r.ratio_c, tol);
    double worst_alt = std::max({r.ratio_a_alt, r.ratio_b_alt, r.ratio_c_alt});
    rep.metric("alt_candidate_max_ratio", worst_alt);
    rep.metric("alt_candidate_fails", worst_alt > tol);
    rep.provenance("seed", seed);
    return rep;
}

VerificationReport verify_balakrishnan(const TorusGrid& g, double alpha, const std::vector<double>& taus,
                                       const std::vector<double>& mus, int probes, std::uint64_t seed) {
    VerificationReport rep("balakrishnan");
    rep.input("taus", taus);
    rep.input("mus", mus);
    rep.input("probes", probes);
    rep.input("N", g.N);
    rep.input("L", g.L);
    json errs = json::array();
    for (double tau : taus)
        for (double mu : mus) {
            double worst = 0.0;
            for (int s = 0; s < probes; ++s) {
                Field f = probes::smooth(g, seed + s, 0.5 * spectral::max_wavenumber(g));
                Field a = spectral::mass_power(g, alpha, mu, -tau)(f);
                Field b = spectral::balakrishnan_apply(g, alpha, mu, tau, f);
                worst = std::max(worst, norm2(a - b) / norm2(a));
            }
            errs.push_back({{"tau", tau}, {"mu", mu}, {"rel_l2", worst}});
            char name[64];
            std::snprintf(name, sizeof name, "rel_l2_tau%g_mu%g", tau, mu);
            rep.check_le(name, worst, 1e-6);
        }
    rep.metric("errors", errs);
    rep.provenance("seed", seed);
    return rep;
}

VerificationReport verify_resolvent(const VectorField& b, double alpha, double mu, double p, double q, double r,
                                    int probes, std::uint64_t seed) {
    const TorusGrid& g = b.grid;
    VerificationReport rep("resolvent_identities");
    rep.input("mu", mu);
    rep.input("p", p);
    rep.input("q", q);
    rep.input("r", r);
    rep.input("probes", probes);
    rep.input("N", g.N);
    auto t2 = assemble_theta2(b, alpha, cplx(mu, 0.0));
    auto t2b = assemble_theta2(b, alpha, cplx(2.0 * mu, 0.0));
    auto tp = assemble_theta_p(b, alpha, mu, p, q, r);
    rep.metric("hs_norm", t2.hs_norm);
    rep.metric("t_norm_probe", tp.t_norm_probe);
    double res2 = 0.0, resp = 0.0, pseudo = 0.0, cons = 0.0;
    std::size_t terms = 0;
    for (int s = 0; s < probes; ++s) {
        Field f = probes::smooth(g, seed + s, 3.0);
        NeumannStats st;
        Field u = t2.apply(f, &st);
        terms = std::max(terms, st.term_norms.size());
        res2 = std::max(res2, norm2(apply_generator(b, alpha, mu, u) - f) / norm2(f));
        Field up = tp.apply(f);
        resp = std::max(resp, norm2(apply_generator(b, alpha, mu, up) - f) / norm2(f));
        cons = std::max(cons, norm2(up - u) / norm2(u));
        // Theta(mu) - Theta(2mu) = mu Theta(mu) Theta(2mu)
        Field lhs = u - t2b.apply(f);
        Field rhs = t2.apply(t2b.apply(f));
        rhs *= cplx(mu, 0.0);
        pseudo = std::max(pseudo, norm2(lhs - rhs) / norm2(lhs));
    }
    rep.metric("neumann_terms", terms);
    rep.check_le("theta2_generator_residual", res2, 1e-8);
    rep.check_le("thetap_generator_residual", resp, 1e-8);
    rep.check_le("pseudo_resolvent_residual", pseudo, 1e-8);
    rep.check_le("thetap_theta2_consistency", cons, 1e-6);
    rep.provenance("seed", seed);
    return rep;
}

}  // namespace sd::resolvent
