#include "stabledrift/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "stabledrift/errors.hpp"
#include "stabledrift/kernels.hpp"
#include "stabledrift/spectral.hpp"

namespace sd::sde {

namespace par = kernels::parallel;

std::vector<double> PathEnsemble::slice(std::size_t ti) const {
    require(ti < n_times(), "time index out of range");
    std::vector<double> out(n_paths * dim);
    for (std::size_t i = 0; i < n_paths; ++i)
        for (int a = 0; a < dim; ++a) out[i * dim + a] = states[at(i, ti, a)];
    return out;
}

std::vector<double> PathEnsemble::recovered_noise(std::size_t ti) const {
    require(ti < n_times(), "time index out of range");
    require(drift_integral.size() == unwrapped.size(), "ensemble has no drift integral");
    std::vector<double> out(n_paths * dim);
    for (std::size_t i = 0; i < n_paths; ++i)
        for (int a = 0; a < dim; ++a) {
            std::size_t k = at(i, ti, a);
            out[i * dim + a] = unwrapped[k] - x0[a] + drift_integral[k];
        }
    return out;
}

std::vector<PathEnsemble> integrate_coupled(const drift::MollifiedDrift& b, double alpha, const Vec3& x0,
                                            double t_final, double dt, int levels, std::size_t n_paths,
                                            std::uint64_t seed, const IntegrateOptions& opt) {
    const TorusGrid& g = b.grid();
    const int dim = g.dim;
    sampler::validate({alpha, dim, seed});
    require(levels >= 1 && levels <= 12, "levels must lie in [1, 12]");
    if (!(t_final > 0.0) || !(dt > 0.0)) throw ParameterError("t_final and dt must be positive");
    if (n_paths == 0) throw ParameterError("n_paths must be positive");
    require(opt.record_stride >= 0, "record stride must be >= 0");
    const int coarse = std::max(1, static_cast<int>(std::lround(t_final / dt)));
    if (std::abs(coarse * dt - t_final) > 1e-9 * t_final) throw ParameterError("t_final must be a multiple of dt");
    const double sup = b.sup_norm();
    if (dt * sup > g.L / 8.0) throw ParameterError("dt * |b_n|_inf exceeds L/8");

    std::vector<int> rec;  // recorded coarse step indices
    rec.push_back(0);
    if (opt.record_stride > 0)
        for (int k = opt.record_stride; k < coarse; k += opt.record_stride) rec.push_back(k);
    rec.push_back(coarse);
    const std::size_t nt = rec.size();
    const int fine_per_coarse = 1 << (levels - 1);
    const std::size_t n_fine = static_cast<std::size_t>(coarse) * fine_per_coarse;
    const double dt_fine = dt / fine_per_coarse;

    std::vector<PathEnsemble> out(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) {
        auto& e = out[static_cast<std::size_t>(l)];
        e.n_paths = n_paths;
        e.dim = dim;
        e.dt = dt / (1 << l);
        e.x0 = x0;
        for (int k : rec) e.times.push_back(k * dt);
        const std::size_t sz = n_paths * nt * dim;
        try {
            e.states.assign(sz, 0.0);
            e.unwrapped.assign(sz, 0.0);
            e.drift_integral.assign(sz, 0.0);
            e.abs_drift_integral.assign(n_paths * nt, 0.0);
            e.wraps.assign(n_paths, 0);
        } catch (const std::bad_alloc&) {
            throw CapacityError("path ensemble does not fit in memory");
        }
        e.total_steps = n_paths * static_cast<std::size_t>(coarse) * (1u << l);
    }

    bool bad = false;
#pragma omp parallel
    {
        std::vector<double> inc(n_fine * dim);
#pragma omp for schedule(static) reduction(|| : bad)
        for (std::ptrdiff_t ip = 0; ip < static_cast<std::ptrdiff_t>(n_paths); ++ip) {
            const auto i = static_cast<std::size_t>(ip);
            if (opt.freeze_noise) {
                std::fill(inc.begin(), inc.end(), 0.0);
            } else {
                sampler::Rng rng = sampler::make_stream(seed, (opt.stream << 40) + i);
                for (std::size_t k = 0; k < n_fine; ++k) sampler::draw_increment(rng, alpha, dim, dt_fine, &inc[k * dim]);
            }
            for (int l = 0; l < levels; ++l) {
                auto& e = out[static_cast<std::size_t>(l)];
                const int agg = fine_per_coarse >> l;
                const int per_coarse = 1 << l;
                const double h = e.dt;
                Vec3 X = x0, U = x0, D{0.0, 0.0, 0.0};
                double A = 0.0;
                std::size_t ri = 0;
                auto record = [&]() {
                    for (int a = 0; a < dim; ++a) {
                        e.states[e.at(i, ri, a)] = X[a];
                        e.unwrapped[e.at(i, ri, a)] = U[a];
                        e.drift_integral[e.at(i, ri, a)] = D[a];
                    }
                    e.abs_drift_integral[i * nt + ri] = A;
                    ++ri;
                };
                record();
                const int steps = coarse * per_coarse;
                std::size_t fk = 0;
                for (int k = 0; k < steps; ++k) {
                    Vec3 bx = drift::interpolate(b.lattice, X);
                    double bn = 0.0;
                    bool wrapped = false;
                    for (int a = 0; a < dim; ++a) {
                        double dz = 0.0;
                        for (int j = 0; j < agg; ++j) dz += inc[(fk + j) * dim + a];
                        double nx = X[a] - bx[a] * h + dz;
                        U[a] += -bx[a] * h + dz;
                        D[a] += bx[a] * h;
                        bn += bx[a] * bx[a];
                        if (nx < -g.L || nx >= g.L) {
                            nx = wrap_coord(nx, g.L);
                            wrapped = true;
                        }
                        X[a] = nx;
                    }
                    fk += agg;
                    A += std::sqrt(bn) * h;
                    if (wrapped) ++e.wraps[i];
                    if ((k + 1) % per_coarse == 0 && ri < nt && rec[ri] == (k + 1) / per_coarse) record();
                }
                for (int a = 0; a < dim; ++a) bad = bad || !std::isfinite(U[a]) || !std::isfinite(D[a]);
            }
        }
    }
    if (bad) throw NumericalError("non-finite path state");
    for (auto& e : out)
        for (auto w : e.wraps) e.wrap_steps += w;
    return out;
}

PathEnsemble integrate(const drift::MollifiedDrift& b, double alpha, const Vec3& x0, double t_final, double dt,
                       std::size_t n_paths, std::uint64_t seed, const IntegrateOptions& opt) {
    return std::move(integrate_coupled(b, alpha, x0, t_final, dt, 1, n_paths, seed, opt).front());
}

namespace {

Vec3 row(const PathEnsemble& e, std::size_t i, std::size_t ti) {
    Vec3 x{0.0, 0.0, 0.0};
    for (int a = 0; a < e.dim; ++a) x[a] = e.states[e.at(i, ti, a)];
    return x;
}

std::vector<double> evaluate(const PathEnsemble& e, std::size_t ti, const std::function<double(const Vec3&)>& f) {
    std::vector<double> v(e.n_paths);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(e.n_paths); ++i)
        v[static_cast<std::size_t>(i)] = f(row(e, static_cast<std::size_t>(i), ti));
    return v;
}

}  // namespace

MeanEstimate mc_mean(const PathEnsemble& e, std::size_t ti, const std::function<double(const Vec3&)>& f) {
    require(ti < e.n_times(), "time index out of range");
    return sampler::mean_stderr(evaluate(e, ti, f));
}

MeanEstimate coupled_difference(const PathEnsemble& coarse, const PathEnsemble& fine, std::size_t ti_coarse,
                                std::size_t ti_fine, const std::function<double(const Vec3&)>& f) {
    require(coarse.n_paths == fine.n_paths, "ensembles are not coupled");
    auto a = evaluate(coarse, ti_coarse, f);
    auto b = evaluate(fine, ti_fine, f);
    for (std::size_t i = 0; i < a.size(); ++i) b[i] -= a[i];
    return sampler::mean_stderr(b);
}

WeakOrder weak_order(const drift::MollifiedDrift& b, double alpha, const Vec3& x0, double t, double dt,
                     std::size_t n_paths, std::uint64_t seed, const std::function<double(const Vec3&)>& f,
                     int levels) {
    require(levels >= 3, "weak order needs at least three levels");
    auto ens = integrate_coupled(b, alpha, x0, t, dt, levels, n_paths, seed);
    WeakOrder w;
    for (const auto& e : ens) {
        w.dts.push_back(e.dt);
        w.means.push_back(mc_mean(e, e.n_times() - 1, f).mean);
    }
    for (std::size_t l = 0; l + 1 < ens.size(); ++l) {
        auto d = coupled_difference(ens[l + 1], ens[l], ens[l + 1].n_times() - 1, ens[l].n_times() - 1, f);
        w.differences.push_back(d.mean);
        w.diff_stderr.push_back(d.stderr);
    }
    w.ratio = w.differences[1] != 0.0 ? w.differences[0] / w.differences[1] : INFINITY;
    return w;
}

Field empirical_density(const PathEnsemble& e, std::size_t ti, const TorusGrid& g) {
    require(g.dim == e.dim, "grid and ensemble dimensions differ");
    require(ti < e.n_times(), "time index out of range");
    std::vector<double> counts(g.size(), 0.0);
    for (std::size_t i = 0; i < e.n_paths; ++i) counts[g.nearest(row(e, i, ti))] += 1.0;
    Field out(g);
    const double s = 1.0 / (static_cast<double>(e.n_paths) * g.cell_volume());
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = counts[k] * s;
    return out;
}

VerificationReport mc_vs_semigroup(const std::vector<drift::MollifiedDrift>& approximants, double alpha,
                                   std::size_t x0_index, double t, const std::function<double(const Vec3&)>& f,
                                   const MCOptions& opt) {
    require(!approximants.empty(), "no drift approximants");
    const auto& bn = approximants.back();
    const TorusGrid& g = bn.grid();
    require(x0_index < g.size(), "lattice site out of range");
    const Vec3 x0 = g.point(x0_index);
    VerificationReport rep("mc_vs_semigroup");
    std::vector<int> ns;
    for (const auto& a : approximants) ns.push_back(a.n);
    rep.input("n_list", ns);
    rep.input("x0", x0);
    rep.input("t", t);
    rep.input("n_paths", opt.n_paths);
    rep.input("dt", opt.dt);
    rep.input("semigroup_steps", opt.semigroup_steps);

    auto ens = integrate_coupled(bn, alpha, x0, t, opt.dt, 2, opt.n_paths, opt.seed);
    const auto& fine = ens[1];
    auto m_coarse = mc_mean(ens[0], ens[0].n_times() - 1, f);
    auto m_fine = mc_mean(fine, fine.n_times() - 1, f);
    auto d = coupled_difference(ens[0], fine, ens[0].n_times() - 1, fine.n_times() - 1, f);
    // E_dt - E_0 ~ C dt, so E_dt - E_{dt/2} ~ C dt/2
    const double c_bias = 2.0 * std::abs(d.mean) / opt.dt;
    const double fine_dt = 0.5 * opt.dt;

    evolution::PropagatorConfig cfg;
    cfg.drift = bn;
    cfg.alpha = alpha;
    cfg.t_final = t;
    cfg.steps = opt.semigroup_steps;
    Field fl = Field::from_function(g, [&](const Vec3& x) { return cplx(f(x), 0.0); });
    const double sem = evolution::propagate(cfg, fl)[x0_index].real();

    const double gap = std::abs(m_fine.mean - sem);
    const double band = 3.0 * m_fine.stderr + c_bias * fine_dt;
    rep.metric("mc_mean_dt", m_coarse.mean);
    rep.metric("mc_mean_half_dt", m_fine.mean);
    rep.metric("mc_stderr", m_fine.stderr);
    rep.metric("coupled_difference", d.mean);
    rep.metric("coupled_difference_stderr", d.stderr);
    rep.metric("c_bias", c_bias);
    rep.metric("semigroup_value", sem);
    rep.metric("band", band);
    rep.metric("wrap_rate", fine.wrap_rate());
    if (fine.wrap_rate() > 0.01) rep.metric("warning", "domain too small: wrap rate above 1% of steps");
    rep.check_le("mc_vs_semigroup_gap", gap, band);

    std::vector<double> dint;
    for (const auto& a : approximants) {
        auto e = integrate(a, alpha, x0, t, opt.dt, opt.n_paths, opt.seed);
        std::vector<double> v(e.n_paths);
        for (std::size_t i = 0; i < e.n_paths; ++i) v[i] = e.abs_drift_integral[i * e.n_times() + e.n_times() - 1];
        dint.push_back(sampler::mean_stderr(v).mean);
    }
    rep.metric("abs_drift_integral_mean", dint);
    const double lo = *std::min_element(dint.begin(), dint.end());
    const double hi = *std::max_element(dint.begin(), dint.end());
    rep.check("abs_drift_integral_finite", std::isfinite(hi), hi);
    if (dint.size() > 1) {
        double spread = lo > 0.0 ? hi / lo : (hi == 0.0 ? 1.0 : INFINITY);
        rep.check_le("abs_drift_integral_spread_over_n", spread, 1.2);
    }
    rep.provenance("seed", opt.seed);
    rep.provenance("grid_levels", json::array({g.N}));
    return rep;
}

std::vector<CharFnProbe> identify_driving_noise(const PathEnsemble& e, double alpha, const std::vector<Vec3>& kappa_list,
                                                const std::vector<double>& bias) {
    require(bias.empty() || bias.size() == kappa_list.size(), "bias list must match kappa list");
    const std::size_t ti = e.n_times() - 1;
    const double t = e.times[ti];
    auto z = e.recovered_noise(ti);
    std::vector<CharFnProbe> out;
    for (std::size_t k = 0; k < kappa_list.size(); ++k) {
        CharFnProbe p;
        p.kappa = kappa_list[k];
        p.t = t;
        std::vector<double> kv(p.kappa.begin(), p.kappa.begin() + e.dim);
        double kn = 0.0;
        for (double c : kv) kn += c * c;
        auto est = sampler::empirical_charfn(z, e.dim, kv);
        p.w_hat = est.value;
        p.stderr = est.stderr;
        p.target = std::exp(-t * std::pow(std::sqrt(kn), alpha));
        p.deviation = std::abs(p.w_hat - p.target);
        p.bias = bias.empty() ? 0.0 : bias[k];
        p.ok = p.deviation <= 3.0 * p.stderr + p.bias;
        out.push_back(p);
    }
    return out;
}

VerificationReport verify_driving_noise(const drift::MollifiedDrift& b, double alpha, const Vec3& x0, double t,
                                        const std::vector<Vec3>& kappa_list, const MCOptions& opt,
                                        std::vector<CharFnProbe>* probes_out) {
    VerificationReport rep("driving_noise");
    rep.input("x0", x0);
    rep.input("t", t);
    rep.input("n_paths", opt.n_paths);
    rep.input("dt", opt.dt);
    rep.input("drift_n", b.n);
    auto ens = integrate_coupled(b, alpha, x0, t, opt.dt, 2, opt.n_paths, opt.seed);
    auto coarse = identify_driving_noise(ens[0], alpha, kappa_list);
    std::vector<double> bias;
    for (std::size_t k = 0; k < kappa_list.size(); ++k) {
        auto fine_one = identify_driving_noise(ens[1], alpha, {kappa_list[k]});
        bias.push_back(std::abs(fine_one[0].w_hat - coarse[k].w_hat));
    }
    auto probes = identify_driving_noise(ens[1], alpha, kappa_list, bias);
    json arr = json::array();
    for (std::size_t k = 0; k < probes.size(); ++k) {
        const auto& p = probes[k];
        json j;
        j["kappa"] = std::vector<double>(p.kappa.begin(), p.kappa.begin() + b.grid().dim);
        j["re"] = p.w_hat.real();
        j["im"] = p.w_hat.imag();
        j["target"] = p.target;
        j["stderr"] = p.stderr;
        j["bias"] = p.bias;
        arr.push_back(j);
        rep.check_le("kappa" + std::to_string(k) + "_deviation", p.deviation, 3.0 * p.stderr + p.bias);
    }
    rep.metric("probes", arr);
    rep.metric("wrap_rate", ens[1].wrap_rate());
    rep.check_le("wrap_rate", ens[1].wrap_rate(), 0.01);
    rep.provenance("seed", opt.seed);
    if (probes_out) *probes_out = probes;
    return rep;
}

void write_charfn_csv(std::ostream& os, const std::vector<CharFnProbe>& probes, int dim) {
    os.precision(17);
    os << "kappa,t,re,im,stderr\r\n";
    for (const auto& p : probes) {
        for (int a = 0; a < dim; ++a) os << (a ? " " : "") << p.kappa[a];
        os << ',' << p.t << ',' << p.w_hat.real() << ',' << p.w_hat.imag() << ',' << p.stderr << "\r\n";
    }
}

LagCorrelation increment_correlation(const PathEnsemble& e) {
    require(e.n_times() >= 3, "need at least three recorded times");
    const std::size_t n = e.n_paths;
    std::vector<std::vector<double>> y;
    auto prev = e.recovered_noise(0);
    for (std::size_t ti = 1; ti < e.n_times(); ++ti) {
        auto cur = e.recovered_noise(ti);
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (int a = 0; a < e.dim; ++a) s += (cur[i * e.dim + a] - prev[i * e.dim + a]) * (cur[i * e.dim + a] - prev[i * e.dim + a]);
            v[i] = std::min(std::sqrt(s), 1.0);
        }
        y.push_back(std::move(v));
        prev = std::move(cur);
    }
    LagCorrelation out;
    for (std::size_t j = 0; j + 1 < y.size(); ++j) {
        const auto& a = y[j];
        const auto& b = y[j + 1];
        double ma = par::sum_of(n, [&](std::size_t i) { return a[i]; }) / n;
        double mb = par::sum_of(n, [&](std::size_t i) { return b[i]; }) / n;
        double sab = par::sum_of(n, [&](std::size_t i) { return (a[i] - ma) * (b[i] - mb); });
        double saa = par::sum_of(n, [&](std::size_t i) { return (a[i] - ma) * (a[i] - ma); });
        double sbb = par::sum_of(n, [&](std::size_t i) { return (b[i] - mb) * (b[i] - mb); });
        out.corr.push_back(saa > 0.0 && sbb > 0.0 ? sab / std::sqrt(saa * sbb) : 0.0);
    }
    out.stderr = 1.0 / std::sqrt(static_cast<double>(n));
    return out;
}

namespace {

double series_norm(const std::vector<Field>& v, const Field& density, double p) {
    const TorusGrid& g = density.grid();
    Field s(g);
    for (const auto& f : v)
        for (std::size_t i = 0; i < g.size(); ++i) s[i] = std::max(s[i].real(), std::abs(f[i]));
    return norm_p(s, p, &density);
}

}  // namespace

double contraction_ratio_H(const drift::MollifiedDrift& b, double alpha, const weighted::WeightSpec& w, double p,
                           double T, const ContractionOptions& opt) {
    const TorusGrid& g = b.grid();
    require(w.grid() == g, "weight and drift grids differ");
    require(T > 0.0, "T must be positive");
    require(opt.time_steps >= 1 && opt.probes >= 1, "need time steps and probes");
    const int M = opt.time_steps;
    const double dlt = T / M;
    Field kb(g);
    for (int a = 0; a < g.dim; ++a) kb.axpy(opt.kappa[a], b.lattice.comp[a]);
    if (norm_inf(kb) == 0.0) return 0.0;
    Field mag = b.magnitude();
    Field density = Field::from_function(g, [](const Vec3&) { return cplx(0.0, 0.0); });
    for (std::size_t i = 0; i < g.size(); ++i)
        density[i] = mag[i].real() * std::pow(w.lattice[i].real(), 2.0 - p);

    evolution::PropagatorConfig cfg;
    cfg.drift = b;
    cfg.alpha = alpha;
    cfg.t_final = dlt;
    cfg.steps = opt.substeps;
    evolution::Propagator P(cfg);

    double best = 0.0;
    for (int q = 0; q < opt.probes; ++q) {
        sampler::Rng rng = sampler::make_stream(opt.seed, static_cast<std::uint64_t>(q));
        std::uniform_real_distribution<double> U(0.0, 1.0);
        const double radius = q % 3 == 2 ? 4.0 * g.h() : 0.25 * g.L;
        Field phi = probes::bumps(g, opt.seed + 101 * q, radius, 1 + q % 3);
        Field psi = probes::bumps(g, opt.seed + 101 * q + 7, 0.25 * g.L, 2);
        const double om1 = 2.0 * std::numbers::pi * U(rng) / T, th1 = 2.0 * std::numbers::pi * U(rng);
        const double om2 = 2.0 * std::numbers::pi * U(rng) / T, th2 = 2.0 * std::numbers::pi * U(rng);
        std::vector<Field> v, hv;
        for (int j = 0; j <= M; ++j) {
            const double s = j * dlt;
            Field f = std::cos(om1 * s + th1) * phi;
            f.axpy(std::sin(om2 * s + th2), psi);
            v.push_back(std::move(f));
        }
        // I_j = T(I_{j-1} + dlt/2 g_{j-1}) + dlt/2 g_j, g = i (kappa.b) v
        auto gj = [&](int j) {
            Field x = hadamard(kb, v[static_cast<std::size_t>(j)]);
            x *= cplx(0.0, 1.0);
            return x;
        };
        Field I(g);
        hv.push_back(I);
        Field gprev = gj(0);
        for (int j = 1; j <= M; ++j) {
            Field x = I;
            x.axpy(0.5 * dlt, gprev);
            I = P.apply(x);
            Field gc = gj(j);
            I.axpy(0.5 * dlt, gc);
            gprev = std::move(gc);
            hv.push_back(I);
        }
        const double den = series_norm(v, density, p);
        if (den > 0.0) best = std::max(best, series_norm(hv, density, p) / den);
    }
    return best;
}

VerificationReport contraction_probe_H(const drift::MollifiedDrift& b, double alpha, const weighted::WeightSpec& w,
                                       double p, const std::vector<double>& T_list, const ContractionOptions& opt) {
    require(!T_list.empty(), "T list is empty");
    for (std::size_t i = 1; i < T_list.size(); ++i) require(T_list[i] > T_list[i - 1], "T list must be increasing");
    VerificationReport rep("contraction_H");
    rep.input("T_list", T_list);
    rep.input("p", p);
    rep.input("nu", w.nu);
    rep.input("kappa", std::vector<double>(opt.kappa.begin(), opt.kappa.begin() + b.grid().dim));
    rep.input("time_steps", opt.time_steps);
    rep.input("probes", opt.probes);
    rep.input("drift_n", b.n);
    std::vector<double> ratios;
    for (double T : T_list) ratios.push_back(contraction_ratio_H(b, alpha, w, p, T, opt));
    rep.metric("ratios", ratios);
    double largest_ok = -1.0;
    for (std::size_t i = 0; i < ratios.size(); ++i)
        if (ratios[i] < 1.0) largest_ok = T_list[i];
    rep.metric("largest_contractive_T", largest_ok < 0.0 ? json(nullptr) : json(largest_ok));
    rep.check_lt("ratio_at_smallest_T", ratios.front(), 1.0);
    if (ratios.size() > 1) {
        bool inc = true;
        for (std::size_t i = 1; i < ratios.size(); ++i) inc = inc && ratios[i] > ratios[i - 1];
        rep.check("ratio_decreases_as_T_shrinks", inc, ratios.back() - ratios.front());
    }
    rep.provenance("seed", opt.seed);
    return rep;
}

}  // namespace sd::sde
