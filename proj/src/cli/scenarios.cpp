#include "stabledrift/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "stabledrift/anchors.hpp"
#include "stabledrift/errors.hpp"
#include "stabledrift/evolution.hpp"
#include "stabledrift/formbound.hpp"
#include "stabledrift/radial.hpp"
#include "stabledrift/resolvent.hpp"
#include "stabledrift/sampler.hpp"
#include "stabledrift/sde.hpp"
#include "stabledrift/spectral.hpp"
#include "stabledrift/weighted.hpp"

namespace sd::cli {

namespace {

constexpr double kEvolutionDt = 0.01;

struct Ctx {
    const ExperimentConfig& c;
    const AdmissibilityInfo& adm;
    TorusGrid g;
    ScenarioResult& out;
    const Logger& log;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    std::uint64_t seed(int k) const { return c.seed + static_cast<std::uint64_t>(k); }
    int n_scaled(int n) const { return c.quick ? std::max(8, n / 2) : n; }

    void add(VerificationReport rep, const std::string& name) {
        rep.set_name(name);
        rep.set_anchor(anchors::check_anchor(name));
        rep.provenance("seed", c.seed);
        rep.provenance("grid", {{"N", g.N}, {"L", g.L}, {"dim", g.dim}});
        rep.provenance("quick", c.quick);
        if (log) {
            double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::ostringstream os;
            os << "  " << std::left << std::setw(24) << name << to_string(rep.verdict()) << "  (" << std::fixed
               << std::setprecision(1) << el << " s)";
            log(os.str());
        }
        out.reports.push_back(std::move(rep));
    }
    void artifact(const std::string& file, std::string content) { out.artifacts.push_back({file, std::move(content)}); }
};

Field gaussian_bump(const TorusGrid& g, double s2) {
    return Field::from_function(g, [s2](const Vec3& x) {
        return cplx(std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * s2)), 0.0);
    });
}

int steps_for(double t) { return std::max(1, static_cast<int>(std::lround(t / kEvolutionDt))); }

// ---------------------------------------------------------------- sampler

void run_sampler(Ctx& x) {
    const auto& c = x.c;
    const std::size_t n = c.paths();
    sampler::StableParams sp{c.alpha, c.dim, x.seed(0)};

    VerificationReport rep;
    rep.input("alpha", c.alpha);
    rep.input("n", n);
    std::vector<sde::CharFnProbe> rows;
    const double r3 = 1.0 / std::sqrt(3.0);
    std::vector<std::pair<double, std::vector<Vec3>>> plan = {
        {1.0, {{0.5, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 2.0}, {3.0 * r3, 3.0 * r3, 3.0 * r3}}}};
    for (double t : c.t_list)
        if (t != 1.0) plan.push_back({t, {{r3, r3, r3}}});
    std::uint64_t stream = 0;
    json probes = json::array();
    for (const auto& [t, kappas] : plan) {
        auto batch = sampler::sample_increments(sp, t, n, stream++);
        if (t == 1.0) {
            for (int a = 0; a < c.dim; ++a) {
                std::vector<double> col(n);
                for (std::size_t i = 0; i < n; ++i) col[i] = batch(i, a);
                auto m = sampler::mean_stderr(col);
                rep.check_le("mean_axis" + std::to_string(a), std::abs(m.mean), 3.0 * m.stderr);
            }
        }
        for (const auto& k : kappas) {
            std::vector<double> kv(k.begin(), k.begin() + c.dim);
            auto est = sampler::empirical_charfn(batch.values, c.dim, kv);
            double kn = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
            sde::CharFnProbe p;
            p.kappa = k;
            p.t = t;
            p.w_hat = est.value;
            p.stderr = est.stderr;
            p.target = std::exp(-t * std::pow(kn, c.alpha));
            p.deviation = std::abs(p.w_hat - p.target);
            p.ok = p.deviation <= 3.0 * p.stderr;
            rows.push_back(p);
            std::ostringstream nm;
            nm << "t" << t << "_k" << kn;
            rep.check_le(nm.str() + "_deviation", p.deviation, 3.0 * p.stderr);
            probes.push_back({{"kappa", kv}, {"t", t}, {"re", p.w_hat.real()}, {"im", p.w_hat.imag()},
                              {"stderr", p.stderr}, {"target", p.target}});
        }
    }
    rep.metric("probes", probes);
    std::ostringstream csv;
    sde::write_charfn_csv(csv, rows, c.dim);
    x.artifact("charfn.csv", csv.str());
    x.add(std::move(rep), "charfn");

    VerificationReport sub;
    const double beta = 0.5 * c.alpha;
    auto s = sampler::sample_subordinator(beta, 1.0, n, x.seed(1));
    sub.input("beta", beta);
    sub.input("n", n);
    json vals = json::array();
    for (double u : {0.5, 1.0, 2.0}) {
        std::vector<double> e(n);
        for (std::size_t i = 0; i < n; ++i) e[i] = std::exp(-u * s[i]);
        auto m = sampler::mean_stderr(e);
        double target = std::exp(-std::pow(u, beta));
        vals.push_back({{"u", u}, {"mean", m.mean}, {"stderr", m.stderr}, {"target", target}});
        std::ostringstream nm;
        nm << "laplace_u" << u;
        sub.check_le(nm.str(), std::abs(m.mean - target), 3.0 * m.stderr);
    }
    sub.metric("laplace", vals);
    x.add(std::move(sub), "subordinator");
}

// ---------------------------------------------------------------- formbound

void run_admissibility(Ctx& x) {
    VerificationReport rep;
    rep.input("delta", x.adm.delta);
    rep.input("m_estimated", x.adm.m_estimated);
    rep.metric("m", x.adm.m);
    rep.metric("p_minus", x.adm.p_minus);
    rep.metric("p_plus", x.adm.p_plus);
    rep.metric("p_floor", x.adm.p_floor);
    rep.check_lt("delta_below_threshold", x.adm.delta, x.adm.threshold);
    rep.check_gt("p_above_floor", x.c.p, x.adm.p_floor);
    rep.check_lt("p_below_p_plus", x.c.p, x.adm.p_plus);
    x.add(std::move(rep), "admissibility");
}

void run_formbound(Ctx& x) {
    const auto& c = x.c;
    {
        std::vector<double> ts, rs;
        for (int i = 0; i < 20; ++i) {
            ts.push_back(std::pow(10.0, -2.0 + 3.0 * i / 19.0));
            rs.push_back(i == 0 ? 0.0 : std::pow(10.0, -2.0 + 4.0 * i / 19.0));
        }
        auto fit = radial::fit_kernel_bounds(c.alpha, c.dim, ts, rs);
        VerificationReport rep;
        rep.input("t_grid", "10^[-2,1], 20 points");
        rep.input("r_grid", "{0} and 10^[-2,2], 20 points");
        rep.metric("C", fit.C);
        rep.metric("K", fit.K);
        rep.metric("profile_C", fit.profile_C);
        rep.metric("profile_K", fit.profile_K);
        rep.check_gt("C_positive", fit.C, 0.0);
        rep.check("K_finite", std::isfinite(fit.K), fit.K);
        rep.check_le("lower_violations", fit.lower_violations, 0.0);
        rep.check_le("gradient_violations", fit.gradient_violations, 0.0);
        // constants from the scaling profile must also hold on every sample
        int lo_bad = 0, gr_bad = 0;
        for (std::size_t i = 0; i < fit.lower_ratio.size(); ++i) {
            if (fit.lower_ratio[i] < fit.profile_C * (1.0 - 1e-3)) ++lo_bad;
            if (fit.gradient_ratio[i] > fit.profile_K * (1.0 + 1e-3)) ++gr_bad;
        }
        rep.check_le("profile_lower_violations", lo_bad, 0.0);
        rep.check_le("profile_gradient_violations", gr_bad, 0.0);
        x.add(std::move(rep), "kernel_bounds");
    }
    {
        auto m = radial::estimate_m_dalpha(c.alpha, c.dim, radial::default_m_sample(20));
        VerificationReport rep;
        rep.metric("m_est", m.m_est);
        rep.metric("kappa_est", m.kappa_est);
        rep.metric("m_kappa1", m.m_kappa1);
        rep.metric("analytic_bound", m.analytic_bound);
        rep.metric("literal_product_bound", m.literal_product_bound);
        json pk = json::array();
        for (auto [k, v] : m.per_kappa) pk.push_back({k, v});
        rep.metric("per_kappa", pk);
        rep.check_gt("m_positive", m.m_est, 0.0);
        rep.check_ge("min_residual", m.min_residual, 0.0);
        rep.check_le("m_kappa1_below_analytic_bound", m.m_kappa1, m.analytic_bound * (1.0 + 1e-6));
        x.add(std::move(rep), "m_dalpha");
    }
    const int N0 = x.g.N;
    {
        formbound::PowerOptions po;
        po.remove_zero_mode = true;
        auto est = formbound::refine_weak_formbound(c.drift, c.alpha, c.L, {N0, 2 * N0}, 1e-3, po);
        VerificationReport rep;
        const double target = c.effective_delta();
        rep.input("drift", c.drift.to_json());
        rep.input("target_delta", target);
        json lv = json::array();
        std::vector<double> err;
        for (auto [N, d] : est.grid_levels) {
            lv.push_back({{"N", N}, {"delta", d}});
            err.push_back(std::abs(d - target) / target);
        }
        rep.metric("levels", lv);
        rep.metric("relative_error", err);
        rep.check_le("relative_error_finest", err.back(), 0.15);
        if (err.size() > 1) rep.check_lt("error_decreasing", err.back(), err.front());
        x.add(std::move(rep), "hardy_formbound");
    }
    {
        VerificationReport rep;
        std::vector<int> Ns = {N0 / 2, N0, 2 * N0};
        std::vector<double> vals;
        for (int N : Ns) vals.push_back(formbound::estimate_kato_norm(c.drift, TorusGrid(c.dim, c.L, N), c.alpha, c.lambda));
        rep.input("lambda", c.lambda);
        rep.metric("N", Ns);
        rep.metric("kato_norm", vals);
        for (std::size_t i = 0; i + 1 < vals.size(); ++i)
            rep.check_gt("increasing_N" + std::to_string(Ns[i + 1]), vals[i + 1], vals[i]);
        x.add(std::move(rep), "kato_norm");
    }
    {
        VerificationReport rep;
        rep.mark_trend_only();
        auto V = drift::magnitude_lattice(c.drift, x.g);
        auto lad = formbound::lambda_ladder(V, c.alpha);
        json wz = json::array();
        for (auto [l, d] : lad.with_zero_mode) wz.push_back({{"lambda", l}, {"delta", d}});
        rep.metric("with_zero_mode", wz);
        rep.metric("projected_small_lambda", lad.projected);
        if (lad.with_zero_mode.size() > 1)
            rep.check_gt("zero_mode_grows_as_lambda_shrinks", lad.with_zero_mode.back().second,
                         lad.with_zero_mode.front().second);
        x.add(std::move(rep), "lambda_ladder");
    }
}

// ---------------------------------------------------------------- resolvent

void run_resolvent(Ctx& x) {
    const auto& c = x.c;
    x.add(resolvent::verify_balakrishnan(x.g, c.alpha, {0.25, 0.5, 0.75}, {1.0, 10.0}, 3, x.seed(10)), "balakrishnan");

    auto b8 = drift::mollify(c.bounded_drift, 8, x.g);
    {
        auto rep = resolvent::verify_resolvent(b8.lattice, c.alpha, 1.0, 2.5, 3.0, 2.0, 3, x.seed(11));
        rep.input("drift", c.bounded_drift.to_json());
        rep.input("n", 8);
        x.add(std::move(rep), "resolvent_identities");
    }

    auto h16 = drift::mollify(c.drift, 16, x.g);
    {
        const double p = 4.5, q = 9.0, r = 2.75;
        VerificationReport rep;
        rep.input("p", p);
        rep.input("mu", c.lambda);
        rep.input("n", 16);
        auto est = formbound::estimate_weak_formbound(h16, c.alpha, c.lambda);
        const double cp = p * (p / (p - 1.0)) / 4.0;
        rep.metric("delta_est", est.delta_est);
        rep.metric("c_p", cp);
        rep.metric("m", x.adm.m);
        try {
            auto a = resolvent::assemble_theta_p(h16.lattice, c.alpha, c.lambda, p, q, r, std::nullopt, 10, x.seed(12));
            rep.metric("t_norm_probe", a.t_norm_probe);
            rep.check_le("t_norm_probe", a.t_norm_probe, x.adm.m * cp * est.delta_est * 1.1);
            rep.check_lt("t_norm_below_one", a.t_norm_probe, 1.0);
        } catch (const DivergenceError& e) {
            rep.metric("t_norm_probe", e.estimate());
            rep.check("t_norm_below_one", false, e.estimate());
        }
        x.add(std::move(rep), "tp_bound");
    }
    const int lp_probes = c.quick ? 25 : 50;
    for (double p : {2.0, 4.5}) {
        auto rep = resolvent::verify_lp_inequalities(h16.magnitude(), c.alpha, p, 1.0, c.lambda, lp_probes, x.seed(13));
        rep.input("n", 16);
        if (p > 2.0) rep.check("alt_candidate_fails", rep.metrics().value("alt_candidate_fails", false),
                               rep.metrics().value("alt_candidate_max_ratio", 0.0));
        std::ostringstream nm;
        nm << "lp_inequalities_p" << p;
        x.add(std::move(rep), nm.str());
    }
}

// ---------------------------------------------------------------- weighted

void run_weighted(Ctx& x) {
    const auto& c = x.c;
    x.add(weighted::verify_weighted_markov(c.nu, c.alpha, c.t_list, x.g, {1.0, 2.0, 4.0}, 8, x.seed(20)),
          "weighted_markov");
    {
        auto w = weighted::make_weight(x.g, c.nu, c.alpha);
        weighted::EstimateOptions eo;
        eo.seed = x.seed(21);
        eo.q = c.q_eff();
        eo.r = c.r_eff();
        if (c.quick) eo.probes = 10;
        x.add(weighted::verify_weighted_estimates(c.drift, w, c.alpha, c.p, c.mu_ladder, eo), "weighted_estimates");
    }
    x.add(weighted::verify_eta_b_integrability(c.drift, c.nu, c.alpha, c.p, c.L, {x.g.N, 2 * x.g.N}),
          "eta_b_integrability");
}

// ---------------------------------------------------------------- evolution

void run_evolution(Ctx& x) {
    const auto& c = x.c;
    const TorusGrid& g = x.g;
    Field f = gaussian_bump(g, 1.0);
    {
        auto b8 = drift::mollify(c.bounded_drift, 8, g);
        VerificationReport rep;
        rep.input("drift", c.bounded_drift.to_json());
        rep.input("n", 8);
        rep.input("t", 0.5);
        std::vector<int> steps = {25, 50};
        std::vector<double> res;
        for (int s : steps) {
            evolution::PropagatorConfig pc;
            pc.drift = b8;
            pc.alpha = c.alpha;
            pc.t_final = 0.5;
            pc.steps = s;
            res.push_back(evolution::duhamel_residual(pc, f));
        }
        evolution::PropagatorConfig z;
        z.drift = drift::mollify(drift::zero(c.dim), 1, g);
        z.alpha = c.alpha;
        z.t_final = 0.5;
        z.steps = 25;
        double zero_res = evolution::duhamel_residual(z, f);
        rep.metric("steps", steps);
        rep.metric("residual", res);
        rep.metric("zero_drift_residual", zero_res);
        rep.check_le("residual_steps" + std::to_string(steps.back()), res.back(), 1e-3);
        rep.check_le("residual_steps" + std::to_string(steps.front()), res.front(), 1e-3);
        rep.check_lt("halving_dt_reduces_residual", res.back(), res.front());
        rep.check_le("zero_drift_residual", zero_res, 1e-10);
        x.add(std::move(rep), "duhamel");
    }
    {
        evolution::ConservativenessOptions co;
        auto rep = evolution::conservativeness_check(c.drift, g, c.alpha, g.origin(), {c.L / 4, c.L / 2, 3 * c.L / 4}, co);
        x.add(std::move(rep), "conservativeness");
    }
    std::vector<drift::MollifiedDrift> approx;
    for (int n : {8, 16, 32}) approx.push_back(drift::mollify(c.drift, n, g));
    {
        evolution::FellerOptions fo;
        fo.t = 0.25;
        fo.steps = steps_for(0.25);
        auto rep = evolution::feller_convergence_check(approx, c.alpha, f, fo);
        rep.input("n_list", std::vector<int>{8, 16, 32});
        x.add(std::move(rep), "feller");
    }
    {
        VerificationReport rep;
        rep.mark_trend_only();
        json rows = json::array();
        for (double t : c.t_list) {
            if (t == 0.25) continue;
            auto d = evolution::cauchy_differences(approx, c.alpha, t, steps_for(t), f);
            rows.push_back({{"t", t}, {"cauchy_differences", d}});
            std::ostringstream nm;
            nm << "t" << t << "_decreasing";
            rep.check(nm.str(), d.size() < 2 || d.back() < d.front(), d.back());
        }
        rep.metric("sweep", rows);
        x.add(std::move(rep), "feller_t_sweep");
    }
    {
        const auto& b16 = approx[1];
        VerificationReport rep;
        evolution::PropagatorConfig pc;
        pc.drift = b16;
        pc.alpha = c.alpha;
        pc.t_final = 0.1;
        pc.steps = steps_for(0.1);
        Field one = Field::from_function(g, [](const Vec3&) { return cplx(1.0, 0.0); });
        Field u1 = evolution::propagate(pc, one);
        double const_err = 0.0;
        for (const auto& z : u1.values()) const_err = std::max(const_err, std::abs(z - 1.0));
        Field u = evolution::propagate(pc, f);
        pc.scheme = evolution::Scheme::expm_krylov;
        Field uk = evolution::propagate(pc, f);
        rep.input("n", 16);
        rep.input("t", pc.t_final);
        rep.check_le("constants_preserved", const_err, 1e-12);
        rep.check_le("sup_contraction", norm_inf(u), norm_inf(f) * (1.0 + 1e-4));
        rep.check_ge("positivity", min_real(u), -1e-4 * norm_inf(f));
        rep.check_le("spectral_vs_krylov", norm2(u - uk) / norm2(f), 1e-4);
        x.add(std::move(rep), "propagator_properties");

        evolution::PropagatorConfig sc;
        sc.drift = b16;
        sc.alpha = c.alpha;
        sc.t_final = 0.5;
        sc.steps = steps_for(0.5);
        Field s = evolution::propagate(sc, f);
        std::ostringstream csv;
        evolution::write_slice_csv(csv, s, g.origin());
        x.artifact("evolution_slice_t0.5.csv", csv.str());
        std::ostringstream bin;
        write_binary(bin, s, false);
        x.artifact("evolution_t0.5.field", bin.str());
    }
}

// ---------------------------------------------------------------- sde

void run_sde(Ctx& x) {
    const auto& c = x.c;
    const TorusGrid& g = x.g;
    auto b8 = drift::mollify(c.drift, 8, g);
    auto b16 = drift::mollify(c.drift, 16, g);
    sde::MCOptions mo;
    mo.n_paths = c.paths();
    mo.dt = c.dt;
    mo.seed = x.seed(30);
    {
        std::vector<sde::CharFnProbe> probes;
        std::vector<Vec3> ks = {{0.5, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 2.0}};
        auto rep = sde::verify_driving_noise(b16, c.alpha, g.point(g.origin()), 0.5, ks, mo, &probes);
        std::ostringstream csv;
        sde::write_charfn_csv(csv, probes, c.dim);
        x.artifact("charfn_sde.csv", csv.str());
        x.add(std::move(rep), "driving_noise");
    }
    {
        mo.seed = x.seed(31);
        auto f = [](const Vec3& y) { return std::exp(-(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / 8.0); };
        x.add(sde::mc_vs_semigroup({b8, b16}, c.alpha, g.origin(), 0.25, f, mo), "mc_vs_semigroup");
    }
    {
        auto w = weighted::make_weight(g, c.nu, c.alpha);
        sde::ContractionOptions co;
        co.seed = x.seed(32);
        x.add(sde::contraction_probe_H(b16, c.alpha, w, c.p, {0.05, 0.1}, co), "contraction_H");
    }
    {
        // Euler weak order on a smooth drift strong enough to show the dt bias
        auto bb = drift::mollify(drift::bounded_smooth(3.0, 1.0, 0.5, c.dim), 8, g);
        auto f = [](const Vec3& y) { return std::exp(-(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) / 8.0); };
        auto wo = sde::weak_order(bb, c.alpha, {0.5, 0.0, 0.0}, 0.5, 0.1, c.paths(), x.seed(33), f);
        VerificationReport rep;
        rep.mark_trend_only();
        rep.input("dt", wo.dts);
        rep.metric("means", wo.means);
        rep.metric("differences", wo.differences);
        rep.metric("difference_stderr", wo.diff_stderr);
        rep.metric("ratio", wo.ratio);
        rep.check_ge("ratio_near_two_lower", wo.ratio, 1.5);
        rep.check_le("ratio_near_two_upper", wo.ratio, 3.0);
        x.add(std::move(rep), "weak_order");
    }
}

using Step = void (*)(Ctx&);

const std::map<std::string, std::vector<std::pair<std::string, Step>>>& plan() {
    static const std::map<std::string, std::vector<std::pair<std::string, Step>>> p = [] {
        std::map<std::string, std::vector<std::pair<std::string, Step>>> m;
        m["sampler_check"] = {{"sampler", run_sampler}};
        m["formbound_audit"] = {{"admissibility", run_admissibility}, {"formbound", run_formbound}};
        m["resolvent_verify"] = {{"resolvent", run_resolvent}};
        m["weighted_verify"] = {{"weighted", run_weighted}};
        m["evolution_verify"] = {{"evolution", run_evolution}};
        m["sde_identify"] = {{"sde", run_sde}};
        auto& full = m["full_suite"];
        for (const char* s : {"sampler_check", "formbound_audit", "resolvent_verify", "weighted_verify",
                              "evolution_verify", "sde_identify"})
            for (const auto& st : m[s]) full.push_back(st);
        return m;
    }();
    return p;
}

}  // namespace

std::vector<std::string> scenario_checks(const std::string& scenario) {
    auto it = plan().find(scenario);
    if (it == plan().end()) throw ConfigError("unknown scenario '" + scenario + "'");
    std::vector<std::string> out;
    for (const auto& s : it->second) out.push_back(s.first);
    return out;
}

ScenarioResult run_scenario(const ExperimentConfig& c, const AdmissibilityInfo& adm, const Logger& log) {
    auto it = plan().find(c.scenario);
    if (it == plan().end()) throw ConfigError("unknown scenario '" + c.scenario + "'");
    ScenarioResult res;
    Ctx x{c, adm, TorusGrid(c.dim, c.L, c.grid_n()), res, log};
    for (const auto& [name, step] : it->second) {
        if (log) log(name);
        step(x);
    }
    return res;
}

}  // namespace sd::cli
