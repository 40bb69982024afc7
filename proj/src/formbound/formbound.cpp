#include "stabledrift/formbound.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "stabledrift/errors.hpp"
#include "stabledrift/kernels.hpp"
#include "stabledrift/spectral.hpp"

namespace sd::formbound {

namespace par = kernels::parallel;

std::string to_string(ClassTag t) {
    switch (t) {
        case ClassTag::weak_formbound: return "weak_formbound";
        case ClassTag::formbound: return "formbound";
        case ClassTag::kato: return "kato";
        case ClassTag::weak_ld: return "weak_ld";
    }
    return "weak_formbound";
}

json FormBoundEstimate::to_json() const {
    json j;
    j["class_tag"] = to_string(class_tag);
    j["variant"] = variant == Variant::fractional ? "fractional" : "laplace";
    j["delta_est"] = delta_est;
    j["lambda"] = lambda;
    j["zero_mode_removed"] = zero_mode_removed;
    json levels = json::array();
    for (auto [n, v] : grid_levels) levels.push_back({{"N", n}, {"estimate", v}});
    j["grid_levels"] = levels;
    j["converged"] = converged;
    j["iterations"] = iterations;
    j["power_estimate"] = power_estimate;
    j["lanczos_estimate"] = lanczos_estimate;
    return j;
}

namespace {

double dot_re(const Field& a, const Field& b) { return par::dot(a.data(), b.data(), a.size()).real(); }
double nrm(const Field& a) { return std::sqrt(std::max(0.0, dot_re(a, a))); }

double lanczos_top(const Operator& op, const Field& start, int steps) {
    const std::size_t n = start.size();
    std::vector<Field> Q;
    std::vector<double> a, b;
    Field q = start;
    double s = nrm(q);
    if (s == 0.0) return 0.0;
    q *= 1.0 / s;
    for (int j = 0; j < steps; ++j) {
        Q.push_back(q);
        Field w = op(q).real_part();
        double aj = dot_re(w, q);
        a.push_back(aj);
        // full reorthogonalisation, twice
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : Q) w.axpy(-dot_re(w, v), v);
        double bj = nrm(w);
        if (bj <= 1e-14 * std::abs(aj) || static_cast<std::size_t>(j + 1) >= n) break;
        b.push_back(bj);
        q = (1.0 / bj) * w;
    }
    const int m = static_cast<int>(a.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        T(i, i) = a[i];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = b[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

}  // namespace

EigenResult largest_eigenvalue(const Operator& op, const Field& start, const PowerOptions& opt) {
    EigenResult res;
    Field x = start.real_part();
    double s = nrm(x);
    if (s == 0.0) throw ParameterError("power iteration needs a nonzero start vector");
    x *= 1.0 / s;
    double rho = 0.0, prev = -1.0;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        Field y = op(x).real_part();
        rho = dot_re(x, y);
        double ny = nrm(y);
        if (ny == 0.0) {
            rho = 0.0;
            break;
        }
        x = (1.0 / ny) * y;
        if (it > 0 && std::abs(rho - prev) <= opt.rel_tol * std::abs(rho)) break;
        prev = rho;
    }
    if (it >= opt.max_iter) throw ConvergenceError("power iteration stagnated", rho);
    res.power_value = rho;
    res.iterations = it + 1;
    res.value = rho;
    if (opt.lanczos_steps > 0 && rho > 0.0) {
        res.lanczos_value = lanczos_top(op, start.real_part(), opt.lanczos_steps);
        res.value = std::max(res.value, res.lanczos_value);
    }
    res.vector = std::move(x);
    return res;
}

Operator form_resolvent(const TorusGrid& g, double alpha, double lambda, Variant v, bool remove_zero_mode) {
    spectral::check_alpha(alpha);
    require(lambda > 0.0, "lambda must be positive");
    Operator R = v == Variant::fractional ? spectral::mass_power(g, alpha, lambda, -(alpha - 1.0) / alpha)
                                          : spectral::laplace_mass_power(g, lambda, -(alpha - 1.0) / 2.0);
    if (remove_zero_mode) R = spectral::drop_zero_mode(g) * R;
    return R;
}

FormBoundEstimate estimate_weak_formbound(const Field& V, double alpha, double lambda, const PowerOptions& opt) {
    const TorusGrid& g = V.grid();
    FormBoundEstimate est;
    est.class_tag = ClassTag::weak_formbound;
    est.variant = opt.variant;
    est.lambda = lambda;
    est.zero_mode_removed = opt.remove_zero_mode;
    Field sq = V.map([](cplx z) { return cplx(std::sqrt(std::abs(z)), 0.0); });
    Operator R = form_resolvent(g, alpha, lambda, opt.variant, opt.remove_zero_mode);
    if (norm_inf(sq) == 0.0) {
        est.converged = true;
        est.grid_levels = {{g.N, 0.0}};
        return est;
    }
    Operator S = Operator::multiply(sq, "|b|^1/2");
    Operator B = S * R * S;
    auto r = largest_eigenvalue(B, sq, opt);
    est.delta_est = r.value;
    est.power_estimate = r.power_value;
    est.lanczos_estimate = r.lanczos_value;
    est.iterations = r.iterations;
    est.converged = true;
    est.grid_levels = {{g.N, r.value}};
    return est;
}

FormBoundEstimate estimate_weak_formbound(const drift::MollifiedDrift& b, double alpha, double lambda,
                                          const PowerOptions& opt) {
    return estimate_weak_formbound(b.magnitude(), alpha, lambda, opt);
}

FormBoundEstimate estimate_weak_formbound(const drift::DriftSpec& b, const TorusGrid& g, double alpha,
                                          double lambda, const PowerOptions& opt) {
    return estimate_weak_formbound(drift::magnitude_lattice(b, g), alpha, lambda, opt);
}

FormBoundEstimate estimate_formbound(const Field& V, double alpha, double lambda, const PowerOptions& opt) {
    const TorusGrid& g = V.grid();
    FormBoundEstimate est;
    est.class_tag = ClassTag::formbound;
    est.variant = opt.variant;
    est.lambda = lambda;
    est.zero_mode_removed = opt.remove_zero_mode;
    Field a = V.abs();
    if (norm_inf(a) == 0.0) {
        est.converged = true;
        return est;
    }
    Operator R = form_resolvent(g, alpha, lambda, opt.variant, opt.remove_zero_mode);
    Operator M = Operator::multiply(a, "|b|");
    // ||M R||^2 = top eigenvalue of M R R M
    auto r = largest_eigenvalue(M * R * R * M, a, opt);
    est.delta_est = std::sqrt(r.value);
    est.power_estimate = std::sqrt(r.power_value);
    est.lanczos_estimate = std::sqrt(r.lanczos_value);
    est.iterations = r.iterations;
    est.converged = true;
    est.grid_levels = {{g.N, est.delta_est}};
    return est;
}

double estimate_kato_norm(const Field& V, double alpha, double lambda) {
    Operator R = form_resolvent(V.grid(), alpha, lambda, Variant::fractional, false);
    return norm_inf(R(V.abs()).real_part());
}

double estimate_kato_norm(const drift::DriftSpec& b, const TorusGrid& g, double alpha, double lambda) {
    return estimate_kato_norm(drift::magnitude_lattice(b, g), alpha, lambda);
}

LadderResult lambda_ladder(const Field& V, double alpha, const std::vector<double>& lambdas,
                           const PowerOptions& opt) {
    LadderResult out;
    PowerOptions keep = opt;
    keep.remove_zero_mode = false;
    double smallest = lambdas.empty() ? 1e-3 : lambdas.front();
    for (double l : lambdas) {
        out.with_zero_mode.emplace_back(l, estimate_weak_formbound(V, alpha, l, keep).delta_est);
        smallest = std::min(smallest, l);
    }
    PowerOptions proj = opt;
    proj.remove_zero_mode = true;
    out.small_lambda = smallest;
    out.projected = estimate_weak_formbound(V, alpha, smallest, proj).delta_est;
    return out;
}

FormBoundEstimate refine_weak_formbound(const drift::DriftSpec& b, double alpha, double L,
                                        const std::vector<int>& N_list, double lambda, const PowerOptions& opt) {
    require(!N_list.empty(), "refinement needs at least one grid");
    FormBoundEstimate out;
    out.lambda = lambda;
    out.variant = opt.variant;
    out.zero_mode_removed = opt.remove_zero_mode;
    out.converged = true;
    int iters = 0;
    for (int N : N_list) {
        TorusGrid g(b.dim, L, N);
        auto e = estimate_weak_formbound(b, g, alpha, lambda, opt);
        out.grid_levels.emplace_back(N, e.delta_est);
        out.delta_est = e.delta_est;
        iters += e.iterations;
    }
    out.iterations = iters;
    return out;
}

Admissibility admissible_delta_threshold(int dim, double alpha, double m) {
    require(m > 0.0, "m must be positive");
    require(dim >= 1, "dimension must be positive");
    spectral::check_alpha(alpha);
    Admissibility a;
    const double d = dim;
    a.first_term = (d - alpha) / ((d - alpha + 1.0) * (d - alpha + 1.0));
    a.second_term = alpha * (d + alpha) / ((d + 2.0 * alpha) * (d + 2.0 * alpha));
    a.threshold = 4.0 * std::min(a.first_term, a.second_term) / m;
    a.holder_threshold = 4.0 * a.first_term / m;
    return a;
}

std::pair<double, double> p_interval(double m, double delta) {
    require(delta > 0.0, "delta must be positive for the p interval");
    require(m > 0.0, "m must be positive");
    const double md = m * delta;
    if (md > 1.0) throw AdmissibilityError("m * delta exceeds 1: the p interval is empty");
    const double s = std::sqrt(1.0 - md);
    return {2.0 / (1.0 + s), 2.0 / (1.0 - s)};
}

double weak_ld_reference(double alpha, int dim, double weak_norm) {
    const double d = dim;
    const double omega = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
    const double sq = std::pow(omega, -(alpha - 1.0) / (2.0 * d)) * std::pow(2.0, -0.5 * (alpha - 1.0)) *
                      std::tgamma(0.25 * (d - alpha + 1.0)) / std::tgamma(0.25 * (d + alpha - 1.0)) *
                      std::sqrt(weak_norm);
    return sq * sq;
}

double hardy_weak_norm(double coefficient, double alpha, int dim) {
    const double d = dim;
    const double omega = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
    return std::abs(coefficient) * std::pow(omega, (alpha - 1.0) / d);
}

}  // namespace sd::formbound
