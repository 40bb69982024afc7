#include "stabledrift/anchors.hpp"

#include <algorithm>
#include <map>

#include "stabledrift/errors.hpp"

namespace sd::cli::anchors {

const std::vector<ScenarioInfo>& scenarios() {
    static const std::vector<ScenarioInfo> list = [] {
        std::vector<ScenarioInfo> v = {
            {"evolution_verify",
             "Theorem 1.2(i), \"exists and determines a Feller semigroup\"; Theorem 1.2(v), \"is conservative, i.e.\"; "
             "Corollary 5.3(iv), \"The Duhamel formula:\"",
             "Duhamel residual, cutoff masses, Feller Cauchy convergence"},
            {"formbound_audit",
             "§1, \"class of weakly form-bounded vector fields\"; Examples 3-4; Appendix A (A.0)-(A.3)",
             "kernel bounds, m estimate, Hardy form-bound, Kato norm"},
            {"full_suite", "Theorem 1.2; Proposition 1.5; Theorems 3.2/3.3; Appendices A-B",
             "every scenario in dependency order"},
            {"resolvent_verify",
             "Theorem 3.2, \"Define operator-valued function\"; Theorem 3.3(i), \"the resolvent set of\"; formula (∗∗); "
             "Appendix B Lemma B.1, \"inequalities for symmetric Markov generators\"",
             "Balakrishnan powers, resolvent identities, T_p bound, L^p inequalities"},
            {"sampler_check", "§1, \"characteristic function\"; Theorem 1.2(vii), \"which is a symmetric α-stable process\"",
             "stable increments against exp(-t|k|^alpha)"},
            {"sde_identify",
             "Theorem 1.2(vii), \"which is a symmetric α-stable process\"; §7, \"This is another bounded solution\"; "
             "§7, \"is a contraction on\"",
             "driving-noise identification, MC vs semigroup, contraction of H"},
            {"weighted_verify",
             "Lemma 4.1, \"symmetric Markov generator on\"; Proposition 1.5, \"weighted estimates play crucial role\"; "
             "Lemma 5.1, \"the following elementary consequence\"",
             "weighted Markov bound, (E1)-(E3) ratios, eta-b integrability"},
        };
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
        return v;
    }();
    return list;
}

bool is_scenario(const std::string& name) {
    const auto& s = scenarios();
    return std::any_of(s.begin(), s.end(), [&](const auto& x) { return x.name == name; });
}

const std::string& scenario_anchor(const std::string& name) {
    for (const auto& s : scenarios())
        if (s.name == name) return s.anchor;
    throw ConfigError("unknown scenario '" + name + "'");
}

std::string check_anchor(const std::string& report_name) {
    static const std::map<std::string, std::string> table = {
        {"charfn", "§1, \"characteristic function\" E[exp(iϰ·(Z_t−Z_0))]=exp(−t|ϰ|^α)"},
        {"subordinator", "Theorem 1.2(vii), \"which is a symmetric α-stable process\""},
        {"kernel_bounds", "Appendix A, bounds (A.2) and (A.3)"},
        {"m_dalpha", "Appendix A, (A.1) and the constant m_{d,α}"},
        {"hardy_formbound", "Example 3; §1, \"class of weakly form-bounded vector fields\""},
        {"kato_norm", "Example 4, Hardy drift outside the Kato class"},
        {"lambda_ladder", "§1, \"class of weakly form-bounded vector fields\", λ → 0+"},
        {"admissibility", "Theorem 1.2 hypothesis, \"δ < m_{d,α}^{−1}4[(d−α)/(d−α+1)² ∧ α(d+α)/(d+2α)²]\""},
        {"balakrishnan", "formula (∗∗)"},
        {"resolvent_identities", "Theorem 3.2, \"Define operator-valued function\"; Theorem 3.3(i), \"the resolvent set of\""},
        {"tp_bound", "Theorem 3.3(i), \"‖T_p‖_{p→p} ≤ m_{d,α}c_pδ < 1, c_p := pp′/4\""},
        {"lp_inequalities_p2", "Appendix B Lemma B.1, \"inequalities for symmetric Markov generators\""},
        {"lp_inequalities_p4.5", "Appendix B Lemma B.1, \"inequalities for symmetric Markov generators\""},
        {"weighted_markov", "Lemma 4.1, \"symmetric Markov generator on\" L²_η"},
        {"weighted_estimates", "Proposition 1.5, \"weighted estimates play crucial role\""},
        {"eta_b_integrability", "Lemma 5.1, \"the following elementary consequence\""},
        {"duhamel", "Corollary 5.3(iv), \"The Duhamel formula:\""},
        {"conservativeness", "Theorem 1.2(v), \"is conservative, i.e.\"; §6 cutoffs ξ_k"},
        {"feller", "Theorem 1.2(i), \"exists and determines a Feller semigroup\"; Appendix C, \"Trotter Approximation Theorem\""},
        {"feller_t_sweep", "Theorem 1.2(i), \"exists and determines a Feller semigroup\""},
        {"propagator_properties", "Theorem 1.2(i), \"exists and determines a Feller semigroup\""},
        {"driving_noise", "Theorem 1.2(vii), \"which is a symmetric α-stable process\"; §7, \"This is another bounded solution\""},
        {"mc_vs_semigroup", "§1, measures \"E_{P_x}[f(X_t)] = (T^t f)(x)\"; Theorem 1.2(vi), \"E_{P_x}∫₀^t |b(X_s)|ds < ∞\""},
        {"contraction_H", "§7, \"is a contraction on\" the weighted space"},
        {"weak_order", "Theorem 1.2(vii), Euler approximants of \"which is a symmetric α-stable process\""},
    };
    auto it = table.find(report_name);
    return it == table.end() ? std::string{} : it->second;
}

std::string hypothesis(const std::string& key) {
    static const std::map<std::string, std::string> table = {
        {"dimension", "violates Theorem 1.2 hypothesis d ≥ 3"},
        {"delta", "violates Theorem 1.2 hypothesis on δ"},
        {"nu", "violates Proposition 1.5 hypothesis on ν (0 < ν < α/2)"},
        {"p_range", "violates Theorem 1.2 hypothesis on p (p ∈ [2, p_+))"},
        {"p_weighted", "violates Proposition 1.5 hypothesis on p and ν"},
        {"rpq", "violates Theorem 3.3(i) hypothesis r < p < q"},
    };
    auto it = table.find(key);
    return it == table.end() ? std::string("violates an admissibility hypothesis") : it->second;
}

}  // namespace sd::cli::anchors
