#include "stabledrift/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "stabledrift/anchors.hpp"
#include "stabledrift/errors.hpp"
#include "stabledrift/formbound.hpp"
#include "stabledrift/radial.hpp"

namespace sd::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// inline comments: whitespace followed by ';' or '#'
std::string strip_comment(const std::string& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if ((s[i] == ';' || s[i] == '#') && std::isspace(static_cast<unsigned char>(s[i - 1]))) return trim(s.substr(0, i));
    return trim(s);
}

double to_number(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::string s = trim(v.get<std::string>());
        double x = 0.0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return x;
    }
    throw ConfigError("'" + key + "' must be a number");
}

long long to_integer(const json& v, const std::string& key) {
    double x = to_number(v, key);
    if (x != std::floor(x) || std::abs(x) > 9.0e15) throw ConfigError("'" + key + "' must be an integer");
    return static_cast<long long>(x);
}

bool to_bool(const json& v, const std::string& key) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>() != 0.0;
    if (v.is_string()) {
        std::string s = trim(v.get<std::string>());
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
        if (s == "false" || s == "no" || s == "off" || s == "0") return false;
    }
    throw ConfigError("'" + key + "' must be a boolean");
}

std::string to_string_value(const json& v, const std::string& key) {
    if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
    return trim(v.get<std::string>());
}

std::vector<double> to_list(const json& v, const std::string& key) {
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& x : v) out.push_back(to_number(x, key));
    } else if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_number(json(item), key));
    } else {
        out.push_back(to_number(v, key));
    }
    if (out.empty()) throw ConfigError("'" + key + "' must be a non-empty list");
    return out;
}

// "x y z; x y z" or [[x,y,z], ...]
json to_points(const json& v, const std::string& key) {
    if (v.is_array()) return v;
    json out = json::array();
    std::stringstream ss(to_string_value(v, key));
    std::string item;
    while (std::getline(ss, item, ';')) {
        std::stringstream is(item);
        json pt = json::array();
        std::string c;
        while (is >> c) pt.push_back(to_number(json(c), key));
        if (!pt.empty()) out.push_back(pt);
    }
    return out;
}

// INI text -> the same nested object a JSON config would give (leaf values as strings)
json ini_to_json(const std::string& text) {
    boost::property_tree::ptree pt;
    std::istringstream is(text);
    try {
        boost::property_tree::read_ini(is, pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    json out = json::object();
    for (const auto& [key, node] : pt) {
        if (node.empty()) {
            out[key] = strip_comment(node.data());
            continue;
        }
        json sec = json::object();
        for (const auto& [k, v] : node) sec[k] = strip_comment(v.data());
        out[key] = sec;
    }
    return out;
}

drift::DriftSpec drift_from(const json& sec, const ExperimentConfig& c, const std::string& where) {
    if (!sec.is_object()) throw ConfigError("[" + where + "] must be a section");
    json spec = json::object();
    json params = json::object();
    for (auto it = sec.begin(); it != sec.end(); ++it) {
        const std::string& k = it.key();
        if (k == "kind") {
            spec["kind"] = to_string_value(it.value(), where + ".kind");
        } else if (k == "singular_points") {
            spec["singular_points"] = to_points(it.value(), where + ".singular_points");
        } else if (k == "parameters") {
            if (!it.value().is_object()) throw ConfigError(where + ".parameters must be an object");
            for (auto p = it.value().begin(); p != it.value().end(); ++p)
                params[p.key()] = to_number(p.value(), where + "." + p.key());
        } else {
            params[k] = to_number(it.value(), where + "." + k);
        }
    }
    if (!spec.contains("kind")) throw ConfigError("[" + where + "] needs a kind");
    if (spec["kind"] == "hardy") {
        if (c.dim < 3)
            throw AdmissibilityError(anchors::hypothesis("dimension") + ": d = " + std::to_string(c.dim) + " < 3");
        if (!params.contains("delta") && !params.contains("coefficient")) params["delta"] = c.delta;
        if (!params.contains("alpha")) params["alpha"] = c.alpha;
        if (!params.contains("literal"))
            params["literal"] = c.hardy_scaling == drift::HardyScaling::literal ? 1.0 : 0.0;
    }
    params["dim"] = c.dim;
    spec["parameters"] = params;
    try {
        return drift::DriftSpec::from_json(spec);
    } catch (const ParameterError& e) {
        throw ConfigError("[" + where + "]: " + e.what());
    } catch (const json::exception& e) {
        throw ConfigError("[" + where + "]: " + e.what());
    }
}

void reject_unknown(const json& sec, const std::set<std::string>& known, const std::string& where) {
    for (auto it = sec.begin(); it != sec.end(); ++it)
        if (!known.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

ExperimentConfig from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be an object");
    if (j.empty()) throw ConfigError("config is empty");
    static const std::set<std::string> top = {"scenario", "seed", "quick", "experiment", "model", "grid", "time",
                                              "drift", "bounded_drift"};
    reject_unknown(j, top, "config");
    // [experiment] is an alias for the top-level keys
    json exp = j.contains("experiment") ? j["experiment"] : json::object();
    if (!exp.is_object()) throw ConfigError("[experiment] must be a section");
    reject_unknown(exp, {"scenario", "seed", "quick"}, "[experiment]");
    auto pick = [&](const char* k) -> const json* {
        if (j.contains(k)) return &j[k];
        if (exp.contains(k)) return &exp[k];
        return nullptr;
    };
    ExperimentConfig c;
    const json* sc = pick("scenario");
    if (!sc) throw ConfigError("config has no scenario");
    c.scenario = to_string_value(*sc, "scenario");
    if (!anchors::is_scenario(c.scenario)) throw ConfigError("unknown scenario '" + c.scenario + "'");
    if (const json* s = pick("seed")) {
        long long v = to_integer(*s, "seed");
        if (v < 0) throw ConfigError("seed must be nonnegative");
        c.seed = static_cast<std::uint64_t>(v);
    }
    if (const json* q = pick("quick")) c.quick = to_bool(*q, "quick");

    if (j.contains("model")) {
        const json& m = j["model"];
        if (!m.is_object()) throw ConfigError("[model] must be a section");
        reject_unknown(m, {"d", "dim", "alpha", "delta", "lambda", "nu", "p", "q", "r", "m", "hardy_scaling"},
                       "[model]");
        if (m.contains("d")) c.dim = static_cast<int>(to_integer(m["d"], "d"));
        if (m.contains("dim")) c.dim = static_cast<int>(to_integer(m["dim"], "dim"));
        if (m.contains("alpha")) c.alpha = to_number(m["alpha"], "alpha");
        if (m.contains("delta")) c.delta = to_number(m["delta"], "delta");
        if (m.contains("lambda")) c.lambda = to_number(m["lambda"], "lambda");
        if (m.contains("nu")) c.nu = to_number(m["nu"], "nu");
        if (m.contains("p")) c.p = to_number(m["p"], "p");
        if (m.contains("q")) c.q = to_number(m["q"], "q");
        if (m.contains("r")) c.r = to_number(m["r"], "r");
        if (m.contains("m")) c.m_dalpha = to_number(m["m"], "m");
        if (m.contains("hardy_scaling")) {
            std::string s = to_string_value(m["hardy_scaling"], "hardy_scaling");
            if (s == "calibrated") c.hardy_scaling = drift::HardyScaling::calibrated;
            else if (s == "literal") c.hardy_scaling = drift::HardyScaling::literal;
            else throw ConfigError("hardy_scaling must be 'calibrated' or 'literal'");
        }
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (!g.is_object()) throw ConfigError("[grid] must be a section");
        reject_unknown(g, {"N", "L"}, "[grid]");
        if (g.contains("N")) c.N = static_cast<int>(to_integer(g["N"], "N"));
        if (g.contains("L")) c.L = to_number(g["L"], "L");
    }
    if (j.contains("time")) {
        const json& t = j["time"];
        if (!t.is_object()) throw ConfigError("[time] must be a section");
        reject_unknown(t, {"t_list", "mu_ladder", "n_paths", "dt"}, "[time]");
        if (t.contains("t_list")) c.t_list = to_list(t["t_list"], "t_list");
        if (t.contains("mu_ladder")) c.mu_ladder = to_list(t["mu_ladder"], "mu_ladder");
        if (t.contains("n_paths")) {
            long long n = to_integer(t["n_paths"], "n_paths");
            if (n < 1) throw ConfigError("n_paths must be positive");
            c.n_paths = static_cast<std::size_t>(n);
        }
        if (t.contains("dt")) c.dt = to_number(t["dt"], "dt");
    }

    if (c.dim > 3 || c.dim < 1) throw ConfigError("only d in {1,2,3} fits the lattice");
    if (!(c.N >= 4 && c.N % 2 == 0 && c.N <= 256)) throw ConfigError("N must be even and in [4, 256]");
    if (!(c.L > 0.0)) throw ConfigError("L must be positive");
    if (!(c.alpha > 1.0 && c.alpha < 2.0)) throw ConfigError("alpha must lie in (1, 2)");
    if (!(c.delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(c.lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
    if (c.m_dalpha && !(*c.m_dalpha > 0.0)) throw ConfigError("m must be positive");
    for (double t : c.t_list)
        if (!(t > 0.0)) throw ConfigError("t_list entries must be positive");
    for (double mu : c.mu_ladder)
        if (!(mu > 0.0)) throw ConfigError("mu_ladder entries must be positive");

    if (c.dim >= 3) {
        c.drift = j.contains("drift") ? drift_from(j["drift"], c, "drift")
                                      : drift::hardy_drift(c.delta, c.alpha, c.dim, c.hardy_scaling);
    } else {
        c.drift = j.contains("drift") ? drift_from(j["drift"], c, "drift") : drift::zero(c.dim);
    }
    c.bounded_drift = j.contains("bounded_drift") ? drift_from(j["bounded_drift"], c, "bounded_drift")
                                                  : drift::bounded_smooth(1.0, 1.5, 0.5, c.dim);
    if (c.bounded_drift.kind != drift::Kind::bounded_smooth)
        throw ConfigError("[bounded_drift] must be of kind bounded_smooth");
    return c;
}

}  // namespace

int ExperimentConfig::grid_n() const { return quick ? std::max(8, N / 2 + (N / 2) % 2) : N; }

std::size_t ExperimentConfig::paths() const { return quick ? std::max<std::size_t>(1000, n_paths / 2) : n_paths; }

double ExperimentConfig::effective_delta() const {
    if (drift.kind == drift::Kind::hardy) {
        double k = drift::kappa(drift.param("alpha"), drift.dim);
        return drift.param("coefficient") / (k * k);
    }
    return delta;
}

json ExperimentConfig::to_json() const {
    json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["quick"] = quick;
    j["model"] = {{"d", dim},
                  {"alpha", alpha},
                  {"delta", delta},
                  {"lambda", lambda},
                  {"nu", nu},
                  {"p", p},
                  {"q", q_eff()},
                  {"r", r_eff()},
                  {"m", m_dalpha ? json(*m_dalpha) : json(nullptr)},
                  {"hardy_scaling", hardy_scaling == drift::HardyScaling::literal ? "literal" : "calibrated"}};
    j["grid"] = {{"N", N}, {"L", L}};
    j["time"] = {{"t_list", t_list}, {"mu_ladder", mu_ladder}, {"n_paths", n_paths}, {"dt", dt}};
    j["drift"] = drift.to_json();
    j["bounded_drift"] = bounded_drift.to_json();
    return j;
}

ExperimentConfig parse_config(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) throw ConfigError("config is empty");
    if (t.front() == '{') {
        json j;
        try {
            j = json::parse(t);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config JSON parse error: ") + e.what());
        }
        return from_json(j);
    }
    return from_json(ini_to_json(text));
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json AdmissibilityInfo::to_json() const {
    return {{"m", m},
            {"m_estimated", m_estimated},
            {"delta", delta},
            {"delta_threshold", threshold},
            {"p_minus", p_minus},
            {"p_plus", p_plus},
            {"p_floor", p_floor}};
}

double estimate_m(double alpha, int dim) {
    return radial::estimate_m_dalpha(alpha, dim, radial::default_m_sample(12)).m_est;
}

AdmissibilityInfo check_admissibility(const ExperimentConfig& c) {
    auto fail = [](const char* which, const std::string& detail) {
        throw AdmissibilityError(anchors::hypothesis(which) + ": " + detail);
    };
    if (c.dim < 3) fail("dimension", "d = " + std::to_string(c.dim) + " < 3");
    AdmissibilityInfo a;
    a.m_estimated = !c.m_dalpha;
    a.m = c.m_dalpha ? *c.m_dalpha : estimate_m(c.alpha, c.dim);
    a.delta = c.effective_delta();
    a.threshold = formbound::admissible_delta_threshold(c.dim, c.alpha, a.m).threshold;
    if (!(a.delta < a.threshold)) {
        std::ostringstream os;
        os << "delta = " << a.delta << " is not below m^{-1} 4[...] = " << a.threshold << " (m = " << a.m << ")";
        fail("delta", os.str());
    }
    auto [pm, pp] = formbound::p_interval(a.m, a.delta);
    a.p_minus = pm;
    a.p_plus = pp;
    const double d = c.dim;
    a.p_floor = std::max(d - c.alpha + 1.0, d / (2.0 * c.nu) + 2.0);
    if (!(c.nu > 0.0 && c.nu < 0.5 * c.alpha)) fail("nu", "nu = " + std::to_string(c.nu) + " is outside (0, alpha/2)");
    if (!(c.p >= 2.0 && c.p < pp)) {
        std::ostringstream os;
        os << "p = " << c.p << " is outside [2, p_+) = [2, " << pp << ")";
        fail("p_range", os.str());
    }
    if (!(c.p > a.p_floor)) {
        std::ostringstream os;
        os << "p = " << c.p << " must exceed (d-alpha+1) v (d/(2nu)+2) = " << a.p_floor;
        fail("p_weighted", os.str());
    }
    if (!(c.r_eff() > 1.0 && c.r_eff() < c.p && c.p < c.q_eff())) fail("rpq", "need 1 < r < p < q");
    return a;
}

}  // namespace sd::cli
