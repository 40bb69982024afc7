#include "stabledrift/drift.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "stabledrift/errors.hpp"
#include "stabledrift/fft.hpp"

namespace sd::drift {

namespace {

constexpr double pi = std::numbers::pi;

double norm3(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

Vec3 radial_field(const Vec3& x, double coef) { return {coef * x[0], coef * x[1], coef * x[2]}; }

void check_dim(int dim) {
    if (dim < 1) throw ParameterError("dimension must be positive");
    if (dim > 3) throw CapacityError("drifts are evaluated on lattices with dim <= 3");
}

}  // namespace

std::string to_string(Kind k) {
    switch (k) {
        case Kind::hardy: return "hardy";
        case Kind::lp_radial: return "lp_radial";
        case Kind::bounded_smooth: return "bounded_smooth";
        case Kind::kato_example: return "kato_example";
        case Kind::custom_closure: return "custom_closure";
    }
    return "custom_closure";
}

Kind kind_from_string(const std::string& s) {
    if (s == "hardy") return Kind::hardy;
    if (s == "lp_radial") return Kind::lp_radial;
    if (s == "bounded_smooth") return Kind::bounded_smooth;
    if (s == "kato_example") return Kind::kato_example;
    if (s == "custom_closure") return Kind::custom_closure;
    throw ConfigError("unknown drift kind '" + s + "'");
}

double DriftSpec::param(const std::string& key) const {
    auto it = parameters.find(key);
    if (it == parameters.end()) throw ParameterError("drift parameter '" + key + "' missing");
    return it->second;
}

bool DriftSpec::is_singular(const Vec3& x, double tol) const {
    for (const auto& s : singular_points) {
        Vec3 d{x[0] - s[0], x[1] - s[1], x[2] - s[2]};
        if (norm3(d) <= tol) return true;
    }
    return false;
}

bool DriftSpec::is_zero() const {
    switch (kind) {
        case Kind::hardy: return param("coefficient") == 0.0;
        case Kind::lp_radial:
        case Kind::kato_example: return param("c") == 0.0;
        case Kind::bounded_smooth: return param("amplitude") == 0.0;
        case Kind::custom_closure: return !closure;
    }
    return false;
}

Vec3 DriftSpec::operator()(const Vec3& x) const {
    if (is_singular(x)) throw ParameterError("drift evaluated at a singular point");
    const double r = norm3(x);
    switch (kind) {
        case Kind::hardy: {
            double c = param("coefficient");
            if (c == 0.0) return {0.0, 0.0, 0.0};
            return radial_field(x, c * std::pow(r, -param("alpha")));
        }
        case Kind::lp_radial: {
            double c = param("c"), beta = param("beta"), R = param("radius");
            if (c == 0.0 || r == 0.0) return {0.0, 0.0, 0.0};
            return radial_field(x, c * std::pow(r, -beta) * std::exp(-r * r / (2.0 * R * R)) / r);
        }
        case Kind::kato_example: {
            double c = param("c"), beta = param("beta"), R = param("radius");
            if (c == 0.0 || r == 0.0 || r >= R) return {0.0, 0.0, 0.0};
            return radial_field(x, c * std::pow(r, -beta) / r);
        }
        case Kind::bounded_smooth: {
            double a = param("amplitude"), s = param("sigma"), w = param("swirl");
            double e = a * std::exp(-r * r / (2.0 * s * s)) / s;
            return {e * (x[0] - w * x[1]), e * (x[1] + w * x[0]), dim >= 3 ? e * x[2] : 0.0};
        }
        case Kind::custom_closure: {
            if (!closure) return {0.0, 0.0, 0.0};
            return closure(x);
        }
    }
    return {0.0, 0.0, 0.0};
}

double DriftSpec::magnitude(const Vec3& x) const { return norm3((*this)(x)); }

json DriftSpec::to_json() const {
    json j;
    j["kind"] = to_string(kind);
    j["dim"] = dim;
    json p = json::object();
    for (const auto& [k, v] : parameters) p[k] = v;
    j["parameters"] = p;
    json s = json::array();
    for (const auto& x : singular_points) {
        json pt = json::array();
        for (int a = 0; a < dim; ++a) pt.push_back(x[a]);
        s.push_back(pt);
    }
    j["singular_points"] = s;
    return j;
}

DriftSpec DriftSpec::from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("drift spec needs a 'kind'");
    Kind kind = kind_from_string(j.at("kind").get<std::string>());
    std::map<std::string, double> p;
    if (j.contains("parameters")) {
        for (auto it = j["parameters"].begin(); it != j["parameters"].end(); ++it) {
            if (!it.value().is_number()) throw ConfigError("drift parameter '" + it.key() + "' is not a number");
            p[it.key()] = it.value().get<double>();
        }
    }
    auto get = [&](const char* k, double dflt) {
        auto it = p.find(k);
        return it == p.end() ? dflt : it->second;
    };
    int dim = j.value("dim", static_cast<int>(get("dim", 3)));
    DriftSpec d;
    switch (kind) {
        case Kind::hardy: {
            if (p.count("coefficient") && !p.count("delta")) {
                d = hardy_drift(1.0, get("alpha", 1.5), dim);
                d.parameters["coefficient"] = p["coefficient"];
                d.parameters.erase("delta");
            } else {
                d = hardy_drift(get("delta", 0.05), get("alpha", 1.5), dim,
                                get("literal", 0.0) != 0.0 ? HardyScaling::literal : HardyScaling::calibrated);
            }
            break;
        }
        case Kind::lp_radial: d = lp_radial(get("c", 1.0), get("beta", 0.25), get("radius", 2.0), dim); break;
        case Kind::kato_example: d = kato_example(get("c", 1.0), get("beta", 0.25), get("radius", 2.0), dim); break;
        case Kind::bounded_smooth:
            d = bounded_smooth(get("amplitude", 1.0), get("sigma", 1.5), get("swirl", 0.0), dim);
            break;
        case Kind::custom_closure:
            throw ConfigError("custom_closure drifts are built in code; they cannot be read from a config");
    }
    if (j.contains("singular_points")) {
        d.singular_points.clear();
        for (const auto& pt : j["singular_points"]) {
            Vec3 x{0.0, 0.0, 0.0};
            for (std::size_t a = 0; a < pt.size() && a < 3; ++a) x[a] = pt[a].get<double>();
            d.singular_points.push_back(x);
        }
    }
    return d;
}

double kappa(double alpha, int dim) {
    return std::pow(2.0, 0.5 * (alpha - 1.0)) * std::tgamma(0.25 * (dim + alpha - 1.0)) /
           std::tgamma(0.25 * (dim - alpha + 1.0));
}

DriftSpec hardy_drift(double delta, double alpha, int dim, HardyScaling scaling) {
    if (dim < 3) throw ParameterError("the Hardy drift constant needs dim >= 3");
    check_dim(dim);
    if (!(alpha > 1.0 && alpha < 2.0)) throw ParameterError("alpha must lie in (1, 2)");
    if (!(delta >= 0.0)) throw ParameterError("delta must be nonnegative");
    const double k = kappa(alpha, dim);
    DriftSpec d;
    d.kind = Kind::hardy;
    d.dim = dim;
    d.parameters = {{"delta", delta},
                    {"alpha", alpha},
                    {"literal", scaling == HardyScaling::literal ? 1.0 : 0.0},
                    {"coefficient", scaling == HardyScaling::literal ? std::sqrt(delta) * k : delta * k * k}};
    d.singular_points = {{0.0, 0.0, 0.0}};
    return d;
}

DriftSpec lp_radial(double c, double beta, double radius, int dim) {
    check_dim(dim);
    require(beta >= 0.0 && radius > 0.0, "lp_radial needs beta >= 0, radius > 0");
    DriftSpec d;
    d.kind = Kind::lp_radial;
    d.dim = dim;
    d.parameters = {{"c", c}, {"beta", beta}, {"radius", radius}};
    d.singular_points = {{0.0, 0.0, 0.0}};
    return d;
}

DriftSpec kato_example(double c, double beta, double radius, int dim) {
    check_dim(dim);
    require(beta >= 0.0 && radius > 0.0, "kato_example needs beta >= 0, radius > 0");
    DriftSpec d;
    d.kind = Kind::kato_example;
    d.dim = dim;
    d.parameters = {{"c", c}, {"beta", beta}, {"radius", radius}};
    d.singular_points = {{0.0, 0.0, 0.0}};
    return d;
}

DriftSpec bounded_smooth(double amplitude, double sigma, double swirl, int dim) {
    check_dim(dim);
    require(sigma > 0.0, "sigma must be positive");
    DriftSpec d;
    d.kind = Kind::bounded_smooth;
    d.dim = dim;
    d.parameters = {{"amplitude", amplitude}, {"sigma", sigma}, {"swirl", swirl}};
    return d;
}

DriftSpec custom(std::function<Vec3(const Vec3&)> f, int dim, std::vector<Vec3> singular) {
    check_dim(dim);
    DriftSpec d;
    d.kind = Kind::custom_closure;
    d.dim = dim;
    d.closure = std::move(f);
    d.singular_points = std::move(singular);
    return d;
}

DriftSpec zero(int dim) { return bounded_smooth(0.0, 1.0, 0.0, dim); }

double mollifier_constant(int dim) {
    check_dim(dim);
    boost::math::quadrature::tanh_sinh<double> ts;
    double radial = ts.integrate(
        [&](double r) {
            double u = 1.0 - r * r;
            if (u <= 0.0) return 0.0;
            return std::pow(r, dim - 1) * std::exp(-1.0 / u);
        },
        0.0, 1.0);
    double area = 2.0 * std::pow(pi, 0.5 * dim) / std::tgamma(0.5 * dim);
    return 1.0 / (area * radial);
}

namespace {

double bump(double rr) {  // rr = |x|^2
    return rr < 1.0 ? std::exp(-1.0 / (1.0 - rr)) : 0.0;
}

}  // namespace

Field mollifier(double epsilon, const TorusGrid& g) {
    require(epsilon > 0.0, "mollifier radius must be positive");
    if (!(epsilon < 0.5 * g.L)) throw ParameterError("mollifier support does not fit the torus");
    const double c = mollifier_constant(g.dim);
    const double scale = c / std::pow(epsilon, g.dim);
    Field m = Field::from_function(g, [&](const Vec3& x) {
        double rr = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (epsilon * epsilon);
        return cplx(scale * bump(rr), 0.0);
    });
    double total = lattice_integral(m);
    if (total <= 0.0) {
        // radius below the lattice spacing: all mass on the origin site
        m[g.origin()] = 1.0 / g.cell_volume();
        return m;
    }
    m *= 1.0 / total;
    return m;
}

double default_epsilon(int n, const TorusGrid& g) { return std::min(1.0 / n, 4.0 * g.h()); }

namespace {

Vec3 truncated(const DriftSpec& b, int n, const Vec3& x) {
    if (b.is_singular(x)) return {0.0, 0.0, 0.0};
    if (norm3(x) > n) return {0.0, 0.0, 0.0};
    Vec3 v = b(x);
    if (norm3(v) > n) return {0.0, 0.0, 0.0};
    return v;
}

VectorField sample(const TorusGrid& g, const std::function<Vec3(const Vec3&)>& f) {
    VectorField v(g);
    const std::ptrdiff_t sz = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < sz; ++i) {
        Vec3 val = f(g.point(static_cast<std::size_t>(i)));
        for (int a = 0; a < g.dim; ++a) v.comp[a][i] = val[a];
    }
    return v;
}

constexpr int kNodes = 8;

}  // namespace

MollifiedDrift mollify(const DriftSpec& base, int n, double epsilon, const TorusGrid& g) {
    require(n >= 1, "truncation level must be >= 1");
    require(base.dim == g.dim, "drift and grid dimensions differ");
    require(epsilon > 0.0, "epsilon must be positive");
    if (!(epsilon < 0.5 * g.L)) throw ParameterError("mollifier support does not fit the torus");
    MollifiedDrift out;
    out.base = base;
    out.n = n;
    out.epsilon = epsilon;
    if (base.is_zero()) {
        out.lattice = VectorField(g);
        return out;
    }
    if (epsilon >= 2.0 * g.h()) {
        VectorField t = sample(g, [&](const Vec3& x) { return truncated(base, n, x); });
        Field m = mollifier(epsilon, g);
        // shift the kernel so that its centre sits at index 0
        Field mk(g);
        const std::size_t o = g.origin();
        auto oijk = g.unravel(o);
        for (std::size_t i = 0; i < g.size(); ++i) {
            auto ijk = g.unravel(i);
            std::array<int, 3> s{0, 0, 0};
            for (int a = 0; a < g.dim; ++a) s[a] = ijk[a] - oijk[a];
            mk[g.ravel(s)] = m[i] * g.cell_volume();
        }
        fft::forward(mk);
        out.lattice = VectorField(g);
        for (int a = 0; a < g.dim; ++a) {
            Field c = t.comp[a];
            fft::forward(c);
            for (std::size_t i = 0; i < g.size(); ++i) c[i] *= mk[i];
            fft::backward(c);
            out.lattice.comp[a] = c.real_part();
        }
        return out;
    }
    // sub-grid radius: tensor Gauss-Legendre cubature of the convolution at each site
    const auto& gl_nodes = boost::math::quadrature::gauss<double, kNodes>::abscissa();
    const auto& gl_weights = boost::math::quadrature::gauss<double, kNodes>::weights();
    std::vector<double> nodes, weights;
    for (int i = static_cast<int>(gl_nodes.size()) - 1; i >= 0; --i) {
        if (gl_nodes[i] != 0.0) {
            nodes.push_back(-gl_nodes[i]);
            weights.push_back(gl_weights[i]);
        }
    }
    for (std::size_t i = 0; i < gl_nodes.size(); ++i) {
        nodes.push_back(gl_nodes[i]);
        weights.push_back(gl_weights[i]);
    }
    struct Node {
        Vec3 y;
        double w;
    };
    std::vector<Node> cub;
    const int q = static_cast<int>(nodes.size());
    const int dz = g.dim >= 3 ? q : 1, dy = g.dim >= 2 ? q : 1;
    double wsum = 0.0;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < dy; ++j)
            for (int k = 0; k < dz; ++k) {
                Vec3 u{nodes[i], g.dim >= 2 ? nodes[j] : 0.0, g.dim >= 3 ? nodes[k] : 0.0};
                double w = weights[i] * (g.dim >= 2 ? weights[j] : 1.0) * (g.dim >= 3 ? weights[k] : 1.0) *
                           bump(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
                if (w > 0.0) {
                    cub.push_back({{u[0] * epsilon, u[1] * epsilon, u[2] * epsilon}, w});
                    wsum += w;
                }
            }
    for (auto& c : cub) c.w /= wsum;
    out.lattice = sample(g, [&](const Vec3& x) {
        Vec3 acc{0.0, 0.0, 0.0};
        for (const auto& c : cub) {
            Vec3 v = truncated(base, n, {x[0] - c.y[0], x[1] - c.y[1], x[2] - c.y[2]});
            for (int a = 0; a < 3; ++a) acc[a] += c.w * v[a];
        }
        return acc;
    });
    return out;
}

MollifiedDrift mollify(const DriftSpec& base, int n, const TorusGrid& g) {
    return mollify(base, n, default_epsilon(n, g), g);
}

MollifiedDrift sample_bounded(const DriftSpec& base, const TorusGrid& g) {
    require(base.dim == g.dim, "drift and grid dimensions differ");
    MollifiedDrift out;
    out.base = base;
    out.n = std::numeric_limits<int>::max();
    out.epsilon = 0.0;
    out.lattice = sample(g, [&](const Vec3& x) {
        if (base.is_singular(x)) throw ParameterError("sample_bounded: drift has a singular lattice site");
        return base(x);
    });
    return out;
}

Field magnitude_lattice(const DriftSpec& b, const TorusGrid& g) {
    require(b.dim == g.dim, "drift and grid dimensions differ");
    const auto& gl_nodes = boost::math::quadrature::gauss<double, 16>::abscissa();
    const auto& gl_weights = boost::math::quadrature::gauss<double, 16>::weights();
    std::vector<std::pair<double, double>> rule;  // on [-1/2, 1/2], weights summing to 1
    for (std::size_t i = 0; i < gl_nodes.size(); ++i) {
        rule.push_back({0.5 * gl_nodes[i], 0.5 * gl_weights[i]});
        rule.push_back({-0.5 * gl_nodes[i], 0.5 * gl_weights[i]});
    }
    const double h = g.h();
    return Field::from_function(g, [&](const Vec3& x) {
        if (!b.is_singular(x)) return cplx(b.magnitude(x), 0.0);
        double acc = 0.0;
        for (auto [u, wu] : rule)
            for (auto [v, wv] : g.dim >= 2 ? rule : decltype(rule){{0.0, 1.0}})
                for (auto [s, ws] : g.dim >= 3 ? rule : decltype(rule){{0.0, 1.0}})
                    acc += wu * wv * ws * b.magnitude({x[0] + h * u, x[1] + h * v, x[2] + h * s});
        return cplx(acc, 0.0);
    });
}

double l1_distance(const DriftSpec& b, const MollifiedDrift& bn, double radius) {
    const TorusGrid& g = bn.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec3 x = g.point(i);
        if (norm3(x) > radius || b.is_singular(x)) continue;
        Vec3 v = b(x);
        double s = 0.0;
        for (int a = 0; a < g.dim; ++a) s += std::norm(v[a] - bn.lattice.comp[a][i]);
        acc += std::sqrt(s);
    }
    return acc * g.cell_volume();
}

double interpolate(const Field& f, const Vec3& x) {
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
    double acc = 0.0;
    const int corners = 1 << g.dim;
    for (int c = 0; c < corners; ++c) {
        std::array<int, 3> ijk = base;
        double w = 1.0;
        for (int a = 0; a < g.dim; ++a) {
            int bit = (c >> a) & 1;
            ijk[a] += bit;
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        if (w != 0.0) acc += w * f[g.ravel(ijk)].real();
    }
    return acc;
}

Vec3 interpolate(const VectorField& v, const Vec3& x) {
    Vec3 out{0.0, 0.0, 0.0};
    for (int a = 0; a < v.grid.dim; ++a) out[a] = interpolate(v.comp[a], x);
    return out;
}

}  // namespace sd::drift
