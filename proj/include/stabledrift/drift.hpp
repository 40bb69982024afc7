#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "stabledrift/grid.hpp"
#include "stabledrift/report.hpp"

namespace sd::drift {

enum class Kind { hardy, lp_radial, bounded_smooth, kato_example, custom_closure };

std::string to_string(Kind k);
Kind kind_from_string(const std::string& s);

/// Symbolic vector field b on R^dim (dim <= 3; unused components of Vec3 are 0).
struct DriftSpec {
    Kind kind = Kind::bounded_smooth;
    int dim = 3;
    std::map<std::string, double> parameters;
    std::vector<Vec3> singular_points;
    std::function<Vec3(const Vec3&)> closure;  ///< only for custom_closure

    /// b(x); throws ParameterError at a singular point.
    Vec3 operator()(const Vec3& x) const;
    double magnitude(const Vec3& x) const;
    bool is_singular(const Vec3& x, double tol = 1e-12) const;
    bool is_zero() const;
    double param(const std::string& key) const;

    json to_json() const;
    static DriftSpec from_json(const json& j);
};

/// 2^{(alpha-1)/2} Gamma((d+alpha-1)/4) / Gamma((d-alpha+1)/4).
double kappa(double alpha, int dim);

enum class HardyScaling {
    calibrated,  ///< c = delta * kappa^2: the form-bound of c|x|^{-alpha}x is delta
    literal,     ///< c = sqrt(delta) * kappa, the formula as printed
};

/// b(x) = c |x|^{-alpha} x, singular at the origin.
DriftSpec hardy_drift(double delta, double alpha, int dim, HardyScaling scaling = HardyScaling::calibrated);
/// b(x) = c |x|^{-beta} exp(-|x|^2 / (2 R^2)) x/|x|.
DriftSpec lp_radial(double c, double beta, double radius, int dim = 3);
/// Gaussian-localised smooth field: a exp(-|x|^2/(2 s^2)) (x/s + w * (-x_2, x_1, 0)/s).
DriftSpec bounded_smooth(double amplitude, double sigma, double swirl = 0.0, int dim = 3);
/// Compactly supported c |x|^{-beta} x/|x| on |x| < R with beta < alpha - 1.
DriftSpec kato_example(double c, double beta, double radius, int dim = 3);
DriftSpec custom(std::function<Vec3(const Vec3&)> f, int dim, std::vector<Vec3> singular = {});
DriftSpec zero(int dim = 3);

/// Normalisation constant c with int_{|x|<1} c exp(-1/(1-|x|^2)) dx = 1.
double mollifier_constant(int dim);
/// Lattice gamma_eps centred at the origin site, normalised so sum * h^d = 1.
Field mollifier(double epsilon, const TorusGrid& g);

struct MollifiedDrift {
    DriftSpec base;
    int n = 1;
    double epsilon = 0.0;
    VectorField lattice;

    const TorusGrid& grid() const { return lattice.grid; }
    Field magnitude() const { return lattice.magnitude(); }
    double sup_norm() const { return lattice.sup_norm(); }
};

/// Default epsilon_n = min(1/n, 4h).
double default_epsilon(int n, const TorusGrid& g);

/// b_n = gamma_eps * (1_n b). For eps >= 2h a lattice FFT convolution, else a
/// per-site tensor Gauss-Legendre cubature of the convolution integral.
MollifiedDrift mollify(const DriftSpec& base, int n, double epsilon, const TorusGrid& g);
MollifiedDrift mollify(const DriftSpec& base, int n, const TorusGrid& g);
/// Lattice of b itself, no truncation (b must be bounded on the lattice sites).
MollifiedDrift sample_bounded(const DriftSpec& base, const TorusGrid& g);

/// |b| on the lattice; singular sites get the cell average of |b|.
Field magnitude_lattice(const DriftSpec& b, const TorusGrid& g);

/// sum over non-singular sites with |x| <= radius of |b - b_n| h^d.
double l1_distance(const DriftSpec& b, const MollifiedDrift& bn, double radius);

/// Periodic multilinear interpolation of a lattice vector field at x.
Vec3 interpolate(const VectorField& v, const Vec3& x);
double interpolate(const Field& f, const Vec3& x);

}  // namespace sd::drift
