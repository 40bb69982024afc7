#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "stabledrift/drift.hpp"
#include "stabledrift/evolution.hpp"
#include "stabledrift/grid.hpp"
#include "stabledrift/report.hpp"
#include "stabledrift/sampler.hpp"
#include "stabledrift/weighted.hpp"

namespace sd::sde {

/// Euler paths of dX = -b_n(X) dt + dZ on the torus. Arrays are [path][time][axis].
struct PathEnsemble {
    std::size_t n_paths = 0;
    int dim = 3;
    double dt = 0.0;
    Vec3 x0{0.0, 0.0, 0.0};
    std::vector<double> times;
    std::vector<double> states;          ///< wrapped to [-L, L)^dim
    std::vector<double> unwrapped;       ///< same paths without wrapping
    std::vector<double> drift_integral;  ///< int_0^t b_n(X_s) ds
    std::vector<double> abs_drift_integral;  ///< int_0^t |b_n(X_s)| ds, [path][time]
    std::vector<std::uint32_t> wraps;    ///< wrap events per path
    std::size_t wrap_steps = 0;
    std::size_t total_steps = 0;

    std::size_t n_times() const { return times.size(); }
    std::size_t at(std::size_t path, std::size_t ti, int axis) const {
        return (path * n_times() + ti) * static_cast<std::size_t>(dim) + static_cast<std::size_t>(axis);
    }
    double wrap_rate() const { return total_steps ? static_cast<double>(wrap_steps) / total_steps : 0.0; }
    /// Wrapped states at time index ti, n_paths x dim.
    std::vector<double> slice(std::size_t ti) const;
    /// X_t - x0 + int_0^t b_n(X_s) ds from the unwrapped paths, n_paths x dim.
    std::vector<double> recovered_noise(std::size_t ti) const;
};

struct IntegrateOptions {
    int record_stride = 0;       ///< record every k-th coarse step; 0: only t=0 and t_final
    bool freeze_noise = false;   ///< Z = 0: plain Euler for the ODE x' = -b_n(x)
    std::uint64_t stream = 0;
};

/// Requires dt |b_n|_inf <= L/8. Paths use per-path random streams.
PathEnsemble integrate(const drift::MollifiedDrift& b, double alpha, const Vec3& x0, double t_final, double dt,
                       std::size_t n_paths, std::uint64_t seed, const IntegrateOptions& opt = {});

/// Ensembles for dt, dt/2, ..., dt/2^(levels-1) driven by the same noise: coarse
/// increments are sums of the finest ones.
std::vector<PathEnsemble> integrate_coupled(const drift::MollifiedDrift& b, double alpha, const Vec3& x0,
                                            double t_final, double dt, int levels, std::size_t n_paths,
                                            std::uint64_t seed, const IntegrateOptions& opt = {});

using MeanEstimate = sampler::MeanEstimate;

/// Sample mean and standard error of f(X_t) at time index ti.
MeanEstimate mc_mean(const PathEnsemble& e, std::size_t ti, const std::function<double(const Vec3&)>& f);
/// Mean and stderr of f(X^fine) - f(X^coarse) over coupled paths.
MeanEstimate coupled_difference(const PathEnsemble& coarse, const PathEnsemble& fine, std::size_t ti_coarse,
                                std::size_t ti_fine, const std::function<double(const Vec3&)>& f);

struct WeakOrder {
    std::vector<double> dts;
    std::vector<double> means;
    std::vector<double> differences;   ///< E f(X^{dt_l}) - E f(X^{dt_{l+1}})
    std::vector<double> diff_stderr;
    double ratio = 0.0;                ///< differences[0] / differences[1]
};
/// Coupled Richardson levels dt, dt/2, dt/4 (at least three levels).
WeakOrder weak_order(const drift::MollifiedDrift& b, double alpha, const Vec3& x0, double t, double dt,
                     std::size_t n_paths, std::uint64_t seed, const std::function<double(const Vec3&)>& f,
                     int levels = 3);

/// Normalised histogram of the wrapped states on the lattice (nearest site), integrating to 1.
Field empirical_density(const PathEnsemble& e, std::size_t ti, const TorusGrid& g);

struct MCOptions {
    std::size_t n_paths = 100000;
    double dt = 0.01;
    std::uint64_t seed = 23;
    int semigroup_steps = 50;
};

/// MC mean of f(X_t) against (e^{-t Lambda(b_n)} f)(x0) for the last approximant, with a
/// bias allowance fitted from dt and dt/2; drift-integral means compared across approximants.
/// x0 must be a lattice site. f is evaluated exactly on paths and sampled on the lattice.
VerificationReport mc_vs_semigroup(const std::vector<drift::MollifiedDrift>& approximants, double alpha,
                                   std::size_t x0_index, double t, const std::function<double(const Vec3&)>& f,
                                   const MCOptions& opt = {});

struct CharFnProbe {
    Vec3 kappa{0.0, 0.0, 0.0};
    double t = 0.0;
    std::complex<double> w_hat;
    double stderr = 0.0;
    double target = 0.0;     ///< exp(-t |kappa|^alpha)
    double deviation = 0.0;  ///< |w_hat - target|
    double bias = 0.0;
    bool ok = false;
};

/// Char-function probes of the recovered noise at the last recorded time.
std::vector<CharFnProbe> identify_driving_noise(const PathEnsemble& e, double alpha, const std::vector<Vec3>& kappa_list,
                                                const std::vector<double>& bias = {});

/// Full identification: ensembles at dt and dt/2, bias fitted per kappa from the two levels.
VerificationReport verify_driving_noise(const drift::MollifiedDrift& b, double alpha, const Vec3& x0, double t,
                                        const std::vector<Vec3>& kappa_list, const MCOptions& opt,
                                        std::vector<CharFnProbe>* probes_out = nullptr);

/// Columns kappa,t,re,im,stderr; kappa written as space-separated components.
void write_charfn_csv(std::ostream& os, const std::vector<CharFnProbe>& probes, int dim);

/// Sample correlation of min(|dZ|, 1) between consecutive recorded intervals and its
/// standard error; requires at least three recorded times.
struct LagCorrelation {
    std::vector<double> corr;
    double stderr = 0.0;
};
LagCorrelation increment_correlation(const PathEnsemble& e);

struct ContractionOptions {
    int time_steps = 10;
    int probes = 12;
    std::uint64_t seed = 29;
    Vec3 kappa{1.0, 0.0, 0.0};
    int substeps = 1;
};

/// Largest ||Hw|| / ||w|| over random w in L^p(|b| eta^{2-p}; L^inf[0,T]) for
/// (Hw)(t) = i int_0^t e^{-(t-s)Lambda(b_n)} (kappa.b_n) w(s) ds.
double contraction_ratio_H(const drift::MollifiedDrift& b, double alpha, const weighted::WeightSpec& w, double p,
                           double T, const ContractionOptions& opt = {});
/// Ratios over T_list (increasing); asserts ratio < 1 at the smallest T and monotone growth in T.
VerificationReport contraction_probe_H(const drift::MollifiedDrift& b, double alpha, const weighted::WeightSpec& w,
                                       double p, const std::vector<double>& T_list,
                                       const ContractionOptions& opt = {});

}  // namespace sd::sde
