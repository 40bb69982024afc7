#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace sd::sampler {

struct StableParams {
    double alpha = 1.5;
    int dim = 3;
    std::uint64_t seed = 0;
};

void validate(const StableParams& p);

/// n x dim increments, row-major.
struct IncrementBatch {
    double dt = 0.0;
    int dim = 0;
    std::size_t n = 0;
    std::vector<double> values;

    double operator()(std::size_t i, int j) const { return values[i * dim + j]; }
    const double* row(std::size_t i) const { return values.data() + i * dim; }
};

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream).
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// One-sided stable variable with E exp(-u S) = exp(-dt u^beta), beta in (1/2, 1).
double draw_subordinator(Rng& rng, double beta, double dt);
/// Isotropic symmetric stable increment over dt: sqrt(2 S) G, S the subordinator with beta = alpha/2.
void draw_increment(Rng& rng, double alpha, int dim, double dt, double* out);

/// Rows are generated in blocks of kRowsPerStream, each block on its own stream,
/// so output does not depend on the thread count. `stream` offsets the block streams.
inline constexpr std::size_t kRowsPerStream = 4096;
IncrementBatch sample_increments(const StableParams& p, double dt, std::size_t n, std::uint64_t stream = 0);
std::vector<double> sample_subordinator(double alpha_half, double dt, std::size_t n, std::uint64_t seed);

struct CharFnEstimate {
    std::complex<double> value;
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    /// Standard error of the modulus of the deviation, sqrt(var_re + var_im) / sqrt(n).
    double stderr = 0.0;
};

/// Empirical mean of exp(i kappa . x) over rows of `values` (n x dim).
CharFnEstimate empirical_charfn(const std::vector<double>& values, int dim, const std::vector<double>& kappa);

struct MeanEstimate {
    double mean = 0.0;
    double stderr = 0.0;
};
/// Pairwise-summed sample mean and standard error.
MeanEstimate mean_stderr(const std::vector<double>& x);

}  // namespace sd::sampler
