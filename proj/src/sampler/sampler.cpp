#include "stabledrift/sampler.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "stabledrift/errors.hpp"
#include "stabledrift/kernels.hpp"

namespace sd::sampler {

void validate(const StableParams& p) {
    if (!(p.alpha > 1.0 && p.alpha < 2.0)) throw ParameterError("alpha must lie in (1, 2)");
    if (p.dim < 1) throw ParameterError("dimension must be positive");
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

namespace {

// uniform on the open interval (0, 1)
double open_uniform(Rng& rng) {
    double u;
    do {
        u = std::generate_canonical<double, 53>(rng);
    } while (u <= 0.0);
    return u;
}

}  // namespace

double draw_subordinator(Rng& rng, double beta, double dt) {
    // Kanter / Chambers-Mallows-Stuck, totally skewed case
    const double U = std::numbers::pi * open_uniform(rng);
    const double W = -std::log(open_uniform(rng));
    const double a = std::sin(beta * U) / std::pow(std::sin(U), 1.0 / beta);
    const double b = std::pow(std::sin((1.0 - beta) * U) / W, (1.0 - beta) / beta);
    double s = a * b * std::pow(dt, 1.0 / beta);
    // underflow at extreme U; keep the contract S > 0
    if (!(s > 0.0)) s = std::numeric_limits<double>::min();
    return s;
}

void draw_increment(Rng& rng, double alpha, int dim, double dt, double* out) {
    const double s = draw_subordinator(rng, 0.5 * alpha, dt);
    const double sd = std::sqrt(2.0 * s);
    std::normal_distribution<double> g;
    for (int j = 0; j < dim; ++j) out[j] = sd * g(rng);
}

IncrementBatch sample_increments(const StableParams& p, double dt, std::size_t n, std::uint64_t stream) {
    validate(p);
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    if (n == 0) throw ParameterError("n must be at least 1");
    if (n > std::numeric_limits<std::size_t>::max() / sizeof(double) / static_cast<std::size_t>(p.dim))
        throw CapacityError("n * dim overflows the addressable size");
    IncrementBatch out;
    out.dt = dt;
    out.dim = p.dim;
    out.n = n;
    try {
        out.values.resize(n * p.dim);
    } catch (const std::bad_alloc&) {
        throw CapacityError("increment batch does not fit in memory");
    }
    const std::size_t blocks = (n + kRowsPerStream - 1) / kRowsPerStream;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        Rng rng = make_stream(p.seed, (stream << 24) + static_cast<std::uint64_t>(b));
        std::size_t lo = static_cast<std::size_t>(b) * kRowsPerStream;
        std::size_t hi = std::min(n, lo + kRowsPerStream);
        for (std::size_t i = lo; i < hi; ++i) draw_increment(rng, p.alpha, p.dim, dt, out.values.data() + i * p.dim);
    }
    return out;
}

std::vector<double> sample_subordinator(double alpha_half, double dt, std::size_t n, std::uint64_t seed) {
    if (!(alpha_half > 0.5 && alpha_half < 1.0)) throw ParameterError("alpha/2 must lie in (1/2, 1)");
    if (!(dt > 0.0)) throw ParameterError("dt must be positive");
    std::vector<double> out(n);
    const std::size_t blocks = (n + kRowsPerStream - 1) / kRowsPerStream;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        Rng rng = make_stream(seed, static_cast<std::uint64_t>(b));
        std::size_t lo = static_cast<std::size_t>(b) * kRowsPerStream;
        std::size_t hi = std::min(n, lo + kRowsPerStream);
        for (std::size_t i = lo; i < hi; ++i) out[i] = draw_subordinator(rng, alpha_half, dt);
    }
    return out;
}

MeanEstimate mean_stderr(const std::vector<double>& x) {
    MeanEstimate m;
    const std::size_t n = x.size();
    if (n == 0) return m;
    m.mean = kernels::parallel::sum_of(n, [&](std::size_t i) { return x[i]; }) / n;
    if (n > 1) {
        double ss = kernels::parallel::sum_of(n, [&](std::size_t i) { return (x[i] - m.mean) * (x[i] - m.mean); });
        m.stderr = std::sqrt(ss / (n - 1) / n);
    }
    return m;
}

CharFnEstimate empirical_charfn(const std::vector<double>& values, int dim, const std::vector<double>& kappa) {
    require(static_cast<int>(kappa.size()) == dim, "kappa dimension mismatch");
    const std::size_t n = values.size() / dim;
    std::vector<double> re(n), im(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        double ph = 0.0;
        for (int j = 0; j < dim; ++j) ph += kappa[j] * values[i * dim + j];
        re[i] = std::cos(ph);
        im[i] = std::sin(ph);
    }
    auto r = mean_stderr(re), s = mean_stderr(im);
    CharFnEstimate e;
    e.value = {r.mean, s.mean};
    e.stderr_re = r.stderr;
    e.stderr_im = s.stderr;
    e.stderr = std::hypot(r.stderr, s.stderr);
    return e;
}

}  // namespace sd::sampler
