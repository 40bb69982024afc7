#include "stabledrift/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>

#include "stabledrift/errors.hpp"
#include "stabledrift/kernels.hpp"

namespace sd {

namespace par = kernels::parallel;

TorusGrid::TorusGrid(int d, double half_length, int points_per_axis) : dim(d), L(half_length), N(points_per_axis) {
    require(dim >= 1, "grid dimension must be positive");
    if (dim > 3) throw CapacityError("lattices support dim <= 3");
    require(L > 0.0, "half length must be positive");
    require(N >= 4 && N % 2 == 0, "points per axis must be even and >= 4");
    double total = std::pow(static_cast<double>(N), dim);
    if (total > 1.0e9) throw CapacityError("lattice too large");
}

std::size_t TorusGrid::size() const {
    std::size_t s = 1;
    for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(N);
    return s;
}

double TorusGrid::cell_volume() const { return std::pow(h(), dim); }

std::array<int, 3> TorusGrid::unravel(std::size_t idx) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int a = dim - 1; a >= 0; --a) {
        ijk[a] = static_cast<int>(idx % N);
        idx /= N;
    }
    return ijk;
}

std::size_t TorusGrid::ravel(const std::array<int, 3>& ijk) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim; ++a) idx = idx * N + static_cast<std::size_t>(((ijk[a] % N) + N) % N);
    return idx;
}

Vec3 TorusGrid::point(std::size_t idx) const {
    auto ijk = unravel(idx);
    Vec3 x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) x[a] = coord(ijk[a]);
    return x;
}

Vec3 TorusGrid::wavevector(std::size_t idx) const {
    auto ijk = unravel(idx);
    Vec3 k{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) k[a] = wavenumber(ijk[a]);
    return k;
}

std::size_t TorusGrid::nearest(const Vec3& x) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int a = 0; a < dim; ++a) {
        double u = (wrap_coord(x[a], L) + L) / h();
        ijk[a] = static_cast<int>(std::lround(u)) % N;
    }
    return ravel(ijk);
}

std::size_t TorusGrid::origin() const { return ravel({N / 2, N / 2, N / 2}); }

double wrap_coord(double x, double L) {
    double p = 2.0 * L;
    double y = std::fmod(x + L, p);
    if (y < 0.0) y += p;
    if (y >= p) y -= p;
    return y - L;
}

Field::Field(const TorusGrid& g) : grid_(g), data_(g.size(), cplx(0.0, 0.0)) {}

Field::Field(const TorusGrid& g, std::vector<cplx> values) : grid_(g), data_(std::move(values)) {
    require(data_.size() == g.size(), "field data length does not match grid");
}

Field Field::constant(const TorusGrid& g, cplx c) {
    Field f(g);
    std::fill(f.data_.begin(), f.data_.end(), c);
    return f;
}

Field Field::from_function(const TorusGrid& g, const std::function<cplx(const Vec3&)>& fn) {
    Field f(g);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) f.data_[i] = fn(g.point(static_cast<std::size_t>(i)));
    return f;
}

bool Field::is_real(double tol) const {
    return std::all_of(data_.begin(), data_.end(), [&](const cplx& z) { return std::abs(z.imag()) <= tol; });
}

Field Field::real_part() const {
    return map([](cplx z) { return cplx(z.real(), 0.0); });
}

Field Field::abs() const {
    return map([](cplx z) { return cplx(std::abs(z), 0.0); });
}

Field Field::conj() const {
    return map([](cplx z) { return std::conj(z); });
}

Field Field::map(const std::function<cplx(cplx)>& f) const {
    Field out(grid_);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out.data_[i] = f(data_[i]);
    return out;
}

Field& Field::operator+=(const Field& o) { return axpy(1.0, o); }
Field& Field::operator-=(const Field& o) { return axpy(-1.0, o); }

Field& Field::operator*=(cplx a) {
    par::scale(data_.data(), a, data_.size());
    return *this;
}

Field& Field::axpy(cplx a, const Field& x) {
    require(x.grid_ == grid_, "grid mismatch");
    par::axpy(data_.data(), a, x.data_.data(), data_.size());
    return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx a, Field f) { return f *= a; }

Field hadamard(const Field& a, const Field& b) {
    require(a.grid() == b.grid(), "grid mismatch");
    Field out(a.grid());
    par::mul(out.data(), a.data(), b.data(), a.size());
    return out;
}

double norm_p(const Field& f, double p, const Field* weight) {
    require(p >= 1.0, "norm exponent must be >= 1");
    const double dv = f.grid().cell_volume();
    double s;
    if (weight) {
        const cplx* w = weight->data();
        const cplx* x = f.data();
        s = par::sum_of(f.size(), [&](std::size_t i) {
            double a = std::abs(x[i]);
            return (a == 0.0 ? 0.0 : std::pow(a, p)) * w[i].real();
        });
    } else {
        s = par::sum_abs_pow(f.data(), f.size(), p);
    }
    return std::pow(s * dv, 1.0 / p);
}

double norm_inf(const Field& f) { return par::max_abs(f.data(), f.size()); }

double norm2(const Field& f) { return norm_p(f, 2.0); }

cplx inner(const Field& f, const Field& g, const Field* weight) {
    require(f.grid() == g.grid(), "grid mismatch");
    const double dv = f.grid().cell_volume();
    if (!weight) return par::dot(f.data(), g.data(), f.size()) * dv;
    const cplx* a = f.data();
    const cplx* b = g.data();
    const cplx* w = weight->data();
    double re = par::sum_of(f.size(), [&](std::size_t i) { return (a[i] * std::conj(b[i])).real() * w[i].real(); });
    double im = par::sum_of(f.size(), [&](std::size_t i) { return (a[i] * std::conj(b[i])).imag() * w[i].real(); });
    return cplx(re, im) * dv;
}

double max_real(const Field& f) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& z : f.values()) m = std::max(m, z.real());
    return m;
}

double min_real(const Field& f) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& z : f.values()) m = std::min(m, z.real());
    return m;
}

double lattice_integral(const Field& f) {
    const cplx* x = f.data();
    return par::sum_of(f.size(), [&](std::size_t i) { return x[i].real(); }) * f.grid().cell_volume();
}

VectorField::VectorField(const TorusGrid& g) : grid(g), comp(static_cast<std::size_t>(g.dim), Field(g)) {}

Field VectorField::magnitude() const {
    Field m(grid);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto& c : comp) s += std::norm(c[static_cast<std::size_t>(i)]);
        m[static_cast<std::size_t>(i)] = std::sqrt(s);
    }
    return m;
}

double VectorField::sup_norm() const { return comp.empty() ? 0.0 : norm_inf(magnitude()); }

namespace {

template <class T>
void put_le(std::ostream& os, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!is) throw ConfigError("truncated binary field");
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

}  // namespace

void write_binary(std::ostream& os, const Field& f, bool complex_values) {
    put_le<std::int32_t>(os, f.grid().dim);
    put_le<std::int32_t>(os, f.grid().N);
    put_le<double>(os, f.grid().L);
    put_le<std::int32_t>(os, complex_values ? 1 : 0);
    for (const auto& z : f.values()) {
        put_le<double>(os, z.real());
        if (complex_values) put_le<double>(os, z.imag());
    }
}

Field read_binary(std::istream& is) {
    auto dim = get_le<std::int32_t>(is);
    auto n = get_le<std::int32_t>(is);
    auto L = get_le<double>(is);
    auto flag = get_le<std::int32_t>(is);
    TorusGrid g(dim, L, n);
    Field f(g);
    for (auto& z : f.values()) {
        double re = get_le<double>(is);
        double im = flag ? get_le<double>(is) : 0.0;
        z = cplx(re, im);
    }
    return f;
}

void write_csv(std::ostream& os, const Field& f) {
    const auto& g = f.grid();
    if (g.size() > (1u << 16)) throw CapacityError("CSV export is limited to small grids (<= 65536 sites)");
    static const char* axes[] = {"x", "y", "z"};
    for (int a = 0; a < g.dim; ++a) os << axes[a] << ',';
    os << "re,im\r\n";
    os.precision(17);
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.point(i);
        for (int a = 0; a < g.dim; ++a) os << x[a] << ',';
        os << f[i].real() << ',' << f[i].imag() << "\r\n";
    }
}

}  // namespace sd
