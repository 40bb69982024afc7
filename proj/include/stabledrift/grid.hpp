#pragma once

#include <array>
#include <numbers>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sd {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;

/// Periodic lattice on [-L, L)^dim with N points per axis, dim <= 3.
struct TorusGrid {
    int dim = 3;
    double L = 8.0;
    int N = 32;

    TorusGrid() = default;
    TorusGrid(int dim, double half_length, int points_per_axis);

    std::size_t size() const;
    double h() const { return 2.0 * L / N; }
    double cell_volume() const;
    double coord(int j) const { return -L + h() * j; }
    /// Angular frequency of FFT index j along one axis, in (pi/L) * Z.
    double wavenumber(int j) const { return (j < N / 2 ? j : j - N) * (std::numbers::pi / L); }
    bool is_nyquist(int j) const { return j == N / 2; }

    std::array<int, 3> unravel(std::size_t idx) const;
    std::size_t ravel(const std::array<int, 3>& ijk) const;
    Vec3 point(std::size_t idx) const;
    Vec3 wavevector(std::size_t idx) const;
    /// Lattice index nearest to a point (coordinates wrapped to the torus).
    std::size_t nearest(const Vec3& x) const;
    /// Index of the lattice site at the coordinate origin.
    std::size_t origin() const;

    bool operator==(const TorusGrid& o) const { return dim == o.dim && N == o.N && L == o.L; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

/// Wrap a coordinate into [-L, L).
double wrap_coord(double x, double L);

class Field {
public:
    Field() = default;
    explicit Field(const TorusGrid& g);
    Field(const TorusGrid& g, std::vector<cplx> values);

    static Field constant(const TorusGrid& g, cplx c);
    static Field from_function(const TorusGrid& g, const std::function<cplx(const Vec3&)>& f);

    const TorusGrid& grid() const { return grid_; }
    std::size_t size() const { return data_.size(); }
    cplx* data() { return data_.data(); }
    const cplx* data() const { return data_.data(); }
    std::vector<cplx>& values() { return data_; }
    const std::vector<cplx>& values() const { return data_; }
    cplx& operator[](std::size_t i) { return data_[i]; }
    const cplx& operator[](std::size_t i) const { return data_[i]; }

    bool is_real(double tol = 0.0) const;
    Field real_part() const;
    Field abs() const;
    Field conj() const;
    /// Pointwise map of the values.
    Field map(const std::function<cplx(cplx)>& f) const;

    Field& operator+=(const Field& o);
    Field& operator-=(const Field& o);
    Field& operator*=(cplx a);
    Field& axpy(cplx a, const Field& x);

private:
    TorusGrid grid_;
    std::vector<cplx> data_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx a, Field f);
/// Pointwise product.
Field hadamard(const Field& a, const Field& b);

/// Lattice L^p norm with measure h^d, optionally weighted by `weight` (pointwise density).
double norm_p(const Field& f, double p, const Field* weight = nullptr);
double norm_inf(const Field& f);
double norm2(const Field& f);
/// <f, g> = sum f conj(g) h^d, optionally weighted.
cplx inner(const Field& f, const Field& g, const Field* weight = nullptr);
double max_real(const Field& f);
double min_real(const Field& f);
double lattice_integral(const Field& f);

struct VectorField {
    TorusGrid grid;
    std::vector<Field> comp;

    VectorField() = default;
    explicit VectorField(const TorusGrid& g);
    Field magnitude() const;
    double sup_norm() const;
};

/// Binary layout: int32 dim, int32 N, float64 L, int32 complex flag, then
/// little-endian float64 values (re, or re/im interleaved).
void write_binary(std::ostream& os, const Field& f, bool complex_values);
Field read_binary(std::istream& is);
void write_csv(std::ostream& os, const Field& f);

}  // namespace sd
