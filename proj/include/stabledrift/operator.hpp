#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stabledrift/grid.hpp"

namespace sd {

/// Immutable, shareable linear operator on lattice fields, built from Fourier
/// multipliers, pointwise multiplications, sums and compositions.
class Operator {
public:
    struct Node;
    using Apply = std::function<Field(const Field&)>;

    Operator() = default;

    static Operator identity(const TorusGrid& g);
    static Operator zero(const TorusGrid& g);
    /// Fourier multiplier with symbol m(k), k the angular wavevector.
    static Operator multiplier(const TorusGrid& g, const std::function<cplx(const Vec3&)>& symbol,
                               std::string name);
    /// Multiplier from a precomputed table in FFT order.
    static Operator multiplier_table(const TorusGrid& g, std::vector<cplx> table, std::string name);
    /// Pointwise multiplication by w.
    static Operator multiply(const Field& w, std::string name);
    static Operator custom(const TorusGrid& g, Apply apply, Apply adjoint, std::string name);

    Field apply(const Field& f) const;
    Field operator()(const Field& f) const { return apply(f); }
    Operator adjoint() const;
    std::string describe() const;
    const TorusGrid& grid() const;
    bool valid() const { return static_cast<bool>(node_); }
    /// Symbol table if this operator is a pure Fourier multiplier, else nullptr.
    const std::vector<cplx>* symbol_table() const;

    friend Operator operator*(const Operator& a, const Operator& b);
    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(cplx c, const Operator& a);

private:
    explicit Operator(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Compose a list right-to-left: ops[0] * ops[1] * ... .
Operator compose(const std::vector<Operator>& ops);

}  // namespace sd
