#include "stabledrift/operator.hpp"

#include <sstream>

#include "stabledrift/errors.hpp"
#include "stabledrift/fft.hpp"
#include "stabledrift/kernels.hpp"

namespace sd {

namespace par = kernels::parallel;

struct Operator::Node {
    explicit Node(const TorusGrid& g) : grid(g) {}
    virtual ~Node() = default;
    virtual Field apply(const Field& f) const = 0;
    virtual std::shared_ptr<const Node> adjoint() const = 0;
    virtual std::string describe() const = 0;
    virtual const std::vector<cplx>* table() const { return nullptr; }
    virtual bool is_identity() const { return false; }
    TorusGrid grid;
};

namespace {

using NodePtr = std::shared_ptr<const Operator::Node>;

struct IdentityNode final : Operator::Node {
    using Node::Node;
    Field apply(const Field& f) const override { return f; }
    NodePtr adjoint() const override { return std::make_shared<IdentityNode>(grid); }
    std::string describe() const override { return "I"; }
    bool is_identity() const override { return true; }
};

struct MultiplierNode final : Operator::Node {
    MultiplierNode(const TorusGrid& g, std::vector<cplx> t, std::string n)
        : Node(g), tab(std::move(t)), name(std::move(n)) {}
    Field apply(const Field& f) const override {
        Field out = f;
        fft::forward(out);
        par::mul(out.data(), out.data(), tab.data(), tab.size());
        fft::backward(out);
        return out;
    }
    NodePtr adjoint() const override {
        std::vector<cplx> c(tab.size());
        for (std::size_t i = 0; i < tab.size(); ++i) c[i] = std::conj(tab[i]);
        return std::make_shared<MultiplierNode>(grid, std::move(c), name + "*");
    }
    std::string describe() const override { return name; }
    const std::vector<cplx>* table() const override { return &tab; }
    std::vector<cplx> tab;
    std::string name;
};

struct MultiplyNode final : Operator::Node {
    MultiplyNode(Field w, std::string n) : Node(w.grid()), weight(std::move(w)), name(std::move(n)) {}
    Field apply(const Field& f) const override { return hadamard(weight, f); }
    NodePtr adjoint() const override {
        if (weight.is_real()) return std::make_shared<MultiplyNode>(weight, name);
        return std::make_shared<MultiplyNode>(weight.conj(), name + "*");
    }
    std::string describe() const override { return "M[" + name + "]"; }
    Field weight;
    std::string name;
};

struct ComposeNode final : Operator::Node {
    ComposeNode(const TorusGrid& g, std::vector<NodePtr> f) : Node(g), factors(std::move(f)) {}
    Field apply(const Field& f) const override {
        Field out = factors.back()->apply(f);
        for (auto it = factors.rbegin() + 1; it != factors.rend(); ++it) out = (*it)->apply(out);
        return out;
    }
    NodePtr adjoint() const override {
        std::vector<NodePtr> rev;
        for (auto it = factors.rbegin(); it != factors.rend(); ++it) rev.push_back((*it)->adjoint());
        return std::make_shared<ComposeNode>(grid, std::move(rev));
    }
    std::string describe() const override {
        std::ostringstream os;
        for (std::size_t i = 0; i < factors.size(); ++i) os << (i ? " . " : "") << factors[i]->describe();
        return "(" + os.str() + ")";
    }
    std::vector<NodePtr> factors;
};

struct SumNode final : Operator::Node {
    SumNode(const TorusGrid& g, std::vector<std::pair<cplx, NodePtr>> t) : Node(g), terms(std::move(t)) {}
    Field apply(const Field& f) const override {
        Field out(grid);
        for (const auto& [c, op] : terms) out.axpy(c, op->apply(f));
        return out;
    }
    NodePtr adjoint() const override {
        std::vector<std::pair<cplx, NodePtr>> a;
        for (const auto& [c, op] : terms) a.emplace_back(std::conj(c), op->adjoint());
        return std::make_shared<SumNode>(grid, std::move(a));
    }
    std::string describe() const override {
        std::ostringstream os;
        for (std::size_t i = 0; i < terms.size(); ++i)
            os << (i ? " + " : "") << terms[i].first << "*" << terms[i].second->describe();
        return "[" + os.str() + "]";
    }
    std::vector<std::pair<cplx, NodePtr>> terms;
};

struct CustomNode final : Operator::Node {
    CustomNode(const TorusGrid& g, Operator::Apply a, Operator::Apply adj, std::string n)
        : Node(g), fwd(std::move(a)), bwd(std::move(adj)), name(std::move(n)) {}
    Field apply(const Field& f) const override { return fwd(f); }
    NodePtr adjoint() const override {
        if (!bwd) throw ParameterError("operator '" + name + "' has no adjoint");
        return std::make_shared<CustomNode>(grid, bwd, fwd, name + "*");
    }
    std::string describe() const override { return name; }
    Operator::Apply fwd, bwd;
    std::string name;
};

std::vector<cplx> ones_table(const TorusGrid& g) { return std::vector<cplx>(g.size(), cplx(1.0, 0.0)); }

const std::vector<cplx>* as_table(const NodePtr& n, std::vector<cplx>& scratch) {
    if (auto t = n->table()) return t;
    if (n->is_identity()) {
        scratch = ones_table(n->grid);
        return &scratch;
    }
    return nullptr;
}

void check_grid(const Operator::Node& a, const Operator::Node& b) {
    if (a.grid != b.grid) throw ParameterError("operator grid mismatch");
}

}  // namespace

Operator Operator::identity(const TorusGrid& g) { return Operator(std::make_shared<IdentityNode>(g)); }

Operator Operator::zero(const TorusGrid& g) {
    return Operator(std::make_shared<MultiplierNode>(g, std::vector<cplx>(g.size(), cplx(0.0, 0.0)), "0"));
}

Operator Operator::multiplier(const TorusGrid& g, const std::function<cplx(const Vec3&)>& symbol,
                              std::string name) {
    std::vector<cplx> t(g.size());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(t.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) t[i] = symbol(g.wavevector(static_cast<std::size_t>(i)));
    return multiplier_table(g, std::move(t), std::move(name));
}

Operator Operator::multiplier_table(const TorusGrid& g, std::vector<cplx> table, std::string name) {
    require(table.size() == g.size(), "multiplier table size mismatch");
    return Operator(std::make_shared<MultiplierNode>(g, std::move(table), std::move(name)));
}

Operator Operator::multiply(const Field& w, std::string name) {
    return Operator(std::make_shared<MultiplyNode>(w, std::move(name)));
}

Operator Operator::custom(const TorusGrid& g, Apply apply, Apply adjoint, std::string name) {
    return Operator(std::make_shared<CustomNode>(g, std::move(apply), std::move(adjoint), std::move(name)));
}

Field Operator::apply(const Field& f) const {
    if (!node_) throw ParameterError("empty operator handle");
    if (f.grid() != node_->grid) throw ParameterError("field grid does not match operator grid");
    return node_->apply(f);
}

Operator Operator::adjoint() const { return Operator(node_->adjoint()); }
std::string Operator::describe() const { return node_ ? node_->describe() : "<null>"; }
const TorusGrid& Operator::grid() const { return node_->grid; }
const std::vector<cplx>* Operator::symbol_table() const { return node_ ? node_->table() : nullptr; }

Operator operator*(const Operator& a, const Operator& b) {
    check_grid(*a.node_, *b.node_);
    if (a.node_->is_identity()) return b;
    if (b.node_->is_identity()) return a;
    if (a.node_->table() && b.node_->table()) {
        const auto& ta = *a.node_->table();
        const auto& tb = *b.node_->table();
        std::vector<cplx> t(ta.size());
        par::mul(t.data(), ta.data(), tb.data(), t.size());
        return Operator::multiplier_table(a.grid(), std::move(t), a.describe() + "." + b.describe());
    }
    std::vector<NodePtr> f;
    auto push = [&](const NodePtr& n) {
        if (auto c = std::dynamic_pointer_cast<const ComposeNode>(n))
            f.insert(f.end(), c->factors.begin(), c->factors.end());
        else
            f.push_back(n);
    };
    push(a.node_);
    push(b.node_);
    // fuse neighbouring multipliers
    std::vector<NodePtr> fused;
    for (auto& n : f) {
        if (!fused.empty() && fused.back()->table() && n->table()) {
            const auto& ta = *fused.back()->table();
            const auto& tb = *n->table();
            std::vector<cplx> t(ta.size());
            par::mul(t.data(), ta.data(), tb.data(), t.size());
            fused.back() = std::make_shared<MultiplierNode>(n->grid, std::move(t),
                                                            fused.back()->describe() + "." + n->describe());
        } else {
            fused.push_back(n);
        }
    }
    if (fused.size() == 1) return Operator(fused.front());
    return Operator(std::make_shared<ComposeNode>(a.grid(), std::move(fused)));
}

Operator operator+(const Operator& a, const Operator& b) {
    check_grid(*a.node_, *b.node_);
    std::vector<cplx> sa, sb;
    auto ta = as_table(a.node_, sa);
    auto tb = as_table(b.node_, sb);
    if (ta && tb) {
        std::vector<cplx> t(*ta);
        par::axpy(t.data(), 1.0, tb->data(), t.size());
        return Operator::multiplier_table(a.grid(), std::move(t), a.describe() + "+" + b.describe());
    }
    std::vector<std::pair<cplx, NodePtr>> terms;
    auto push = [&](cplx c, const NodePtr& n) {
        if (auto s = std::dynamic_pointer_cast<const SumNode>(n))
            for (const auto& [cc, nn] : s->terms) terms.emplace_back(c * cc, nn);
        else
            terms.emplace_back(c, n);
    };
    push(1.0, a.node_);
    push(1.0, b.node_);
    return Operator(std::make_shared<SumNode>(a.grid(), std::move(terms)));
}

Operator operator-(const Operator& a, const Operator& b) { return a + cplx(-1.0, 0.0) * b; }

Operator operator*(cplx c, const Operator& a) {
    std::vector<cplx> s;
    if (auto t = as_table(a.node_, s)) {
        std::vector<cplx> out(*t);
        par::scale(out.data(), c, out.size());
        std::ostringstream os;
        os << c.real() << "*" << a.describe();
        return Operator::multiplier_table(a.grid(), std::move(out), os.str());
    }
    return Operator(std::make_shared<SumNode>(a.grid(), std::vector<std::pair<cplx, NodePtr>>{{c, a.node_}}));
}

Operator compose(const std::vector<Operator>& ops) {
    require(!ops.empty(), "compose needs at least one operator");
    Operator out = ops.front();
    for (std::size_t i = 1; i < ops.size(); ++i) out = out * ops[i];
    return out;
}

}  // namespace sd
