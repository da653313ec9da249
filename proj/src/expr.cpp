#include "growthlab/expr.hpp"

#include <algorithm>
#include <stdexcept>

namespace growthlab {

namespace {
using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Expr::Kind kind) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    return n;
}

template <class T>
T eval_node(const Expr::Node& n, std::span<const T> x) {
    switch (n.kind) {
        case Expr::Kind::constant: return T(n.value);
        case Expr::Kind::coord:
            if (n.index < 0 || n.index >= int(x.size()))
                throw std::invalid_argument("Expr: coordinate out of range");
            return x[n.index];
        case Expr::Kind::add: return eval_node(*n.a, x) + eval_node(*n.b, x);
        case Expr::Kind::mul: return eval_node(*n.a, x) * eval_node(*n.b, x);
        case Expr::Kind::pow: {
            T base = eval_node(*n.a, x);
            T acc = T(1);
            int e = n.exponent;
            while (e) {
                if (e & 1) acc *= base;
                e >>= 1;
                if (e) base *= base;
            }
            return acc;
        }
    }
    throw std::logic_error("Expr: bad node");
}
}  // namespace

Expr Expr::constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::constant;
    n->value = v;
    return Expr(n);
}

Expr Expr::coord(int index) {
    if (index < 0) throw std::invalid_argument("Expr: negative coordinate");
    auto n = std::make_shared<Node>();
    n->kind = Kind::coord;
    n->index = index;
    return Expr(n);
}

Expr Expr::pow(const Expr& base, int exponent) {
    if (exponent < 0) throw std::invalid_argument("Expr: negative power");
    auto n = std::make_shared<Node>();
    n->kind = Kind::pow;
    n->exponent = exponent;
    n->a = base.root_;
    return Expr(n);
}

Expr operator+(const Expr& a, const Expr& b) {
    auto n = make(Expr::Kind::add);
    auto m = std::const_pointer_cast<Expr::Node>(n);
    m->a = a.root_;
    m->b = b.root_;
    return Expr(n);
}

Expr operator*(const Expr& a, const Expr& b) {
    auto n = make(Expr::Kind::mul);
    auto m = std::const_pointer_cast<Expr::Node>(n);
    m->a = a.root_;
    m->b = b.root_;
    return Expr(n);
}

double Expr::eval(std::span<const double> x) const { return eval_node<double>(*root_, x); }

long double Expr::eval_ld(std::span<const long double> x) const {
    return eval_node<long double>(*root_, x);
}

Expr Expr::derivative(int var) const {
    const Node& n = *root_;
    switch (n.kind) {
        case Kind::constant: return constant(0.0);
        case Kind::coord: return constant(n.index == var ? 1.0 : 0.0);
        case Kind::add: return Expr(n.a).derivative(var) + Expr(n.b).derivative(var);
        case Kind::mul:
            return Expr(n.a).derivative(var) * Expr(n.b) +
                   Expr(n.a) * Expr(n.b).derivative(var);
        case Kind::pow: {
            if (n.exponent == 0) return constant(0.0);
            return constant(double(n.exponent)) * pow(Expr(n.a), n.exponent - 1) *
                   Expr(n.a).derivative(var);
        }
    }
    throw std::logic_error("Expr: bad node");
}

int Expr::max_coord() const {
    const Node& n = *root_;
    switch (n.kind) {
        case Kind::constant: return -1;
        case Kind::coord: return n.index;
        case Kind::add:
        case Kind::mul:
            return std::max(Expr(n.a).max_coord(), Expr(n.b).max_coord());
        case Kind::pow: return Expr(n.a).max_coord();
    }
    return -1;
}

std::string Expr::to_string() const {
    const Node& n = *root_;
    switch (n.kind) {
        case Kind::constant: return std::to_string(n.value);
        case Kind::coord: return "w" + std::to_string(n.index);
        case Kind::add: return "(" + Expr(n.a).to_string() + " + " + Expr(n.b).to_string() + ")";
        case Kind::mul: return "(" + Expr(n.a).to_string() + " * " + Expr(n.b).to_string() + ")";
        case Kind::pow: return Expr(n.a).to_string() + "^" + std::to_string(n.exponent);
    }
    return "?";
}

}  // namespace growthlab
