#pragma once

#include <memory>
#include <span>
#include <string>

namespace growthlab {

/// Closed-form expression tree for polar radius functions h(omega):
/// constants, coordinates, +, *, and nonnegative integer powers only.
class Expr {
public:
    enum class Kind { constant, coord, add, mul, pow };

    static Expr constant(double v);
    static Expr coord(int index);
    static Expr pow(const Expr& base, int exponent);
    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);

    double eval(std::span<const double> x) const;
    long double eval_ld(std::span<const long double> x) const;
    Expr derivative(int var) const;
    int max_coord() const;  // largest coordinate index used, -1 if none
    std::string to_string() const;

    struct Node;
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    const Node& root() const { return *root_; }

private:
    std::shared_ptr<const Node> root_;
};

struct Expr::Node {
    Kind kind;
    double value = 0.0;  // constant
    int index = 0;       // coord
    int exponent = 0;    // pow
    std::shared_ptr<const Node> a, b;
};

}  // namespace growthlab
