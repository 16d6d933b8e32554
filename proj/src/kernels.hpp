#pragma once

#include "geometry.hpp"

#include <array>
#include <string>
#include <vector>

namespace rbffd {

/// Polyharmonic spline phi(r) = r^m with odd exponent m >= 3.
struct PhsKernel {
    int exponent = 3;

    PhsKernel() = default;
    explicit PhsKernel(int m);
};

enum class OpKind { identity, dx, dy, laplacian, directional };

/// A linear differential operator L together with its order k.
struct OperatorSpec {
    OpKind kind = OpKind::laplacian;
    Point direction{}; // unit vector, directional only

    int order() const;
    std::string name() const;

    static OperatorSpec identity() { return {OpKind::identity, {}}; }
    static OperatorSpec dx() { return {OpKind::dx, {}}; }
    static OperatorSpec dy() { return {OpKind::dy, {}}; }
    static OperatorSpec laplacian() { return {OpKind::laplacian, {}}; }
    static OperatorSpec directional(Point n);
};

double phs_eval(double r, int m);

/// L phi(|x - node|) evaluated at x = center.
double phs_apply(const OperatorSpec& op, const Point& center, const Point& node, int m);

/// n_p = C(p+d, d), the dimension of d-variate polynomials of degree <= p.
long long basis_count(int p, int d);

/// Bivariate monomials of total degree <= p in graded lexicographic order
/// (constant first; within a degree, x-exponent descending).
struct MonomialBasis {
    int degree = 0;
    std::vector<std::array<int, 2>> exponents;

    static MonomialBasis for_degree(int p);
    std::size_t size() const { return exponents.size(); }
};

double monomial_eval(const std::array<int, 2>& e, const Point& p);

/// L x^a y^b evaluated at p (exact symbolic differentiation).
double monomial_apply(const OperatorSpec& op, const std::array<int, 2>& e, const Point& p);

} // namespace rbffd
