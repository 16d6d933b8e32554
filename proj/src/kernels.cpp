#include "kernels.hpp"

#include "error.hpp"

#include <cmath>

namespace rbffd {

namespace {

double ipow(double base, int e) {
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

void check_kernel_exponent(int m) {
    if (m < 3 || m % 2 == 0)
        throw Error(errc::invalid_argument, "PHS exponent must be odd and >= 3");
}

} // namespace

PhsKernel::PhsKernel(int m) : exponent(m) { check_kernel_exponent(m); }

int OperatorSpec::order() const {
    switch (kind) {
    case OpKind::identity: return 0;
    case OpKind::dx:
    case OpKind::dy:
    case OpKind::directional: return 1;
    case OpKind::laplacian: return 2;
    }
    return 0;
}

std::string OperatorSpec::name() const {
    switch (kind) {
    case OpKind::identity: return "identity";
    case OpKind::dx: return "dx";
    case OpKind::dy: return "dy";
    case OpKind::laplacian: return "laplacian";
    case OpKind::directional: return "directional";
    }
    return "?";
}

OperatorSpec OperatorSpec::directional(Point n) {
    const double len = std::hypot(n.x, n.y);
    if (len == 0.0)
        throw Error(errc::invalid_argument, "directional operator needs a nonzero vector");
    return {OpKind::directional, {n.x / len, n.y / len}};
}

double phs_eval(double r, int m) {
    switch (m) {
    case 1: return r;
    case 3: return r * r * r;
    case 5: {
        const double r2 = r * r;
        return r2 * r2 * r;
    }
    default: return std::pow(r, m);
    }
}

double phs_apply(const OperatorSpec& op, const Point& center, const Point& node, int m) {
    check_kernel_exponent(m);
    if (op.order() == 2 && m < 3)
        throw Error(errc::invalid_argument, "kernel too rough for operator");
    const double dx = center.x - node.x;
    const double dy = center.y - node.y;
    const double r = std::sqrt(dx * dx + dy * dy);
    switch (op.kind) {
    case OpKind::identity: return phs_eval(r, m);
    case OpKind::dx: return m * dx * phs_eval(r, m - 2);
    case OpKind::dy: return m * dy * phs_eval(r, m - 2);
    case OpKind::laplacian: return static_cast<double>(m) * m * phs_eval(r, m - 2);
    case OpKind::directional:
        return m * (op.direction.x * dx + op.direction.y * dy) * phs_eval(r, m - 2);
    }
    return 0.0;
}

long long basis_count(int p, int d) {
    if (p < 0 || d < 1) throw Error(errc::invalid_argument, "basis_count needs p >= 0, d >= 1");
    long long n = 1;
    for (int i = 1; i <= d; ++i) n = n * (p + i) / i;
    return n;
}

MonomialBasis MonomialBasis::for_degree(int p) {
    if (p < 0) throw Error(errc::invalid_argument, "polynomial degree must be >= 0");
    MonomialBasis basis;
    basis.degree = p;
    basis.exponents.reserve(static_cast<std::size_t>(basis_count(p, 2)));
    for (int total = 0; total <= p; ++total)
        for (int a = total; a >= 0; --a) basis.exponents.push_back({a, total - a});
    return basis;
}

double monomial_eval(const std::array<int, 2>& e, const Point& p) {
    return ipow(p.x, e[0]) * ipow(p.y, e[1]);
}

double monomial_apply(const OperatorSpec& op, const std::array<int, 2>& e, const Point& p) {
    const int a = e[0], b = e[1];
    if (a < 0 || b < 0) throw Error(errc::invalid_argument, "negative monomial exponent");
    auto ddx = [&] { return a == 0 ? 0.0 : a * ipow(p.x, a - 1) * ipow(p.y, b); };
    auto ddy = [&] { return b == 0 ? 0.0 : b * ipow(p.x, a) * ipow(p.y, b - 1); };
    switch (op.kind) {
    case OpKind::identity: return monomial_eval(e, p);
    case OpKind::dx: return ddx();
    case OpKind::dy: return ddy();
    case OpKind::laplacian: {
        const double uxx = a < 2 ? 0.0 : a * (a - 1) * ipow(p.x, a - 2) * ipow(p.y, b);
        const double uyy = b < 2 ? 0.0 : b * (b - 1) * ipow(p.x, a) * ipow(p.y, b - 2);
        return uxx + uyy;
    }
    case OpKind::directional: return op.direction.x * ddx() + op.direction.y * ddy();
    }
    return 0.0;
}

} // namespace rbffd
