#include "problems.hpp"

#include <cmath>

namespace rbffd {

ProblemSpec problem_section4() {
    ProblemSpec prob;
    prob.name = "section4";
    prob.domain = {-1.0, -1.0, 1.0, 1.0};
    prob.exact_u = [](Point p) { return std::sin(p.x * p.x + p.y); };
    prob.rhs_f = [](Point p) {
        const double w = p.x * p.x + p.y;
        return 2.0 * std::cos(w) - (4.0 * p.x * p.x + 1.0) * std::sin(w);
    };
    const BoundaryCondition dirichlet{BcType::dirichlet, prob.exact_u};
    prob.boundary[0] = dirichlet;
    prob.boundary[1] = dirichlet;
    prob.boundary[3] = dirichlet;
    // On y=1 the outward normal is (0,1), so du/dn = du/dy = cos(x^2 + y).
    prob.boundary[2] = BoundaryCondition{
        BcType::neumann, [](Point p) { return std::cos(p.x * p.x + p.y); }};
    return prob;
}

ProblemSpec problem_nist_peak(double alpha, Point center, bool flip_sign) {
    ProblemSpec prob;
    prob.name = "nist-peak";
    prob.domain = {0.0, 0.0, 1.0, 1.0};
    prob.exact_u = [alpha, center](Point p) {
        const double dx = p.x - center.x;
        const double dy = p.y - center.y;
        return std::exp(-alpha * (dx * dx + dy * dy));
    };
    const double sign = flip_sign ? -1.0 : 1.0;
    prob.rhs_f = [alpha, center, sign](Point p) {
        const double dx = p.x - center.x;
        const double dy = p.y - center.y;
        const double r2 = dx * dx + dy * dy;
        return sign * 4.0 * std::exp(-alpha * r2) * (alpha * alpha * r2 - alpha);
    };
    const BoundaryCondition dirichlet{BcType::dirichlet, prob.exact_u};
    for (int seg = 0; seg < 4; ++seg) prob.boundary[seg] = dirichlet;
    return prob;
}

} // namespace rbffd
