#pragma once

#include "geometry.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>

namespace rbffd {

enum class BcType { dirichlet, neumann };

struct BoundaryCondition {
    BcType type = BcType::dirichlet;
    std::function<double(Point)> data; // boundary value or normal derivative
};

/// A Poisson benchmark: the system solved is laplacian(u) = f.
struct ProblemSpec {
    std::string name;
    Rect domain;
    std::function<double(Point)> exact_u;
    std::function<double(Point)> rhs_f;
    std::array<std::optional<BoundaryCondition>, 4> boundary; // per segment id
};

/// Mixed Dirichlet/Neumann Poisson problem on (-1,1)^2 with
/// u = sin(x^2 + y); Neumann data on the y=1 edge.
ProblemSpec problem_section4();

/// NIST exponential-peak benchmark on (0,1)^2:
/// u = exp(-alpha*((x-xc)^2 + (y-yc)^2)), Dirichlet everywhere.
/// flip_sign negates the right-hand side (sensitivity check for the
/// sign convention; the default satisfies laplacian(u) = f exactly).
ProblemSpec problem_nist_peak(double alpha = 1000.0, Point center = {0.5, 0.5},
                              bool flip_sign = false);

} // namespace rbffd
