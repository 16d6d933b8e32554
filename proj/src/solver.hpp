#pragma once

#include "assembly.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace rbffd {

enum class SolveMethod { dense_direct, iterative };

struct SolveReport {
    std::vector<double> solution;
    SolveMethod method = SolveMethod::dense_direct;
    long long iterations = 0; // 0 for the direct path
    double relative_residual = 0.0;
    bool converged = true;
};

struct SolverOptions {
    std::size_t dense_threshold = 4000; // N above this uses BiCGSTAB + ILU
    double tolerance = 1e-12;
};

/// Direct dense factorization up to dense_threshold unknowns, otherwise
/// ILU-preconditioned BiCGSTAB (max 10*N iterations). Non-convergence returns
/// the best iterate with converged=false; a singular dense system throws.
SolveReport solve(const SparseMatrix& matrix, std::span<const double> rhs,
                  const SolverOptions& options = {});

struct ErrorNorms {
    double max_abs = 0.0;
    double rel_l2 = 0.0;
    bool l2_is_absolute = false; // set when the exact vector has zero norm
};

ErrorNorms error_norms(std::span<const double> numeric, std::span<const double> exact);

} // namespace rbffd
