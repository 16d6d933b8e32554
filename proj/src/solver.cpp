#include "solver.hpp"

#include "error.hpp"

#include <Eigen/Dense>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <cmath>
#include <limits>

namespace rbffd {

namespace {

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double relative_residual(const SparseMatrix& matrix, std::span<const double> x,
                         std::span<const double> rhs) {
    const std::vector<double> ax = matrix.multiply(x);
    double num = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        const double r = ax[i] - rhs[i];
        num += r * r;
    }
    const double den = norm2(rhs);
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num) / den;
}

} // namespace

SolveReport solve(const SparseMatrix& matrix, std::span<const double> rhs,
                  const SolverOptions& options) {
    if (matrix.rows() != matrix.cols())
        throw Error(errc::invalid_argument, "matrix must be square");
    if (rhs.size() != matrix.rows())
        throw Error(errc::invalid_argument, "rhs length mismatch");
    if (!matrix.finalized()) throw Error(errc::invalid_argument, "matrix not finalized");

    const std::size_t n = matrix.rows();
    const auto offsets = matrix.row_offsets();
    const auto cols = matrix.col_indices();
    const auto vals = matrix.values();

    SolveReport report;
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), static_cast<Eigen::Index>(n));

    if (n <= options.dense_threshold) {
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k)
                dense(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(cols[k])) = vals[k];
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(std::move(dense));
        Eigen::VectorXd x = lu.solve(b);
        report.method = SolveMethod::dense_direct;
        report.solution.assign(x.data(), x.data() + n);
        if (!x.allFinite()) throw Error(errc::solver_failure, "singular matrix");
        report.relative_residual = relative_residual(matrix, report.solution, rhs);
        if (!(report.relative_residual <= 1e-8))
            throw Error(errc::solver_failure, "singular matrix");
        report.converged = report.relative_residual <= 1e-10;
        return report;
    }

    Eigen::SparseMatrix<double> sparse(static_cast<Eigen::Index>(n),
                                       static_cast<Eigen::Index>(n));
    {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(matrix.nnz());
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k)
                trips.emplace_back(static_cast<int>(r), static_cast<int>(cols[k]), vals[k]);
        sparse.setFromTriplets(trips.begin(), trips.end());
        sparse.makeCompressed();
    }
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> bicg;
    bicg.preconditioner().setDroptol(1e-6);
    bicg.preconditioner().setFillfactor(20);
    bicg.setTolerance(options.tolerance);
    bicg.setMaxIterations(static_cast<Eigen::Index>(10 * n));
    bicg.compute(sparse);
    if (bicg.info() != Eigen::Success)
        throw Error(errc::solver_failure, "iterative solver setup failed");
    Eigen::VectorXd x = bicg.solve(b);

    report.method = SolveMethod::iterative;
    report.iterations = static_cast<long long>(bicg.iterations());
    report.solution.assign(x.data(), x.data() + n);
    report.relative_residual =
        x.allFinite() ? relative_residual(matrix, report.solution, rhs)
                      : std::numeric_limits<double>::infinity();
    report.converged = report.relative_residual <= 1e-10;
    return report;
}

ErrorNorms error_norms(std::span<const double> numeric, std::span<const double> exact) {
    if (numeric.size() != exact.size())
        throw Error(errc::invalid_argument, "vector length mismatch");
    if (numeric.empty()) throw Error(errc::invalid_argument, "empty vectors");
    ErrorNorms norms;
    double diff2 = 0.0;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        const double d = numeric[i] - exact[i];
        norms.max_abs = std::max(norms.max_abs, std::abs(d));
        diff2 += d * d;
    }
    const double exact_norm = norm2(exact);
    if (exact_norm == 0.0) {
        norms.rel_l2 = std::sqrt(diff2);
        norms.l2_is_absolute = true;
    } else {
        norms.rel_l2 = std::sqrt(diff2) / exact_norm;
    }
    return norms;
}

} // namespace rbffd
