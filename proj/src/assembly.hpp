#pragma once

#include "geometry.hpp"
#include "problems.hpp"
#include "weights.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

namespace rbffd {

/// Triplet-buffered sparse matrix with a compressed-row form after finalize().
class SparseMatrix {
public:
    struct Triplet {
        std::size_t row, col;
        double value;
    };

    SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

    void add(std::size_t row, std::size_t col, double value);

    /// Sorts by (row, col) and merges duplicate entries.
    void finalize();
    bool finalized() const { return finalized_; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return finalized_ ? values_.size() : triplets_.size(); }

    std::span<const std::size_t> row_offsets() const;
    std::span<const std::size_t> col_indices() const;
    std::span<const double> values() const;
    const std::vector<Triplet>& triplets() const { return triplets_; }

    std::vector<double> multiply(std::span<const double> x) const;

private:
    std::size_t rows_, cols_;
    std::vector<Triplet> triplets_;
    bool finalized_ = false;
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

/// Count of interior nodes per selected polynomial degree.
struct DegreeHistogram {
    std::map<int, int> counts;

    void record(int degree) { ++counts[degree]; }
    int total() const;
    int min_degree() const;
    int max_degree() const;
    bool contiguous() const;
};

struct DiffMatrixResult {
    SparseMatrix matrix;
    DegreeHistogram histogram;
    std::vector<int> node_degrees; // per node; -1 on rows without weights
};

/// Global differentiation matrix: one weight row per interior node, empty
/// rows for boundary nodes. adaptive=false fixes p = g + k - 1 everywhere.
DiffMatrixResult build_diff_matrix(const NodeSet& nodes, const OperatorSpec& op,
                                   const AdaptivityConfig& cfg, bool adaptive,
                                   PhsKernel kernel = {});

struct PdeSystem {
    SparseMatrix matrix;
    std::vector<double> rhs;
    DegreeHistogram histogram;
    std::vector<int> node_degrees; // per node; -1 on rows without weights
};

/// Square N x N system: Laplacian rows at interior nodes, identity rows at
/// Dirichlet nodes, outward-normal derivative rows at Neumann nodes.
/// Corner nodes shared with a Dirichlet segment are treated as Dirichlet.
PdeSystem assemble_pde_system(const NodeSet& nodes, const ProblemSpec& problem,
                              const AdaptivityConfig& cfg, bool adaptive,
                              PhsKernel kernel = {});

void save_pattern_csv(const SparseMatrix& matrix, std::ostream& out);
void save_histogram_csv(const DegreeHistogram& hist, std::ostream& out);

} // namespace rbffd
