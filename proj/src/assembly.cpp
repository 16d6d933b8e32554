#include "assembly.hpp"

#include "error.hpp"

#include <algorithm>
#include <ostream>

namespace rbffd {

void SparseMatrix::add(std::size_t row, std::size_t col, double value) {
    if (finalized_) throw Error(errc::invalid_argument, "matrix already finalized");
    if (row >= rows_ || col >= cols_)
        throw Error(errc::invalid_argument, "triplet index out of range");
    triplets_.push_back({row, col, value});
}

void SparseMatrix::finalize() {
    if (finalized_) return;
    std::sort(triplets_.begin(), triplets_.end(), [](const Triplet& a, const Triplet& b) {
        if (a.row != b.row) return a.row < b.row;
        return a.col < b.col;
    });
    row_offsets_.assign(rows_ + 1, 0);
    col_indices_.reserve(triplets_.size());
    values_.reserve(triplets_.size());
    std::size_t last_row = rows_; // sentinel
    for (const Triplet& t : triplets_) {
        if (t.row == last_row && !col_indices_.empty() && col_indices_.back() == t.col) {
            values_.back() += t.value; // duplicate (row,col): sum
            continue;
        }
        col_indices_.push_back(t.col);
        values_.push_back(t.value);
        ++row_offsets_[t.row + 1];
        last_row = t.row;
    }
    for (std::size_t r = 0; r < rows_; ++r) row_offsets_[r + 1] += row_offsets_[r];
    finalized_ = true;
}

std::span<const std::size_t> SparseMatrix::row_offsets() const {
    if (!finalized_) throw Error(errc::invalid_argument, "matrix not finalized");
    return row_offsets_;
}

std::span<const std::size_t> SparseMatrix::col_indices() const {
    if (!finalized_) throw Error(errc::invalid_argument, "matrix not finalized");
    return col_indices_;
}

std::span<const double> SparseMatrix::values() const {
    if (!finalized_) throw Error(errc::invalid_argument, "matrix not finalized");
    return values_;
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    if (!finalized_) throw Error(errc::invalid_argument, "matrix not finalized");
    if (x.size() != cols_) throw Error(errc::invalid_argument, "vector length mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k)
            y[r] += values_[k] * x[col_indices_[k]];
    return y;
}

int DegreeHistogram::total() const {
    int n = 0;
    for (const auto& [deg, count] : counts) n += count;
    return n;
}

int DegreeHistogram::min_degree() const {
    if (counts.empty()) throw Error(errc::invalid_argument, "empty histogram");
    return counts.begin()->first;
}

int DegreeHistogram::max_degree() const {
    if (counts.empty()) throw Error(errc::invalid_argument, "empty histogram");
    return counts.rbegin()->first;
}

bool DegreeHistogram::contiguous() const {
    if (counts.empty()) return true;
    return static_cast<int>(counts.size()) == max_degree() - min_degree() + 1;
}

namespace {

[[noreturn]] void rethrow_with_node(const Error& e, std::size_t node) {
    throw Error(e.code(), "node " + std::to_string(node) + ": " + e.what());
}

} // namespace

DiffMatrixResult build_diff_matrix(const NodeSet& nodes, const OperatorSpec& op,
                                   const AdaptivityConfig& cfg, bool adaptive,
                                   PhsKernel kernel) {
    cfg.validate(op.order());
    const std::size_t n = nodes.size();
    if (n == 0) throw Error(errc::invalid_argument, "empty node set");
    SpatialIndex index(nodes.points);
    const double h_e = effective_fill_distance(nodes.domain.volume(), n, 2);

    DiffMatrixResult result{SparseMatrix(n, n), {}, std::vector<int>(n, -1)};
    for (std::size_t i = 0; i < n; ++i) {
        if (nodes.is_boundary(i)) continue;
        try {
            const StencilWeights sw = weights_for_node(static_cast<int>(i), nodes, index, op,
                                                       cfg, h_e, adaptive, kernel);
            for (std::size_t k = 0; k < sw.stencil_indices.size(); ++k)
                result.matrix.add(i, static_cast<std::size_t>(sw.stencil_indices[k]),
                                  sw.weights[k]);
            result.histogram.record(sw.degree_used);
            result.node_degrees[i] = sw.degree_used;
        } catch (const Error& e) {
            rethrow_with_node(e, i);
        }
    }
    result.matrix.finalize();
    return result;
}

PdeSystem assemble_pde_system(const NodeSet& nodes, const ProblemSpec& problem,
                              const AdaptivityConfig& cfg, bool adaptive, PhsKernel kernel) {
    cfg.validate(2);
    const std::size_t n = nodes.size();
    if (n == 0) throw Error(errc::invalid_argument, "empty node set");
    SpatialIndex index(nodes.points);
    const double h_e = effective_fill_distance(nodes.domain.volume(), n, 2);

    PdeSystem sys{SparseMatrix(n, n), std::vector<double>(n, 0.0), {},
                  std::vector<int>(n, -1)};
    const OperatorSpec laplacian = OperatorSpec::laplacian();

    for (std::size_t i = 0; i < n; ++i) {
        const Point p = nodes.points[i];
        if (!nodes.is_boundary(i)) {
            try {
                const StencilWeights sw = weights_for_node(static_cast<int>(i), nodes, index,
                                                           laplacian, cfg, h_e, adaptive, kernel);
                for (std::size_t k = 0; k < sw.stencil_indices.size(); ++k)
                    sys.matrix.add(i, static_cast<std::size_t>(sw.stencil_indices[k]),
                                   sw.weights[k]);
                sys.histogram.record(sw.degree_used);
                sys.node_degrees[i] = sw.degree_used;
            } catch (const Error& e) {
                rethrow_with_node(e, i);
            }
            sys.rhs[i] = problem.rhs_f(p);
            continue;
        }

        int seg = nodes.segment[i];
        if (!problem.boundary[seg].has_value())
            throw Error(errc::config,
                        "boundary node without a condition on segment " + std::to_string(seg));
        const BoundaryCondition* bc = &*problem.boundary[seg];
        if (bc->type == BcType::neumann) {
            // A corner shared with a Dirichlet segment is Dirichlet.
            for (int other = 0; other < 4; ++other) {
                if (other == seg || !problem.boundary[other].has_value()) continue;
                if (problem.boundary[other]->type == BcType::dirichlet &&
                    on_segment(nodes.domain, p, other)) {
                    bc = &*problem.boundary[other];
                    seg = other;
                    break;
                }
            }
        }

        if (bc->type == BcType::dirichlet) {
            sys.matrix.add(i, i, 1.0);
            sys.rhs[i] = bc->data(p);
        } else {
            const OperatorSpec normal_op = OperatorSpec::directional(outward_normal(seg));
            try {
                const StencilWeights sw = weights_for_node(static_cast<int>(i), nodes, index,
                                                           normal_op, cfg, h_e, adaptive, kernel);
                for (std::size_t k = 0; k < sw.stencil_indices.size(); ++k)
                    sys.matrix.add(i, static_cast<std::size_t>(sw.stencil_indices[k]),
                                   sw.weights[k]);
            } catch (const Error& e) {
                rethrow_with_node(e, i);
            }
            sys.rhs[i] = bc->data(p);
        }
    }
    sys.matrix.finalize();
    return sys;
}

void save_pattern_csv(const SparseMatrix& matrix, std::ostream& out) {
    out << "row,col\n";
    if (matrix.finalized()) {
        const auto offsets = matrix.row_offsets();
        const auto cols = matrix.col_indices();
        for (std::size_t r = 0; r + 1 < offsets.size(); ++r)
            for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k)
                out << r << ',' << cols[k] << '\n';
    } else {
        for (const auto& t : matrix.triplets()) out << t.row << ',' << t.col << '\n';
    }
}

void save_histogram_csv(const DegreeHistogram& hist, std::ostream& out) {
    out << "degree,count\n";
    for (const auto& [deg, count] : hist.counts) out << deg << ',' << count << '\n';
}

} // namespace rbffd
