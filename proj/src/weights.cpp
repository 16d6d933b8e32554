#include "weights.hpp"

#include "error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace rbffd {

int AdaptivityConfig::resolved_max_stencil() const {
    const int floor_nm = static_cast<int>(2 * basis_count(p_max, 2) + 1);
    return max_stencil == 0 ? floor_nm : max_stencil;
}

void AdaptivityConfig::validate(int operator_order) const {
    if (global_order < 1) throw Error(errc::invalid_argument, "global order must be >= 1");
    if (p_min < operator_order)
        throw Error(errc::invalid_argument, "p_min must be >= the operator order");
    if (p_max < p_min) throw Error(errc::invalid_argument, "p_max must be >= p_min");
    if (max_stencil != 0 && max_stencil < 2 * basis_count(p_max, 2) + 1)
        throw Error(errc::invalid_argument, "max stencil too small for p_max");
}

int select_degree(double h_local, double h_e, const AdaptivityConfig& cfg, int operator_order) {
    if (!(h_local > 0.0) || !(h_e > 0.0))
        throw Error(errc::invalid_argument, "distances must be positive");
    const double raw =
        cfg.global_order + operator_order - 1 + std::log10(h_local / h_e);
    const long long rounded = std::llround(raw); // half away from zero
    const long long clamped = std::clamp<long long>(rounded, cfg.p_min, cfg.p_max);
    return static_cast<int>(clamped);
}

long long stencil_size(int p, int d) { return 2 * basis_count(p, d) + 1; }

StencilWeights compute_weights(std::span<const Point> stencil, const OperatorSpec& op, int p,
                               PhsKernel kernel) {
    const int n_s = static_cast<int>(stencil.size());
    if (n_s < 1) throw Error(errc::invalid_argument, "empty stencil");
    if (p < 0) throw Error(errc::invalid_argument, "polynomial degree must be >= 0");
    const int m = kernel.exponent;
    if (m < 3 || m % 2 == 0)
        throw Error(errc::invalid_argument, "PHS exponent must be odd and >= 3");
    for (int i = 0; i < n_s; ++i)
        for (int j = i + 1; j < n_s; ++j)
            if (dist2(stencil[i], stencil[j]) == 0.0)
                throw Error(errc::singular_stencil, "singular stencil");

    // Local frame: shift to the center and scale by the farthest stencil
    // distance. Keeps r^m and the monomial block on comparable scales.
    const Point center = stencil[0];
    double s = 0.0;
    for (int i = 0; i < n_s; ++i) s = std::max(s, dist(center, stencil[i]));
    if (s == 0.0) s = 1.0;
    std::vector<Point> local(n_s);
    for (int i = 0; i < n_s; ++i)
        local[i] = {(stencil[i].x - center.x) / s, (stencil[i].y - center.y) / s};

    const MonomialBasis basis = MonomialBasis::for_degree(p);
    const int n_p = static_cast<int>(basis.size());
    const int dim = n_s + n_p;

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < n_s; ++i) {
        for (int j = i + 1; j < n_s; ++j) {
            const double v = phs_eval(dist(local[i], local[j]), m);
            M(i, j) = v;
            M(j, i) = v;
        }
        for (int j = 0; j < n_p; ++j) {
            const double v = monomial_eval(basis.exponents[j], local[i]);
            M(i, n_s + j) = v;
            M(n_s + j, i) = v;
        }
    }

    const Point origin{0.0, 0.0}; // the center in the local frame
    Eigen::VectorXd rhs(dim);
    for (int i = 0; i < n_s; ++i) rhs(i) = phs_apply(op, origin, local[i], m);
    for (int j = 0; j < n_p; ++j) rhs(n_s + j) = monomial_apply(op, basis.exponents[j], origin);

    const double m_norm = M.cwiseAbs().maxCoeff();
    Eigen::VectorXd z;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (min_pivot >= 1e-14 * m_norm) {
        z = lu.solve(rhs);
    } else {
        // Rank-deficient polynomial block. Happens on grid-aligned stencils
        // whose points span fewer than p+1 distinct coordinates per axis: a
        // polynomial vanishing on every stencil point then makes the system
        // (at most slightly) inconsistent. The least-squares solution is the
        // best achievable set of weights; keep it when its misfit is tiny and
        // reject genuinely degenerate geometry, where the misfit is O(1).
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
        z = cod.solve(rhs);
        const double residual = (M * z - rhs).cwiseAbs().maxCoeff();
        const double ref = std::max({1.0, rhs.cwiseAbs().maxCoeff(),
                                     m_norm * z.cwiseAbs().maxCoeff()});
        if (!(residual <= 1e-4 * ref))
            throw Error(errc::ill_conditioned, "ill-conditioned stencil");
    }
    if (!z.allFinite()) throw Error(errc::ill_conditioned, "ill-conditioned stencil");

    const double rescale = std::pow(s, -op.order());
    StencilWeights out;
    out.degree_used = p;
    out.weights.resize(n_s);
    for (int i = 0; i < n_s; ++i) out.weights[i] = z(i) * rescale;
    out.multipliers.assign(z.data() + n_s, z.data() + dim);
    return out;
}

StencilWeights weights_for_node(int node_index, const NodeSet& nodes, const SpatialIndex& index,
                                const OperatorSpec& op, const AdaptivityConfig& cfg, double h_e,
                                bool adaptive, PhsKernel kernel) {
    const int k = op.order();
    cfg.validate(k);
    if (node_index < 0 || static_cast<std::size_t>(node_index) >= nodes.size())
        throw Error(errc::invalid_argument, "node index out of range");
    if (nodes.size() < 2) throw Error(errc::invalid_argument, "node set too small");

    const int n_m = std::min<int>(cfg.resolved_max_stencil(), static_cast<int>(nodes.size()));
    const Point center = nodes.points[node_index];
    const std::vector<int> neighbors = index.knn(center, n_m);

    int p;
    if (adaptive) {
        // Local spacing taken as half the center's nearest-neighbor distance
        // (a pointwise separation distance).
        const double h_local = 0.5 * dist(center, nodes.points[neighbors[1]]);
        p = select_degree(h_local, h_e, cfg, k);
    } else {
        p = std::clamp(cfg.global_order + k - 1, cfg.p_min, cfg.p_max);
    }

    const int n_p = static_cast<int>(basis_count(p, 2));
    const int n_s = static_cast<int>(stencil_size(p, 2));
    if (n_s > static_cast<int>(neighbors.size()))
        throw Error(errc::invalid_argument, "stencil larger than node set");

    auto attempt = [&](int take) {
        std::vector<Point> pts(take);
        for (int i = 0; i < take; ++i) pts[i] = nodes.points[neighbors[i]];
        StencilWeights sw = compute_weights(pts, op, p, kernel);
        sw.center_index = node_index;
        sw.stencil_indices.assign(neighbors.begin(), neighbors.begin() + take);
        return sw;
    };

    try {
        return attempt(n_s);
    } catch (const Error& e) {
        if (e.code() != errc::ill_conditioned) throw;
        const int enlarged =
            std::min<int>(n_s + (n_p + 1) / 2, static_cast<int>(neighbors.size()));
        if (enlarged == n_s) throw;
        return attempt(enlarged);
    }
}

} // namespace rbffd
