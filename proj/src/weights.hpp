#pragma once

#include "geometry.hpp"
#include "kernels.hpp"

#include <span>
#include <vector>

namespace rbffd {

/// RBF-FD weights for one stencil center.
struct StencilWeights {
    int center_index = -1;
    std::vector<int> stencil_indices;
    std::vector<double> weights;
    int degree_used = 0;
    std::vector<double> multipliers; // polynomial-constraint block, local frame
};

/// Parameters of the degree-selection rule p_i = g + k - 1 + log10(h_i / h_e).
struct AdaptivityConfig {
    int global_order = 4; // g
    int p_min = 2;
    int p_max = 10;
    int max_stencil = 0; // n_m; 0 derives 2*C(p_max+2,2)+1

    int resolved_max_stencil() const;
    void validate(int operator_order) const;
};

/// Rounded (half away from zero) and clamped degree for one stencil.
int select_degree(double h_local, double h_e, const AdaptivityConfig& cfg, int operator_order);

/// n_s = 2*C(p+d,d) + 1.
long long stencil_size(int p, int d);

/// Solves the PHS+poly saddle-point system for the given stencil (center
/// first) in shifted-and-scaled local coordinates; returned weights carry the
/// s^{-k} rescaling back to the original frame.
StencilWeights compute_weights(std::span<const Point> stencil, const OperatorSpec& op, int p,
                               PhsKernel kernel = {});

/// Full per-node pipeline: neighbor fetch, local-spacing estimate, degree
/// selection, stencil truncation, weight solve (with one enlarged-stencil
/// retry on ill-conditioning). adaptive=false forces p = g + k - 1.
StencilWeights weights_for_node(int node_index, const NodeSet& nodes, const SpatialIndex& index,
                                const OperatorSpec& op, const AdaptivityConfig& cfg, double h_e,
                                bool adaptive = true, PhsKernel kernel = {});

} // namespace rbffd
