#include "rbffd/rbffd.h"

#include "assembly.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "kernels.hpp"
#include "problems.hpp"
#include "runner.hpp"
#include "solver.hpp"
#include "weights.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <span>
#include <string>
#include <vector>

struct rbffd_nodeset {
    rbffd::NodeSet nodes;
};

struct rbffd_matrix {
    rbffd::SparseMatrix matrix;
};

namespace {

using nlohmann::json;

thread_local std::string t_last_error;

rbffd_status map_errc(rbffd::errc code) {
    switch (code) {
    case rbffd::errc::invalid_argument: return RBFFD_ERR_INVALID_ARGUMENT;
    case rbffd::errc::config: return RBFFD_ERR_CONFIG;
    case rbffd::errc::io: return RBFFD_ERR_IO;
    case rbffd::errc::singular_stencil: return RBFFD_ERR_SINGULAR_STENCIL;
    case rbffd::errc::ill_conditioned: return RBFFD_ERR_ILL_CONDITIONED;
    case rbffd::errc::solver_failure: return RBFFD_ERR_SOLVER;
    }
    return RBFFD_ERR_INTERNAL;
}

template <typename Fn>
rbffd_status guarded(Fn&& fn) {
    try {
        fn();
        return RBFFD_OK;
    } catch (const rbffd::Error& e) {
        t_last_error = e.what();
        return map_errc(e.code());
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return RBFFD_ERR_INTERNAL;
    } catch (...) {
        t_last_error = "unknown error";
        return RBFFD_ERR_INTERNAL;
    }
}

void require_c(bool ok, const char* msg) {
    if (!ok) throw rbffd::Error(rbffd::errc::invalid_argument, msg);
}

rbffd::Rect rect_from(const double domain[4]) {
    require_c(domain != nullptr, "domain is null");
    return {domain[0], domain[1], domain[2], domain[3]};
}

rbffd::OperatorSpec op_from(const char* name, const double* direction) {
    require_c(name != nullptr, "operator name is null");
    const std::string op(name);
    if (op == "identity") return rbffd::OperatorSpec::identity();
    if (op == "dx") return rbffd::OperatorSpec::dx();
    if (op == "dy") return rbffd::OperatorSpec::dy();
    if (op == "laplacian") return rbffd::OperatorSpec::laplacian();
    if (op == "directional") {
        require_c(direction != nullptr, "directional operator needs a direction");
        return rbffd::OperatorSpec::directional({direction[0], direction[1]});
    }
    throw rbffd::Error(rbffd::errc::invalid_argument, "unknown operator: " + op);
}

rbffd::ProblemSpec problem_from_json(const char* problem_json) {
    require_c(problem_json != nullptr, "problem json is null");
    json j;
    try {
        j = json::parse(problem_json);
    } catch (const json::exception& e) {
        throw rbffd::Error(rbffd::errc::config,
                           std::string("problem json is not valid JSON: ") + e.what());
    }
    const std::string name = j.value("problem", "section4");
    if (name == "section4") return rbffd::problem_section4();
    if (name == "nist-peak") {
        const double alpha = j.value("alpha", 1000.0);
        rbffd::Point center{0.5, 0.5};
        if (j.contains("peak_center")) {
            center = {j.at("peak_center").at(0).get<double>(),
                      j.at("peak_center").at(1).get<double>()};
        }
        return rbffd::problem_nist_peak(alpha, center, j.value("flip_sign", false));
    }
    throw rbffd::Error(rbffd::errc::config, "unknown problem: " + name);
}

rbffd::AdaptivityConfig adaptivity_from(int32_t g, int32_t p_min, int32_t p_max) {
    rbffd::AdaptivityConfig cfg;
    cfg.global_order = g;
    cfg.p_min = p_min;
    cfg.p_max = p_max;
    return cfg;
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

} // namespace

extern "C" {

const char* rbffd_version(void) { return "1.0.0"; }

const char* rbffd_last_error(void) { return t_last_error.c_str(); }

rbffd_status rbffd_nodeset_generate(const char* kind, int64_t n_target, const double domain[4],
                                    const char* params_json, uint64_t seed,
                                    rbffd_nodeset** out) {
    return guarded([&] {
        require_c(kind != nullptr, "kind is null");
        require_c(out != nullptr, "out is null");
        rbffd::GeneratorSpec spec;
        spec.kind = rbffd::parse_node_kind(kind);
        spec.n_target = static_cast<int>(n_target);
        spec.domain = rect_from(domain);
        spec.seed = seed;
        if (params_json != nullptr && std::strlen(params_json) > 0) {
            json p;
            try {
                p = json::parse(params_json);
            } catch (const json::exception& e) {
                throw rbffd::Error(rbffd::errc::config,
                                   std::string("params json is not valid JSON: ") + e.what());
            }
            rbffd::PeakParams pp;
            pp.peak = {p.at("x_peak").at(0).get<double>(), p.at("x_peak").at(1).get<double>()};
            pp.r_min = p.at("r_min").get<double>();
            pp.r_max = p.at("r_max").get<double>();
            pp.radius = p.value("R", 0.25);
            spec.peak = pp;
        }
        *out = new rbffd_nodeset{rbffd::generate_nodes(spec)};
    });
}

rbffd_status rbffd_nodeset_load_csv(const char* path, const double domain[4],
                                    rbffd_nodeset** out) {
    return guarded([&] {
        require_c(path != nullptr && out != nullptr, "null argument");
        *out = new rbffd_nodeset{rbffd::load_nodes_csv(path, rect_from(domain))};
    });
}

rbffd_status rbffd_nodeset_save_csv(const rbffd_nodeset* nodes, const char* path) {
    return guarded([&] {
        require_c(nodes != nullptr && path != nullptr, "null argument");
        rbffd::save_nodes_csv(nodes->nodes, std::filesystem::path(path));
    });
}

int64_t rbffd_nodeset_size(const rbffd_nodeset* nodes) {
    return nodes ? static_cast<int64_t>(nodes->nodes.size()) : 0;
}

rbffd_status rbffd_nodeset_points(const rbffd_nodeset* nodes, double* xy) {
    return guarded([&] {
        require_c(nodes != nullptr && xy != nullptr, "null argument");
        for (std::size_t i = 0; i < nodes->nodes.size(); ++i) {
            xy[2 * i] = nodes->nodes.points[i].x;
            xy[2 * i + 1] = nodes->nodes.points[i].y;
        }
    });
}

rbffd_status rbffd_nodeset_segments(const rbffd_nodeset* nodes, int32_t* segment) {
    return guarded([&] {
        require_c(nodes != nullptr && segment != nullptr, "null argument");
        for (std::size_t i = 0; i < nodes->nodes.size(); ++i)
            segment[i] = nodes->nodes.segment[i];
    });
}

rbffd_status rbffd_nodeset_fill_distance(const rbffd_nodeset* nodes, int32_t eval_resolution,
                                         double* out) {
    return guarded([&] {
        require_c(nodes != nullptr && out != nullptr, "null argument");
        *out = rbffd::fill_distance(nodes->nodes, eval_resolution);
    });
}

rbffd_status rbffd_nodeset_separation_distance(const rbffd_nodeset* nodes, double* out) {
    return guarded([&] {
        require_c(nodes != nullptr && out != nullptr, "null argument");
        *out = rbffd::separation_distance(nodes->nodes);
    });
}

rbffd_status rbffd_nodeset_mesh_ratio(const rbffd_nodeset* nodes, int32_t eval_resolution,
                                      double* out) {
    return guarded([&] {
        require_c(nodes != nullptr && out != nullptr, "null argument");
        *out = rbffd::mesh_ratio(nodes->nodes, eval_resolution);
    });
}

rbffd_status rbffd_nodeset_knn(const rbffd_nodeset* nodes, double x, double y, int64_t k,
                               int64_t* indices) {
    return guarded([&] {
        require_c(nodes != nullptr && indices != nullptr, "null argument");
        rbffd::SpatialIndex index(nodes->nodes.points);
        const auto found = index.knn({x, y}, static_cast<int>(k));
        for (std::size_t i = 0; i < found.size(); ++i) indices[i] = found[i];
    });
}

void rbffd_nodeset_destroy(rbffd_nodeset* nodes) { delete nodes; }

double rbffd_effective_fill_distance(double volume, int64_t n, int32_t dim) {
    try {
        return rbffd::effective_fill_distance(volume, static_cast<std::size_t>(n), dim);
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return -1.0;
    }
}

int64_t rbffd_basis_count(int32_t degree, int32_t dim) {
    try {
        return rbffd::basis_count(degree, dim);
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return 0;
    }
}

int64_t rbffd_stencil_size(int32_t degree, int32_t dim) {
    try {
        return rbffd::stencil_size(degree, dim);
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return 0;
    }
}

rbffd_status rbffd_select_degree(double h_local, double h_e, int32_t g, int32_t k,
                                 int32_t p_min, int32_t p_max, int32_t* out) {
    return guarded([&] {
        require_c(out != nullptr, "out is null");
        rbffd::AdaptivityConfig cfg = adaptivity_from(g, p_min, p_max);
        cfg.validate(k);
        *out = rbffd::select_degree(h_local, h_e, cfg, k);
    });
}

rbffd_status rbffd_compute_weights(const double* stencil_xy, int64_t n_s, const char* op,
                                   const double* direction, int32_t degree,
                                   int32_t phs_exponent, double* weights, double* multipliers) {
    return guarded([&] {
        require_c(stencil_xy != nullptr && weights != nullptr, "null argument");
        require_c(n_s >= 1, "empty stencil");
        std::vector<rbffd::Point> pts(static_cast<std::size_t>(n_s));
        for (std::size_t i = 0; i < pts.size(); ++i)
            pts[i] = {stencil_xy[2 * i], stencil_xy[2 * i + 1]};
        const rbffd::StencilWeights sw = rbffd::compute_weights(
            pts, op_from(op, direction), degree, rbffd::PhsKernel(phs_exponent));
        for (std::size_t i = 0; i < sw.weights.size(); ++i) weights[i] = sw.weights[i];
        if (multipliers != nullptr)
            for (std::size_t i = 0; i < sw.multipliers.size(); ++i)
                multipliers[i] = sw.multipliers[i];
    });
}

rbffd_status rbffd_build_diff_matrix(const rbffd_nodeset* nodes, const char* op,
                                     const double* direction, int32_t g, int32_t phs_exponent,
                                     int32_t adaptive, int32_t p_min, int32_t p_max,
                                     rbffd_matrix** out, int32_t* degrees) {
    return guarded([&] {
        require_c(nodes != nullptr && out != nullptr, "null argument");
        const rbffd::OperatorSpec oper = op_from(op, direction);
        const rbffd::AdaptivityConfig cfg = adaptivity_from(g, p_min, p_max);
        auto built = rbffd::build_diff_matrix(nodes->nodes, oper, cfg, adaptive != 0,
                                              rbffd::PhsKernel(phs_exponent));
        if (degrees != nullptr)
            for (std::size_t i = 0; i < built.node_degrees.size(); ++i)
                degrees[i] = built.node_degrees[i];
        *out = new rbffd_matrix{std::move(built.matrix)};
    });
}

rbffd_status rbffd_assemble_system(const rbffd_nodeset* nodes, const char* problem_json,
                                   int32_t g, int32_t phs_exponent, int32_t adaptive,
                                   int32_t p_min, int32_t p_max, rbffd_matrix** out,
                                   double* rhs, int32_t* degrees) {
    return guarded([&] {
        require_c(nodes != nullptr && out != nullptr && rhs != nullptr, "null argument");
        const rbffd::ProblemSpec problem = problem_from_json(problem_json);
        const rbffd::AdaptivityConfig cfg = adaptivity_from(g, p_min, p_max);
        auto sys = rbffd::assemble_pde_system(nodes->nodes, problem, cfg, adaptive != 0,
                                              rbffd::PhsKernel(phs_exponent));
        for (std::size_t i = 0; i < sys.rhs.size(); ++i) rhs[i] = sys.rhs[i];
        if (degrees != nullptr)
            for (std::size_t i = 0; i < sys.node_degrees.size(); ++i)
                degrees[i] = sys.node_degrees[i];
        *out = new rbffd_matrix{std::move(sys.matrix)};
    });
}

int64_t rbffd_matrix_rows(const rbffd_matrix* matrix) {
    return matrix ? static_cast<int64_t>(matrix->matrix.rows()) : 0;
}

int64_t rbffd_matrix_cols(const rbffd_matrix* matrix) {
    return matrix ? static_cast<int64_t>(matrix->matrix.cols()) : 0;
}

int64_t rbffd_matrix_nnz(const rbffd_matrix* matrix) {
    return matrix ? static_cast<int64_t>(matrix->matrix.nnz()) : 0;
}

rbffd_status rbffd_matrix_triplets(const rbffd_matrix* matrix, int64_t* rows, int64_t* cols,
                                   double* values) {
    return guarded([&] {
        require_c(matrix != nullptr && rows != nullptr && cols != nullptr && values != nullptr,
                  "null argument");
        const auto offsets = matrix->matrix.row_offsets();
        const auto col_idx = matrix->matrix.col_indices();
        const auto vals = matrix->matrix.values();
        std::size_t k = 0;
        for (std::size_t r = 0; r + 1 < offsets.size(); ++r) {
            for (std::size_t j = offsets[r]; j < offsets[r + 1]; ++j, ++k) {
                rows[k] = static_cast<int64_t>(r);
                cols[k] = static_cast<int64_t>(col_idx[j]);
                values[k] = vals[j];
            }
        }
    });
}

void rbffd_matrix_destroy(rbffd_matrix* matrix) { delete matrix; }

rbffd_status rbffd_solve(const rbffd_matrix* matrix, const double* rhs, double* solution,
                         rbffd_solve_report* report) {
    return guarded([&] {
        require_c(matrix != nullptr && rhs != nullptr && solution != nullptr, "null argument");
        const std::span<const double> b(rhs, matrix->matrix.rows());
        const rbffd::SolveReport r = rbffd::solve(matrix->matrix, b);
        for (std::size_t i = 0; i < r.solution.size(); ++i) solution[i] = r.solution[i];
        if (report != nullptr) {
            report->iterations = r.iterations;
            report->relative_residual = r.relative_residual;
            report->used_iterative = r.method == rbffd::SolveMethod::iterative ? 1 : 0;
            report->converged = r.converged ? 1 : 0;
        }
    });
}

rbffd_status rbffd_error_norms(const double* numeric, const double* exact, int64_t n,
                               double* max_abs, double* rel_l2, int32_t* l2_is_absolute) {
    return guarded([&] {
        require_c(numeric != nullptr && exact != nullptr, "null argument");
        require_c(n >= 1, "empty vectors");
        const rbffd::ErrorNorms norms =
            rbffd::error_norms(std::span<const double>(numeric, static_cast<std::size_t>(n)),
                               std::span<const double>(exact, static_cast<std::size_t>(n)));
        if (max_abs != nullptr) *max_abs = norms.max_abs;
        if (rel_l2 != nullptr) *rel_l2 = norms.rel_l2;
        if (l2_is_absolute != nullptr) *l2_is_absolute = norms.l2_is_absolute ? 1 : 0;
    });
}

rbffd_status rbffd_run_solve(const char* config_json, char** record_json) {
    return guarded([&] {
        require_c(config_json != nullptr && record_json != nullptr, "null argument");
        const rbffd::RunConfig cfg = rbffd::parse_run_config(config_json);
        const rbffd::ConvergenceRecord rec = rbffd::run_solve(cfg);
        *record_json = copy_string(rbffd::record_to_json(rec));
    });
}

rbffd_status rbffd_run_convergence(const char* config_json, char** summary_json) {
    return guarded([&] {
        require_c(config_json != nullptr && summary_json != nullptr, "null argument");
        const rbffd::RunConfig cfg = rbffd::parse_run_config(config_json);
        const rbffd::ConvergenceSummary summary = rbffd::run_convergence(cfg);
        *summary_json = copy_string(rbffd::summary_to_json(summary));
    });
}

void rbffd_string_free(char* s) { std::free(s); }

} // extern "C"
