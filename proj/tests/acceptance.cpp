// Acceptance suite: end-to-end checks of the published behavior, one
// criterion per run (or all, with no argument). Prints one PASS/FAIL line per
// criterion and exits nonzero if any checked criterion fails.
#include "assembly.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "kernels.hpp"
#include "problems.hpp"
#include "runner.hpp"
#include "solver.hpp"
#include "weights.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

using namespace rbffd;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::vector<Point> scattered_stencil(std::mt19937_64& rng, int n_s) {
    std::uniform_real_distribution<double> jitter(-0.18, 0.18);
    std::vector<Point> pts;
    pts.push_back({0.0, 0.0});
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 1; k < n_s; ++k) {
        const double r = std::sqrt(static_cast<double>(k) / (n_s - 1));
        const double a = golden * k;
        const double spacing = 1.0 / std::sqrt(static_cast<double>(n_s));
        pts.push_back({r * std::cos(a) + jitter(rng) * spacing,
                       r * std::sin(a) + jitter(rng) * spacing});
    }
    return pts;
}

// 1. Polynomial reproduction: 200 random stencils, p in {2..6}, m in {3,5},
//    every monomial of degree <= p reproduced under laplacian/dx/dy/identity
//    to relative 1e-8.
void criterion1() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> degree(2, 6);
    const std::array<OperatorSpec, 4> ops = {OperatorSpec::laplacian(), OperatorSpec::dx(),
                                             OperatorSpec::dy(), OperatorSpec::identity()};
    double worst = 0.0;
    int solved = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int p = degree(rng);
        const int m = (trial % 2 == 0) ? 3 : 5;
        const auto stencil = scattered_stencil(rng, static_cast<int>(stencil_size(p, 2)));
        const MonomialBasis basis = MonomialBasis::for_degree(p);
        for (const auto& op : ops) {
            const StencilWeights sw = compute_weights(stencil, op, p, PhsKernel(m));
            ++solved;
            double max_w = 0.0;
            for (double w : sw.weights) max_w = std::max(max_w, std::abs(w));
            for (const auto& e : basis.exponents) {
                double acc = 0.0, max_q = 0.0;
                for (std::size_t i = 0; i < stencil.size(); ++i) {
                    const double q = monomial_eval(e, stencil[i]);
                    acc += sw.weights[i] * q;
                    max_q = std::max(max_q, std::abs(q));
                }
                const double target = monomial_apply(op, e, stencil[0]);
                const double scale = std::max(1.0, max_w * max_q);
                worst = std::max(worst, std::abs(acc - target) / scale);
            }
        }
    }
    report(1, worst <= 1e-8,
           "polynomial reproduction on 200 random stencils: worst relative residual " +
               std::to_string(worst) + " (bound 1e-8, " + std::to_string(solved) + " solves)");
}

// 2. Classical-stencil oracle: 5-point cross at h in {0.1, 0.01}.
void criterion2() {
    bool pass = true;
    std::string detail;
    for (double h : {0.1, 0.01}) {
        const std::vector<Point> cross = {{0, 0}, {h, 0}, {-h, 0}, {0, h}, {0, -h}};
        const StencilWeights lap = compute_weights(cross, OperatorSpec::laplacian(), 2);
        const double ref = 1.0 / (h * h);
        pass = pass && std::abs(lap.weights[0] + 4.0 * ref) <= 1e-9 * 4.0 * ref;
        for (int i = 1; i < 5; ++i)
            pass = pass && std::abs(lap.weights[i] - ref) <= 1e-9 * ref;
        const StencilWeights dx = compute_weights(cross, OperatorSpec::dx(), 2);
        const double cd = 0.5 / h;
        pass = pass && std::abs(dx.weights[1] - cd) <= 1e-9 * cd &&
               std::abs(dx.weights[2] + cd) <= 1e-9 * cd &&
               std::abs(dx.weights[0]) <= 1e-9 * cd && std::abs(dx.weights[3]) <= 1e-9 * cd &&
               std::abs(dx.weights[4]) <= 1e-9 * cd;
        detail += "h=" + std::to_string(h) + " ok; ";
    }
    report(2, pass, "5-point cross matches [-4,1,1,1,1]/h^2 and central dx to 1e-9: " + detail);
}

// 3. Quasi-uniform convergence: g=4 fixed degree, slope within [3, 5.5].
void criterion3() {
    RunConfig cfg;
    cfg.problem = "section4";
    cfg.generator = NodeKind::tensor_grid;
    cfg.n_values = {400, 900, 1600, 2500, 3600};
    cfg.global_order = 4;
    cfg.adaptive = false;
    cfg.out_dir = std::filesystem::temp_directory_path() / "rbffd_acceptance_c3";
    const ConvergenceSummary summary = run_convergence(cfg);
    const bool pass = !summary.below_noise_floor && summary.slope >= 3.0 &&
                      summary.slope <= 5.5;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "g=4 sweep N=400..3600: fitted slope %.2f within [3.0, 5.5]", summary.slope);
    report(3, pass, buf);
}

struct SquashRuns {
    std::size_t nnz_fixed = 0, nnz_adaptive = 0;
    double err_fixed = 0, err_adaptive = 0;
    DegreeHistogram hist_adaptive;
};

// shared by criteria 4 and 5: sine-squashed N=2500, g=5 both runs
SquashRuns squash_runs() {
    static SquashRuns cached;
    static bool ready = false;
    if (ready) return cached;
    const ProblemSpec prob = problem_section4();
    const NodeSet nodes = generate_nodes({NodeKind::sine_squash, 2500, prob.domain});
    AdaptivityConfig cfg;
    cfg.global_order = 5;
    std::vector<double> exact(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) exact[i] = prob.exact_u(nodes.points[i]);

    const PdeSystem fixed = assemble_pde_system(nodes, prob, cfg, false);
    const SolveReport fixed_sol = solve(fixed.matrix, fixed.rhs);
    cached.nnz_fixed = fixed.matrix.nnz();
    cached.err_fixed = error_norms(fixed_sol.solution, exact).max_abs;

    const PdeSystem adaptive = assemble_pde_system(nodes, prob, cfg, true);
    const SolveReport adaptive_sol = solve(adaptive.matrix, adaptive.rhs);
    cached.nnz_adaptive = adaptive.matrix.nnz();
    cached.err_adaptive = error_norms(adaptive_sol.solution, exact).max_abs;
    cached.hist_adaptive = adaptive.histogram;
    ready = true;
    return cached;
}

// 4. Adaptive vs fixed on sine-squashed N=2500, matched g: nnz <= 0.92x and
//    max error <= 3x.
void criterion4() {
    const SquashRuns runs = squash_runs();
    const double nnz_ratio = double(runs.nnz_adaptive) / double(runs.nnz_fixed);
    const double err_ratio = runs.err_adaptive / runs.err_fixed;
    const bool pass = nnz_ratio <= 0.92 && err_ratio <= 3.0;
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "sine-squash N=2500 g=5: nnz %zu vs %zu (ratio %.3f <= 0.92), "
                  "max error %.3e vs %.3e (ratio %.2f <= 3)",
                  runs.nnz_adaptive, runs.nnz_fixed, nnz_ratio, runs.err_adaptive,
                  runs.err_fixed, err_ratio);
    report(4, pass, buf);
}

// 5. Degree histograms: contiguous range of width >= 3 on the squashed set;
//    single bar at g+k-1 on the quasi-uniform set.
void criterion5() {
    const SquashRuns runs = squash_runs();
    const DegreeHistogram& hist = runs.hist_adaptive;
    const int width = hist.max_degree() - hist.min_degree() + 1;
    const bool squash_ok = hist.contiguous() && width >= 3;

    const NodeSet grid = generate_nodes({NodeKind::tensor_grid, 2500, {-1, -1, 1, 1}});
    AdaptivityConfig cfg;
    cfg.global_order = 5;
    const DiffMatrixResult uniform =
        build_diff_matrix(grid, OperatorSpec::laplacian(), cfg, true);
    const bool uniform_ok = uniform.histogram.counts.size() == 1 &&
                            uniform.histogram.counts.begin()->first == 6; // g + k - 1

    std::string bars;
    for (const auto& [p, c] : hist.counts)
        bars += "p" + std::to_string(p) + ":" + std::to_string(c) + " ";
    report(5, squash_ok && uniform_ok,
           "adaptive degrees " + bars + "(contiguous width " + std::to_string(width) +
               " >= 3); quasi-uniform single bar at 6");
}

// 6. NIST peak at alpha=1000, N ~ 2470, g=8: the peak-adapted adaptive run
//    beats the quasi-uniform fixed run in max error and in nnz.
void criterion6() {
    const ProblemSpec prob = problem_nist_peak(1000.0, {0.5, 0.5});
    GeneratorSpec spec;
    spec.kind = NodeKind::peak_adapted;
    spec.n_target = 2470;
    spec.domain = prob.domain;
    spec.peak = PeakParams{{0.5, 0.5}, 2.0 * std::sqrt(1.0 / 2470) / 12.0,
                           2.0 * std::sqrt(1.0 / 2470), 0.2};
    spec.seed = 1;
    const NodeSet peak_nodes = generate_nodes(spec);
    const NodeSet halton_nodes = generate_nodes(
        {NodeKind::halton, static_cast<int>(peak_nodes.size()), prob.domain, {}, 1});

    AdaptivityConfig cfg;
    cfg.global_order = 8;
    std::vector<double> exact_peak(peak_nodes.size()), exact_halton(halton_nodes.size());
    for (std::size_t i = 0; i < peak_nodes.size(); ++i)
        exact_peak[i] = prob.exact_u(peak_nodes.points[i]);
    for (std::size_t i = 0; i < halton_nodes.size(); ++i)
        exact_halton[i] = prob.exact_u(halton_nodes.points[i]);

    const PdeSystem fixed = assemble_pde_system(halton_nodes, prob, cfg, false);
    const SolveReport fixed_sol = solve(fixed.matrix, fixed.rhs);
    const double err_fixed = error_norms(fixed_sol.solution, exact_halton).max_abs;

    const PdeSystem adaptive = assemble_pde_system(peak_nodes, prob, cfg, true);
    const SolveReport adaptive_sol = solve(adaptive.matrix, adaptive.rhs);
    const double err_adaptive = error_norms(adaptive_sol.solution, exact_peak).max_abs;

    const bool pass =
        err_adaptive < err_fixed && adaptive.matrix.nnz() < fixed.matrix.nnz();
    char buf[220];
    std::snprintf(buf, sizeof buf,
                  "nist-peak N=%zu g=8: peak-adapted err %.3e < quasi-uniform %.3e; "
                  "nnz %zu < %zu",
                  peak_nodes.size(), err_adaptive, err_fixed, adaptive.matrix.nnz(),
                  fixed.matrix.nnz());
    report(6, pass, buf);
}

// 7. Degree-selection unit behavior and the polynomial-count table.
void criterion7() {
    AdaptivityConfig cfg;
    cfg.global_order = 4;
    bool pass = select_degree(1.0, 1.0, cfg, 2) == 5;
    pass = pass && select_degree(10.0, 1.0, cfg, 2) == 6;
    pass = pass && select_degree(0.1, 1.0, cfg, 2) == 4;
    const std::array<long long, 6> expected = {1, 3, 6, 10, 15, 21};
    for (int p = 0; p <= 5; ++p) pass = pass && basis_count(p, 2) == expected[p];
    report(7, pass,
           "select_degree(h_e,h_e)=5, (10h_e)=6, (0.1h_e)=4; n_p(0..5) = {1,3,6,10,15,21}");
}

// 8. Geometry oracles: knn and separation match brute force exactly, fill
//    distance within 5%, on 100 random sets with N <= 500.
void criterion8() {
    std::mt19937_64 rng(321);
    bool pass = true;
    std::string fail_detail;
    for (int trial = 0; trial < 100 && pass; ++trial) {
        std::uniform_int_distribution<int> size_dist(10, 500);
        const int n = size_dist(rng);
        NodeSet ns;
        ns.domain = {0, 0, 1, 1};
        std::uniform_real_distribution<double> coord(0.0, 1.0);
        const bool clustered = trial % 4 == 0;
        for (int i = 0; i < n; ++i) {
            Point p{coord(rng), coord(rng)};
            if (clustered && i % 2 == 0) {
                p.x *= 0.15;
                p.y *= 0.15;
            }
            ns.points.push_back(p);
            ns.segment.push_back(kInteriorSegment);
        }

        // knn against a linear scan
        SpatialIndex index(ns.points);
        std::uniform_int_distribution<int> k_dist(1, std::min(n, 30));
        const Point q{coord(rng), coord(rng)};
        const int k = k_dist(rng);
        std::vector<std::pair<double, int>> ranked(n);
        for (int i = 0; i < n; ++i) ranked[i] = {dist2(ns.points[i], q), i};
        std::sort(ranked.begin(), ranked.end());
        const auto got = index.knn(q, k);
        for (int i = 0; i < k; ++i)
            if (got[i] != ranked[i].second) {
                pass = false;
                fail_detail = "knn mismatch at trial " + std::to_string(trial);
            }

        // separation against the O(N^2) scan
        double min_d2 = 1e300;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                min_d2 = std::min(min_d2, dist2(ns.points[i], ns.points[j]));
        if (separation_distance(ns) != 0.5 * std::sqrt(min_d2)) {
            pass = false;
            fail_detail = "separation mismatch at trial " + std::to_string(trial);
        }

        // fill distance within 5% of an independent dense scan (same grid)
        if (trial % 10 == 0) {
            const int res = 101;
            double best = 0.0;
            for (int j = 0; j < res; ++j)
                for (int i = 0; i < res; ++i) {
                    const Point g{double(i) / (res - 1), double(j) / (res - 1)};
                    double nn = 1e300;
                    for (const Point& p : ns.points) nn = std::min(nn, dist2(p, g));
                    best = std::max(best, nn);
                }
            const double brute = std::sqrt(best);
            const double fast = fill_distance(ns, res);
            if (std::abs(fast - brute) > 0.05 * brute) {
                pass = false;
                fail_detail = "fill mismatch at trial " + std::to_string(trial);
            }
            const double rho = mesh_ratio(ns, res);
            if (rho < 0.9) {
                pass = false;
                fail_detail = "mesh ratio below 0.9 at trial " + std::to_string(trial);
            }
        }
    }
    report(8, pass,
           pass ? "knn/separation exact, fill distance within 5%, on 100 random sets"
                : fail_detail);
}

// 9. Property suite: scaling law, translation invariance, interior row sums,
//    constraint residuals, over 100 randomized instances.
void criterion9() {
    std::mt19937_64 rng(555);
    bool pass = true;
    std::string fail_detail;
    std::uniform_int_distribution<int> degree(2, 5);
    for (int trial = 0; trial < 100 && pass; ++trial) {
        const int p = degree(rng);
        const auto stencil = scattered_stencil(rng, static_cast<int>(stencil_size(p, 2)));
        const OperatorSpec op = (trial % 3 == 0)   ? OperatorSpec::dx()
                                : (trial % 3 == 1) ? OperatorSpec::laplacian()
                                                   : OperatorSpec::identity();
        const int k = op.order();
        const StencilWeights base = compute_weights(stencil, op, p);

        // scaling law s^{-k}
        std::uniform_real_distribution<double> scale_dist(0.02, 5.0);
        const double s = scale_dist(rng);
        auto scaled = stencil;
        for (auto& pt : scaled) {
            pt.x *= s;
            pt.y *= s;
        }
        const StencilWeights sw_scaled = compute_weights(scaled, op, p);
        const double factor = std::pow(s, -k);
        for (std::size_t i = 0; i < base.weights.size(); ++i) {
            const double expect = base.weights[i] * factor;
            if (std::abs(sw_scaled.weights[i] - expect) >
                1e-9 * std::max(std::abs(expect), std::abs(factor))) {
                pass = false;
                fail_detail = "scaling law failed at trial " + std::to_string(trial);
            }
        }

        // translation invariance
        std::uniform_real_distribution<double> shift_dist(-2.0, 2.0);
        const Point t{shift_dist(rng), shift_dist(rng)};
        auto shifted = stencil;
        for (auto& pt : shifted) {
            pt.x += t.x;
            pt.y += t.y;
        }
        const StencilWeights sw_shifted = compute_weights(shifted, op, p);
        double wmax = 0;
        for (double w : base.weights) wmax = std::max(wmax, std::abs(w));
        for (std::size_t i = 0; i < base.weights.size(); ++i)
            if (std::abs(sw_shifted.weights[i] - base.weights[i]) > 1e-10 * wmax) {
                pass = false;
                fail_detail = "translation invariance failed at trial " + std::to_string(trial);
            }

        // constraint-block residual
        const MonomialBasis basis = MonomialBasis::for_degree(p);
        for (const auto& e : basis.exponents) {
            double acc = 0.0;
            for (std::size_t i = 0; i < stencil.size(); ++i)
                acc += base.weights[i] * monomial_eval(e, stencil[i]);
            if (std::abs(acc - monomial_apply(op, e, stencil[0])) > 1e-9 * (1.0 + wmax)) {
                pass = false;
                fail_detail = "constraint residual failed at trial " + std::to_string(trial);
            }
        }
    }

    // interior row sums on an assembled operator
    if (pass) {
        const NodeSet nodes = generate_nodes({NodeKind::halton, 400, {-1, -1, 1, 1}, {}, 6});
        AdaptivityConfig cfg;
        cfg.global_order = 3;
        const DiffMatrixResult diff =
            build_diff_matrix(nodes, OperatorSpec::laplacian(), cfg, true);
        const auto offsets = diff.matrix.row_offsets();
        const auto vals = diff.matrix.values();
        for (std::size_t r = 0; r < nodes.size(); ++r) {
            double sum = 0, mx = 0;
            for (std::size_t j = offsets[r]; j < offsets[r + 1]; ++j) {
                sum += vals[j];
                mx = std::max(mx, std::abs(vals[j]));
            }
            if (mx > 0 && std::abs(sum) > 1e-8 * mx) {
                pass = false;
                fail_detail = "interior row sum failed at row " + std::to_string(r);
            }
        }
    }
    report(9, pass,
           pass ? "scaling s^{-k}, translation invariance, row sums, constraint residuals "
                  "over 100 instances"
                : fail_detail);
}

} // namespace

int main(int argc, char** argv) {
    const int which = argc > 1 ? std::atoi(argv[1]) : 0;
    using CriterionFn = void (*)();
    const std::array<CriterionFn, 9> criteria = {criterion1, criterion2, criterion3,
                                                 criterion4, criterion5, criterion6,
                                                 criterion7, criterion8, criterion9};
    try {
        if (which == 0) {
            for (const auto& fn : criteria) fn();
        } else if (which >= 1 && which <= 9) {
            criteria[which - 1]();
        } else {
            std::fprintf(stderr, "usage: acceptance [1..9]\n");
            return 2;
        }
    } catch (const std::exception& e) {
        std::printf("[FAIL] criterion %d: unhandled error: %s\n", which, e.what());
        return 1;
    }
    return g_failures == 0 ? 0 : 1;
}
