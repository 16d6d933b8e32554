#include "runner.hpp"

#include "error.hpp"
#include "solver.hpp"
#include "weights.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace rbffd {

using nlohmann::json;

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json histogram_to_json(const std::map<int, int>& hist) {
    json h = json::object();
    for (const auto& [deg, count] : hist) h[std::to_string(deg)] = count;
    return h;
}

} // namespace

void RunConfig::validate() const {
    if (problem != "section4" && problem != "nist-peak")
        throw Error(errc::config, "unknown problem: " + problem);
    if (n_values.empty()) throw Error(errc::config, "N list is empty");
    for (std::size_t i = 0; i + 1 < n_values.size(); ++i)
        if (n_values[i] >= n_values[i + 1])
            throw Error(errc::config, "N list must be strictly increasing");
    for (int n : n_values)
        if (n < 9) throw Error(errc::config, "N must be >= 9");
    if (global_order < 1 || global_order > 10)
        throw Error(errc::config, "g must be in [1, 10]");
    if (operator_order != 2)
        throw Error(errc::config, "only second-order problems are available (k = 2)");
    if (phs_exponent < 3 || phs_exponent % 2 == 0)
        throw Error(errc::config, "PHS exponent must be odd and >= 3");
    if (p_min < 0 || p_max < p_min) throw Error(errc::config, "bad p_min/p_max");
    if (problem == "nist-peak" && alpha <= 0) throw Error(errc::config, "alpha must be positive");
}

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(errc::config, std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    try {
        if (j.contains("problem")) cfg.problem = j.at("problem").get<std::string>();
        if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
        if (j.contains("peak_center")) {
            const auto& c = j.at("peak_center");
            cfg.peak_center = {c.at(0).get<double>(), c.at(1).get<double>()};
        }
        if (j.contains("flip_sign")) cfg.flip_sign = j.at("flip_sign").get<bool>();
        if (j.contains("generator")) {
            const auto& gen = j.at("generator");
            cfg.generator = parse_node_kind(gen.at("kind").get<std::string>());
            if (gen.contains("params")) {
                const auto& p = gen.at("params");
                PeakParams pp;
                pp.peak = {p.at("x_peak").at(0).get<double>(), p.at("x_peak").at(1).get<double>()};
                pp.r_min = p.at("r_min").get<double>();
                pp.r_max = p.at("r_max").get<double>();
                pp.radius = p.value("R", 0.25);
                cfg.peak_params = pp;
            }
        }
        if (j.contains("N")) {
            if (j.at("N").is_array())
                cfg.n_values = j.at("N").get<std::vector<int>>();
            else
                cfg.n_values = {j.at("N").get<int>()};
        }
        if (j.contains("g")) cfg.global_order = j.at("g").get<int>();
        if (j.contains("k")) cfg.operator_order = j.at("k").get<int>();
        if (j.contains("m")) cfg.phs_exponent = j.at("m").get<int>();
        if (j.contains("adaptive")) cfg.adaptive = j.at("adaptive").get<bool>();
        if (j.contains("p_min")) cfg.p_min = j.at("p_min").get<int>();
        if (j.contains("p_max")) cfg.p_max = j.at("p_max").get<int>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(errc::config, std::string("bad config value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

std::string run_config_to_json(const RunConfig& cfg) {
    json j{{"problem", cfg.problem},
           {"generator", {{"kind", node_kind_name(cfg.generator)}}},
           {"N", cfg.n_values},
           {"g", cfg.global_order},
           {"k", cfg.operator_order},
           {"m", cfg.phs_exponent},
           {"adaptive", cfg.adaptive},
           {"p_min", cfg.p_min},
           {"p_max", cfg.p_max},
           {"seed", cfg.seed},
           {"out_dir", cfg.out_dir.string()}};
    if (cfg.problem == "nist-peak") {
        j["alpha"] = cfg.alpha;
        j["peak_center"] = {cfg.peak_center.x, cfg.peak_center.y};
    }
    if (cfg.peak_params) {
        j["generator"]["params"] = {{"x_peak", {cfg.peak_params->peak.x, cfg.peak_params->peak.y}},
                                    {"r_min", cfg.peak_params->r_min},
                                    {"r_max", cfg.peak_params->r_max},
                                    {"R", cfg.peak_params->radius}};
    }
    return j.dump();
}

std::string record_to_json(const ConvergenceRecord& r) {
    json j{{"N", r.n},           {"h_e", r.h_e},       {"nnz", r.nnz},
           {"max_error", r.max_error}, {"rel_l2", r.rel_l2}, {"seconds", r.seconds},
           {"degrees", histogram_to_json(r.degree_histogram)}};
    return j.dump();
}

std::string summary_to_json(const ConvergenceSummary& s) {
    json records = json::array();
    for (const auto& r : s.records) records.push_back(json::parse(record_to_json(r)));
    json j{{"records", records},
           {"slope", s.below_noise_floor ? json() : json(s.slope)},
           {"below_noise_floor", s.below_noise_floor}};
    return j.dump();
}

ProblemSpec resolve_problem(const RunConfig& cfg) {
    if (cfg.problem == "section4") return problem_section4();
    if (cfg.problem == "nist-peak")
        return problem_nist_peak(cfg.alpha, cfg.peak_center, cfg.flip_sign);
    throw Error(errc::config, "unknown problem: " + cfg.problem);
}

NodeSet generate_for_run(const RunConfig& cfg, const ProblemSpec& problem, int n_target) {
    GeneratorSpec spec;
    spec.kind = cfg.generator;
    spec.n_target = n_target;
    spec.domain = problem.domain;
    spec.seed = cfg.seed;
    if (cfg.generator == NodeKind::peak_adapted) {
        if (cfg.peak_params) {
            spec.peak = cfg.peak_params;
        } else {
            // Derive a profile from the problem: densest at the peak, 12x
            // spacing contrast; the generator calibrates the absolute scale.
            PeakParams pp;
            pp.peak = cfg.problem == "nist-peak"
                          ? cfg.peak_center
                          : Point{0.5 * (problem.domain.x0 + problem.domain.x1),
                                  0.5 * (problem.domain.y0 + problem.domain.y1)};
            pp.r_max = 2.0 * std::sqrt(problem.domain.volume() / n_target);
            pp.r_min = pp.r_max / 12.0;
            pp.radius = 0.2 * std::min(problem.domain.width(), problem.domain.height());
            spec.peak = pp;
        }
    }
    return generate_nodes(spec);
}

namespace {

void write_solution_csv(const std::filesystem::path& path, const NodeSet& nodes,
                        std::span<const double> numeric, std::span<const double> exact) {
    std::ofstream out(path);
    if (!out.good()) throw Error(errc::io, "cannot open " + path.string());
    out << "x,y,u_numeric,u_exact,abs_error\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out << format_double(nodes.points[i].x) << ',' << format_double(nodes.points[i].y) << ','
            << format_double(numeric[i]) << ',' << format_double(exact[i]) << ','
            << format_double(std::abs(numeric[i] - exact[i])) << '\n';
    }
    if (!out.good()) throw Error(errc::io, "write failed: " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out.good()) throw Error(errc::io, "cannot open " + path.string());
    out << text;
}

} // namespace

ConvergenceRecord run_solve(const RunConfig& cfg, const ProblemSpec& problem, int n_target,
                            const std::filesystem::path& out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(out_dir);

    const NodeSet nodes = generate_for_run(cfg, problem, n_target);
    AdaptivityConfig acfg;
    acfg.global_order = cfg.global_order;
    acfg.p_min = cfg.p_min;
    acfg.p_max = cfg.p_max;

    const PdeSystem sys =
        assemble_pde_system(nodes, problem, acfg, cfg.adaptive, PhsKernel(cfg.phs_exponent));
    const SolveReport report = solve(sys.matrix, sys.rhs);

    std::vector<double> exact(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) exact[i] = problem.exact_u(nodes.points[i]);
    const ErrorNorms norms = error_norms(report.solution, exact);

    write_solution_csv(out_dir / "solution.csv", nodes, report.solution, exact);
    {
        std::ofstream out(out_dir / "pattern.csv");
        save_pattern_csv(sys.matrix, out);
    }
    {
        std::ofstream out(out_dir / "degrees.csv");
        save_histogram_csv(sys.histogram, out);
    }
    save_nodes_csv(nodes, out_dir / "nodes.csv");

    ConvergenceRecord rec;
    rec.n = static_cast<int>(nodes.size());
    rec.h_e = effective_fill_distance(nodes.domain.volume(), nodes.size(), 2);
    rec.nnz = sys.matrix.nnz();
    rec.max_error = norms.max_abs;
    rec.rel_l2 = norms.rel_l2;
    rec.degree_histogram = sys.histogram.counts;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

ConvergenceRecord run_solve(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.n_values.size() != 1)
        throw Error(errc::config, "solve expects a single N (use converge for sweeps)");
    const ProblemSpec problem = resolve_problem(cfg);
    return run_solve(cfg, problem, cfg.n_values[0], cfg.out_dir);
}

namespace {

void write_convergence_csv(const std::filesystem::path& path, const ConvergenceSummary& s) {
    std::ofstream out(path);
    if (!out.good()) throw Error(errc::io, "cannot open " + path.string());
    out << "N,h_e,nnz,max_error,rel_l2,seconds,slope\n";
    for (const auto& r : s.records) {
        out << r.n << ',' << format_double(r.h_e) << ',' << r.nnz << ','
            << format_double(r.max_error) << ',' << format_double(r.rel_l2) << ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", r.seconds);
        out << buf << ',' << (s.below_noise_floor ? "nan" : format_double(s.slope)) << '\n';
    }
}

} // namespace

ConvergenceSummary run_convergence(const RunConfig& cfg, const ProblemSpec& problem) {
    cfg.validate();
    ConvergenceSummary summary;
    for (int n : cfg.n_values) {
        char label[32];
        std::snprintf(label, sizeof label, "N%06d", n);
        summary.records.push_back(run_solve(cfg, problem, n, cfg.out_dir / label));
    }

    double max_err = 0.0;
    for (const auto& r : summary.records) max_err = std::max(max_err, r.max_error);
    summary.below_noise_floor = max_err < 1e-9;

    // least-squares slope of log10(max_error) against log10(h_e)
    if (!summary.below_noise_floor && summary.records.size() >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(summary.records.size());
        for (const auto& r : summary.records) {
            const double x = std::log10(r.h_e);
            const double y = std::log10(std::max(r.max_error, 1e-300));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        summary.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    }

    write_convergence_csv(cfg.out_dir / "convergence.csv", summary);
    return summary;
}

ConvergenceSummary run_convergence(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.n_values.size() < 3)
        throw Error(errc::config, "converge expects at least 3 values in N");
    const ProblemSpec problem = resolve_problem(cfg);
    return run_convergence(cfg, problem);
}

} // namespace rbffd
