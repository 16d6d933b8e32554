#pragma once

#include "assembly.hpp"
#include "geometry.hpp"
#include "problems.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rbffd {

/// One experiment description: problem, node generator, sweep sizes, order.
struct RunConfig {
    std::string problem = "section4"; // "section4" | "nist-peak"
    double alpha = 1000.0;            // nist-peak only
    Point peak_center{0.5, 0.5};      // nist-peak only
    bool flip_sign = false;

    NodeKind generator = NodeKind::tensor_grid;
    std::optional<PeakParams> peak_params; // peak-adapted; derived if absent

    std::vector<int> n_values;
    int global_order = 4; // g
    int operator_order = 2;
    int phs_exponent = 3;
    bool adaptive = false;
    int p_min = 2;
    int p_max = 10;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "out";

    void validate() const;
};

RunConfig parse_run_config(const std::string& json_text);
std::string run_config_to_json(const RunConfig& config);

struct ConvergenceRecord {
    int n = 0; // actual node count
    double h_e = 0.0;
    std::size_t nnz = 0;
    double max_error = 0.0;
    double rel_l2 = 0.0;
    double seconds = 0.0;
    std::map<int, int> degree_histogram;
};

std::string record_to_json(const ConvergenceRecord& record);

struct ConvergenceSummary {
    std::vector<ConvergenceRecord> records;
    double slope = 0.0; // log(max_error) vs log(h_e) least-squares fit
    bool below_noise_floor = false;
};

std::string summary_to_json(const ConvergenceSummary& summary);

/// Resolves the ProblemSpec named by the config.
ProblemSpec resolve_problem(const RunConfig& config);

/// Generates nodes for one sweep point, deriving and calibrating
/// peak-adapted parameters when the config leaves them out.
NodeSet generate_for_run(const RunConfig& config, const ProblemSpec& problem, int n_target);

/// Full pipeline for one N: generate, assemble, solve, error norms; writes
/// solution.csv, pattern.csv, degrees.csv under out_dir.
ConvergenceRecord run_solve(const RunConfig& config, const ProblemSpec& problem, int n_target,
                            const std::filesystem::path& out_dir);
ConvergenceRecord run_solve(const RunConfig& config);

/// Runs every N in the config and fits the convergence slope; writes
/// convergence.csv plus per-N subdirectories.
ConvergenceSummary run_convergence(const RunConfig& config);
ConvergenceSummary run_convergence(const RunConfig& config, const ProblemSpec& problem);

} // namespace rbffd
