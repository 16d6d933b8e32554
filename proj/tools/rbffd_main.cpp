// Command-line front end. Talks to the library exclusively through the
// C API in rbffd/rbffd.h.
#include <rbffd/rbffd.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

int exit_code_for(rbffd_status status) {
    switch (status) {
    case RBFFD_OK: return kExitOk;
    case RBFFD_ERR_CONFIG:
    case RBFFD_ERR_INVALID_ARGUMENT:
    case RBFFD_ERR_IO: return kExitConfig;
    default: return kExitNumerical;
    }
}

struct Overrides {
    std::string config_path;
    std::string problem;
    std::vector<int> n_values;
    std::optional<int> g;
    std::optional<bool> adaptive;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string generator;
    std::optional<int> m;
};

json load_config(const Overrides& ov) {
    json cfg = json::object();
    if (!ov.config_path.empty()) {
        std::ifstream in(ov.config_path);
        if (!in.good()) {
            std::cerr << "error: cannot open config file " << ov.config_path << '\n';
            std::exit(kExitConfig);
        }
        try {
            in >> cfg;
        } catch (const json::exception& e) {
            std::cerr << "error: bad config JSON: " << e.what() << '\n';
            std::exit(kExitConfig);
        }
    }
    if (!ov.problem.empty()) cfg["problem"] = ov.problem;
    if (!ov.n_values.empty()) cfg["N"] = ov.n_values;
    if (ov.g) cfg["g"] = *ov.g;
    if (ov.adaptive) cfg["adaptive"] = *ov.adaptive;
    if (ov.seed) cfg["seed"] = *ov.seed;
    if (ov.m) cfg["m"] = *ov.m;
    if (!ov.out_dir.empty()) cfg["out_dir"] = ov.out_dir;
    if (!ov.generator.empty()) cfg["generator"]["kind"] = ov.generator;
    return cfg;
}

void add_override_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("-c,--config", ov.config_path, "JSON config file");
    cmd->add_option("--problem", ov.problem, "section4 | nist-peak");
    cmd->add_option("--N", ov.n_values, "node counts");
    cmd->add_option("--g", ov.g, "requested global convergence order");
    cmd->add_option("--adaptive", ov.adaptive, "per-stencil degree adaptivity");
    cmd->add_option("--seed", ov.seed, "random seed");
    cmd->add_option("--m", ov.m, "PHS exponent (odd, >= 3)");
    cmd->add_option("--out", ov.out_dir, "output directory");
    cmd->add_option("--generator", ov.generator,
                    "tensor-grid | halton | sine-squash | peak-adapted");
}

int report_failure(rbffd_status status, const char* stage) {
    std::cerr << "error (" << stage << "): " << rbffd_last_error() << '\n';
    return exit_code_for(status);
}

int cmd_solve(const Overrides& ov) {
    const std::string cfg = load_config(ov).dump();
    char* record = nullptr;
    const rbffd_status status = rbffd_run_solve(cfg.c_str(), &record);
    if (status != RBFFD_OK) return report_failure(status, "solve");
    const json rec = json::parse(record);
    rbffd_string_free(record);
    std::cout << "N=" << rec["N"] << " h_e=" << rec["h_e"] << " nnz=" << rec["nnz"]
              << " max_error=" << rec["max_error"] << " rel_l2=" << rec["rel_l2"]
              << " seconds=" << rec["seconds"] << '\n';
    return kExitOk;
}

int cmd_converge(const Overrides& ov) {
    const std::string cfg = load_config(ov).dump();
    char* summary = nullptr;
    const rbffd_status status = rbffd_run_convergence(cfg.c_str(), &summary);
    if (status != RBFFD_OK) return report_failure(status, "converge");
    const json s = json::parse(summary);
    rbffd_string_free(summary);
    for (const auto& rec : s["records"]) {
        std::cout << "N=" << rec["N"] << " h_e=" << rec["h_e"] << " nnz=" << rec["nnz"]
                  << " max_error=" << rec["max_error"] << '\n';
    }
    if (s["below_noise_floor"].get<bool>())
        std::cout << "slope: below noise floor\n";
    else
        std::cout << "slope=" << s["slope"] << '\n';
    return kExitOk;
}

int cmd_nodes(const Overrides& ov, const std::string& out_file, const std::string& params_json,
              const std::vector<double>& domain_flat) {
    const json cfg = load_config(ov);
    const std::string kind = cfg.value("generator", json::object()).value("kind", "tensor-grid");
    const int n = [&] {
        if (!cfg.contains("N")) return 2500;
        return cfg["N"].is_array() ? cfg["N"][0].get<int>() : cfg["N"].get<int>();
    }();
    const std::uint64_t seed = cfg.value("seed", 0);

    double domain[4] = {-1.0, -1.0, 1.0, 1.0};
    if (!domain_flat.empty()) {
        if (domain_flat.size() != 4) {
            std::cerr << "error: --domain needs x0 y0 x1 y1\n";
            return kExitConfig;
        }
        for (int i = 0; i < 4; ++i) domain[i] = domain_flat[i];
    } else if (cfg.value("problem", "section4") == "nist-peak") {
        domain[0] = domain[1] = 0.0;
        domain[2] = domain[3] = 1.0;
    }

    rbffd_nodeset* nodes = nullptr;
    const rbffd_status status = rbffd_nodeset_generate(
        kind.c_str(), n, domain, params_json.empty() ? nullptr : params_json.c_str(), seed,
        &nodes);
    if (status != RBFFD_OK) return report_failure(status, "nodes");
    const rbffd_status save = rbffd_nodeset_save_csv(nodes, out_file.c_str());
    const int64_t count = rbffd_nodeset_size(nodes);
    rbffd_nodeset_destroy(nodes);
    if (save != RBFFD_OK) return report_failure(save, "nodes");
    std::cout << "wrote " << count << " nodes (" << kind << ") to " << out_file << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive RBF-FD (PHS+poly) solver and benchmark runner"};
    app.require_subcommand(1);

    Overrides solve_ov, converge_ov, nodes_ov;
    std::string nodes_out = "nodes.csv";
    std::string nodes_params;
    std::vector<double> nodes_domain;

    CLI::App* solve = app.add_subcommand("solve", "solve one problem instance");
    add_override_flags(solve, solve_ov);

    CLI::App* converge = app.add_subcommand("converge", "run a convergence sweep over N");
    add_override_flags(converge, converge_ov);

    CLI::App* nodes = app.add_subcommand("nodes", "generate a node set and write it as CSV");
    add_override_flags(nodes, nodes_ov);
    nodes->add_option("--out-file", nodes_out, "output CSV path");
    nodes->add_option("--params", nodes_params, "peak-adapted params JSON");
    nodes->add_option("--domain", nodes_domain, "domain rectangle: x0 y0 x1 y1")->expected(4);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (solve->parsed()) return cmd_solve(solve_ov);
    if (converge->parsed()) return cmd_converge(converge_ov);
    if (nodes->parsed()) return cmd_nodes(nodes_ov, nodes_out, nodes_params, nodes_domain);
    return kExitConfig;
}
