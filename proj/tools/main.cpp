#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddro/patrol.hpp"
#include "ddro/risk.hpp"
#include "ddro/serialization.hpp"
#include "ddro/solver.hpp"
#include "ddro/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitVerifyFailed = 3;

struct RunConfig {
    std::string graph_path;
    std::string ball = "dr";
    double radius = 1.0;
    std::vector<double> radii;
    std::vector<double> design_betas = {0.5, 0.75};
    std::vector<double> eval_betas = {0.0, 0.5, 0.75};
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    ddro::SolverConfig solver;
};

unsigned thread_budget() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DDRO_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

// JSON config file values become defaults; explicitly passed flags win.
void apply_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ddro::InvalidArgument("cannot open config file '" + path + "'");
    json j;
    in >> j;
    if (j.contains("graph")) cfg.graph_path = j["graph"].get<std::string>();
    if (j.contains("ball")) cfg.ball = j["ball"].get<std::string>();
    if (j.contains("radius")) cfg.radius = j["radius"].get<double>();
    if (j.contains("radii")) cfg.radii = j["radii"].get<std::vector<double>>();
    if (j.contains("design_betas"))
        cfg.design_betas = j["design_betas"].get<std::vector<double>>();
    if (j.contains("eval_betas")) cfg.eval_betas = j["eval_betas"].get<std::vector<double>>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("solver")) {
        const json& s = j["solver"];
        if (s.contains("barrier_weight")) cfg.solver.barrier_weight = s["barrier_weight"];
        if (s.contains("barrier_decay")) cfg.solver.barrier_decay = s["barrier_decay"];
        if (s.contains("barrier_rounds")) cfg.solver.barrier_rounds = s["barrier_rounds"];
        if (s.contains("max_iterations")) cfg.solver.max_iterations = s["max_iterations"];
        if (s.contains("gradient_tolerance"))
            cfg.solver.gradient_tolerance = s["gradient_tolerance"];
    }
}

json config_echo(const RunConfig& cfg, const std::string& command) {
    return json{{"command", command},
                {"graph", cfg.graph_path},
                {"ball", cfg.ball},
                {"radius", cfg.radius},
                {"radii", cfg.radii},
                {"design_betas", cfg.design_betas},
                {"eval_betas", cfg.eval_betas},
                {"seed", cfg.seed},
                {"out", cfg.out_dir},
                {"solver",
                 {{"barrier_weight", cfg.solver.barrier_weight},
                  {"barrier_decay", cfg.solver.barrier_decay},
                  {"barrier_rounds", cfg.solver.barrier_rounds},
                  {"max_iterations", cfg.solver.max_iterations},
                  {"gradient_tolerance", cfg.solver.gradient_tolerance}}}};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ddro::InvalidArgument("cannot write '" + path.string() + "'");
    out << content;
}

void validate_betas(const std::vector<double>& betas) {
    for (double b : betas) {
        if (!(b >= 0.0) || !(b < 1.0)) {
            throw ddro::InvalidArgument("beta " + std::to_string(b) + " outside [0, 1)");
        }
    }
}

std::string patrol_summary_csv(double beta_design, bool has_design,
                               const ddro::PatrolResult& result) {
    std::string csv = "beta_design,beta_eval,cvar,mean,std\n";
    for (const auto& row : result.table) {
        csv += has_design ? ddro::format_double(beta_design) : std::string();
        csv += ',';
        csv += ddro::format_double(row.beta_eval);
        csv += ',';
        csv += ddro::format_double(row.cvar);
        csv += ',';
        csv += ddro::format_double(result.mean);
        csv += ',';
        csv += ddro::format_double(result.stddev);
        csv += '\n';
    }
    return csv;
}

int cmd_solve(const RunConfig& cfg) {
    if (cfg.graph_path.empty()) throw ddro::InvalidArgument("solve requires --graph");
    if (cfg.ball != "soc" && !(cfg.radius > 0.0)) {
        throw ddro::InvalidArgument("radius must be positive");
    }
    validate_betas(cfg.eval_betas);
    const ddro::Graph graph = ddro::Graph::load(cfg.graph_path);

    ddro::PatrolResult result;
    double beta_design = 0.0;
    bool has_design = true;
    if (cfg.ball == "soc") {
        result = ddro::patrol_soc(graph, cfg.solver, cfg.eval_betas);
    } else {
        const ddro::BallKind kind = ddro::ball_kind_from_string(cfg.ball);
        if (kind == ddro::BallKind::TotalVariation) {
            throw ddro::InvalidArgument("solve supports the l2 and dr balls");
        }
        result = ddro::patrol_ddro(graph, kind, cfg.radius, cfg.solver, cfg.eval_betas);
        if (kind == ddro::BallKind::DensityRatio) {
            beta_design = cfg.radius / (1.0 + cfg.radius);
        } else {
            has_design = false;
        }
    }

    fs::create_directories(cfg.out_dir);
    json report = ddro::to_json(result.report);
    report["mean"] = result.mean;
    report["std"] = result.stddev;
    report["costs"] = result.costs;
    write_file(fs::path(cfg.out_dir) / "report.json", report.dump(2) + "\n");
    write_file(fs::path(cfg.out_dir) / "history.csv", ddro::history_csv(result.report));
    write_file(fs::path(cfg.out_dir) / "summary.csv",
               patrol_summary_csv(beta_design, has_design, result));
    write_file(fs::path(cfg.out_dir) / "config_used.json",
               config_echo(cfg, "solve").dump(2) + "\n");
    std::cout << (result.report.converged ? "converged" : "not converged") << ", objective "
              << ddro::format_double(result.report.objective) << "\n";
    return result.report.converged ? kExitOk : kExitNotConverged;
}

int cmd_pareto(const RunConfig& cfg) {
    if (cfg.graph_path.empty()) throw ddro::InvalidArgument("pareto requires --graph");
    if (cfg.radii.empty()) throw ddro::InvalidArgument("pareto requires a non-empty radii list");
    const ddro::Graph graph = ddro::Graph::load(cfg.graph_path);
    const ddro::HittingTimeCost model(graph);
    const ddro::ReferenceDistribution ref =
        ddro::ReferenceDistribution::uniform(graph.node_count());
    const auto points =
        ddro::pareto_sweep(model, ref, cfg.radii, cfg.solver, thread_budget());

    std::string csv = "c,mean,std,objective,converged\n";
    for (const auto& pt : points) {
        csv += ddro::format_double(pt.c);
        csv += ',';
        if (pt.failed) {
            csv += "nan,nan,nan,error\n";
            continue;
        }
        csv += ddro::format_double(pt.mean);
        csv += ',';
        csv += ddro::format_double(pt.stddev);
        csv += ',';
        csv += ddro::format_double(pt.objective);
        csv += ',';
        csv += pt.converged ? "true" : "false";
        csv += '\n';
    }
    fs::create_directories(cfg.out_dir);
    write_file(fs::path(cfg.out_dir) / "pareto.csv", csv);
    write_file(fs::path(cfg.out_dir) / "config_used.json",
               config_echo(cfg, "pareto").dump(2) + "\n");
    std::cout << "pareto sweep: " << points.size() << " points\n";
    return kExitOk;
}

int cmd_cvar_table(const RunConfig& cfg) {
    if (cfg.graph_path.empty()) throw ddro::InvalidArgument("cvar-table requires --graph");
    validate_betas(cfg.design_betas);
    validate_betas(cfg.eval_betas);
    const ddro::Graph graph = ddro::Graph::load(cfg.graph_path);

    struct Row {
        double beta_design;
        ddro::PatrolResult result;
    };
    std::vector<double> designs = {0.0};  // SOC baseline first
    designs.insert(designs.end(), cfg.design_betas.begin(), cfg.design_betas.end());
    std::vector<Row> rows(designs.size());

    const unsigned threads = std::min<unsigned>(thread_budget(),
                                                static_cast<unsigned>(designs.size()));
    std::vector<std::thread> pool;
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::string> errors;
    const auto run_row = [&](std::size_t k) {
        rows[k].beta_design = designs[k];
        if (designs[k] == 0.0) {
            rows[k].result = ddro::patrol_soc(graph, cfg.solver, cfg.eval_betas);
        } else {
            const double c = designs[k] / (1.0 - designs[k]);
            rows[k].result = ddro::patrol_ddro(graph, ddro::BallKind::DensityRatio, c,
                                               cfg.solver, cfg.eval_betas);
        }
    };
    if (threads <= 1) {
        for (std::size_t k = 0; k < designs.size(); ++k) run_row(k);
    } else {
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&]() {
                while (true) {
                    std::size_t k;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= rows.size()) return;
                        k = next++;
                    }
                    try {
                        run_row(k);
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(mu);
                        errors.push_back(e.what());
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (!errors.empty()) throw ddro::Error(errors.front());
    }

    std::string csv = "beta_design,beta_eval,cvar,mean,std\n";
    for (const auto& row : rows) {
        for (const auto& entry : row.result.table) {
            csv += ddro::format_double(row.beta_design);
            csv += ',';
            csv += ddro::format_double(entry.beta_eval);
            csv += ',';
            csv += ddro::format_double(entry.cvar);
            csv += ',';
            csv += ddro::format_double(row.result.mean);
            csv += ',';
            csv += ddro::format_double(row.result.stddev);
            csv += '\n';
        }
    }
    fs::create_directories(cfg.out_dir);
    write_file(fs::path(cfg.out_dir) / "table.csv", csv);
    write_file(fs::path(cfg.out_dir) / "config_used.json",
               config_echo(cfg, "cvar-table").dump(2) + "\n");
    std::cout << "cvar table: " << rows.size() << " designs x " << cfg.eval_betas.size()
              << " levels\n";
    return kExitOk;
}

int cmd_verify(const RunConfig& cfg, bool quick, bool corrupt_gradient) {
    ddro::VerifyOptions options;
    options.seed = cfg.seed;
    options.quick = quick;
    options.corrupt_gradient = corrupt_gradient;
    const auto results = ddro::run_verification(options);

    std::string csv = "check,pass,detail\n";
    std::string first_failure;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
        if (!r.detail.empty()) std::cout << ": " << r.detail;
        std::cout << "\n";
        std::string detail = r.detail;
        for (auto& ch : detail) {
            if (ch == ',' || ch == '\n') ch = ';';
        }
        csv += r.name;
        csv += ',';
        csv += r.pass ? "true" : "false";
        csv += ',';
        csv += detail;
        csv += '\n';
        if (!r.pass && first_failure.empty()) first_failure = r.name;
    }
    fs::create_directories(cfg.out_dir);
    write_file(fs::path(cfg.out_dir) / "verify.csv", csv);
    if (!first_failure.empty()) {
        std::cerr << "verification failed: " << first_failure << "\n";
        return kExitVerifyFailed;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    // The config file provides defaults; flags parsed below override them.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_config_file(argv[i + 1], cfg);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitInputError;
            }
        }
    }

    CLI::App app{"Discrete distributionally robust optimization over weighted-L2 and "
                 "density-ratio balls"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override it)");

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--graph", cfg.graph_path, "graph edge-list file");
        sub->add_option("--seed", cfg.seed, "RNG seed");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--barrier-weight", cfg.solver.barrier_weight, "log-barrier weight");
        sub->add_option("--barrier-rounds", cfg.solver.barrier_rounds, "continuation rounds");
        sub->add_option("--max-iterations", cfg.solver.max_iterations, "iterations per round");
        sub->add_option("--gradient-tolerance", cfg.solver.gradient_tolerance,
                        "projected-gradient stop tolerance");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve one patrol design instance");
    add_common(solve);
    solve->add_option("--ball", cfg.ball, "ball kind: l2, dr or soc baseline");
    solve->add_option("--radius", cfg.radius, "ball radius c");
    solve->add_option("--beta-evals", cfg.eval_betas, "evaluation levels for the summary")
        ->delimiter(',');

    CLI::App* pareto = app.add_subcommand("pareto", "L2-ball sweep over radii");
    add_common(pareto);
    pareto->add_option("--radii", cfg.radii, "ascending radii list")->delimiter(',');

    CLI::App* table = app.add_subcommand("cvar-table", "design-vs-evaluation CVaR table");
    add_common(table);
    table->add_option("--design-betas", cfg.design_betas, "design levels (SOC row added)")
        ->delimiter(',');
    table->add_option("--eval-betas", cfg.eval_betas, "evaluation levels")->delimiter(',');

    bool quick = false;
    bool corrupt_gradient = false;
    CLI::App* verify = app.add_subcommand("verify", "run the verification suites");
    add_common(verify);
    verify->add_flag("--quick", quick, "reduced instance counts");
    verify->add_flag("--corrupt-gradient", corrupt_gradient, "")->group("");  // test hook

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (solve->parsed()) return cmd_solve(cfg);
        if (pareto->parsed()) return cmd_pareto(cfg);
        if (table->parsed()) return cmd_cvar_table(cfg);
        if (verify->parsed()) return cmd_verify(cfg, quick, corrupt_gradient);
    } catch (const ddro::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
