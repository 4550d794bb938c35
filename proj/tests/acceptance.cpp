// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned in code next to its check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ddro/models.hpp"
#include "ddro/patrol.hpp"
#include "ddro/risk.hpp"
#include "ddro/rng.hpp"
#include "ddro/solver.hpp"
#include "ddro/worst_case.hpp"

using namespace ddro;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::vector<double> random_costs(Rng& rng, std::size_t m) {
    std::vector<double> costs(m);
    for (auto& v : costs) v = rng.next_range(0.0, 10.0);
    return costs;
}

// ---- criterion 1: strong duality of the single-layer reformulations ----
Outcome criterion_strong_duality() {
    Rng rng(101);
    const double radii[] = {0.3, 0.7, 1.5};
    double worst_dr_err = 0.0;
    double worst_l2_err = 0.0;
    for (int s = 0; s < 50; ++s) {
        const std::size_t m = 3 + rng.next_index(6);
        const std::vector<double> costs = random_costs(rng, m);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const double c = radii[s % 3];
        Rng oracle_rng(5000 + static_cast<std::uint64_t>(s));
        const double oracle_dr =
            oracle_worst_expectation(costs, Ball(BallKind::DensityRatio, c, ref), oracle_rng);
        const double oracle_l2 =
            oracle_worst_expectation(costs, Ball(BallKind::WeightedL2, c, ref), oracle_rng);
        worst_dr_err = std::max(
            worst_dr_err,
            std::abs(dual_infimum(costs, ref, BallKind::DensityRatio, c) - oracle_dr));
        worst_l2_err = std::max(
            worst_l2_err,
            std::abs(dual_infimum(costs, ref, BallKind::WeightedL2, c) - oracle_l2));
    }
    Outcome out;
    out.pass = worst_dr_err <= 1e-9 && worst_l2_err <= 1e-4;
    out.detail = "max dual-vs-oracle error: dr " + fmt(worst_dr_err) + " (tol 1e-9), l2 " +
                 fmt(worst_l2_err) + " (tol 1e-4), 50 instances";
    return out;
}

// ---- criterion 2: CVaR equivalence of the DR ball ----
Outcome criterion_cvar_equivalence() {
    Rng rng(202);
    double worst_eq = 0.0;
    double worst_sandwich = 0.0;
    double worst_tight = 0.0;
    int tight_cases = 0;
    for (int s = 0; s < 500; ++s) {
        const std::size_t m = 3 + rng.next_index(8);
        const std::vector<double> costs = random_costs(rng, m);
        ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        if (s % 3 == 2) {
            std::vector<double> mass = rng.next_simplex(m);
            for (auto& v : mass) v = std::max(v, 1e-3);
            double total = 0.0;
            for (double v : mass) total += v;
            for (auto& v : mass) v /= total;
            ref = ReferenceDistribution(mass);
        }
        // engineered levels hit the tight case on uniform references
        double beta_value;
        if (s % 3 == 0) {
            const std::size_t k = 1 + rng.next_index(m - 1);
            beta_value = static_cast<double>(k) / static_cast<double>(m);
        } else {
            beta_value = rng.next_range(0.01, 0.95);
        }
        const ProbabilityLevel beta(beta_value);
        const double c = beta_value / (1.0 - beta_value);
        const double worst = worst_expectation_dr(costs, ref, c).value;
        const double tilde = cvar_tilde(costs, ref, beta);
        const double lo = cvar_nonstrict(costs, ref, beta);
        const double hi = cvar_hat(costs, ref, beta);
        worst_eq = std::max(worst_eq, std::abs(worst - tilde));
        worst_sandwich = std::max({worst_sandwich, lo - worst, worst - hi});
        // tightness whenever some support value has P[J >= alpha] = beta,
        // which for these atoms coincides with P[J <= VaR] = beta
        const double var = value_at_risk(costs, ref, beta);
        double tail = 0.0;
        double at_or_below = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (costs[i] >= var) tail += ref[i];
            if (costs[i] <= var) at_or_below += ref[i];
        }
        if (std::abs(at_or_below - beta.beta) <= 1e-12) {
            ++tight_cases;
            worst_tight = std::max(worst_tight, std::abs(worst - hi));
        }
    }
    Outcome out;
    out.pass = worst_eq <= 1e-9 && worst_sandwich <= 1e-9 &&
               worst_tight <= 1e-9 && tight_cases >= 50;
    out.detail = "max |worst - f_beta(VaR)| " + fmt(worst_eq) +
                 ", sandwich slack " + fmt(worst_sandwich) + ", tight cases " +
                 std::to_string(tight_cases) + " max err " + fmt(worst_tight) +
                 " (tol 1e-9), 500 instances";
    return out;
}

// ---- criterion 3: worst-C equivalence at matching radii ----
Outcome criterion_worst_c() {
    Rng rng(303);
    double worst_err = 0.0;
    int checks = 0;
    for (std::size_t m : {4u, 6u, 8u, 10u}) {
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        for (std::size_t count = 1; count < m; ++count) {
            const double c = static_cast<double>(m) / static_cast<double>(count) - 1.0;
            for (int s = 0; s < 100; ++s) {
                const std::vector<double> costs = random_costs(rng, m);
                worst_err = std::max(worst_err,
                                     std::abs(worst_expectation_dr(costs, ref, c).value -
                                              worst_c_average(costs, count)));
                ++checks;
            }
        }
    }
    Outcome out;
    out.pass = worst_err <= 1e-9;
    out.detail = "max error " + fmt(worst_err) + " (tol 1e-9) over " +
                 std::to_string(checks) + " checks";
    return out;
}

// ---- criterion 4: mean+std equivalence of the L2 ball ----
Outcome criterion_mean_std() {
    Rng rng(404);
    double worst_closed = 0.0;
    int hits = 0;
    for (int s = 0; s < 300; ++s) {
        const std::size_t m = 3 + rng.next_index(6);
        const std::vector<double> costs = random_costs(rng, m);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const double c = rng.next_range(0.05, 1.2);
        const double mean = expectation(ref, costs);
        const double sd = std::sqrt(variance(ref, costs));
        const double lo = *std::min_element(costs.begin(), costs.end());
        const double hi = *std::max_element(costs.begin(), costs.end());
        if (!(lo > mean - sd / c && mean + c * sd < hi)) continue;
        ++hits;
        worst_closed = std::max(worst_closed,
                                std::abs(worst_expectation_l2(costs, ref, c).value -
                                         mean_std_objective(costs, ref, c)));
    }

    SolverConfig cfg;
    cfg.gradient_tolerance = 1e-9;
    double worst_solver = 0.0;
    bool conditions_held = true;
    // 1-D toys against a fine x grid
    for (const std::vector<double>& anchors :
         {std::vector<double>{0, 1, 2, 3}, std::vector<double>{0, 1, 2, 7}}) {
        std::vector<std::vector<double>> pts;
        for (double a : anchors) pts.push_back({a});
        const QuadraticCost model(pts);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(anchors.size());
        double grid = 1e300;
        std::vector<double> costs(anchors.size());
        const double span_lo = *std::min_element(anchors.begin(), anchors.end());
        const double span_hi = *std::max_element(anchors.begin(), anchors.end());
        for (double x = span_lo; x <= span_hi; x += 1e-4) {
            for (std::size_t i = 0; i < anchors.size(); ++i) {
                const double d = x - anchors[i];
                costs[i] = d * d;
            }
            grid = std::min(grid, mean_std_objective(costs, ref, 0.5));
        }
        const SolveReport rep = solve_ddro(model, ref, BallKind::WeightedL2, 0.5, cfg);
        worst_solver = std::max(worst_solver, std::abs(rep.objective - grid));
        conditions_held = conditions_held && rep.smooth_conditions_held;
    }
    // 2-D toy against a refined grid
    {
        const std::vector<std::vector<double>> anchors = {{0, 0}, {1, 2}, {3, 1}, {2, 3}};
        const QuadraticCost model(anchors);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
        std::vector<double> costs(4);
        const auto objective_at = [&](double x0, double x1) {
            for (std::size_t i = 0; i < 4; ++i) {
                const double d0 = x0 - anchors[i][0];
                const double d1 = x1 - anchors[i][1];
                costs[i] = d0 * d0 + d1 * d1;
            }
            return mean_std_objective(costs, ref, 0.5);
        };
        double bx = 1.5, by = 1.5, radius = 2.0, grid = 1e300;
        for (int level = 0; level < 6; ++level) {
            const double step = radius / 20.0;
            double nbx = bx, nby = by;
            for (double x0 = bx - radius; x0 <= bx + radius; x0 += step) {
                for (double x1 = by - radius; x1 <= by + radius; x1 += step) {
                    const double v = objective_at(x0, x1);
                    if (v < grid) {
                        grid = v;
                        nbx = x0;
                        nby = x1;
                    }
                }
            }
            bx = nbx;
            by = nby;
            radius = 2.0 * step;
        }
        const SolveReport rep = solve_ddro(model, ref, BallKind::WeightedL2, 0.5, cfg);
        worst_solver = std::max(worst_solver, std::abs(rep.objective - grid));
        conditions_held = conditions_held && rep.smooth_conditions_held;
    }

    Outcome out;
    out.pass = hits >= 30 && worst_closed <= 1e-6 && worst_solver <= 1e-3 && conditions_held;
    out.detail = "closed form max err " + fmt(worst_closed) + " (tol 1e-6, " +
                 std::to_string(hits) + " instances), solver-vs-grid max err " +
                 fmt(worst_solver) + " (tol 1e-3), conditions " +
                 (conditions_held ? "held" : "failed");
    return out;
}

// ---- criterion 5: ball inclusion sampling ----
Outcome criterion_ball_inclusion() {
    Rng rng(505);
    int violations = 0;
    int samples = 0;
    for (std::size_t m : {2u, 4u, 8u}) {
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        for (double c : {0.25, 0.5, 1.0, 2.0}) {
            const Ball l2(BallKind::WeightedL2, c, ref);
            const Ball dr(BallKind::DensityRatio, c, ref);
            const Ball tv(BallKind::TotalVariation, c, ref);
            for (int s = 0; s < 1000; ++s) {
                const DiscreteDistribution p(rng.next_simplex(m));
                ++samples;
                if (ball_contains(l2, p) && !ball_contains(tv, p)) ++violations;
                if (c >= 1.0 && ball_contains(dr, p) &&
                    (!ball_contains(l2, p) || !ball_contains(tv, p))) {
                    ++violations;
                }
            }
        }
    }
    Outcome out;
    out.pass = violations == 0;
    out.detail = std::to_string(violations) + " violations over " + std::to_string(samples) +
                 " Dirichlet samples (zero allowed)";
    return out;
}

// ---- criterion 6: gradient fidelity ----
Outcome criterion_gradients() {
    Rng rng(606);
    const double h = 1e-6;
    double worst_rel = 0.0;
    int points = 0;
    for (int s = 0; s < 100; ++s) {
        const std::size_t m = 2 + rng.next_index(7);
        const std::vector<double> costs = random_costs(rng, m);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const double c = rng.next_range(0.2, 2.0);
        const DualPointL2 l2{rng.next_range(0.2, 3.0), rng.next_range(-1.0, 8.0)};
        const GradientL2 gl = grad_g_l2(costs, ref, c, l2);
        const double fdl = (g_l2(costs, ref, c, {l2.lambda + h, l2.nu}) -
                            g_l2(costs, ref, c, {l2.lambda - h, l2.nu})) /
                           (2.0 * h);
        const double fdn = (g_l2(costs, ref, c, {l2.lambda, l2.nu + h}) -
                            g_l2(costs, ref, c, {l2.lambda, l2.nu - h})) /
                           (2.0 * h);
        worst_rel = std::max(worst_rel,
                             std::abs(gl.dlambda - fdl) /
                                 std::max({1.0, std::abs(gl.dlambda), std::abs(fdl)}));
        worst_rel = std::max(worst_rel, std::abs(gl.dnu - fdn) /
                                            std::max({1.0, std::abs(gl.dnu), std::abs(fdn)}));
        DualPointDR dr;
        dr.nu = rng.next_range(-1.0, 8.0);
        dr.lambdas.resize(m);
        for (auto& l : dr.lambdas) l = rng.next_range(0.3, 3.0);
        const GradientDR gd = grad_g_dr(costs, ref, c, dr);
        for (std::size_t i = 0; i < m; ++i) {
            DualPointDR up = dr, dn = dr;
            up.lambdas[i] += h;
            dn.lambdas[i] -= h;
            const double fd =
                (g_dr(costs, ref, c, up) - g_dr(costs, ref, c, dn)) / (2.0 * h);
            worst_rel = std::max(
                worst_rel, std::abs(gd.dlambdas[i] - fd) /
                               std::max({1.0, std::abs(gd.dlambdas[i]), std::abs(fd)}));
        }
        ++points;
    }
    // hitting-time gradients on a seeded 6-node graph
    std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4},
                                              {4, 5}, {5, 0}, {0, 2}, {1, 4}};
    const Graph graph(6, edges);
    for (int s = 0; s < 100; ++s) {
        ReversibleChainParam param;
        param.edge_weights.resize(graph.edges().size());
        for (auto& w : param.edge_weights) w = rng.next_range(0.05, 0.2);
        const std::size_t goal = rng.next_index(6);
        const auto analytic = mean_hitting_time_gradient(graph, param, goal);
        for (std::size_t e = 0; e < graph.edges().size(); ++e) {
            ReversibleChainParam up = param, dn = param;
            up.edge_weights[e] += h;
            dn.edge_weights[e] -= h;
            const double fd =
                (mean_hitting_time(graph, build_transition_matrix(graph, up), goal) -
                 mean_hitting_time(graph, build_transition_matrix(graph, dn), goal)) /
                (2.0 * h);
            worst_rel = std::max(worst_rel,
                                 std::abs(analytic[e] - fd) /
                                     std::max({1.0, std::abs(analytic[e]), std::abs(fd)}));
        }
        ++points;
    }
    Outcome out;
    out.pass = worst_rel <= 1e-5;
    out.detail = "max relative error " + fmt(worst_rel) + " (tol 1e-5) over " +
                 std::to_string(points) + " evaluation points";
    return out;
}

// ---- criterion 7: patrol qualitative reproduction ----
Graph random_connected_graph(std::size_t n, Rng& rng, int extra_edges) {
    std::vector<std::pair<int, int>> edges;
    for (std::size_t v = 1; v < n; ++v) {
        const int u = static_cast<int>(rng.next_index(v));
        edges.emplace_back(u, static_cast<int>(v));
    }
    int added = 0;
    while (added < extra_edges) {
        const int u = static_cast<int>(rng.next_index(n));
        const int v = static_cast<int>(rng.next_index(n));
        if (u == v) continue;
        edges.emplace_back(std::min(u, v), std::max(u, v));
        ++added;
    }
    return Graph(n, edges);
}

Outcome criterion_patrol() {
    Rng rng(707);
    const Graph graph = random_connected_graph(20, rng, 15);
    SolverConfig cfg;
    const double betas[] = {0.0, 0.5, 0.75};
    const ReferenceDistribution ref = ReferenceDistribution::uniform(20);

    const PatrolResult soc = patrol_soc(graph, cfg, betas);
    const PatrolResult dr50 = patrol_ddro(graph, BallKind::DensityRatio, 1.0, cfg, betas);
    const PatrolResult dr75 = patrol_ddro(graph, BallKind::DensityRatio, 3.0, cfg, betas);

    const auto cvar75 = [&](const PatrolResult& r) {
        return cvar_tilde(r.costs, ref, ProbabilityLevel(0.75));
    };
    const bool part_a = cvar75(dr75) <= cvar75(soc) + 1e-6;
    bool part_b = soc.mean <= dr50.mean + 1e-6 && soc.mean <= dr75.mean + 1e-6;

    const HittingTimeCost model(graph);
    const std::vector<double> cs = {1e-6, 0.25, 0.5, 1.0, 1.5};
    const auto points = pareto_sweep(model, ref, cs, cfg, 4);
    bool part_c = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].failed) part_c = false;
        if (i > 0 && points[i].mean < points[i - 1].mean - 1e-6) part_c = false;
        if (i > 0 && points[i].stddev > points[i - 1].stddev + 1e-6) part_c = false;
    }
    for (const auto& pt : points) {
        if (!pt.failed && soc.mean > pt.mean + 1e-6) part_b = false;
    }

    Outcome out;
    out.pass = part_a && part_b && part_c && soc.report.converged &&
               dr50.report.converged && dr75.report.converged;
    out.detail = std::string("0.75-CVaR ddro ") + fmt(cvar75(dr75)) + " vs soc " +
                 fmt(cvar75(soc)) + (part_a ? " (a ok)" : " (a FAILED)") +
                 "; soc mean " + fmt(soc.mean) + (part_b ? " smallest (b ok)" : " (b FAILED)") +
                 (part_c ? "; sweep monotone (c ok)" : "; sweep FAILED");
    return out;
}

// ---- criterion 8: byte determinism of the verification command ----
Outcome criterion_determinism() {
    const fs::path tmp = fs::temp_directory_path() / "ddro_acceptance_verify";
    fs::remove_all(tmp);
    fs::create_directories(tmp);
    const auto run = [&](const std::string& tag) {
        const fs::path out_dir = tmp / tag;
        const fs::path log = tmp / (tag + ".log");
        const std::string cmd = std::string(DDRO_CLI_PATH) + " verify --quick --seed 42 --out " +
                                out_dir.string() + " > " + log.string() + " 2>&1";
        return std::system(cmd.c_str());
    };
    const int s1 = run("a");
    const int s2 = run("b");
    const auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string log1 = slurp(tmp / "a.log");
    const std::string log2 = slurp(tmp / "b.log");
    const std::string csv1 = slurp(tmp / "a" / "verify.csv");
    const std::string csv2 = slurp(tmp / "b" / "verify.csv");
    Outcome out;
    out.pass = WEXITSTATUS(s1) == 0 && WEXITSTATUS(s2) == 0 && log1 == log2 &&
               !log1.empty() && csv1 == csv2 && !csv1.empty();
    out.detail = "verify runs exit " + std::to_string(WEXITSTATUS(s1)) + "/" +
                 std::to_string(WEXITSTATUS(s2)) + ", logs " +
                 (log1 == log2 ? "identical" : "DIFFER") + ", csv " +
                 (csv1 == csv2 ? "identical" : "DIFFER");
    return out;
}

}  // namespace

int main() {
    struct Entry {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Entry> criteria = {
        {"strong duality (dual infimum vs oracle)", criterion_strong_duality},
        {"cvar equivalence (dr ball)", criterion_cvar_equivalence},
        {"worst-c equivalence (uniform reference)", criterion_worst_c},
        {"mean+std equivalence (l2 ball)", criterion_mean_std},
        {"ball inclusion (dirichlet sampling)", criterion_ball_inclusion},
        {"gradient fidelity (finite differences)", criterion_gradients},
        {"patrol qualitative reproduction", criterion_patrol},
        {"determinism (verify twice)", criterion_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome result;
        try {
            result = criteria[i].run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %zu: %s — %s (%.1fs)\n", result.pass ? "PASS" : "FAIL",
                    i + 1, criteria[i].name, result.detail.c_str(), seconds);
        std::fflush(stdout);
        if (!result.pass) ++failures;
    }
    return failures;
}
