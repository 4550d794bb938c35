#include "ddro/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "ddro/models.hpp"
#include "ddro/patrol.hpp"
#include "ddro/risk.hpp"
#include "ddro/rng.hpp"
#include "ddro/solver.hpp"
#include "ddro/worst_case.hpp"

namespace ddro {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::vector<double> random_costs(Rng& rng, std::size_t m, double lo = 0.0, double hi = 10.0) {
    std::vector<double> costs(m);
    for (auto& c : costs) c = rng.next_range(lo, hi);
    return costs;
}

struct Failure {
    bool failed = false;
    std::string detail;

    void record(const std::string& msg) {
        if (!failed) {
            failed = true;
            detail = msg;
        }
    }
};

CheckResult check_ball_inclusion(const VerifyOptions& opt) {
    Rng rng(opt.seed * 1000003 + 1);
    const int samples = opt.quick ? 100 : 1000;
    Failure fail;
    int tested = 0;
    for (std::size_t m : {2u, 4u, 8u}) {
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        for (double c : {0.25, 0.5, 1.0, 2.0}) {
            const Ball l2(BallKind::WeightedL2, c, ref);
            const Ball dr(BallKind::DensityRatio, c, ref);
            const Ball tv(BallKind::TotalVariation, c, ref);
            for (int s = 0; s < samples; ++s) {
                const DiscreteDistribution p(rng.next_simplex(m));
                ++tested;
                if (ball_contains(l2, p) && !ball_contains(tv, p)) {
                    fail.record("L2 membership without TV membership at m=" +
                                std::to_string(m) + " c=" + fmt(c));
                }
                if (c >= 1.0 && ball_contains(dr, p) &&
                    (!ball_contains(l2, p) || !ball_contains(tv, p))) {
                    fail.record("DR membership outside L2/TV at m=" + std::to_string(m) +
                                " c=" + fmt(c));
                }
                // minimal_radius consistency against membership
                for (BallKind kind :
                     {BallKind::WeightedL2, BallKind::DensityRatio, BallKind::TotalVariation}) {
                    const double r = minimal_radius(kind, ref, p);
                    if (r > 0.0 && !ball_contains(Ball(kind, r + 1e-9, ref), p)) {
                        fail.record("minimal_radius too small for " + to_string(kind));
                    }
                    if (r > 1e-6 && ball_contains(Ball(kind, r - 1e-6, ref), p)) {
                        fail.record("minimal_radius too large for " + to_string(kind));
                    }
                }
            }
        }
    }
    return {"ball inclusion", !fail.failed,
            fail.failed ? fail.detail : std::to_string(tested) + " samples"};
}

CheckResult check_density_ratio(const VerifyOptions& opt) {
    Rng rng(opt.seed * 1000003 + 2);
    const int samples = opt.quick ? 50 : 400;
    Failure fail;
    for (int s = 0; s < samples; ++s) {
        const std::size_t m = 2 + rng.next_index(9);
        std::vector<double> ref_mass = rng.next_simplex(m);
        for (auto& v : ref_mass) v = std::max(v, 1e-6);
        double total = 0.0;
        for (double v : ref_mass) total += v;
        for (auto& v : ref_mass) v /= total;
        const ReferenceDistribution ref(ref_mass);
        const DiscreteDistribution p(rng.next_simplex(m));
        const DensityRatioVector r = density_ratio(p, ref);
        double mean_ratio = 0.0;
        for (std::size_t i = 0; i < m; ++i) mean_ratio += ref[i] * r.ratio[i];
        if (std::abs(mean_ratio - 1.0) > 1e-10) {
            fail.record("E_ref[r] = " + fmt(mean_ratio));
        }
    }
    return {"density ratio normalization", !fail.failed, fail.detail};
}

CheckResult check_risk_sandwich(const VerifyOptions& opt) {
    Rng rng(opt.seed * 1000003 + 3);
    const int instances = opt.quick ? 50 : 500;
    Failure fail;
    for (int s = 0; s < instances; ++s) {
        const std::size_t m = 3 + rng.next_index(8);
        const std::vector<double> costs = random_costs(rng, m);
        const bool uniform_ref = s % 2 == 0;
        const ReferenceDistribution ref =
            uniform_ref ? ReferenceDistribution::uniform(m)
                        : ReferenceDistribution([&] {
                              auto v = rng.next_simplex(m);
                              for (auto& x : v) x = std::max(x, 1e-3);
                              double t = 0.0;
                              for (double x : v) t += x;
                              for (auto& x : v) x /= t;
                              return v;
                          }());
        const double beta_raw = rng.next_range(0.0, 0.95);
        const ProbabilityLevel beta(beta_raw);
        const double tilde = cvar_tilde(costs, ref, beta);
        const double lower = cvar_nonstrict(costs, ref, beta);
        const double upper = cvar_hat(costs, ref, beta);
        if (!(lower <= tilde + 1e-9 && tilde <= upper + 1e-9)) {
            fail.record("sandwich violated: " + fmt(lower) + " / " + fmt(tilde) + " / " +
                        fmt(upper));
        }
        const double var = value_at_risk(costs, ref, beta);
        // tightness whenever the reference mass at or below VaR equals beta
        double mass_at_or_below = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (costs[i] <= var) mass_at_or_below += ref[i];
        }
        if (std::abs(mass_at_or_below - beta.beta) <= 1e-12 &&
            std::abs(tilde - upper) > 1e-9) {
            fail.record("tight case differs from strict conditional mean");
        }
        // DR worst case equals the f_beta minimum
        if (beta_raw > 1e-9) {
            const double c = beta_raw / (1.0 - beta_raw);
            const double worst = worst_expectation_dr(costs, ref, c).value;
            if (std::abs(worst - tilde) > 1e-9) {
                fail.record("worst_expectation_dr " + fmt(worst) + " vs f_beta(VaR) " +
                            fmt(tilde));
            }
        }
    }
    // engineered tight cases: uniform reference with beta*m integral
    for (int s = 0; s < (opt.quick ? 10 : 50); ++s) {
        const std::size_t m = 4 + rng.next_index(7);
        const std::size_t k = 1 + rng.next_index(m - 1);
        const ProbabilityLevel beta(static_cast<double>(k) / static_cast<double>(m));
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const std::vector<double> costs = random_costs(rng, m);
        const double tilde = cvar_tilde(costs, ref, beta);
        const double upper = cvar_hat(costs, ref, beta);
        if (std::abs(tilde - upper) > 1e-9) {
            fail.record("integral-level tightness failed at m=" + std::to_string(m) +
                        " k=" + std::to_string(k));
        }
    }
    // f_beta is minimized at VaR (grid scan)
    for (int s = 0; s < (opt.quick ? 3 : 12); ++s) {
        const std::size_t m = 3 + rng.next_index(6);
        const std::vector<double> costs = random_costs(rng, m);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const ProbabilityLevel beta(rng.next_range(0.0, 0.9));
        const double at_var = cvar_tilde(costs, ref, beta);
        const double lo = *std::min_element(costs.begin(), costs.end()) - 1.0;
        const double hi = *std::max_element(costs.begin(), costs.end()) + 1.0;
        for (double nu = lo; nu <= hi; nu += 1e-3) {
            if (f_beta(costs, ref, beta, nu) < at_var - 1e-6) {
                fail.record("f_beta grid minimum below value at VaR");
                break;
            }
        }
    }
    return {"risk sandwich", !fail.failed, fail.detail};
}

CheckResult check_worst_c(const VerifyOptions& opt) {
    Rng rng(opt.seed * 1000003 + 4);
    const int per_config = opt.quick ? 10 : 100;
    Failure fail;
    for (std::size_t m : {4u, 6u, 8u, 10u}) {
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        for (std::size_t count = 1; count <= m; ++count) {
            if (count == m) continue;  // c = m/count - 1 must stay positive
            const double c = static_cast<double>(m) / static_cast<double>(count) - 1.0;
            for (int s = 0; s < per_config; ++s) {
                const std::vector<double> costs = random_costs(rng, m);
                const double via_ball = worst_expectation_dr(costs, ref, c).value;
                const double via_sort = worst_c_average(costs, count);
                if (std::abs(via_ball - via_sort) > 1e-9) {
                    fail.record("m=" + std::to_string(m) + " C=" + std::to_string(count) +
                                ": " + fmt(via_ball) + " vs " + fmt(via_sort));
                }
            }
        }
    }
    return {"worst-c equivalence", !fail.failed, fail.detail};
}

CheckResult check_duality(const VerifyOptions& opt) {
    Rng rng(opt.seed * 1000003 + 5);
    const int instances = opt.quick ? 10 : 50;
    Failure fail;
    const double radii[] = {0.3, 0.7, 1.5};
    for (int s = 0; s < instances; ++s) {
        const std::size_t m = 3 + rng.next_index(6);
        const std::vector<double> costs = random_costs(rng, m);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const double c = radii[s % 3];
        const double mean = expectation(ref, costs);
        const double top = *std::max_element(costs.begin(), costs.end());

        Rng oracle_rng(opt.seed * 7777 + static_cast<std::uint64_t>(s));
        const double oracle_dr =
            oracle_worst_expectation(costs, Ball(BallKind::DensityRatio, c, ref), oracle_rng);
        const double oracle_l2 =
            oracle_worst_expectation(costs, Ball(BallKind::WeightedL2, c, ref), oracle_rng);

        const double inf_dr = dual_infimum(costs, ref, BallKind::DensityRatio, c);
        const double inf_l2 = dual_infimum(costs, ref, BallKind::WeightedL2, c);
        if (std::abs(inf_dr - oracle_dr) > 1e-9) {
            fail.record("DR dual infimum " + fmt(inf_dr) + " vs oracle " + fmt(oracle_dr));
        }
        if (std::abs(inf_l2 - oracle_l2) > 1e-4) {
            fail.record("L2 dual infimum " + fmt(inf_l2) + " vs oracle " + fmt(oracle_l2));
        }

        const WorstCaseResult dr = worst_expectation_dr(costs, ref, c);
        const WorstCaseResult l2 = worst_expectation_l2(costs, ref, c);
        if (std::abs(dr.value - oracle_dr) > 1e-9) {
            fail.record("worst_expectation_dr vs oracle: " + fmt(dr.value) + " / " +
                        fmt(oracle_dr));
        }
        if (std::abs(l2.value - oracle_l2) > 1e-4) {
            fail.record("worst_expectation_l2 vs oracle: " + fmt(l2.value) + " / " +
                        fmt(oracle_l2));
        }
        for (const WorstCaseResult* r : {&dr, &l2}) {
            if (r->value < mean - 1e-9 || r->value > top + 1e-9) {
                fail.record("worst-case value outside [mean, max]");
            }
            if (r->distribution) {
                const BallKind kind =
                    r == &dr ? BallKind::DensityRatio : BallKind::WeightedL2;
                if (!ball_contains(Ball(kind, c, ref), *r->distribution)) {
                    fail.record("attaining distribution escapes its ball");
                }
                const double attained = expectation(*r->distribution, costs);
                if (std::abs(attained - r->value) > 1e-8) {
                    fail.record("attained expectation " + fmt(attained) + " vs value " +
                                fmt(r->value));
                }
            }
        }
        // weak duality: any smooth dual point upper-bounds the oracle
        const DualPointL2 probe{0.5 + rng.next_double(), mean + rng.next_range(-1.0, 1.0)};
        if (g_l2(costs, ref, c, probe) < oracle_l2 - 1e-4 - 1e-9) {
            fail.record("weak duality violated for a smooth L2 dual point");
        }
    }
    // monotonicity in the radius
    for (int s = 0; s < (opt.quick ? 3 : 10); ++s) {
        const std::size_t m = 4 + rng.next_index(4);
        const std::vector<double> costs = random_costs(rng, m);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        double prev_dr = -1e300, prev_l2 = -1e300;
        for (double c : {0.1, 0.4, 0.8, 1.3, 2.0, 3.0}) {
            const double vdr = worst_expectation_dr(costs, ref, c).value;
            const double vl2 = worst_expectation_l2(costs, ref, c).value;
            if (vdr < prev_dr - 1e-9) fail.record("DR worst case decreasing in c");
            if (vl2 < prev_l2 - 1e-6) fail.record("L2 worst case decreasing in c");
            prev_dr = vdr;
            prev_l2 = vl2;
        }
    }
    return {"duality agreement", !fail.failed, fail.detail};
}

CheckResult check_mean_std(const VerifyOptions& opt) {
    Rng rng(opt.seed * 1000003 + 6);
    const int instances = opt.quick ? 40 : 200;
    Failure fail;
    int closed_form_hits = 0;
    for (int s = 0; s < instances; ++s) {
        const std::size_t m = 3 + rng.next_index(6);
        const std::vector<double> costs = random_costs(rng, m);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const double c = rng.next_range(0.05, 1.0);
        const double mean = expectation(ref, costs);
        const double sd = std::sqrt(variance(ref, costs));
        const double lo = *std::min_element(costs.begin(), costs.end());
        const double hi = *std::max_element(costs.begin(), costs.end());
        if (!(lo > mean - sd / c && mean + c * sd < hi)) continue;
        ++closed_form_hits;
        const double closed = worst_expectation_l2(costs, ref, c).value;
        const double target = mean_std_objective(costs, ref, c);
        if (std::abs(closed - target) > 1e-6) {
            fail.record("closed form " + fmt(closed) + " vs mean+std " + fmt(target));
        }
    }
    if (closed_form_hits == 0) fail.record("no instance satisfied the closed-form conditions");
    return {"mean-std closed form", !fail.failed,
            fail.failed ? fail.detail : std::to_string(closed_form_hits) + " instances"};
}

CheckResult check_gradients(const VerifyOptions& opt) {
    Rng rng(opt.seed * 1000003 + 7);
    const int points = opt.quick ? 30 : 120;
    const double h = 1e-6;
    Failure fail;
    for (int s = 0; s < points; ++s) {
        const std::size_t m = 2 + rng.next_index(7);
        const std::vector<double> costs = random_costs(rng, m, 0.0, 5.0);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const double c = rng.next_range(0.2, 2.0);

        const DualPointL2 l2{rng.next_range(0.2, 3.0), rng.next_range(-1.0, 6.0)};
        const GradientL2 gl2 = grad_g_l2(costs, ref, c, l2);
        const double fd_l =
            (g_l2(costs, ref, c, {l2.lambda + h, l2.nu}) -
             g_l2(costs, ref, c, {l2.lambda - h, l2.nu})) / (2.0 * h);
        const double fd_n =
            (g_l2(costs, ref, c, {l2.lambda, l2.nu + h}) -
             g_l2(costs, ref, c, {l2.lambda, l2.nu - h})) / (2.0 * h);
        const double corrupt = opt.corrupt_gradient ? 1e-2 : 0.0;
        if (std::abs(gl2.dlambda + corrupt - fd_l) /
                std::max({1.0, std::abs(gl2.dlambda), std::abs(fd_l)}) > 1e-5 ||
            std::abs(gl2.dnu - fd_n) / std::max({1.0, std::abs(gl2.dnu), std::abs(fd_n)}) >
                1e-5) {
            fail.record("g_l2 gradient mismatch");
        }

        DualPointDR dr;
        dr.nu = rng.next_range(-1.0, 6.0);
        dr.lambdas.resize(m);
        for (auto& l : dr.lambdas) l = rng.next_range(0.3, 3.0);
        const GradientDR gdr = grad_g_dr(costs, ref, c, dr);
        for (std::size_t i = 0; i < m; ++i) {
            DualPointDR up = dr, dn = dr;
            up.lambdas[i] += h;
            dn.lambdas[i] -= h;
            const double fd = (g_dr(costs, ref, c, up) - g_dr(costs, ref, c, dn)) / (2.0 * h);
            if (std::abs(gdr.dlambdas[i] - fd) /
                    std::max({1.0, std::abs(gdr.dlambdas[i]), std::abs(fd)}) > 1e-5) {
                fail.record("g_dr lambda gradient mismatch");
            }
        }
        DualPointDR up = dr, dn = dr;
        up.nu += h;
        dn.nu -= h;
        const double fd_nu = (g_dr(costs, ref, c, up) - g_dr(costs, ref, c, dn)) / (2.0 * h);
        if (std::abs(gdr.dnu - fd_nu) / std::max({1.0, std::abs(gdr.dnu), std::abs(fd_nu)}) >
            1e-5) {
            fail.record("g_dr nu gradient mismatch");
        }
    }

    // hitting-time gradient against finite differences on a random graph
    std::vector<std::pair<int, int>> edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}};
    for (int extra = 0; extra < 4; ++extra) {
        const int u = static_cast<int>(rng.next_index(6));
        const int v = static_cast<int>(rng.next_index(6));
        if (u != v) edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    const Graph graph(6, edges);
    const std::size_t ne = graph.edges().size();
    const int param_draws = opt.quick ? 5 : 20;
    for (int s = 0; s < param_draws; ++s) {
        ReversibleChainParam param;
        param.edge_weights.resize(ne);
        for (auto& w : param.edge_weights) w = rng.next_range(0.05, 0.22);
        const std::size_t goal = rng.next_index(6);
        std::vector<double> analytic = mean_hitting_time_gradient(graph, param, goal);
        if (opt.corrupt_gradient) analytic[0] += 1e-2;
        for (std::size_t e = 0; e < ne; ++e) {
            ReversibleChainParam up = param, dn = param;
            up.edge_weights[e] += h;
            dn.edge_weights[e] -= h;
            const double fu =
                mean_hitting_time(graph, build_transition_matrix(graph, up), goal);
            const double fdn =
                mean_hitting_time(graph, build_transition_matrix(graph, dn), goal);
            const double fd = (fu - fdn) / (2.0 * h);
            if (std::abs(analytic[e] - fd) /
                    std::max({1.0, std::abs(analytic[e]), std::abs(fd)}) > 1e-5) {
                fail.record("hitting-time gradient mismatch at edge " + std::to_string(e));
            }
        }
    }
    return {"gradient check", !fail.failed, fail.detail};
}

// Brute-force x-grid minimization for the 1-D toy quadratics.
double grid_min_1d(const std::vector<double>& anchors, const ReferenceDistribution& ref,
                   const std::function<double(const std::vector<double>&)>& objective,
                   double lo, double hi, double step) {
    (void)ref;
    double best = 1e300;
    std::vector<double> costs(anchors.size());
    for (double x = lo; x <= hi; x += step) {
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            const double d = x - anchors[i];
            costs[i] = d * d;
        }
        best = std::min(best, objective(costs));
    }
    return best;
}

CheckResult check_solver_toys(const VerifyOptions& opt) {
    Failure fail;
    SolverConfig cfg;
    cfg.gradient_tolerance = 1e-9;
    const std::vector<double> anchors = {0.0, 1.0, 2.0, 3.0};
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const QuadraticCost model({{0.0}, {1.0}, {2.0}, {3.0}});

    // DR ball, c = 1: grid oracle over the exact inner LP
    {
        const double grid = grid_min_1d(
            anchors, ref,
            [&](const std::vector<double>& costs) { return worst_c_average(costs, 2); },
            0.0, 3.0, opt.quick ? 1e-3 : 1e-4);
        const SolveReport rep = solve_ddro(model, ref, BallKind::DensityRatio, 1.0, cfg);
        if (!rep.converged) fail.record("toy DR solve did not converge");
        if (std::abs(rep.objective - grid) > 1e-3) {
            fail.record("toy DR objective " + fmt(rep.objective) + " vs grid " + fmt(grid));
        }
        if (std::abs(rep.objective - 2.25) > 1e-3 || std::abs(rep.x_star[0] - 1.5) > 5e-2) {
            fail.record("toy DR solution drifted from (x=1.5, value=2.25)");
        }
    }
    // collapse to SOC as c -> 0
    {
        const SolveReport rep = solve_ddro(model, ref, BallKind::DensityRatio, 1e-6, cfg);
        const SolveReport soc = solve_soc(model, ref, cfg);
        if (std::abs(rep.objective - soc.objective) > 1e-4) {
            fail.record("DR collapse " + fmt(rep.objective) + " vs SOC " + fmt(soc.objective));
        }
        if (std::abs(soc.objective - 1.25) > 1e-6 || std::abs(soc.x_star[0] - 1.5) > 1e-4) {
            fail.record("SOC toy solution should be (1.5, 1.25)");
        }
    }
    // L2 ball vs mean+std grid
    {
        const double grid = grid_min_1d(
            anchors, ref,
            [&](const std::vector<double>& costs) {
                return mean_std_objective(costs, ref, 0.5);
            },
            0.0, 3.0, opt.quick ? 1e-3 : 1e-4);
        const SolveReport rep = solve_ddro(model, ref, BallKind::WeightedL2, 0.5, cfg);
        if (std::abs(rep.objective - grid) > 1e-3) {
            fail.record("toy L2 objective " + fmt(rep.objective) + " vs grid " + fmt(grid));
        }
        if (!rep.smooth_conditions_held) {
            fail.record("toy L2 smooth conditions unexpectedly failed at x*");
        }
    }
    // asymmetric anchors: SOC and DDRO minimizers must differ
    {
        const std::vector<double> a2 = {0.0, 1.0, 2.0, 7.0};
        const QuadraticCost model2({{0.0}, {1.0}, {2.0}, {7.0}});
        const double grid = grid_min_1d(
            a2, ref,
            [&](const std::vector<double>& costs) { return worst_c_average(costs, 2); },
            0.0, 7.0, opt.quick ? 1e-3 : 1e-4);
        const SolveReport rep = solve_ddro(model2, ref, BallKind::DensityRatio, 1.0, cfg);
        const SolveReport soc = solve_soc(model2, ref, cfg);
        if (std::abs(rep.objective - grid) > 1e-3) {
            fail.record("asymmetric DR objective " + fmt(rep.objective) + " vs grid " +
                        fmt(grid));
        }
        if (std::abs(rep.x_star[0] - soc.x_star[0]) < 1e-3) {
            fail.record("asymmetric instance: DDRO and SOC minimizers coincide");
        }
        // robust design no worse than the baseline on the robust objective
        std::vector<double> costs_ddro(4), costs_soc(4);
        for (std::size_t i = 0; i < 4; ++i) {
            costs_ddro[i] = model2.evaluate(rep.x_star, i);
            costs_soc[i] = model2.evaluate(soc.x_star, i);
        }
        const double wc_ddro = worst_expectation_dr(costs_ddro, ref, 1.0).value;
        const double wc_soc = worst_expectation_dr(costs_soc, ref, 1.0).value;
        if (wc_ddro > wc_soc + 1e-6) {
            fail.record("DDRO worst case exceeds SOC worst case");
        }
    }
    // pareto sweep monotonicity and determinism
    {
        const std::vector<double> cs = {1e-6, 0.25, 0.5, 0.5, 1.0};
        const auto points = pareto_sweep(model, ref, cs, cfg);
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            if (points[i].failed || points[i + 1].failed) {
                fail.record("pareto point failed: " + points[i].error);
                break;
            }
            if (points[i + 1].mean < points[i].mean - 1e-6) {
                fail.record("pareto mean decreased along ascending c");
            }
            if (points[i + 1].stddev > points[i].stddev + 1e-6) {
                fail.record("pareto std increased along ascending c");
            }
        }
        if (std::abs(points[2].mean - points[3].mean) > 1e-6 ||
            std::abs(points[2].stddev - points[3].stddev) > 1e-6) {
            fail.record("duplicate radii produced different pareto points");
        }
        const SolveReport soc = solve_soc(model, ref, cfg);
        if (std::abs(points[0].mean - soc.objective) > 1e-4) {
            fail.record("pareto collapse point differs from SOC mean");
        }
    }
    return {"solver toy quadratics", !fail.failed, fail.detail};
}

CheckResult check_patrol(const VerifyOptions& opt) {
    Failure fail;
    const Graph cycle(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
    SolverConfig cfg;
    cfg.gradient_tolerance = 1e-8;
    const double betas[] = {0.0, 0.5, 0.75};
    const PatrolResult dr = patrol_ddro(cycle, BallKind::DensityRatio, 1.0, cfg, betas);
    if (!dr.report.converged) fail.record("5-cycle DR solve did not converge");
    Rng oracle_rng(opt.seed + 99);
    const ReferenceDistribution ref = ReferenceDistribution::uniform(5);
    const double oracle = oracle_worst_expectation(
        dr.costs, Ball(BallKind::DensityRatio, 1.0, ref), oracle_rng);
    if (std::abs(dr.report.objective - oracle) > 1e-4) {
        fail.record("patrol DR objective " + fmt(dr.report.objective) + " vs oracle " +
                    fmt(oracle));
    }
    const PatrolResult tiny = patrol_ddro(cycle, BallKind::DensityRatio, 1e-6, cfg, betas);
    const PatrolResult soc = patrol_soc(cycle, cfg, betas);
    if (std::abs(tiny.report.objective - soc.report.objective) > 1e-4) {
        fail.record("patrol collapse " + fmt(tiny.report.objective) + " vs SOC " +
                    fmt(soc.report.objective));
    }
    // reversibility and stationarity of the built chain
    ReversibleChainParam param;
    param.edge_weights = dr.report.x_star;
    const Eigen::MatrixXd P = build_transition_matrix(cycle, param);
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 0.0) {
        fail.record("transition matrix is not exactly symmetric");
    }
    const Eigen::VectorXd pi = Eigen::VectorXd::Constant(5, 0.2);
    if ((P.transpose() * pi - pi).cwiseAbs().maxCoeff() > 1e-10) {
        fail.record("uniform distribution is not stationary");
    }
    // hitting-time convexity evidence along random feasible segments
    Rng rng(opt.seed * 1000003 + 8);
    const HittingTimeCost model(cycle);
    const int segments = opt.quick ? 20 : 100;
    for (int s = 0; s < segments; ++s) {
        std::vector<double> a(5), b(5);
        for (std::size_t e = 0; e < 5; ++e) {
            a[e] = rng.next_range(0.05, 0.45);
            b[e] = rng.next_range(0.05, 0.45);
        }
        std::vector<double> mid(5);
        for (std::size_t e = 0; e < 5; ++e) mid[e] = 0.5 * (a[e] + b[e]);
        for (std::size_t i = 0; i < 5; ++i) {
            const double chord = 0.5 * (model.evaluate(a, i) + model.evaluate(b, i));
            if (model.evaluate(mid, i) > chord + 1e-8) {
                fail.record("hitting time failed midpoint convexity");
            }
        }
    }
    return {"patrol sanity", !fail.failed, fail.detail};
}

CheckResult check_determinism(const VerifyOptions& opt) {
    (void)opt;
    Failure fail;
    const QuadraticCost model({{0.0}, {1.0}, {2.0}, {7.0}});
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    SolverConfig cfg;
    const SolveReport a = solve_ddro(model, ref, BallKind::DensityRatio, 0.8, cfg);
    const SolveReport b = solve_ddro(model, ref, BallKind::DensityRatio, 0.8, cfg);
    if (a.history.size() != b.history.size()) {
        fail.record("history lengths differ between identical solves");
    } else {
        for (std::size_t i = 0; i < a.history.size(); ++i) {
            if (a.history[i] != b.history[i]) {
                fail.record("history diverges at iteration " + std::to_string(i));
                break;
            }
        }
    }
    if (a.objective != b.objective) fail.record("objectives differ between identical solves");
    return {"determinism", !fail.failed, fail.detail};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
    std::vector<CheckResult> results;
    results.push_back(check_ball_inclusion(options));
    results.push_back(check_density_ratio(options));
    results.push_back(check_risk_sandwich(options));
    results.push_back(check_worst_c(options));
    results.push_back(check_duality(options));
    results.push_back(check_mean_std(options));
    results.push_back(check_gradients(options));
    results.push_back(check_solver_toys(options));
    results.push_back(check_patrol(options));
    results.push_back(check_determinism(options));
    return results;
}

}  // namespace ddro
