#include "ddro/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

#include "ddro/risk.hpp"

namespace ddro {

namespace {

constexpr double kLambdaFloor = 1e-10;

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

// Minimization state over z = [x | lambdas | nu]. With a null model the x
// block is empty and the costs are fixed (inner dual solves). In SOC mode
// there are no multipliers at all.
struct JointProblem {
    const CostModel* model = nullptr;
    Vec fixed_costs;
    const ReferenceDistribution* ref = nullptr;
    BallKind kind = BallKind::DensityRatio;
    double c = 0.0;
    bool soc = false;

    std::size_t xdim() const { return model ? model->dimension() : 0; }
    std::size_t m() const { return ref->size(); }
    std::size_t nlam() const {
        if (soc) return 0;
        return kind == BallKind::WeightedL2 ? 1 : m();
    }
    std::size_t zdim() const { return xdim() + nlam() + (soc ? 0 : 1); }

    Vec costs_at(const Vec& z) const {
        if (!model) return fixed_costs;
        Vec costs(m());
        std::span<const double> x(z.data(), xdim());
        for (std::size_t i = 0; i < costs.size(); ++i) costs[i] = model->evaluate(x, i);
        return costs;
    }

    double barrier(const Vec& z, double w) const {
        if (w <= 0.0 || soc) return 0.0;
        double acc = 0.0;
        for (std::size_t k = 0; k < nlam(); ++k) acc -= std::log(z[xdim() + k]);
        return w * acc;
    }

    // Dual objective without barrier. Assumes multipliers are positive.
    double report(const Vec& z, const Vec& costs) const {
        if (soc) return expectation(*ref, costs);
        const double nu = z.back();
        if (kind == BallKind::WeightedL2) {
            return g_l2(costs, *ref, c, DualPointL2{z[xdim()], nu});
        }
        DualPointDR d;
        d.lambdas.assign(z.begin() + static_cast<std::ptrdiff_t>(xdim()), z.end() - 1);
        d.nu = nu;
        return g_dr(costs, *ref, c, d);
    }

    std::optional<double> phi(const Vec& z, double w, Vec* costs_out = nullptr) const {
        Vec costs = costs_at(z);
        if (costs_out) *costs_out = costs;
        try {
            return report(z, costs) + barrier(z, w);
        } catch (const OverflowGuard&) {
            return std::nullopt;
        }
    }

    std::optional<Vec> grad(const Vec& z, double w) const {
        const Vec costs = costs_at(z);
        Vec g(zdim(), 0.0);
        std::span<const double> x(z.data(), xdim());
        try {
            if (soc) {
                for (std::size_t i = 0; i < costs.size(); ++i) {
                    const Vec gi = model->gradient_x(x, i);
                    for (std::size_t j = 0; j < xdim(); ++j) g[j] += (*ref)[i] * gi[j];
                }
                return g;
            }
            const double nu = z.back();
            Vec cost_grad;
            if (kind == BallKind::WeightedL2) {
                const DualPointL2 d{z[xdim()], nu};
                const GradientL2 gd = grad_g_l2(costs, *ref, c, d);
                g[xdim()] = gd.dlambda;
                g.back() = gd.dnu;
                if (model) cost_grad = g_l2_cost_gradient(costs, *ref, c, d);
            } else {
                DualPointDR d;
                d.lambdas.assign(z.begin() + static_cast<std::ptrdiff_t>(xdim()), z.end() - 1);
                d.nu = nu;
                GradientDR gd = grad_g_dr(costs, *ref, c, d);
                for (std::size_t k = 0; k < nlam(); ++k) g[xdim() + k] = gd.dlambdas[k];
                g.back() = gd.dnu;
                if (model) cost_grad = g_dr_cost_gradient(costs, *ref, c, d);
            }
            if (model) {
                for (std::size_t i = 0; i < costs.size(); ++i) {
                    if (cost_grad[i] == 0.0) continue;
                    const Vec gi = model->gradient_x(x, i);
                    for (std::size_t j = 0; j < xdim(); ++j) g[j] += cost_grad[i] * gi[j];
                }
            }
            if (w > 0.0) {
                for (std::size_t k = 0; k < nlam(); ++k) g[xdim() + k] -= w / z[xdim() + k];
            }
            return g;
        } catch (const OverflowGuard&) {
            return std::nullopt;
        }
    }

    Vec project(Vec z) const {
        if (model) {
            Vec x(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(xdim()));
            x = model->project(std::move(x));
            std::copy(x.begin(), x.end(), z.begin());
        }
        for (std::size_t k = 0; k < nlam(); ++k) {
            z[xdim() + k] = std::max(z[xdim() + k], kLambdaFloor);
        }
        return z;
    }

    // Exact minimizer of the dual block at the current x: nu at the value at
    // risk with lambda_i = J_i - nu for the DR ball, the stationary pair
    // (std/(2c), mean) for the L2 ball. Rounds adopt it only when it lowers
    // their barrier objective.
    Vec dual_reset(const Vec& z) const {
        Vec out = z;
        const Vec costs = costs_at(z);
        if (kind == BallKind::WeightedL2) {
            const double sd = std::sqrt(variance(*ref, costs));
            out[xdim()] = std::max(sd / (2.0 * c), kLambdaFloor);
            out.back() = expectation(*ref, costs);
        } else {
            const double nu =
                value_at_risk(costs, *ref, ProbabilityLevel::from_radius(c));
            for (std::size_t i = 0; i < m(); ++i) {
                out[xdim() + i] = std::max(costs[i] - nu, kLambdaFloor);
            }
            out.back() = nu;
        }
        return out;
    }
};

struct RoundOutcome {
    int iterations = 0;
    bool converged = false;
};

RoundOutcome descend(const JointProblem& problem, Vec& z, double w, const SolverConfig& cfg,
                     std::vector<double>* hist_obj, std::vector<double>* hist_gnorm) {
    z = problem.project(std::move(z));
    std::optional<double> phi = problem.phi(z, w);
    std::optional<Vec> grad = problem.grad(z, w);
    RoundOutcome out;
    if (!phi || !grad) return out;

    double eta = 1.0 / (1.0 + norm2(*grad));
    Vec z_prev, g_prev;
    bool have_prev = false;
    Vec zn, step(z.size());
    double best_phi = *phi;
    double best_gm = std::numeric_limits<double>::infinity();
    int stall = 0;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        if (have_prev) {
            Vec s(z.size()), y(z.size());
            for (std::size_t i = 0; i < z.size(); ++i) {
                s[i] = z[i] - z_prev[i];
                y[i] = (*grad)[i] - g_prev[i];
            }
            const double sy = dot(s, y);
            const double ss = dot(s, s);
            if (sy > 1e-18 && std::isfinite(sy)) {
                eta = std::clamp(ss / sy, 1e-12, 1e8);
            } else {
                eta = std::min(eta * 2.0, 1e8);
            }
        }

        bool accepted = false;
        double trial = eta;
        double phin = 0.0;
        for (int bt = 0; bt < 80; ++bt) {
            for (std::size_t i = 0; i < z.size(); ++i) step[i] = z[i] - trial * (*grad)[i];
            zn = problem.project(step);
            double move2 = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double d = zn[i] - z[i];
                move2 += d * d;
            }
            if (move2 == 0.0) break;  // projected step is a fixed point
            const std::optional<double> v = problem.phi(zn, w);
            if (v && *v <= *phi - cfg.armijo_slope * move2 / trial) {
                accepted = true;
                phin = *v;
                break;
            }
            trial *= cfg.armijo_shrink;
            if (trial < 1e-18) break;
        }

        ++out.iterations;
        if (!accepted) {
            // Either at a projected stationary point or below step resolution.
            for (std::size_t i = 0; i < z.size(); ++i) step[i] = z[i] - (*grad)[i];
            const Vec zp = problem.project(step);
            double gm = 0.0;
            for (std::size_t i = 0; i < z.size(); ++i) {
                const double d = z[i] - zp[i];
                gm += d * d;
            }
            gm = std::sqrt(gm);
            if (hist_obj) {
                hist_obj->push_back(*phi - problem.barrier(z, w));
                hist_gnorm->push_back(gm);
            }
            out.converged = gm <= cfg.gradient_tolerance;
            return out;
        }

        z_prev = z;
        g_prev = *grad;
        have_prev = true;
        z = zn;
        phi = phin;
        grad = problem.grad(z, w);
        if (!grad) return out;

        for (std::size_t i = 0; i < z.size(); ++i) step[i] = z[i] - (*grad)[i];
        const Vec zp = problem.project(step);
        double gm = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double d = z[i] - zp[i];
            gm += d * d;
        }
        gm = std::sqrt(gm);
        if (hist_obj) {
            hist_obj->push_back(*phi - problem.barrier(z, w));
            hist_gnorm->push_back(gm);
        }
        if (gm <= cfg.gradient_tolerance) {
            out.converged = true;
            return out;
        }
        const bool phi_flat = best_phi - *phi <= 1e-13 * (1.0 + std::abs(best_phi));
        const bool gm_flat = gm >= best_gm * (1.0 - 1e-3);
        if (phi_flat && gm_flat) {
            if (++stall >= 80) {
                out.converged = gm <= cfg.gradient_tolerance;
                return out;
            }
        } else {
            stall = 0;
        }
        best_phi = std::min(best_phi, *phi);
        best_gm = std::min(best_gm, gm);
    }
    return out;
}

// Barrier continuation followed by a barrier-free polish round. Returns the
// final round's convergence flag.
RoundOutcome continuation(const JointProblem& problem, Vec& z, const SolverConfig& cfg,
                          std::vector<double>* hist_obj, std::vector<double>* hist_gnorm,
                          std::vector<std::size_t>* round_ends = nullptr) {
    RoundOutcome total;
    const auto adopt_reset_if_better = [&](double w) {
        if (problem.soc) return;
        Vec candidate = problem.project(problem.dual_reset(z));
        const std::optional<double> cur = problem.phi(z, w);
        const std::optional<double> alt = problem.phi(candidate, w);
        if (alt && (!cur || *alt < *cur)) z = std::move(candidate);
    };
    if (!problem.soc) {
        double w = cfg.barrier_weight;
        for (int round = 0; round < cfg.barrier_rounds; ++round) {
            adopt_reset_if_better(w);
            const RoundOutcome r = descend(problem, z, w, cfg, hist_obj, hist_gnorm);
            total.iterations += r.iterations;
            if (round_ends && hist_obj) round_ends->push_back(hist_obj->size());
            w *= cfg.barrier_decay;
        }
    }
    // Polish without the barrier; a stalled attempt retries with fresh
    // step-size state, which is usually enough to push the gradient mapping
    // under the tolerance.
    for (int attempt = 0; attempt < 3; ++attempt) {
        adopt_reset_if_better(0.0);
        const RoundOutcome polish = descend(problem, z, 0.0, cfg, hist_obj, hist_gnorm);
        total.iterations += polish.iterations;
        total.converged = polish.converged;
        if (polish.converged || polish.iterations == 0) break;
    }
    if (round_ends && hist_obj) round_ends->push_back(hist_obj->size());
    return total;
}

Vec initial_point(const JointProblem& problem) {
    Vec z;
    Vec x;
    if (problem.model) {
        x = problem.model->project(problem.model->feasible_start());
        z.insert(z.end(), x.begin(), x.end());
    }
    if (!problem.soc) {
        z.insert(z.end(), problem.nlam(), 1.0);
        const Vec costs = problem.costs_at(z);
        z.push_back(expectation(*problem.ref, costs));
    }
    return z;
}

DualPoint extract_duals(const JointProblem& problem, const Vec& z) {
    if (problem.kind == BallKind::WeightedL2) {
        return DualPointL2{z[problem.xdim()], z.back()};
    }
    DualPointDR d;
    d.lambdas.assign(z.begin() + static_cast<std::ptrdiff_t>(problem.xdim()), z.end() - 1);
    d.nu = z.back();
    return d;
}

}  // namespace

void verify_model_gradient(const CostModel& model) {
    const double h = 1e-6;
    const Vec start = model.project(model.feasible_start());
    Vec shifted = start;
    for (std::size_t j = 0; j < shifted.size(); ++j) {
        shifted[j] += 0.01 * (j % 2 == 0 ? 1.0 : -1.0) * (1.0 + std::abs(shifted[j]));
    }
    shifted = model.project(std::move(shifted));
    for (std::size_t j = 0; j < shifted.size(); ++j) {
        shifted[j] = start[j] + 0.5 * (shifted[j] - start[j]);
    }

    std::vector<std::size_t> probes_i;
    const std::size_t m = model.outcomes();
    if (m <= 8) {
        for (std::size_t i = 0; i < m; ++i) probes_i.push_back(i);
    } else {
        for (std::size_t k = 0; k < 8; ++k) probes_i.push_back(k * m / 8);
    }

    for (const Vec& x : {start, shifted}) {
        for (std::size_t i : probes_i) {
            const Vec analytic = model.gradient_x(x, i);
            Vec probe = x;
            for (std::size_t j = 0; j < x.size(); ++j) {
                probe[j] = x[j] + h;
                const double up = model.evaluate(probe, i);
                probe[j] = x[j] - h;
                const double dn = model.evaluate(probe, i);
                probe[j] = x[j];
                const double fd = (up - dn) / (2.0 * h);
                const double err = std::abs(analytic[j] - fd) /
                                   std::max({1.0, std::abs(analytic[j]), std::abs(fd)});
                if (err > 1e-4) {
                    throw ModelGradientMismatch(
                        "gradient_x mismatch at outcome " + std::to_string(i) +
                        ", coordinate " + std::to_string(j) + ": analytic " +
                        std::to_string(analytic[j]) + " vs finite-difference " +
                        std::to_string(fd));
                }
            }
        }
    }
}

SolveReport solve_ddro(const CostModel& model, const ReferenceDistribution& ref,
                       BallKind kind, double c, const SolverConfig& config) {
    if (!(c > 0.0)) throw NonPositiveRadius("radius must be positive");
    if (kind == BallKind::TotalVariation) {
        throw InvalidArgument("solve_ddro supports the l2 and dr balls");
    }
    if (model.outcomes() != ref.size()) {
        throw DimensionMismatch("model outcomes " + std::to_string(model.outcomes()) +
                                " vs reference size " + std::to_string(ref.size()));
    }
    if (config.check_model_gradient) verify_model_gradient(model);

    JointProblem problem;
    problem.model = &model;
    problem.ref = &ref;
    problem.kind = kind;
    problem.c = c;

    Vec z = initial_point(problem);
    SolveReport report;
    const RoundOutcome outcome =
        continuation(problem, z, config, &report.history, &report.gradient_norms,
                     &report.round_ends);

    report.x_star.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(problem.xdim()));
    report.dual_star = extract_duals(problem, z);
    const Vec costs = problem.costs_at(z);
    report.objective = problem.report(z, costs);
    report.iterations = outcome.iterations;
    report.converged = outcome.converged;

    const double mean = expectation(ref, costs);
    const double sd = std::sqrt(variance(ref, costs));
    const double lo = *std::min_element(costs.begin(), costs.end());
    const double hi = *std::max_element(costs.begin(), costs.end());
    report.smooth_conditions_held = hi > mean + c * sd && lo > mean - sd / c;
    return report;
}

SolveReport solve_soc(const CostModel& model, const ReferenceDistribution& ref,
                      const SolverConfig& config) {
    if (model.outcomes() != ref.size()) {
        throw DimensionMismatch("model outcomes " + std::to_string(model.outcomes()) +
                                " vs reference size " + std::to_string(ref.size()));
    }
    if (config.check_model_gradient) verify_model_gradient(model);

    JointProblem problem;
    problem.model = &model;
    problem.ref = &ref;
    problem.soc = true;

    Vec z = initial_point(problem);
    SolveReport report;
    const RoundOutcome outcome =
        continuation(problem, z, config, &report.history, &report.gradient_norms,
                     &report.round_ends);
    report.x_star = z;
    const Vec costs = problem.costs_at(z);
    report.objective = expectation(ref, costs);
    report.iterations = outcome.iterations;
    report.converged = outcome.converged;
    return report;
}

std::vector<ParetoPoint> pareto_sweep(const CostModel& model, const ReferenceDistribution& ref,
                                      std::span<const double> c_list,
                                      const SolverConfig& config, unsigned max_threads) {
    if (c_list.empty()) throw InvalidArgument("pareto sweep needs at least one radius");
    for (std::size_t i = 0; i + 1 < c_list.size(); ++i) {
        if (c_list[i] > c_list[i + 1]) {
            throw InvalidArgument("pareto radii must be sorted ascending");
        }
    }
    for (double c : c_list) {
        if (!(c > 0.0)) throw NonPositiveRadius("pareto radii must be positive");
    }

    std::vector<ParetoPoint> points(c_list.size());
    const auto run_point = [&](std::size_t k) {
        ParetoPoint& pt = points[k];
        pt.c = c_list[k];
        try {
            SolverConfig cfg = config;
            cfg.check_model_gradient = false;  // verified once below
            const SolveReport rep = solve_ddro(model, ref, BallKind::WeightedL2, pt.c, cfg);
            std::vector<double> costs(model.outcomes());
            for (std::size_t i = 0; i < costs.size(); ++i) {
                costs[i] = model.evaluate(rep.x_star, i);
            }
            pt.mean = expectation(ref, costs);
            pt.stddev = std::sqrt(variance(ref, costs));
            pt.objective = rep.objective;
            pt.converged = rep.converged;
            pt.x_star = rep.x_star;
        } catch (const Error& e) {
            pt.failed = true;
            pt.error = e.what();
        }
    };

    if (config.check_model_gradient) verify_model_gradient(model);
    const unsigned threads =
        model.concurrent_safe() ? std::max(1u, max_threads) : 1u;
    if (threads <= 1 || points.size() <= 1) {
        for (std::size_t k = 0; k < points.size(); ++k) run_point(k);
        return points;
    }
    std::vector<std::thread> pool;
    std::size_t next = 0;
    const std::size_t n = points.size();
    std::mutex mu;
    for (unsigned t = 0; t < std::min<unsigned>(threads, n); ++t) {
        pool.emplace_back([&]() {
            while (true) {
                std::size_t k;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= n) return;
                    k = next++;
                }
                run_point(k);
            }
        });
    }
    for (auto& th : pool) th.join();
    return points;
}

InnerSolveResult minimize_duals(std::span<const double> costs, const ReferenceDistribution& ref,
                                BallKind kind, double c, const SolverConfig& config) {
    if (!(c > 0.0)) throw NonPositiveRadius("radius must be positive");
    if (kind == BallKind::TotalVariation) {
        throw InvalidArgument("minimize_duals supports the l2 and dr balls");
    }
    if (costs.size() != ref.size()) {
        throw DimensionMismatch("costs size " + std::to_string(costs.size()) +
                                " vs reference size " + std::to_string(ref.size()));
    }
    JointProblem problem;
    problem.fixed_costs.assign(costs.begin(), costs.end());
    problem.ref = &ref;
    problem.kind = kind;
    problem.c = c;

    Vec z = initial_point(problem);
    const RoundOutcome outcome = continuation(problem, z, config, nullptr, nullptr);

    InnerSolveResult result;
    result.converged = outcome.converged;
    result.dual = extract_duals(problem, z);
    result.value = problem.report(z, problem.fixed_costs);

    // Extended-value refinement: the infimum may sit on the lambda = 0
    // boundary, which the smooth iterates only approach.
    const double top = *std::max_element(costs.begin(), costs.end());
    if (kind == BallKind::WeightedL2) {
        const ExtendedValue boundary = g_l2_extended(costs, ref, c, 0.0, top);
        if (boundary.is_finite() && boundary.value() < result.value) {
            result.value = boundary.value();
            result.dual = DualPointL2{0.0, top};
        }
    } else {
        // For each candidate nu, the per-outcome minimum over lambda_i of the
        // extended objective is attained at lambda_i = max(0, J_i - nu);
        // scanning the support kinks yields the exact infimum.
        double best_nu = z.back();
        double best_value = result.value;
        for (std::size_t k = 0; k <= costs.size(); ++k) {
            const double nu = (k < costs.size()) ? costs[k] : z.back();
            std::vector<double> lambdas(costs.size());
            for (std::size_t i = 0; i < costs.size(); ++i) {
                lambdas[i] = std::max(0.0, costs[i] - nu);
            }
            const ExtendedValue v = g_dr_extended(costs, ref, c, lambdas, nu);
            if (v.is_finite() && v.value() < best_value) {
                best_value = v.value();
                best_nu = nu;
            }
        }
        if (best_value < result.value) {
            DualPointDR d;
            d.nu = best_nu;
            d.lambdas.resize(costs.size());
            for (std::size_t i = 0; i < costs.size(); ++i) {
                d.lambdas[i] = std::max(0.0, costs[i] - best_nu);
            }
            result.value = best_value;
            result.dual = std::move(d);
        }
    }
    return result;
}

double dual_infimum(std::span<const double> costs, const ReferenceDistribution& ref,
                    BallKind kind, double c) {
    SolverConfig cfg;
    cfg.gradient_tolerance = 1e-12;
    cfg.max_iterations = 20000;
    return minimize_duals(costs, ref, kind, c, cfg).value;
}

}  // namespace ddro
