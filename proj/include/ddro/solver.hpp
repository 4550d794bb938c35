#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddro/distribution.hpp"
#include "ddro/dual.hpp"

namespace ddro {

// Cost model J(x, i) over a convex feasible set that the model itself knows
// how to project onto. Implementations state whether evaluate/gradient_x are
// safe for concurrent read-only use; sweeps respect that declaration.
class CostModel {
public:
    virtual ~CostModel() = default;

    virtual std::size_t dimension() const = 0;
    virtual std::size_t outcomes() const = 0;
    virtual double evaluate(std::span<const double> x, std::size_t outcome) const = 0;
    virtual std::vector<double> gradient_x(std::span<const double> x,
                                           std::size_t outcome) const = 0;
    virtual std::vector<double> project(std::vector<double> x) const = 0;
    virtual std::vector<double> feasible_start() const = 0;
    virtual bool concurrent_safe() const { return true; }
};

struct SolverConfig {
    double barrier_weight = 0.1;    // weight of -ln(lambda)
    double barrier_decay = 0.2;     // per continuation round
    int barrier_rounds = 4;
    int max_iterations = 5000;      // per round
    double gradient_tolerance = 1e-7;
    double armijo_shrink = 0.5;
    double armijo_slope = 1e-4;
    bool check_model_gradient = true;
};

struct SolveReport {
    std::vector<double> x_star;
    std::optional<DualPoint> dual_star;
    double objective = 0.0;  // dual objective at (x_star, dual_star), no barrier
    int iterations = 0;
    bool converged = false;
    std::vector<double> history;         // objective per iteration
    std::vector<double> gradient_norms;  // projected-gradient norm per iteration
    std::vector<std::size_t> round_ends; // history offsets at each barrier round end
    // Theorem-level smoothness conditions evaluated a posteriori at x_star
    // (meaningful for L2-ball solves).
    bool smooth_conditions_held = false;
};

// Checks gradient_x against central finite differences (h = 1e-6, relative
// 1e-4) at interior probe points; throws ModelGradientMismatch on failure.
void verify_model_gradient(const CostModel& model);

// Joint projected-descent minimization of the dual objective over
// (x, lambda..., nu) with log-barrier continuation on the multipliers and a
// final barrier-free polish round (hard floor lambda >= 1e-10).
SolveReport solve_ddro(const CostModel& model, const ReferenceDistribution& ref,
                       BallKind kind, double c, const SolverConfig& config = {});

// Baseline: minimize E_ref[J(x, .)] with the same descent machinery.
SolveReport solve_soc(const CostModel& model, const ReferenceDistribution& ref,
                      const SolverConfig& config = {});

struct ParetoPoint {
    double c = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double objective = 0.0;
    bool converged = false;
    bool failed = false;       // solver error captured, sweep continued
    std::string error;
    std::vector<double> x_star;
};

// One L2-ball solve per radius; reports mean and std of J(x*, .) under ref.
// Points run concurrently (up to max_threads) when the model allows it.
std::vector<ParetoPoint> pareto_sweep(const CostModel& model, const ReferenceDistribution& ref,
                                      std::span<const double> c_list,
                                      const SolverConfig& config = {},
                                      unsigned max_threads = 1);

struct InnerSolveResult {
    DualPoint dual;
    double value = 0.0;
    bool converged = false;
};

// Inner routine: minimize the dual objective over the multipliers at fixed
// costs. Runs the barrier-continuation descent, then refines against the
// extended-value boundary candidates, so the result is the extended infimum
// (exact for DR, descent-accurate for L2).
InnerSolveResult minimize_duals(std::span<const double> costs, const ReferenceDistribution& ref,
                                BallKind kind, double c, const SolverConfig& config = {});

// Convenience wrapper returning just the inner-dual infimum value, using a
// tightened configuration.
double dual_infimum(std::span<const double> costs, const ReferenceDistribution& ref,
                    BallKind kind, double c);

}  // namespace ddro
