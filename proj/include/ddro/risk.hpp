#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ddro/distribution.hpp"

namespace ddro {

// Cost values J(x, .) for a fixed decision, one entry per outcome.
using CostVector = std::vector<double>;

// Level beta in [0, 1); the DR-ball radius c maps to beta = c / (1 + c).
struct ProbabilityLevel {
    double beta;

    explicit ProbabilityLevel(double b);
    static ProbabilityLevel from_radius(double c);
};

// Smallest cost value alpha in the support with P_ref[J <= alpha] >= beta.
double value_at_risk(std::span<const double> costs, const ReferenceDistribution& ref,
                     ProbabilityLevel beta);

// Conditional mean over the strict exceedance {J > VaR}; falls back to VaR
// itself when that event has probability zero (constant costs).
double cvar_hat(std::span<const double> costs, const ReferenceDistribution& ref,
                ProbabilityLevel beta);

// Conditional mean over the non-strict exceedance {J >= VaR}.
double cvar_nonstrict(std::span<const double> costs, const ReferenceDistribution& ref,
                      ProbabilityLevel beta);

// nu + (1 - beta)^-1 E_ref[max(0, J - nu)].
double f_beta(std::span<const double> costs, const ReferenceDistribution& ref,
              ProbabilityLevel beta, double nu);

// f_beta evaluated at its minimizer nu = VaR_beta. Sits between the
// non-strict and strict conditional means; equals the strict one whenever
// P_ref[J <= VaR] = beta. This is the value the DR-ball worst case attains,
// and the evaluation used for CVaR tables (at beta = 0 it reduces to the
// plain mean).
double cvar_tilde(std::span<const double> costs, const ReferenceDistribution& ref,
                  ProbabilityLevel beta);

// E_ref[J] + c * sqrt(Var_ref[J]).
double mean_std_objective(std::span<const double> costs, const ReferenceDistribution& ref,
                          double c);

// Average of the `count` largest cost entries.
double worst_c_average(std::span<const double> costs, std::size_t count);

}  // namespace ddro
