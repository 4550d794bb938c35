#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "ddro/distribution.hpp"
#include "ddro/dual.hpp"
#include "ddro/rng.hpp"

namespace ddro {

// Outcome of an inner maximization: the worst-case expected cost, an
// attaining distribution when one is available, and the multipliers of the
// dual reformulation when the closed form applies.
struct WorstCaseResult {
    double value = 0.0;
    std::optional<DiscreteDistribution> distribution;
    std::optional<DualPoint> multipliers;
};

// Worst-case expectation over the weighted-L2 ball. Uses the closed form
//   value = E[J] + c sqrt(Var[J]),  lambda* = std/(2c),  nu* = E[J]
// when min J > E[J] - std/c and E[J] + c std < max J; otherwise falls back
// to the seeded projected-ascent search (same routine as the oracle).
WorstCaseResult worst_expectation_l2(std::span<const double> costs,
                                     const ReferenceDistribution& ref, double c,
                                     std::uint64_t fallback_seed = 0);

// Worst-case expectation over the DR ball: f_beta at nu = VaR with
// beta = c/(1+c). The attaining distribution fills caps (1+c) ref(i) in
// descending cost order; leftover mass lands on the next outcome in that
// order (lowest index among cost ties).
WorstCaseResult worst_expectation_dr(std::span<const double> costs,
                                     const ReferenceDistribution& ref, double c);

// Verification oracle, desk scale only (m <= 12). DR and TV balls are solved
// exactly by the sorted greedy linear program; the L2 ball by projected
// gradient ascent over the ball-simplex intersection with random restarts.
double oracle_worst_expectation(std::span<const double> costs, const Ball& ball, Rng& rng);

}  // namespace ddro
