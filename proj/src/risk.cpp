#include "ddro/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ddro {

namespace {

constexpr double kLevelSlack = 1e-12;

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": sizes " +
                                std::to_string(a) + " and " + std::to_string(b));
    }
}

void require_finite(std::span<const double> costs) {
    for (double v : costs) {
        if (!std::isfinite(v)) throw InvalidArgument("cost entries must be finite");
    }
}

}  // namespace

ProbabilityLevel::ProbabilityLevel(double b) : beta(b) {
    if (!(b >= 0.0) || !(b < 1.0)) {
        throw InvalidArgument("probability level must lie in [0, 1), got " +
                              std::to_string(b));
    }
}

ProbabilityLevel ProbabilityLevel::from_radius(double c) {
    if (!(c > 0.0)) throw NonPositiveRadius("radius must be positive");
    return ProbabilityLevel(c / (1.0 + c));
}

double value_at_risk(std::span<const double> costs, const ReferenceDistribution& ref,
                     ProbabilityLevel beta) {
    require_same_size(costs.size(), ref.size(), "value_at_risk");
    require_finite(costs);
    std::vector<std::size_t> order(costs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    double cum = 0.0;
    for (std::size_t k : order) {
        cum += ref[k];
        if (cum >= beta.beta - kLevelSlack) return costs[k];
    }
    return costs[order.back()];
}

double cvar_hat(std::span<const double> costs, const ReferenceDistribution& ref,
                ProbabilityLevel beta) {
    const double var = value_at_risk(costs, ref, beta);
    double mass = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (costs[i] > var) {
            mass += ref[i];
            acc += ref[i] * costs[i];
        }
    }
    if (mass <= 0.0) return var;
    return acc / mass;
}

double cvar_nonstrict(std::span<const double> costs, const ReferenceDistribution& ref,
                      ProbabilityLevel beta) {
    const double var = value_at_risk(costs, ref, beta);
    double mass = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (costs[i] >= var) {
            mass += ref[i];
            acc += ref[i] * costs[i];
        }
    }
    return acc / mass;
}

double f_beta(std::span<const double> costs, const ReferenceDistribution& ref,
              ProbabilityLevel beta, double nu) {
    require_same_size(costs.size(), ref.size(), "f_beta");
    require_finite(costs);
    double acc = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        acc += ref[i] * std::max(0.0, costs[i] - nu);
    }
    return nu + acc / (1.0 - beta.beta);
}

double cvar_tilde(std::span<const double> costs, const ReferenceDistribution& ref,
                  ProbabilityLevel beta) {
    return f_beta(costs, ref, beta, value_at_risk(costs, ref, beta));
}

double mean_std_objective(std::span<const double> costs, const ReferenceDistribution& ref,
                          double c) {
    if (c < 0.0) throw InvalidArgument("mean+std weight must be non-negative");
    require_finite(costs);
    return expectation(ref, costs) + c * std::sqrt(variance(ref, costs));
}

double worst_c_average(std::span<const double> costs, std::size_t count) {
    if (count < 1 || count > costs.size()) {
        throw CountOutOfRange("count " + std::to_string(count) + " not in [1, " +
                              std::to_string(costs.size()) + "]");
    }
    require_finite(costs);
    std::vector<double> sorted(costs.begin(), costs.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) acc += sorted[i];
    return acc / static_cast<double>(count);
}

}  // namespace ddro
