#include "ddro/dual.hpp"

#include <algorithm>
#include <cmath>

namespace ddro {

namespace {

constexpr double kExponentCap = 700.0;

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": sizes " +
                                std::to_string(a) + " and " + std::to_string(b));
    }
}

void require_positive_lambda(double lambda) {
    if (!(lambda > 0.0)) {
        throw NonPositiveLambda("lambda must be positive, got " + std::to_string(lambda));
    }
}

void require_positive_radius(double c) {
    if (!(c > 0.0)) throw NonPositiveRadius("radius must be positive");
}

}  // namespace

double g_l2(std::span<const double> costs, const ReferenceDistribution& ref, double c,
            const DualPointL2& dual) {
    require_same_size(costs.size(), ref.size(), "g_l2");
    require_positive_radius(c);
    require_positive_lambda(dual.lambda);
    const double lambda = dual.lambda;
    const double nu = dual.nu;
    double acc = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double u = std::max(0.0, (costs[i] + 2.0 * lambda - nu) / (2.0 * lambda));
        acc += ref[i] * u * u;
    }
    return lambda * acc + lambda * (c * c - 1.0) + nu;
}

ExtendedValue g_l2_extended(std::span<const double> costs, const ReferenceDistribution& ref,
                            double c, double lambda, double nu) {
    require_same_size(costs.size(), ref.size(), "g_l2_extended");
    if (lambda < 0.0) throw NonPositiveLambda("lambda must be non-negative");
    if (lambda == 0.0) {
        const double top = *std::max_element(costs.begin(), costs.end());
        if (top <= nu) return ExtendedValue::finite(nu);
        return ExtendedValue::infinity();
    }
    return ExtendedValue::finite(g_l2(costs, ref, c, DualPointL2{lambda, nu}));
}

double g_dr(std::span<const double> costs, const ReferenceDistribution& ref, double c,
            const DualPointDR& dual) {
    require_same_size(costs.size(), ref.size(), "g_dr");
    require_same_size(dual.lambdas.size(), ref.size(), "g_dr multipliers");
    require_positive_radius(c);
    const double nu = dual.nu;
    double acc = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double lambda = dual.lambdas[i];
        require_positive_lambda(lambda);
        const double t = (costs[i] - lambda - nu) / lambda;
        if (t > kExponentCap) {
            throw OverflowGuard("dual exponent " + std::to_string(t) + " at outcome " +
                                std::to_string(i));
        }
        acc += ref[i] * ((1.0 + c) * lambda * std::exp(t) + nu);
    }
    return acc;
}

ExtendedValue g_dr_extended(std::span<const double> costs, const ReferenceDistribution& ref,
                            double c, std::span<const double> lambdas, double nu) {
    require_same_size(costs.size(), ref.size(), "g_dr_extended");
    require_same_size(lambdas.size(), ref.size(), "g_dr_extended multipliers");
    require_positive_radius(c);
    double acc = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double lambda = lambdas[i];
        if (lambda < 0.0) throw NonPositiveLambda("lambda must be non-negative");
        if (lambda == 0.0) {
            if (costs[i] > nu) return ExtendedValue::infinity();
            acc += ref[i] * nu;
            continue;
        }
        const double t = (costs[i] - lambda - nu) / lambda;
        if (t > kExponentCap) {
            throw OverflowGuard("dual exponent " + std::to_string(t) + " at outcome " +
                                std::to_string(i));
        }
        acc += ref[i] * ((1.0 + c) * lambda * std::exp(t) + nu);
    }
    return ExtendedValue::finite(acc);
}

GradientL2 grad_g_l2(std::span<const double> costs, const ReferenceDistribution& ref,
                     double c, const DualPointL2& dual) {
    require_same_size(costs.size(), ref.size(), "grad_g_l2");
    require_positive_radius(c);
    require_positive_lambda(dual.lambda);
    const double lambda = dual.lambda;
    const double nu = dual.nu;
    double dl = 0.0;
    double dn = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double u = std::max(0.0, (costs[i] + 2.0 * lambda - nu) / (2.0 * lambda));
        dl += ref[i] * (u * u - u * (costs[i] - nu) / lambda);
        dn += ref[i] * u;
    }
    return GradientL2{dl + c * c - 1.0, 1.0 - dn};
}

GradientDR grad_g_dr(std::span<const double> costs, const ReferenceDistribution& ref,
                     double c, const DualPointDR& dual) {
    require_same_size(costs.size(), ref.size(), "grad_g_dr");
    require_same_size(dual.lambdas.size(), ref.size(), "grad_g_dr multipliers");
    require_positive_radius(c);
    const double nu = dual.nu;
    GradientDR g;
    g.dlambdas.resize(costs.size());
    double expect = 0.0;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double lambda = dual.lambdas[i];
        require_positive_lambda(lambda);
        const double t = (costs[i] - lambda - nu) / lambda;
        if (t > kExponentCap) {
            throw OverflowGuard("dual exponent " + std::to_string(t) + " at outcome " +
                                std::to_string(i));
        }
        const double e = std::exp(t);
        g.dlambdas[i] = ref[i] * (1.0 + c) * e * (1.0 - (costs[i] - nu) / lambda);
        expect += ref[i] * e;
    }
    g.dnu = 1.0 - (1.0 + c) * expect;
    return g;
}

std::vector<double> grad_duals(std::span<const double> costs, const ReferenceDistribution& ref,
                               double c, const DualPoint& dual) {
    if (const auto* l2 = std::get_if<DualPointL2>(&dual)) {
        const GradientL2 g = grad_g_l2(costs, ref, c, *l2);
        return {g.dlambda, g.dnu};
    }
    const auto& dr = std::get<DualPointDR>(dual);
    GradientDR g = grad_g_dr(costs, ref, c, dr);
    std::vector<double> out = std::move(g.dlambdas);
    out.push_back(g.dnu);
    return out;
}

std::vector<double> g_l2_cost_gradient(std::span<const double> costs,
                                       const ReferenceDistribution& ref, double c,
                                       const DualPointL2& dual) {
    require_same_size(costs.size(), ref.size(), "g_l2_cost_gradient");
    require_positive_radius(c);
    require_positive_lambda(dual.lambda);
    std::vector<double> out(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double u =
            std::max(0.0, (costs[i] + 2.0 * dual.lambda - dual.nu) / (2.0 * dual.lambda));
        out[i] = ref[i] * u;
    }
    return out;
}

std::vector<double> g_dr_cost_gradient(std::span<const double> costs,
                                       const ReferenceDistribution& ref, double c,
                                       const DualPointDR& dual) {
    require_same_size(costs.size(), ref.size(), "g_dr_cost_gradient");
    require_same_size(dual.lambdas.size(), ref.size(), "g_dr_cost_gradient multipliers");
    require_positive_radius(c);
    std::vector<double> out(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) {
        const double lambda = dual.lambdas[i];
        require_positive_lambda(lambda);
        const double t = (costs[i] - lambda - dual.nu) / lambda;
        if (t > kExponentCap) {
            throw OverflowGuard("dual exponent " + std::to_string(t) + " at outcome " +
                                std::to_string(i));
        }
        out[i] = ref[i] * (1.0 + c) * std::exp(t);
    }
    return out;
}

}  // namespace ddro
