#pragma once

#include <span>
#include <variant>
#include <vector>

#include "ddro/distribution.hpp"

namespace ddro {

// Multipliers for the weighted-L2 ball: scalar pair (lambda, nu).
struct DualPointL2 {
    double lambda = 1.0;
    double nu = 0.0;
};

// Multipliers for the DR ball: one lambda per outcome plus nu.
struct DualPointDR {
    std::vector<double> lambdas;
    double nu = 0.0;
};

using DualPoint = std::variant<DualPointL2, DualPointDR>;

// Real line extended with +infinity kept as an explicit tag, never a float
// sentinel.
class ExtendedValue {
public:
    static ExtendedValue finite(double v) { return ExtendedValue(v, true); }
    static ExtendedValue infinity() { return ExtendedValue(0.0, false); }

    bool is_finite() const noexcept { return finite_; }
    double value() const {
        if (!finite_) throw InvalidArgument("extended value is +infinity");
        return value_;
    }

private:
    ExtendedValue(double v, bool f) : value_(v), finite_(f) {}
    double value_;
    bool finite_;
};

// Smooth dual objective of the weighted-L2 ball,
//   lambda E_ref[max(0, (J + 2 lambda - nu) / (2 lambda))^2]
//   + lambda (c^2 - 1) + nu,             lambda > 0.
double g_l2(std::span<const double> costs, const ReferenceDistribution& ref, double c,
            const DualPointL2& dual);

// Extended-value version: at lambda = 0 equals nu when max J <= nu and
// +infinity otherwise.
ExtendedValue g_l2_extended(std::span<const double> costs, const ReferenceDistribution& ref,
                            double c, double lambda, double nu);

// Smooth dual objective of the DR ball,
//   E_ref[(1 + c) lambda_i exp((J_i - lambda_i - nu) / lambda_i) + nu],
// all lambda_i > 0. Throws OverflowGuard when an exponent exceeds 700.
double g_dr(std::span<const double> costs, const ReferenceDistribution& ref, double c,
            const DualPointDR& dual);

ExtendedValue g_dr_extended(std::span<const double> costs, const ReferenceDistribution& ref,
                            double c, std::span<const double> lambdas, double nu);

struct GradientL2 {
    double dlambda = 0.0;
    double dnu = 0.0;
};

struct GradientDR {
    std::vector<double> dlambdas;
    double dnu = 0.0;
};

// Analytic partials over the smooth domain. The squared hinge in g_l2 is C1;
// its one-sided derivative at the kink is zero and the formulas below produce
// exactly that.
GradientL2 grad_g_l2(std::span<const double> costs, const ReferenceDistribution& ref,
                     double c, const DualPointL2& dual);
GradientDR grad_g_dr(std::span<const double> costs, const ReferenceDistribution& ref,
                     double c, const DualPointDR& dual);

// Stacked gradient (lambda..., nu) for either multiplier layout.
std::vector<double> grad_duals(std::span<const double> costs, const ReferenceDistribution& ref,
                               double c, const DualPoint& dual);

// Partials with respect to each cost entry, used by the outer solver's chain
// rule. These equal ref(i) times the worst-case density ratio the multipliers
// encode.
std::vector<double> g_l2_cost_gradient(std::span<const double> costs,
                                       const ReferenceDistribution& ref, double c,
                                       const DualPointL2& dual);
std::vector<double> g_dr_cost_gradient(std::span<const double> costs,
                                       const ReferenceDistribution& ref, double c,
                                       const DualPointDR& dual);

}  // namespace ddro
