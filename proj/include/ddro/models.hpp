#pragma once

#include <vector>

#include "ddro/solver.hpp"

namespace ddro {

// J(x, i) = ||x - anchor_i||^2 over a box — the simplest smooth strictly
// convex cost model, used for cross-checking solvers against grid search.
class QuadraticCost final : public CostModel {
public:
    QuadraticCost(std::vector<std::vector<double>> anchors, double lo = -10.0,
                  double hi = 10.0);

    std::size_t dimension() const override { return dim_; }
    std::size_t outcomes() const override { return anchors_.size(); }
    double evaluate(std::span<const double> x, std::size_t outcome) const override;
    std::vector<double> gradient_x(std::span<const double> x,
                                   std::size_t outcome) const override;
    std::vector<double> project(std::vector<double> x) const override;
    std::vector<double> feasible_start() const override;

private:
    std::vector<std::vector<double>> anchors_;
    std::size_t dim_;
    double lo_;
    double hi_;
};

}  // namespace ddro
