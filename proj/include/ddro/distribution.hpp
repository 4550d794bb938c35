#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ddro/errors.hpp"

namespace ddro {

// Probability mass function over outcomes {0, ..., m-1}. Immutable once
// constructed; the constructor validates and renormalizes away float dust so
// masses always sum to 1 within 1e-12.
class DiscreteDistribution {
public:
    explicit DiscreteDistribution(std::vector<double> mass);

    std::size_t size() const noexcept { return mass_.size(); }
    double operator[](std::size_t i) const noexcept { return mass_[i]; }
    const std::vector<double>& mass() const noexcept { return mass_; }

private:
    std::vector<double> mass_;
};

// Ball center: a distribution with strictly positive mass everywhere, so
// density ratios are always defined.
class ReferenceDistribution {
public:
    explicit ReferenceDistribution(std::vector<double> mass);
    static ReferenceDistribution uniform(std::size_t m);

    std::size_t size() const noexcept { return dist_.size(); }
    double operator[](std::size_t i) const noexcept { return dist_[i]; }
    const std::vector<double>& mass() const noexcept { return dist_.mass(); }
    const DiscreteDistribution& distribution() const noexcept { return dist_; }

private:
    explicit ReferenceDistribution(DiscreteDistribution d) : dist_(std::move(d)) {}
    DiscreteDistribution dist_;
};

// Pointwise ratio r(i) = p(i)/ref(i).
struct DensityRatioVector {
    std::vector<double> ratio;
};

enum class BallKind { WeightedL2, DensityRatio, TotalVariation };

std::string to_string(BallKind kind);
BallKind ball_kind_from_string(const std::string& name);

// Ambiguity set descriptor: all distributions within `radius` of `reference`
// in the metric selected by `kind`.
class Ball {
public:
    Ball(BallKind kind, double radius, ReferenceDistribution reference);

    BallKind kind() const noexcept { return kind_; }
    double radius() const noexcept { return radius_; }
    const ReferenceDistribution& reference() const noexcept { return reference_; }

private:
    BallKind kind_;
    double radius_;
    ReferenceDistribution reference_;
};

DensityRatioVector density_ratio(const DiscreteDistribution& p,
                                 const ReferenceDistribution& ref);

// Distances from the reference in each ball metric. The DR "distance" is the
// smallest c with max r <= 1 + c, clamped at zero.
double l2_distance(const ReferenceDistribution& ref, const DiscreteDistribution& p);
double dr_distance(const ReferenceDistribution& ref, const DiscreteDistribution& p);
double tv_distance(const ReferenceDistribution& ref, const DiscreteDistribution& p);

bool ball_contains(const Ball& ball, const DiscreteDistribution& p);

// Smallest radius c >= 0 placing p inside the ball of the given kind.
double minimal_radius(BallKind kind, const ReferenceDistribution& ref,
                      const DiscreteDistribution& p);

// Moments of a cost vector under a distribution. Variance is two-pass.
double expectation(const DiscreteDistribution& dist, std::span<const double> values);
double expectation(const ReferenceDistribution& ref, std::span<const double> values);
double variance(const ReferenceDistribution& ref, std::span<const double> values);

}  // namespace ddro
