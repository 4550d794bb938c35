#include "ddro/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ddro {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kSumTolerance = 1e-9;
constexpr double kMembershipSlack = 1e-12;

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": sizes " +
                                std::to_string(a) + " and " + std::to_string(b));
    }
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> mass)
    : mass_(std::move(mass)) {
    if (mass_.empty()) {
        throw InvalidArgument("distribution needs at least one outcome");
    }
    double total = 0.0;
    for (double x : mass_) {
        if (!std::isfinite(x)) throw InvalidArgument("distribution mass must be finite");
        if (x < -kMassTolerance) {
            throw NegativeMass("mass entry " + std::to_string(x) + " is negative");
        }
        total += x;
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
        throw NotNormalized("mass sums to " + std::to_string(total));
    }
    for (auto& x : mass_) x = std::max(x, 0.0) / total;
}

ReferenceDistribution::ReferenceDistribution(std::vector<double> mass)
    : dist_(std::move(mass)) {
    for (std::size_t i = 0; i < dist_.size(); ++i) {
        if (dist_[i] <= 0.0) {
            throw InvalidArgument("reference mass must be strictly positive at outcome " +
                                  std::to_string(i));
        }
    }
}

ReferenceDistribution ReferenceDistribution::uniform(std::size_t m) {
    if (m == 0) throw InvalidArgument("uniform reference needs m >= 1");
    return ReferenceDistribution(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

std::string to_string(BallKind kind) {
    switch (kind) {
        case BallKind::WeightedL2: return "l2";
        case BallKind::DensityRatio: return "dr";
        case BallKind::TotalVariation: return "tv";
    }
    return "?";
}

BallKind ball_kind_from_string(const std::string& name) {
    if (name == "l2") return BallKind::WeightedL2;
    if (name == "dr") return BallKind::DensityRatio;
    if (name == "tv") return BallKind::TotalVariation;
    throw InvalidArgument("unknown ball kind '" + name + "' (expected l2, dr or tv)");
}

Ball::Ball(BallKind kind, double radius, ReferenceDistribution reference)
    : kind_(kind), radius_(radius), reference_(std::move(reference)) {
    if (!(radius > 0.0)) {
        throw NonPositiveRadius("ball radius must be positive, got " + std::to_string(radius));
    }
}

DensityRatioVector density_ratio(const DiscreteDistribution& p,
                                 const ReferenceDistribution& ref) {
    require_same_size(p.size(), ref.size(), "density_ratio");
    DensityRatioVector r;
    r.ratio.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) r.ratio[i] = p[i] / ref[i];
    return r;
}

double l2_distance(const ReferenceDistribution& ref, const DiscreteDistribution& p) {
    require_same_size(p.size(), ref.size(), "l2_distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] / ref[i] - 1.0;
        acc += ref[i] * d * d;
    }
    return std::sqrt(acc);
}

double dr_distance(const ReferenceDistribution& ref, const DiscreteDistribution& p) {
    require_same_size(p.size(), ref.size(), "dr_distance");
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        worst = std::max(worst, p[i] / ref[i] - 1.0);
    }
    return worst;
}

double tv_distance(const ReferenceDistribution& ref, const DiscreteDistribution& p) {
    require_same_size(p.size(), ref.size(), "tv_distance");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += ref[i] * std::abs(p[i] / ref[i] - 1.0);
    }
    return acc;
}

bool ball_contains(const Ball& ball, const DiscreteDistribution& p) {
    const double slack = ball.radius() + kMembershipSlack;
    switch (ball.kind()) {
        case BallKind::WeightedL2: return l2_distance(ball.reference(), p) <= slack;
        case BallKind::DensityRatio: return dr_distance(ball.reference(), p) <= slack;
        case BallKind::TotalVariation: return tv_distance(ball.reference(), p) <= slack;
    }
    return false;
}

double minimal_radius(BallKind kind, const ReferenceDistribution& ref,
                      const DiscreteDistribution& p) {
    switch (kind) {
        case BallKind::WeightedL2: return l2_distance(ref, p);
        case BallKind::DensityRatio: return dr_distance(ref, p);
        case BallKind::TotalVariation: return tv_distance(ref, p);
    }
    return 0.0;
}

double expectation(const DiscreteDistribution& dist, std::span<const double> values) {
    require_same_size(dist.size(), values.size(), "expectation");
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) acc += dist[i] * values[i];
    return acc;
}

double expectation(const ReferenceDistribution& ref, std::span<const double> values) {
    return expectation(ref.distribution(), values);
}

double variance(const ReferenceDistribution& ref, std::span<const double> values) {
    const double mean = expectation(ref, values);
    double acc = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = values[i] - mean;
        acc += ref[i] * d * d;
    }
    return acc;
}

}  // namespace ddro
