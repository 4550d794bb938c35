#include "ddro/models.hpp"

#include <algorithm>

namespace ddro {

QuadraticCost::QuadraticCost(std::vector<std::vector<double>> anchors, double lo, double hi)
    : anchors_(std::move(anchors)), lo_(lo), hi_(hi) {
    if (anchors_.empty()) throw InvalidArgument("quadratic model needs anchors");
    dim_ = anchors_.front().size();
    if (dim_ == 0) throw InvalidArgument("quadratic model needs dimension >= 1");
    for (const auto& a : anchors_) {
        if (a.size() != dim_) throw DimensionMismatch("anchor dimensions differ");
    }
    if (!(lo_ < hi_)) throw InvalidArgument("quadratic model box is empty");
}

double QuadraticCost::evaluate(std::span<const double> x, std::size_t outcome) const {
    const auto& a = anchors_[outcome];
    double acc = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
        const double d = x[j] - a[j];
        acc += d * d;
    }
    return acc;
}

std::vector<double> QuadraticCost::gradient_x(std::span<const double> x,
                                              std::size_t outcome) const {
    const auto& a = anchors_[outcome];
    std::vector<double> g(dim_);
    for (std::size_t j = 0; j < dim_; ++j) g[j] = 2.0 * (x[j] - a[j]);
    return g;
}

std::vector<double> QuadraticCost::project(std::vector<double> x) const {
    for (auto& v : x) v = std::clamp(v, lo_, hi_);
    return x;
}

std::vector<double> QuadraticCost::feasible_start() const {
    return std::vector<double>(dim_, 0.5 * (lo_ + hi_));
}

}  // namespace ddro
