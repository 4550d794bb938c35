#include "ddro/worst_case.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ddro/risk.hpp"

namespace ddro {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": sizes " +
                                std::to_string(a) + " and " + std::to_string(b));
    }
}

std::vector<std::size_t> descending_cost_order(std::span<const double> costs) {
    std::vector<std::size_t> order(costs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return costs[a] > costs[b];
    });
    return order;
}

// Exact maximizer of E_p[J] over {0 <= p_i <= (1+c) ref_i, sum p = 1}.
std::vector<double> greedy_dr_fill(std::span<const double> costs,
                                   const ReferenceDistribution& ref, double c) {
    std::vector<double> p(costs.size(), 0.0);
    double remaining = 1.0;
    for (std::size_t k : descending_cost_order(costs)) {
        const double cap = (1.0 + c) * ref[k];
        const double take = std::min(cap, remaining);
        p[k] = take;
        remaining -= take;
        if (remaining <= 0.0) break;
    }
    return p;
}

// Exact maximizer of E_p[J] over the TV ball: move up to c/2 of mass from the
// cheapest outcomes onto the single most expensive one.
double greedy_tv_value(std::span<const double> costs, const ReferenceDistribution& ref,
                       double c) {
    const std::size_t m = costs.size();
    std::size_t top = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (costs[i] > costs[top]) top = i;
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    double value = expectation(ref, costs);
    double budget = c / 2.0;
    for (std::size_t k : order) {
        if (k == top || budget <= 0.0) continue;
        const double moved = std::min(budget, ref[k]);
        value += moved * (costs[top] - costs[k]);
        budget -= moved;
    }
    return value;
}

// -------- projected ascent over the weighted-L2 ball --------
//
// Works in whitened coordinates u_i = (p_i - ref_i)/sqrt(ref_i), where the
// ball is Euclidean (||u|| <= c) and the simplex becomes
// {sum a_i u_i = 0, u_i >= -a_i} with a_i = sqrt(ref_i).

struct Whitened {
    std::vector<double> a;      // sqrt(ref)
    std::vector<double> lower;  // -sqrt(ref)
};

Whitened whiten(const ReferenceDistribution& ref) {
    Whitened w;
    w.a.resize(ref.size());
    w.lower.resize(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        w.a[i] = std::sqrt(ref[i]);
        w.lower[i] = -w.a[i];
    }
    return w;
}

double norm2(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

// Exact projection onto {u : sum a_i u_i = 0, u_i >= lower_i} by walking the
// breakpoints of the piecewise-linear multiplier equation.
std::vector<double> project_plane_box(const Whitened& w, const std::vector<double>& v) {
    const std::size_t m = v.size();
    std::vector<double> tau(m);
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) tau[i] = (v[i] - w.lower[i]) / w.a[i];
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return tau[a] < tau[b]; });

    double s_av = 0.0;  // sum over active entries of a_i v_i
    double s_aa = 0.0;  // sum over active entries of a_i^2
    double s_al = 0.0;  // sum over clamped entries of a_i lower_i
    for (std::size_t i = 0; i < m; ++i) {
        s_av += w.a[i] * v[i];
        s_aa += w.a[i] * w.a[i];
    }
    double root = 0.0;
    bool found = false;
    for (std::size_t k = 0; k <= m; ++k) {
        const double hi = (k < m) ? tau[order[k]] : std::numeric_limits<double>::infinity();
        if (s_aa > 0.0) {
            const double candidate = (s_av + s_al) / s_aa;
            if (candidate <= hi) {
                root = candidate;
                found = true;
                break;
            }
        }
        if (k < m) {
            const std::size_t i = order[k];
            s_av -= w.a[i] * v[i];
            s_aa -= w.a[i] * w.a[i];
            s_al += w.a[i] * w.lower[i];
        }
    }
    if (!found) root = tau[order.back()];
    std::vector<double> u(m);
    for (std::size_t i = 0; i < m; ++i) u[i] = std::max(w.lower[i], v[i] - root * w.a[i]);
    return u;
}

std::vector<double> project_ball(std::vector<double> u, double c) {
    const double n = norm2(u);
    if (n > c && n > 0.0) {
        const double s = c / n;
        for (auto& x : u) x *= s;
    }
    return u;
}

// Dykstra alternation between the ball and the plane-box polyhedron. The
// final iterate satisfies the polyhedron exactly and the ball within 1e-13.
std::vector<double> project_feasible(const Whitened& w, double c, std::vector<double> v) {
    const std::size_t m = v.size();
    std::vector<double> x = std::move(v);
    std::vector<double> p(m, 0.0), q(m, 0.0), y(m), t(m);
    for (int iter = 0; iter < 1000; ++iter) {
        for (std::size_t i = 0; i < m; ++i) t[i] = x[i] + p[i];
        y = project_ball(t, c);
        for (std::size_t i = 0; i < m; ++i) p[i] = t[i] - y[i];
        for (std::size_t i = 0; i < m; ++i) t[i] = y[i] + q[i];
        std::vector<double> xn = project_plane_box(w, t);
        for (std::size_t i = 0; i < m; ++i) q[i] = t[i] - xn[i];
        double delta = 0.0;
        for (std::size_t i = 0; i < m; ++i) delta = std::max(delta, std::abs(xn[i] - x[i]));
        x = std::move(xn);
        if (delta < 1e-15 && norm2(x) <= c + 1e-13) break;
    }
    return x;
}

struct AscentResult {
    double value = 0.0;
    std::vector<double> p;
};

AscentResult ascend_l2(std::span<const double> costs, const ReferenceDistribution& ref,
                       double c, Rng& rng, int restarts = 20, int max_iter = 10000) {
    const std::size_t m = costs.size();
    const Whitened w = whiten(ref);
    const double base = expectation(ref, costs);
    std::vector<double> dir(m);
    for (std::size_t i = 0; i < m; ++i) dir[i] = w.a[i] * costs[i];
    const auto value_at = [&](const std::vector<double>& u) {
        double acc = base;
        for (std::size_t i = 0; i < m; ++i) acc += dir[i] * u[i];
        return acc;
    };

    std::vector<double> best_u(m, 0.0);
    double best_value = base;
    for (int r = 0; r < restarts; ++r) {
        std::vector<double> u(m, 0.0);
        if (r > 0) {
            const std::vector<double> start = rng.next_simplex(m);
            for (std::size_t i = 0; i < m; ++i) u[i] = (start[i] - ref[i]) / w.a[i];
            u = project_feasible(w, c, std::move(u));
        }
        double value = value_at(u);
        double eta = 1.0 / (1.0 + norm2(dir));
        int stall = 0;
        std::vector<double> trial(m);
        for (int iter = 0; iter < max_iter; ++iter) {
            for (std::size_t i = 0; i < m; ++i) trial[i] = u[i] + eta * dir[i];
            std::vector<double> next = project_feasible(w, c, std::move(trial));
            trial.assign(m, 0.0);
            const double next_value = value_at(next);
            if (next_value < value - 1e-15) {
                eta *= 0.5;  // inexact projection can overshoot; backtrack
                if (eta < 1e-12) break;
                continue;
            }
            double move = 0.0;
            for (std::size_t i = 0; i < m; ++i) move = std::max(move, std::abs(next[i] - u[i]));
            u = std::move(next);
            value = next_value;
            eta = std::min(eta * 2.0, 1e8);
            if (move <= 1e-13 * (1.0 + norm2(u))) {
                if (++stall >= 2) break;
            } else {
                stall = 0;
            }
        }
        if (value > best_value) {
            best_value = value;
            best_u = u;
        }
    }

    // Nudge strictly inside the ball so membership checks hold, then report
    // the value the returned distribution actually attains.
    const double n = norm2(best_u);
    if (n > 0.0) {
        const double s = std::min(1.0, c * (1.0 - 1e-10) / n);
        for (auto& x : best_u) x *= s;
    }
    AscentResult out;
    out.p.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        out.p[i] = std::max(0.0, ref[i] + w.a[i] * best_u[i]);
    }
    out.value = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) total += out.p[i];
    for (std::size_t i = 0; i < m; ++i) out.p[i] /= total;
    for (std::size_t i = 0; i < m; ++i) out.value += out.p[i] * costs[i];
    return out;
}

}  // namespace

WorstCaseResult worst_expectation_l2(std::span<const double> costs,
                                     const ReferenceDistribution& ref, double c,
                                     std::uint64_t fallback_seed) {
    require_same_size(costs.size(), ref.size(), "worst_expectation_l2");
    if (!(c > 0.0)) throw NonPositiveRadius("radius must be positive");
    const double mean = expectation(ref, costs);
    const double var = variance(ref, costs);
    if (var == 0.0) {
        WorstCaseResult out;
        out.value = mean;
        out.distribution = ref.distribution();
        return out;
    }
    const double sd = std::sqrt(var);
    const double lo = *std::min_element(costs.begin(), costs.end());
    const double hi = *std::max_element(costs.begin(), costs.end());
    const bool interior = lo > mean - sd / c;
    if (interior && mean + c * sd < hi) {
        const double lambda = sd / (2.0 * c);
        const double nu = mean;
        std::vector<double> p(costs.size());
        for (std::size_t i = 0; i < costs.size(); ++i) {
            const double r = std::max(0.0, (costs[i] + 2.0 * lambda - nu) / (2.0 * lambda));
            p[i] = ref[i] * r;
        }
        WorstCaseResult out;
        out.value = mean + c * sd;
        out.distribution = DiscreteDistribution(std::move(p));
        out.multipliers = DualPointL2{lambda, nu};
        return out;
    }
    Rng rng(fallback_seed);
    AscentResult best = ascend_l2(costs, ref, c, rng);
    WorstCaseResult out;
    out.value = best.value;
    out.distribution = DiscreteDistribution(std::move(best.p));
    return out;
}

WorstCaseResult worst_expectation_dr(std::span<const double> costs,
                                     const ReferenceDistribution& ref, double c) {
    require_same_size(costs.size(), ref.size(), "worst_expectation_dr");
    if (!(c > 0.0)) throw NonPositiveRadius("radius must be positive");
    const ProbabilityLevel beta = ProbabilityLevel::from_radius(c);
    const double nu = value_at_risk(costs, ref, beta);
    WorstCaseResult out;
    out.value = f_beta(costs, ref, beta, nu);
    out.distribution = DiscreteDistribution(greedy_dr_fill(costs, ref, c));
    DualPointDR duals;
    duals.nu = nu;
    duals.lambdas.resize(costs.size());
    for (std::size_t i = 0; i < costs.size(); ++i) {
        duals.lambdas[i] = std::max(0.0, costs[i] - nu);
    }
    out.multipliers = std::move(duals);
    return out;
}

double oracle_worst_expectation(std::span<const double> costs, const Ball& ball, Rng& rng) {
    require_same_size(costs.size(), ball.reference().size(), "oracle_worst_expectation");
    if (costs.size() > 12) {
        throw TooLarge("oracle limited to m <= 12, got m = " + std::to_string(costs.size()));
    }
    const ReferenceDistribution& ref = ball.reference();
    const double c = ball.radius();
    switch (ball.kind()) {
        case BallKind::DensityRatio: {
            const std::vector<double> p = greedy_dr_fill(costs, ref, c);
            double acc = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * costs[i];
            return acc;
        }
        case BallKind::TotalVariation:
            return greedy_tv_value(costs, ref, c);
        case BallKind::WeightedL2:
            return ascend_l2(costs, ref, c, rng).value;
    }
    throw InvalidArgument("unknown ball kind");
}

}  // namespace ddro
