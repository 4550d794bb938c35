#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ddro/risk.hpp"
#include "ddro/rng.hpp"

using namespace ddro;

namespace {

// Independent oracle: enumerate every distinct C-subset and take the largest
// summed cost.
double brute_force_worst_c(const std::vector<double>& costs, std::size_t count) {
    const std::size_t m = costs.size();
    double best = -1e300;
    for (std::size_t mask = 0; mask < (1u << m); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != count) continue;
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (1u << i)) sum += costs[i];
        }
        best = std::max(best, sum);
    }
    return best / static_cast<double>(count);
}

ReferenceDistribution random_reference(Rng& rng, std::size_t m) {
    std::vector<double> mass = rng.next_simplex(m);
    for (auto& v : mass) v = std::max(v, 1e-4);
    double total = 0.0;
    for (double v : mass) total += v;
    for (auto& v : mass) v /= total;
    return ReferenceDistribution(mass);
}

}  // namespace

TEST_CASE("value at risk on atoms") {
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const std::vector<double> costs = {1, 2, 3, 4};
    CHECK(value_at_risk(costs, ref, ProbabilityLevel(0.5)) == 2.0);
    CHECK(value_at_risk(costs, ref, ProbabilityLevel(0.0)) == 1.0);
    const std::vector<double> flat = {5, 5, 5, 5};
    CHECK(value_at_risk(flat, ref, ProbabilityLevel(0.5)) == 5.0);
    CHECK(value_at_risk(flat, ref, ProbabilityLevel(0.9)) == 5.0);

    CHECK_THROWS_AS(ProbabilityLevel(1.0), InvalidArgument);
    CHECK_THROWS_AS(ProbabilityLevel(-0.1), InvalidArgument);
    CHECK(ProbabilityLevel::from_radius(1.0).beta == doctest::Approx(0.5));
    CHECK(ProbabilityLevel::from_radius(3.0).beta == doctest::Approx(0.75));
}

TEST_CASE("strict and non-strict conditional means") {
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const std::vector<double> costs = {1, 2, 3, 4};
    CHECK(cvar_hat(costs, ref, ProbabilityLevel(0.5)) == doctest::Approx(3.5));
    CHECK(cvar_nonstrict(costs, ref, ProbabilityLevel(0.5)) == doctest::Approx(3.0));
    // VaR_0 = 1, strict exceedance {2,3,4}
    CHECK(cvar_hat(costs, ref, ProbabilityLevel(0.0)) == doctest::Approx(3.0));
    CHECK(cvar_nonstrict(costs, ref, ProbabilityLevel(0.0)) == doctest::Approx(2.5));

    const std::vector<double> flat = {5, 5, 5, 5};
    CHECK(cvar_hat(flat, ref, ProbabilityLevel(0.5)) == 5.0);
    CHECK(cvar_nonstrict(flat, ref, ProbabilityLevel(0.5)) == 5.0);
}

TEST_CASE("f_beta values") {
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const std::vector<double> costs = {1, 2, 3, 4};
    // E[max(0, J-2)] = (0+0+1+2)/4
    CHECK(f_beta(costs, ref, ProbabilityLevel(0.5), 2.0) == doctest::Approx(3.5));
    CHECK(f_beta(costs, ref, ProbabilityLevel(0.5), 9.0) == doctest::Approx(9.0));
    CHECK(f_beta(costs, ref, ProbabilityLevel(0.0), 1.0) == doctest::Approx(2.5));
}

TEST_CASE("mean plus std objective") {
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const std::vector<double> costs = {1, 2, 3, 4};
    CHECK(mean_std_objective(costs, ref, 0.5) ==
          doctest::Approx(2.5 + 0.5 * std::sqrt(1.25)).epsilon(1e-12));
    CHECK(mean_std_objective(costs, ref, 0.5) == doctest::Approx(3.059017).epsilon(1e-6));
    CHECK(mean_std_objective(costs, ref, 0.0) == doctest::Approx(2.5));
    const std::vector<double> flat = {7, 7, 7, 7};
    CHECK(mean_std_objective(flat, ref, 3.0) == doctest::Approx(7.0));
}

TEST_CASE("mean plus std is permutation invariant") {
    Rng rng(5);
    for (int s = 0; s < 50; ++s) {
        const std::size_t m = 3 + rng.next_index(6);
        std::vector<double> costs(m);
        for (auto& v : costs) v = rng.next_range(0.0, 10.0);
        const ReferenceDistribution ref = random_reference(rng, m);
        const double before = mean_std_objective(costs, ref, 0.7);

        std::vector<std::size_t> perm(m);
        for (std::size_t i = 0; i < m; ++i) perm[i] = i;
        for (std::size_t i = m; i > 1; --i) std::swap(perm[i - 1], perm[rng.next_index(i)]);
        std::vector<double> costs_p(m), mass_p(m);
        for (std::size_t i = 0; i < m; ++i) {
            costs_p[i] = costs[perm[i]];
            mass_p[i] = ref[perm[i]];
        }
        const double after = mean_std_objective(costs_p, ReferenceDistribution(mass_p), 0.7);
        CHECK(before == doctest::Approx(after).epsilon(1e-12));
    }
}

TEST_CASE("worst-c average against subset enumeration") {
    const std::vector<double> costs = {1, 2, 3, 4};
    CHECK(brute_force_worst_c(costs, 2) == doctest::Approx(3.5));
    CHECK(worst_c_average(costs, 2) == doctest::Approx(3.5));
    CHECK(worst_c_average(costs, 4) == doctest::Approx(2.5));
    CHECK(worst_c_average(costs, 1) == doctest::Approx(4.0));
    CHECK_THROWS_AS(worst_c_average(costs, 0), CountOutOfRange);
    CHECK_THROWS_AS(worst_c_average(costs, 5), CountOutOfRange);

    Rng rng(17);
    for (int s = 0; s < 100; ++s) {
        const std::size_t m = 3 + rng.next_index(6);
        std::vector<double> random(m);
        for (auto& v : random) v = rng.next_range(-5.0, 10.0);
        const std::size_t count = 1 + rng.next_index(m);
        CHECK(worst_c_average(random, count) ==
              doctest::Approx(brute_force_worst_c(random, count)).epsilon(1e-12));
    }
}

TEST_CASE("sandwich ordering over random instances") {
    Rng rng(23);
    for (int s = 0; s < 500; ++s) {
        const std::size_t m = 3 + rng.next_index(8);
        std::vector<double> costs(m);
        for (auto& v : costs) v = rng.next_range(0.0, 10.0);
        const ReferenceDistribution ref =
            s % 2 == 0 ? ReferenceDistribution::uniform(m) : random_reference(rng, m);
        const ProbabilityLevel beta(rng.next_range(0.0, 0.95));
        const double lower = cvar_nonstrict(costs, ref, beta);
        const double mid = cvar_tilde(costs, ref, beta);
        const double upper = cvar_hat(costs, ref, beta);
        CHECK(lower <= mid + 1e-9);
        CHECK(mid <= upper + 1e-9);
    }
}

TEST_CASE("tightness when the reference mass at VaR closes the level") {
    Rng rng(29);
    for (int s = 0; s < 200; ++s) {
        const std::size_t m = 4 + rng.next_index(7);
        const std::size_t k = 1 + rng.next_index(m - 1);
        const ProbabilityLevel beta(static_cast<double>(k) / static_cast<double>(m));
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        std::vector<double> costs(m);
        for (auto& v : costs) v = rng.next_range(0.0, 10.0);
        // distinct costs almost surely; P[J <= VaR] = k/m = beta exactly
        CHECK(cvar_tilde(costs, ref, beta) ==
              doctest::Approx(cvar_hat(costs, ref, beta)).epsilon(1e-9));
    }
}

TEST_CASE("f_beta is minimized at the value at risk") {
    Rng rng(31);
    for (int s = 0; s < 10; ++s) {
        const std::size_t m = 3 + rng.next_index(6);
        std::vector<double> costs(m);
        for (auto& v : costs) v = rng.next_range(0.0, 6.0);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const ProbabilityLevel beta(rng.next_range(0.0, 0.9));
        const double at_var = cvar_tilde(costs, ref, beta);
        const double lo = *std::min_element(costs.begin(), costs.end()) - 1.0;
        const double hi = *std::max_element(costs.begin(), costs.end()) + 1.0;
        double grid_min = 1e300;
        for (double nu = lo; nu <= hi; nu += 1e-3) {
            grid_min = std::min(grid_min, f_beta(costs, ref, beta, nu));
        }
        CHECK(grid_min >= at_var - 1e-6);
    }
}

TEST_CASE("worst-c bridge at uniform reference") {
    Rng rng(37);
    for (std::size_t m : {4u, 6u, 8u}) {
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        for (std::size_t count = 1; count <= m; ++count) {
            const ProbabilityLevel beta(1.0 - static_cast<double>(count) / m);
            for (int s = 0; s < 20; ++s) {
                std::vector<double> costs(m);
                for (auto& v : costs) v = rng.next_range(0.0, 10.0);
                CHECK(worst_c_average(costs, count) ==
                      doctest::Approx(cvar_tilde(costs, ref, beta)).epsilon(1e-9));
            }
        }
    }
}
