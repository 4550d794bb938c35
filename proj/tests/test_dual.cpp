#include <doctest.h>

#include <cmath>
#include <vector>

#include "ddro/dual.hpp"
#include "ddro/distribution.hpp"
#include "ddro/rng.hpp"
#include "ddro/worst_case.hpp"

using namespace ddro;

TEST_CASE("g_l2 at the stationary multipliers") {
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const std::vector<double> costs = {1, 2, 3, 4};
    const double c = 0.5;
    const double sd = std::sqrt(1.25);
    const DualPointL2 kkt{sd / (2.0 * c), 2.5};
    CHECK(g_l2(costs, ref, c, kkt) == doctest::Approx(2.5 + c * sd).epsilon(1e-12));
    CHECK(g_l2(costs, ref, c, kkt) == doctest::Approx(3.059017).epsilon(1e-6));

    // vanished hinge: lambda (c^2 - 1) + nu
    CHECK(g_l2(std::vector<double>{0.0, 0.0}, ReferenceDistribution::uniform(2), 1.0,
               DualPointL2{1.0, 10.0}) == doctest::Approx(10.0));

    // (J + 2 lambda - nu) / (2 lambda) = 1 for every outcome
    CHECK(g_l2(std::vector<double>{0, 0, 0, 0}, ref, 1.0, DualPointL2{1.0, 0.0}) ==
          doctest::Approx(1.0));

    CHECK_THROWS_AS(g_l2(costs, ref, c, DualPointL2{0.0, 0.0}), NonPositiveLambda);
    CHECK_THROWS_AS(g_l2(costs, ref, 0.0, kkt), NonPositiveRadius);
}

TEST_CASE("g_l2 extended cases and continuity") {
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const std::vector<double> costs = {1, 2, 3, 4};
    const ExtendedValue feasible = g_l2_extended(costs, ref, 1.0, 0.0, 5.0);
    CHECK(feasible.is_finite());
    CHECK(feasible.value() == doctest::Approx(5.0));

    const ExtendedValue infeasible = g_l2_extended(costs, ref, 1.0, 0.0, 3.0);
    CHECK_FALSE(infeasible.is_finite());
    CHECK_THROWS_AS(infeasible.value(), InvalidArgument);

    const ExtendedValue near = g_l2_extended(costs, ref, 1.0, 1e-8, 5.0);
    CHECK(near.is_finite());
    CHECK(std::abs(near.value() - 5.0) <= 1e-6);
}

TEST_CASE("g_dr values") {
    const ReferenceDistribution one = ReferenceDistribution::uniform(1);
    DualPointDR d;
    d.lambdas = {1.0};
    d.nu = 1.0;
    CHECK(g_dr(std::vector<double>{2.0}, one, 1.0, d) == doctest::Approx(3.0));

    // extended evaluation at the stationary multipliers of the proof
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const std::vector<double> costs = {1, 2, 3, 4};
    const std::vector<double> lambdas = {0.0, 0.0, 1.0, 2.0};
    const ExtendedValue at_opt = g_dr_extended(costs, ref, 1.0, lambdas, 2.0);
    CHECK(at_opt.is_finite());
    CHECK(at_opt.value() == doctest::Approx(3.5).epsilon(1e-12));

    // monotone growth past the optimum
    DualPointDR huge;
    huge.lambdas = {1e6};
    huge.nu = 0.0;
    const double far = g_dr(std::vector<double>{1.0}, one, 1.0, huge);
    DualPointDR at;
    at.lambdas = {1.0};
    at.nu = 0.0;
    CHECK(far > g_dr(std::vector<double>{1.0}, one, 1.0, at));

    DualPointDR tiny;
    tiny.lambdas = {1e-6};
    tiny.nu = 0.0;
    CHECK_THROWS_AS(g_dr(std::vector<double>{2.0}, one, 1.0, tiny), OverflowGuard);
}

TEST_CASE("g_dr extended cases") {
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const std::vector<double> costs = {1, 2, 3, 4};
    const std::vector<double> zeros(4, 0.0);
    const ExtendedValue ok = g_dr_extended(costs, ref, 1.0, zeros, 5.0);
    CHECK(ok.is_finite());
    CHECK(ok.value() == doctest::Approx(5.0));
    CHECK_FALSE(g_dr_extended(costs, ref, 1.0, zeros, 3.0).is_finite());

    const std::vector<double> small(4, 1e-8);
    const ExtendedValue near = g_dr_extended(costs, ref, 1.0, small, 5.0);
    CHECK(near.is_finite());
    CHECK(std::abs(near.value() - 5.0) <= 1e-6);
}

TEST_CASE("gradients vanish at the stationary point and match examples") {
    const ReferenceDistribution ref = ReferenceDistribution::uniform(4);
    const std::vector<double> costs = {1, 2, 3, 4};
    const double c = 0.5;
    const DualPointL2 kkt{std::sqrt(1.25) / (2.0 * c), 2.5};
    const GradientL2 g = grad_g_l2(costs, ref, c, kkt);
    CHECK(std::abs(g.dlambda) <= 1e-8);
    CHECK(std::abs(g.dnu) <= 1e-8);

    DualPointDR d;
    d.lambdas = {1.0};
    d.nu = 1.0;
    const GradientDR gd =
        grad_g_dr(std::vector<double>{2.0}, ReferenceDistribution::uniform(1), 1.0, d);
    CHECK(gd.dnu == doctest::Approx(-1.0));
}

TEST_CASE("gradients match central finite differences") {
    Rng rng(41);
    const double h = 1e-6;
    for (int s = 0; s < 100; ++s) {
        const std::size_t m = 2 + rng.next_index(7);
        std::vector<double> costs(m);
        for (auto& v : costs) v = rng.next_range(0.0, 5.0);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const double c = rng.next_range(0.2, 2.0);

        const DualPointL2 l2{rng.next_range(0.2, 3.0), rng.next_range(-1.0, 6.0)};
        const GradientL2 gl = grad_g_l2(costs, ref, c, l2);
        const double fdl = (g_l2(costs, ref, c, {l2.lambda + h, l2.nu}) -
                            g_l2(costs, ref, c, {l2.lambda - h, l2.nu})) /
                           (2.0 * h);
        const double fdn = (g_l2(costs, ref, c, {l2.lambda, l2.nu + h}) -
                            g_l2(costs, ref, c, {l2.lambda, l2.nu - h})) /
                           (2.0 * h);
        CHECK(std::abs(gl.dlambda - fdl) /
                  std::max({1.0, std::abs(gl.dlambda), std::abs(fdl)}) <= 1e-5);
        CHECK(std::abs(gl.dnu - fdn) / std::max({1.0, std::abs(gl.dnu), std::abs(fdn)}) <=
              1e-5);

        DualPointDR dr;
        dr.nu = rng.next_range(-1.0, 6.0);
        dr.lambdas.resize(m);
        for (auto& l : dr.lambdas) l = rng.next_range(0.3, 3.0);
        const GradientDR gd = grad_g_dr(costs, ref, c, dr);
        for (std::size_t i = 0; i < m; ++i) {
            DualPointDR up = dr, dn = dr;
            up.lambdas[i] += h;
            dn.lambdas[i] -= h;
            const double fd =
                (g_dr(costs, ref, c, up) - g_dr(costs, ref, c, dn)) / (2.0 * h);
            CHECK(std::abs(gd.dlambdas[i] - fd) /
                      std::max({1.0, std::abs(gd.dlambdas[i]), std::abs(fd)}) <= 1e-5);
        }

        const std::vector<double> stacked = grad_duals(costs, ref, c, DualPoint(dr));
        CHECK(stacked.size() == m + 1);
        CHECK(stacked.back() == doctest::Approx(gd.dnu));
    }
}

TEST_CASE("convexity along random segments") {
    Rng rng(43);
    const ReferenceDistribution ref = ReferenceDistribution::uniform(5);
    std::vector<double> costs(5);
    for (auto& v : costs) v = rng.next_range(0.0, 5.0);
    for (int s = 0; s < 100; ++s) {
        const double c = 0.8;
        const DualPointL2 a{rng.next_range(0.1, 3.0), rng.next_range(-2.0, 7.0)};
        const DualPointL2 b{rng.next_range(0.1, 3.0), rng.next_range(-2.0, 7.0)};
        const DualPointL2 mid{0.5 * (a.lambda + b.lambda), 0.5 * (a.nu + b.nu)};
        CHECK(g_l2(costs, ref, c, mid) <=
              0.5 * (g_l2(costs, ref, c, a) + g_l2(costs, ref, c, b)) + 1e-10);

        DualPointDR da, db, dm;
        da.nu = rng.next_range(-2.0, 7.0);
        db.nu = rng.next_range(-2.0, 7.0);
        dm.nu = 0.5 * (da.nu + db.nu);
        da.lambdas.resize(5);
        db.lambdas.resize(5);
        dm.lambdas.resize(5);
        for (std::size_t i = 0; i < 5; ++i) {
            da.lambdas[i] = rng.next_range(0.3, 3.0);
            db.lambdas[i] = rng.next_range(0.3, 3.0);
            dm.lambdas[i] = 0.5 * (da.lambdas[i] + db.lambdas[i]);
        }
        CHECK(g_dr(costs, ref, c, dm) <=
              0.5 * (g_dr(costs, ref, c, da) + g_dr(costs, ref, c, db)) + 1e-10);
    }
}

TEST_CASE("weak duality dominates the oracle") {
    Rng rng(47);
    for (int s = 0; s < 25; ++s) {
        const std::size_t m = 3 + rng.next_index(5);
        std::vector<double> costs(m);
        for (auto& v : costs) v = rng.next_range(0.0, 10.0);
        const ReferenceDistribution ref = ReferenceDistribution::uniform(m);
        const double c = rng.next_range(0.3, 1.5);
        Rng oracle_rng(1000 + s);
        const double primal = oracle_worst_expectation(
            costs, Ball(BallKind::WeightedL2, c, ref), oracle_rng);
        for (int t = 0; t < 4; ++t) {
            const DualPointL2 p{rng.next_range(0.05, 4.0), rng.next_range(-5.0, 15.0)};
            CHECK(g_l2(costs, ref, c, p) >= primal - 1e-4 - 1e-9);
        }
    }
}
