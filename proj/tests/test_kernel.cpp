#include <doctest.h>

#include <cmath>
#include <numeric>

#include "chargegame/kernel.hpp"
#include "test_support.hpp"

using namespace chargegame;
using testsupport::Rng;

namespace {

SeparableQP make_qp(std::vector<double> q, std::vector<double> b, double gamma,
                    std::vector<double> lower, std::vector<double> upper) {
    return SeparableQP{std::move(q), std::move(b), gamma, std::move(lower),
                       std::move(upper)};
}

double sum_of(const std::vector<double>& z) {
    return std::accumulate(z.begin(), z.end(), 0.0);
}

}  // namespace

TEST_CASE("symmetric two-slot problem splits evenly") {
    const auto z = solve_separable_qp(make_qp({1, 1}, {0, 0}, 1.0, {0, 0}, {1, 1}));
    CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(z[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("asymmetric quadratic weights, closed-form KKT") {
    // lambda = 4/3 gives z = (2/3, 1/3)
    const auto qp = make_qp({1, 2}, {0, 0}, 1.0, {0, 0}, {1, 1});
    const auto z = solve_separable_qp(qp);
    CHECK(z[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(z[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    const double grid = testsupport::grid_best(qp, 1e-4);
    CHECK(qp_objective(qp, z) <= grid + 1e-12);
    CHECK(grid - qp_objective(qp, z) <= 1e-8 * 3.0);
}

TEST_CASE("clipped KKT with active upper bound") {
    // lambda = 0: z_1 = clip((0+4)/2, 0, 1) = 1, z_0 = 0
    const auto qp = make_qp({1, 1}, {0, -4}, 1.0, {0, 0}, {1, 1});
    const auto z = solve_separable_qp(qp);
    CHECK(z[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(z[1] == doctest::Approx(1.0).epsilon(1e-12));
    const double grid = testsupport::grid_best(qp, 1e-4);
    CHECK(qp_objective(qp, z) <= grid + 1e-12);
}

TEST_CASE("infeasible sets are rejected") {
    CHECK_THROWS_AS(solve_separable_qp(make_qp({1, 1}, {0, 0}, 3.0, {0, 0}, {1, 1})),
                    InfeasibleSet);
    CHECK_THROWS_AS(solve_separable_qp(make_qp({1, 1}, {0, 0}, 0.1, {0.2, 0.2}, {1, 1})),
                    InfeasibleSet);
}

TEST_CASE("boundary gammas return the forced vertex") {
    const auto at_upper = solve_separable_qp(make_qp({1, 2}, {1, -1}, 2.0, {0, 0}, {1, 1}));
    CHECK(at_upper[0] == 1.0);
    CHECK(at_upper[1] == 1.0);
    const auto at_lower =
        solve_separable_qp(make_qp({1, 2}, {1, -1}, 0.4, {0.1, 0.3}, {1, 1}));
    CHECK(at_lower[0] == 0.1);
    CHECK(at_lower[1] == 0.3);
}

TEST_CASE("single-slot problems are forced") {
    const auto z = solve_separable_qp(make_qp({2}, {-1}, 0.7, {0}, {1}));
    CHECK(z[0] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("random problems: feasibility, certificate, grid equivalence") {
    Rng rng(42);
    for (int k = 0; k < 60; ++k) {
        const std::size_t h = 1 + rng.index(3);
        const SeparableQP qp = testsupport::random_qp(rng, h);
        const auto z = solve_separable_qp(qp);

        for (std::size_t t = 0; t < h; ++t) {
            CHECK(z[t] >= qp.lower[t]);
            CHECK(z[t] <= qp.upper[t]);
        }
        CHECK(std::abs(sum_of(z) - qp.gamma) <= 1e-12);
        CHECK(kkt_residual(qp, z) <= 1e-8);

        const double step = 1e-3;
        const double grid = testsupport::grid_best(qp, step);
        const double q_sum = std::accumulate(qp.q.begin(), qp.q.end(), 0.0);
        CHECK(qp_objective(qp, z) <= grid + 1e-12);
        CHECK(grid - qp_objective(qp, z) <= step * step * q_sum);
    }
}

TEST_CASE("projection: idempotent on the set, symmetric case, clipped case") {
    const std::vector<double> lower{0, 0};
    const std::vector<double> upper{1, 1};

    const std::vector<double> inside{0.4, 0.6};
    const auto same = project_box_simplex(inside, 1.0, lower, upper);
    CHECK(same[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(same[1] == doctest::Approx(0.6).epsilon(1e-12));

    const auto center = project_box_simplex(std::vector<double>{0, 0}, 1.0, lower, upper);
    CHECK(center[0] == doctest::Approx(0.5).epsilon(1e-12));

    const auto clipped = project_box_simplex(std::vector<double>{2, 0}, 1.0, lower, upper);
    CHECK(clipped[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(clipped[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("projection is nonexpansive") {
    Rng rng(7);
    const std::size_t h = 4;
    const std::vector<double> lower(h, 0.0);
    const std::vector<double> upper(h, 1.0);
    for (int k = 0; k < 100; ++k) {
        std::vector<double> v(h);
        std::vector<double> w(h);
        for (std::size_t t = 0; t < h; ++t) {
            v[t] = rng.uniform(-2.0, 3.0);
            w[t] = rng.uniform(-2.0, 3.0);
        }
        const auto pv = project_box_simplex(v, 2.0, lower, upper);
        const auto pw = project_box_simplex(w, 2.0, lower, upper);
        double d_in = 0.0;
        double d_out = 0.0;
        for (std::size_t t = 0; t < h; ++t) {
            d_in += (v[t] - w[t]) * (v[t] - w[t]);
            d_out += (pv[t] - pw[t]) * (pv[t] - pw[t]);
        }
        CHECK(std::sqrt(d_out) <= std::sqrt(d_in) * (1.0 + 1e-12) + 1e-12);
    }
}
