#include <doctest.h>

#include <cmath>

#include "chargegame/game.hpp"
#include "chargegame/solvers.hpp"
#include "test_support.hpp"

using namespace chargegame;
using testsupport::Rng;

namespace {

FleetInstance single_agent(std::vector<double> prices, std::vector<double> base) {
    FleetInstance instance;
    instance.prices = std::move(prices);
    instance.base_load_per_agent = std::move(base);
    instance.agents = {{1.0, {0, 0}, {1, 1}}};
    return instance;
}

ChargingMatrix rows(std::vector<std::vector<double>> data) {
    ChargingMatrix x(data.size(), data[0].size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t t = 0; t < data[i].size(); ++t) x(i, t) = data[i][t];
    }
    return x;
}

}  // namespace

TEST_CASE("agent payoff worked values") {
    // single agent, zero base load
    FleetInstance one = single_agent({1, 1}, {0, 0});
    CHECK(agent_payoff(0, rows({{1, 0}}), one) == doctest::Approx(1.0));
    CHECK(agent_payoff(0, rows({{0, 0}}), one) == doctest::Approx(0.0));

    // two agents
    FleetInstance two = one;
    two.agents.push_back({3.0, {0, 0}, {2, 2}});
    two.agents[0] = {2.0, {0, 0}, {2, 2}};
    const ChargingMatrix x = rows({{1, 1}, {1, 2}});
    CHECK(agent_payoff(0, x, two) == doctest::Approx(5.0));
    CHECK_THROWS_AS(agent_payoff(2, x, two), std::out_of_range);
}

TEST_CASE("base load cost worked values") {
    FleetInstance instance = single_agent({1, 1}, {1, 0});
    CHECK(base_load_cost(rows({{0, 1}}), instance) == doctest::Approx(1.0));

    instance.base_load_per_agent = {0, 0};
    CHECK(base_load_cost(rows({{0.3, 0.7}}), instance) == doctest::Approx(0.0));

    instance.base_load_per_agent = {1, 1};
    CHECK(base_load_cost(rows({{0, 0}}), instance) == doctest::Approx(2.0));
}

TEST_CASE("social cost worked values and decomposition") {
    FleetInstance instance = single_agent({1, 1}, {1, 0});
    const ChargingMatrix x = rows({{0, 1}});
    CHECK(social_cost(x, instance) == doctest::Approx(2.0));
    CHECK(social_cost(x, instance) ==
          doctest::Approx(base_load_cost(x, instance) + agent_payoff(0, x, instance)));

    FleetInstance sym = single_agent({1, 1}, {0, 0});
    sym.agents.push_back(sym.agents[0]);
    CHECK(social_cost(rows({{0.5, 0.5}, {0.5, 0.5}}), sym) == doctest::Approx(2.0));
}

TEST_CASE("auxiliary cost worked values") {
    FleetInstance instance = single_agent({1, 1}, {0, 0});
    CHECK(auxiliary_cost(rows({{0, 0}}), instance) == doctest::Approx(0.0));
    CHECK(auxiliary_cost(rows({{0.25, 0.75}}), instance) == doctest::Approx(0.625));

    FleetInstance sym = instance;
    sym.agents.push_back(sym.agents[0]);
    CHECK(auxiliary_cost(rows({{0.5, 0.5}, {0.5, 0.5}}), sym) == doctest::Approx(1.0));
}

TEST_CASE("decomposition identity and positivity on random feasible points") {
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        const FleetInstance instance =
            testsupport::random_instance(rng, 1 + rng.index(5), 1 + rng.index(4));
        const ChargingMatrix x = testsupport::random_feasible(rng, instance);
        const double total = social_cost(x, instance);
        double parts = base_load_cost(x, instance);
        for (std::size_t i = 0; i < instance.agent_count(); ++i) {
            parts += agent_payoff(i, x, instance);
        }
        CHECK(std::abs(total - parts) <= 1e-10 * (1.0 + std::abs(total)));
        CHECK(total > 0.0);  // all gammas positive, all prices positive
    }
}

TEST_CASE("exact best response worked values") {
    FleetInstance weighted = single_agent({1, 2}, {0, 0});
    const auto z = exact_best_response(0, rows({{0.5, 0.5}}), weighted);
    CHECK(z[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(z[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    FleetInstance shifted = single_agent({1, 1}, {1, 0});
    const auto r = exact_best_response(0, rows({{0.5, 0.5}}), shifted);
    CHECK(r[0] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(r[1] == doctest::Approx(1.0).epsilon(1e-10));

    // flat opponents, symmetric prices: flat response
    FleetInstance sym = single_agent({1, 1}, {0, 0});
    sym.agents.push_back(sym.agents[0]);
    const auto f = exact_best_response(0, rows({{0.1, 0.9}, {0.5, 0.5}}), sym);
    CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("best response is optimal against random alternatives") {
    Rng rng(17);
    const FleetInstance instance = testsupport::random_instance(rng, 4, 3);
    const ChargingMatrix x = testsupport::random_feasible(rng, instance);
    const std::size_t i = 2;
    const std::vector<double> br = exact_best_response(i, x, instance);

    ChargingMatrix with_br = x;
    for (std::size_t t = 0; t < x.cols(); ++t) with_br(i, t) = br[t];
    const double f_br = agent_payoff(i, with_br, instance);

    for (int k = 0; k < 100; ++k) {
        ChargingMatrix probe = x;
        const ChargingMatrix alt = testsupport::random_feasible(rng, instance);
        for (std::size_t t = 0; t < x.cols(); ++t) probe(i, t) = alt(i, t);
        CHECK(f_br <= agent_payoff(i, probe, instance) + 1e-9);
    }
}

TEST_CASE("regularized best response: worked value and penalty dominance") {
    FleetInstance instance = single_agent({1, 1}, {1, 0});
    const ChargingMatrix x = rows({{0.5, 0.5}});
    const auto z = regularized_best_response(0, x, instance, 1.0);
    CHECK(z[0] == doctest::Approx(0.375).epsilon(1e-10));
    CHECK(z[1] == doctest::Approx(0.625).epsilon(1e-10));

    // larger c pulls the response toward the current point
    double prev = 1e300;
    for (double c : {1.0, 10.0, 100.0}) {
        const auto zc = regularized_best_response(0, x, instance, c);
        const double dist = std::max(std::abs(zc[0] - 0.5), std::abs(zc[1] - 0.5));
        CHECK(dist <= prev + 1e-12);
        prev = dist;
    }
}

TEST_CASE("fixed points of the exact and regularized maps coincide") {
    FleetInstance instance = single_agent({1, 1}, {1, 0});
    instance.agents.push_back({0.8, {0, 0}, {1, 1}});
    const SolveResult nash = solve_nash_central(instance, SolverConfig{});
    REQUIRE(nash.report.status == SolveStatus::converged);
    for (double c : {0.1, 1.0, 10.0}) {
        for (std::size_t i = 0; i < instance.agent_count(); ++i) {
            const auto exact = exact_best_response(i, nash.x, instance);
            const auto reg = regularized_best_response(i, nash.x, instance, c);
            for (std::size_t t = 0; t < nash.x.cols(); ++t) {
                CHECK(std::abs(exact[t] - nash.x(i, t)) <= 1e-7);
                CHECK(std::abs(reg[t] - nash.x(i, t)) <= 1e-7);
            }
        }
    }
}

TEST_CASE("nash residual worked values") {
    FleetInstance weighted = single_agent({1, 2}, {0, 0});
    CHECK(nash_residual(rows({{1, 0}}), weighted) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

    // (0, 1) is the exact best response for the shifted instance
    FleetInstance shifted = single_agent({1, 1}, {1, 0});
    CHECK(nash_residual(rows({{0, 1}}), shifted) == doctest::Approx(0.0));

    const SolveResult nash = solve_nash_central(shifted, SolverConfig{});
    CHECK(nash_residual(nash.x, shifted) <=
          1e-7 * (1.0 + std::abs(nash.report.objective)));
}
