#include <doctest.h>

#include <algorithm>

#include "chargegame/model.hpp"
#include "chargegame/solvers.hpp"
#include "test_support.hpp"

using namespace chargegame;
using testsupport::Rng;

namespace {

FleetInstance two_slot_instance() {
    FleetInstance instance;
    instance.prices = {1, 1};
    instance.base_load_per_agent = {0, 0};
    instance.agents = {{1.0, {0, 0}, {1, 1}}};
    return instance;
}

bool mentions(const ValidationOutcome& v, const std::string& needle) {
    return std::any_of(v.violations.begin(), v.violations.end(),
                       [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("valid instance passes") {
    CHECK(validate_instance(two_slot_instance()).ok());
}

TEST_CASE("empty agent set is reported with its index") {
    FleetInstance instance = two_slot_instance();
    instance.agents[0].gamma = 3.0;  // sum of upper bounds is 2
    const ValidationOutcome v = validate_instance(instance);
    CHECK_FALSE(v.ok());
    CHECK(mentions(v, "empty X^1"));
}

TEST_CASE("nonpositive price is reported with its slot") {
    FleetInstance instance = two_slot_instance();
    instance.prices = {1, 0};
    const ValidationOutcome v = validate_instance(instance);
    CHECK_FALSE(v.ok());
    CHECK(mentions(v, "nonpositive price at t=1"));
}

TEST_CASE("negative gamma rejected, boundary gamma accepted") {
    FleetInstance instance = two_slot_instance();
    instance.agents[0].gamma = -0.5;
    CHECK(mentions(validate_instance(instance), "negative gamma"));

    instance.agents[0].gamma = 2.0;  // exactly sum of upper bounds: forced point
    CHECK(validate_instance(instance).ok());
    instance.agents[0].gamma = 0.0;  // forced to the lower bounds
    CHECK(validate_instance(instance).ok());
}

TEST_CASE("validation is a pure function") {
    FleetInstance instance = two_slot_instance();
    instance.prices = {1, 0};
    const auto a = validate_instance(instance).violations;
    const auto b = validate_instance(instance).violations;
    CHECK(a == b);
}

TEST_CASE("realized base load scales with the agent count") {
    FleetInstance instance = two_slot_instance();
    instance.base_load_per_agent = {1, 0};
    CHECK(realized_base_load(instance) == std::vector<double>{1, 0});

    instance.agents.assign(5, instance.agents[0]);
    instance.base_load_per_agent = {0, 0};
    CHECK(realized_base_load(instance) == std::vector<double>{0, 0});

    instance.agents.assign(4, instance.agents[0]);
    instance.base_load_per_agent = {0.5, 0.25};
    CHECK(realized_base_load(instance) == std::vector<double>{2, 1});
}

TEST_CASE("every validated instance admits the uniform feasible point") {
    Rng rng(11);
    for (int k = 0; k < 20; ++k) {
        const FleetInstance instance =
            testsupport::random_instance(rng, 1 + rng.index(6), 1 + rng.index(5));
        REQUIRE(validate_instance(instance).ok());
        const ChargingMatrix x = feasible_start(instance);
        CHECK(feasible(x, instance));
    }
}

TEST_CASE("feasible rejects bound and row-sum violations") {
    const FleetInstance instance = two_slot_instance();
    ChargingMatrix x(1, 2);
    x(0, 0) = 0.25;
    x(0, 1) = 0.75;
    CHECK(feasible(x, instance));
    x(0, 1) = 0.80;
    CHECK_FALSE(feasible(x, instance));  // row sum off
    x(0, 0) = -0.05;
    x(0, 1) = 1.05;
    CHECK_FALSE(feasible(x, instance));  // outside the box
}

TEST_CASE("instance JSON round trip") {
    FleetInstance instance = two_slot_instance();
    instance.base_load_per_agent = {0.5, 0.125};
    const FleetInstance back = parse_instance_text(instance_to_json(instance));
    CHECK(back.prices == instance.prices);
    CHECK(back.base_load_per_agent == instance.base_load_per_agent);
    REQUIRE(back.agents.size() == 1);
    CHECK(back.agents[0].gamma == instance.agents[0].gamma);
    CHECK(back.agents[0].lower == instance.agents[0].lower);
    CHECK(back.agents[0].upper == instance.agents[0].upper);
}

TEST_CASE("instance JSON schema errors") {
    CHECK_THROWS_WITH_AS(parse_instance_text("{\"horizon\": 2}"),
                         doctest::Contains("prices"), std::runtime_error);
    CHECK_THROWS_AS(parse_instance_text("not json"), std::runtime_error);
    // array length must match horizon
    CHECK_THROWS_AS(parse_instance_text(R"({"horizon": 2, "prices": [1],
        "base_load_per_agent": [0, 0], "agents": []})"),
                    std::runtime_error);
}
