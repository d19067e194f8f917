#include "chargegame/game.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chargegame/kernel.hpp"

namespace chargegame {

namespace {

void check_dims(const ChargingMatrix& x, const FleetInstance& instance) {
    if (x.rows() != instance.agent_count() || x.cols() != instance.horizon()) {
        throw std::invalid_argument("charging matrix does not match instance dimensions");
    }
}

void check_agent(std::size_t i, const FleetInstance& instance) {
    if (i >= instance.agent_count()) {
        throw std::out_of_range("agent index out of range");
    }
}

}  // namespace

std::vector<double> aggregate_profile(const ChargingMatrix& x,
                                      const FleetInstance& instance) {
    check_dims(x, instance);
    std::vector<double> s = realized_base_load(instance);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t t = 0; t < x.cols(); ++t) s[t] += x(i, t);
    }
    return s;
}

double agent_payoff(std::size_t i, const ChargingMatrix& x,
                    const FleetInstance& instance) {
    check_agent(i, instance);
    check_dims(x, instance);
    const std::vector<double> s = aggregate_profile(x, instance);
    double f = 0.0;
    for (std::size_t t = 0; t < x.cols(); ++t) {
        f += x(i, t) * instance.prices[t] * s[t];
    }
    return f;
}

double base_load_cost(const ChargingMatrix& x, const FleetInstance& instance) {
    check_dims(x, instance);
    const std::vector<double> x0 = realized_base_load(instance);
    const std::vector<double> s = aggregate_profile(x, instance);
    double f = 0.0;
    for (std::size_t t = 0; t < x.cols(); ++t) {
        f += x0[t] * instance.prices[t] * s[t];
    }
    return f;
}

double social_cost(const ChargingMatrix& x, const FleetInstance& instance) {
    check_dims(x, instance);
    const std::vector<double> s = aggregate_profile(x, instance);
    double f = 0.0;
    for (std::size_t t = 0; t < s.size(); ++t) {
        f += instance.prices[t] * s[t] * s[t];
    }
    return f;
}

double auxiliary_cost(const ChargingMatrix& x, const FleetInstance& instance) {
    check_dims(x, instance);
    double f = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t t = 0; t < x.cols(); ++t) {
            f += instance.prices[t] * x(i, t) * x(i, t);
        }
    }
    return f;
}

std::vector<double> exact_best_response(std::size_t i, const ChargingMatrix& x,
                                        const FleetInstance& instance, double tol) {
    check_agent(i, instance);
    check_dims(x, instance);
    const std::size_t h = instance.horizon();
    const std::vector<double> s = aggregate_profile(x, instance);
    const AgentParams& a = instance.agents[i];

    SeparableQP qp;
    qp.q = instance.prices;
    qp.b.resize(h);
    for (std::size_t t = 0; t < h; ++t) {
        const double others = s[t] - x(i, t);  // A_t^{-i} + x0_t
        qp.b[t] = instance.prices[t] * others;
    }
    qp.gamma = a.gamma;
    qp.lower = a.lower;
    qp.upper = a.upper;
    return solve_separable_qp(qp, tol);
}

std::vector<double> regularized_best_response(std::size_t i, const ChargingMatrix& x,
                                              const FleetInstance& instance, double c,
                                              double tol) {
    check_agent(i, instance);
    check_dims(x, instance);
    if (!(c > 0.0)) throw std::invalid_argument("regularized_best_response: c must be > 0");
    const std::size_t h = instance.horizon();
    const std::vector<double> s = aggregate_profile(x, instance);
    const AgentParams& a = instance.agents[i];

    SeparableQP qp;
    qp.q.resize(h);
    qp.b.resize(h);
    for (std::size_t t = 0; t < h; ++t) {
        const double others = s[t] - x(i, t);
        qp.q[t] = instance.prices[t] + c;
        qp.b[t] = instance.prices[t] * others - 2.0 * c * x(i, t);
    }
    qp.gamma = a.gamma;
    qp.lower = a.lower;
    qp.upper = a.upper;
    return solve_separable_qp(qp, tol);
}

double nash_residual(const ChargingMatrix& x, const FleetInstance& instance, double tol) {
    check_dims(x, instance);
    const std::vector<double> s = aggregate_profile(x, instance);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        // f(z, x^{-i}) = sum_t [p_t z_t^2 + p_t (A_t^{-i} + x0_t) z_t]; evaluate
        // at the current row and at the best response against the same others.
        SeparableQP qp;
        qp.q = instance.prices;
        qp.b.resize(x.cols());
        for (std::size_t t = 0; t < x.cols(); ++t) {
            qp.b[t] = instance.prices[t] * (s[t] - x(i, t));
        }
        qp.gamma = instance.agents[i].gamma;
        qp.lower = instance.agents[i].lower;
        qp.upper = instance.agents[i].upper;

        const std::vector<double> br = solve_separable_qp(qp, tol);
        const double f_now = qp_objective(qp, x.row(i));
        const double f_best = qp_objective(qp, br);
        worst = std::max(worst, f_now - f_best);
    }
    return worst;
}

double default_regularization(const FleetInstance& instance) {
    double p_max = 0.0;
    for (double p : instance.prices) p_max = std::max(p_max, p);
    return p_max * static_cast<double>(instance.agent_count());
}

}  // namespace chargegame
