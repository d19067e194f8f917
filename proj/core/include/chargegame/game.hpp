#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chargegame/model.hpp"

namespace chargegame {

/// Total demand per slot: S_t = sum_i x_it + x0_t (realized base load).
std::vector<double> aggregate_profile(const ChargingMatrix& x,
                                      const FleetInstance& instance);

/// Agent i's electricity cost sum_t x_it p_t (sum_{j != i} x_jt + x_it + x0_t).
double agent_payoff(std::size_t i, const ChargingMatrix& x,
                    const FleetInstance& instance);

/// Cost attributed to the non-PEV demand: sum_t x0_t p_t (sum_j x_jt + x0_t).
double base_load_cost(const ChargingMatrix& x, const FleetInstance& instance);

/// Fleet cost F^m(x) = sum_t p_t (sum_i x_it + x0_t)^2. Equals
/// base_load_cost + sum_i agent_payoff.
double social_cost(const ChargingMatrix& x, const FleetInstance& instance);

/// Auxiliary penalty F_a^m(x) = sum_i sum_t p_t x_it^2.
double auxiliary_cost(const ChargingMatrix& x, const FleetInstance& instance);

/// Exact best response of agent i against the other rows of x:
/// argmin over X^i of the payoff, via the separable QP with q_t = p_t,
/// b_t = p_t (A_t^{-i} + x0_t).
std::vector<double> exact_best_response(std::size_t i, const ChargingMatrix& x,
                                        const FleetInstance& instance,
                                        double tol = 1e-12);

/// Regularized best response: adds c ||z - x^i||^2 to the payoff, so
/// q_t = p_t + c, b_t = p_t (A_t^{-i} + x0_t) - 2 c x_it. Shares its fixed
/// points with the exact map for every c > 0.
std::vector<double> regularized_best_response(std::size_t i, const ChargingMatrix& x,
                                              const FleetInstance& instance, double c,
                                              double tol = 1e-12);

/// Equilibrium certificate max_i [f(x^i, x^{-i}) - f(BR^i(x), x^{-i})] >= 0.
/// A value <= eps certifies an eps-Nash point.
double nash_residual(const ChargingMatrix& x, const FleetInstance& instance,
                     double tol = 1e-12);

/// Default regularization weight max_t p_t * m, scaling with the coupling
/// strength.
double default_regularization(const FleetInstance& instance);

}  // namespace chargegame
