#pragma once

#include <optional>
#include <stdexcept>

#include "chargegame/model.hpp"

namespace chargegame {

/// Sweep scheduling: Gauss-Seidel updates agents in place (guaranteed
/// objective descent); Jacobi updates every agent from the same snapshot,
/// the decentralized semantics.
enum class Schedule { gauss_seidel, jacobi };

struct SolverConfig {
    double tol_x = 1e-9;         // sup-norm sweep-change tolerance
    double tol_residual = 1e-7;  // certificate tolerance, scaled by (1 + |F|)
    int max_iter = 10000;        // sweep cap
    std::optional<double> c;     // regularization weight; default p_max * m
    Schedule schedule = Schedule::gauss_seidel;
};

struct SolveResult {
    ChargingMatrix x;
    SolveReport report;
};

class DegenerateObjective : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Deterministic feasible start: each agent's most uniform profile,
/// solve_separable_qp with q = 1, b = 0.
ChargingMatrix feasible_start(const FleetInstance& instance);

/// Social optimum of the fleet problem by cyclic exact block-coordinate
/// minimization; agent i's block is the separable QP with q_t = p_t,
/// b_t = 2 p_t (A_t^{-i} + x0_t). report.objective is F^m at the returned
/// point; the aggregate and the value are unique even when x is not.
SolveResult solve_social(const FleetInstance& instance, const SolverConfig& config,
                         const std::optional<ChargingMatrix>& start = std::nullopt);

/// The unique Nash equilibrium, computed centrally as the minimizer of
/// F^m + F_a^m (agent blocks with q_t = 2 p_t, b_t = 2 p_t (A_t^{-i} + x0_t),
/// the same minimizer as the exact best response). Certified by
/// nash_residual <= tol_residual * (1 + |F|). report.objective is F^m.
SolveResult solve_nash_central(const FleetInstance& instance, const SolverConfig& config,
                               const std::optional<ChargingMatrix>& start = std::nullopt);

/// Decentralized Nash computation: iterate the regularized best-response map
/// until the sweep change drops below tol_x, then certify with nash_residual.
/// Non-convergence within max_iter is reported (status + oscillation flag),
/// not thrown.
SolveResult solve_nash_decentralized(const FleetInstance& instance,
                                     const SolverConfig& config,
                                     const std::optional<ChargingMatrix>& start = std::nullopt);

struct PoaResult {
    double ratio = 0.0;           // F^m(nash) / F^m(social) >= 1
    double relative_error = 0.0;  // (F^m(nash) - F^m(social)) / F^m(social)
    SolveResult social;
    SolveResult nash;
};

/// Solves both problems and forms the price of anarchy. Throws
/// DegenerateObjective if F^m(social) <= 0 (cannot occur for valid instances
/// with some positive demand).
PoaResult price_of_anarchy(const FleetInstance& instance, const SolverConfig& config);

enum class ObjectiveKind { social, auxiliary };

/// Independent cross-validation oracle: projected gradient with step 1/L,
/// L = 2 p_max (m + 1), each agent block projected via project_box_simplex.
/// Runs exactly step_count iterations.
ChargingMatrix projected_gradient_reference(const FleetInstance& instance,
                                            ObjectiveKind which, int step_count);

/// Analytic gradient block of F^m (plus the auxiliary term when requested)
/// with respect to agent i's row; used by the reference solver and the
/// finite-difference hygiene tests.
std::vector<double> objective_gradient_block(std::size_t i, const ChargingMatrix& x,
                                             const FleetInstance& instance,
                                             ObjectiveKind which);

/// Objective evaluated by the reference solver: F^m, or F^m + F_a^m.
double objective_value(const ChargingMatrix& x, const FleetInstance& instance,
                       ObjectiveKind which);

}  // namespace chargegame
