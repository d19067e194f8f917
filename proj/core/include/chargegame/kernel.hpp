#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace chargegame {

/// Thrown when {z : sum z = gamma, lower <= z <= upper} is empty beyond
/// tolerance.
class InfeasibleSet : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Canonical separable QP over a simplex-plus-box set:
///   minimize sum_t (q_t z_t^2 + b_t z_t)
///   subject to sum_t z_t = gamma, lower_t <= z_t <= upper_t,
/// with q_t > 0. Every per-agent and per-group subproblem in this library is
/// rewritten into this form.
struct SeparableQP {
    std::vector<double> q;
    std::vector<double> b;
    double gamma = 0.0;
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Unique minimizer of the separable QP. The solution has the clipped-KKT
/// form z_t(lambda) = clip((lambda - b_t) / (2 q_t), lower_t, upper_t) with the
/// scalar multiplier lambda found by bisection on the nondecreasing function
/// sum_t z_t(lambda); a final pattern solve pins the equality residual to tol.
/// Bounds hold exactly, |sum z - gamma| <= tol.
std::vector<double> solve_separable_qp(const SeparableQP& qp, double tol = 1e-12);

/// Euclidean projection onto {z : sum z = gamma, lower <= z <= upper},
/// realized as solve_separable_qp with q = 1, b = -2v.
std::vector<double> project_box_simplex(std::span<const double> v, double gamma,
                                        std::span<const double> lower,
                                        std::span<const double> upper,
                                        double tol = 1e-12);

/// Optimality certificate: recovers the multiplier implied by z and returns
/// max_t |z_t - clip((lambda - b_t)/(2 q_t), lower_t, upper_t)|.
double kkt_residual(const SeparableQP& qp, std::span<const double> z);

/// Objective value sum_t (q_t z_t^2 + b_t z_t).
double qp_objective(const SeparableQP& qp, std::span<const double> z);

}  // namespace chargegame
