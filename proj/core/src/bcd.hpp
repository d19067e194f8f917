#pragma once

// Shared cyclic block-minimization engine. Every solve in the library is an
// instance of: rows r with aggregation weight w_r over a common per-slot
// aggregate T_t = sum_r w_r x_rt + x0_t, block subproblems rewritten as
// separable QPs
//   q_t = (w_r^2 + block_aux_r) p_t + c,
//   b_t = kappa w_r p_t (T_t - w_r x_rt) - 2 c x_rt,
// with kappa = 2 when the block minimizes the tracked objective directly and
// kappa = 1 for best-response (game payoff) blocks. The tracked objective is
//   Phi = sum_t p_t T_t^2 + sum_r descent_aux_r sum_t p_t x_rt^2,
// which Gauss-Seidel sweeps never increase for any configuration used here.

#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "chargegame/kernel.hpp"
#include "chargegame/model.hpp"
#include "chargegame/solvers.hpp"

namespace chargegame::detail {

struct BcdRow {
    double weight = 1.0;
    double block_aux = 0.0;
    double descent_aux = 0.0;
    const AgentParams* params = nullptr;
};

struct BcdSpec {
    std::span<const double> prices;
    std::vector<double> x0;  // realized base load
    std::vector<BcdRow> rows;
    double kappa = 2.0;
    double c = 0.0;
};

struct BcdOutcome {
    ChargingMatrix x;
    int iterations = 0;
    double last_change = 0.0;
    double max_descent_violation = 0.0;
    bool hit_max_iter = false;
    bool oscillating = false;
};

inline ChargingMatrix most_uniform_rows(const BcdSpec& spec, double tol) {
    const std::size_t h = spec.prices.size();
    ChargingMatrix x(spec.rows.size(), h);
    SeparableQP qp;
    qp.q.assign(h, 1.0);
    qp.b.assign(h, 0.0);
    for (std::size_t r = 0; r < spec.rows.size(); ++r) {
        const AgentParams& a = *spec.rows[r].params;
        qp.gamma = a.gamma;
        qp.lower = a.lower;
        qp.upper = a.upper;
        const std::vector<double> z = solve_separable_qp(qp, tol);
        for (std::size_t t = 0; t < h; ++t) x(r, t) = z[t];
    }
    return x;
}

inline std::vector<double> aggregate_of(const BcdSpec& spec, const ChargingMatrix& x) {
    std::vector<double> total = spec.x0;
    for (std::size_t r = 0; r < spec.rows.size(); ++r) {
        const double w = spec.rows[r].weight;
        for (std::size_t t = 0; t < x.cols(); ++t) total[t] += w * x(r, t);
    }
    return total;
}

inline double tracked_objective(const BcdSpec& spec, const ChargingMatrix& x,
                                std::span<const double> total) {
    double phi = 0.0;
    for (std::size_t t = 0; t < total.size(); ++t) {
        phi += spec.prices[t] * total[t] * total[t];
    }
    for (std::size_t r = 0; r < spec.rows.size(); ++r) {
        const double d = spec.rows[r].descent_aux;
        if (d == 0.0) continue;
        for (std::size_t t = 0; t < x.cols(); ++t) {
            phi += d * spec.prices[t] * x(r, t) * x(r, t);
        }
    }
    return phi;
}

inline void fill_block_qp(const BcdSpec& spec, const BcdRow& row,
                          std::span<const double> total, std::span<const double> x_row,
                          SeparableQP& qp) {
    const double w = row.weight;
    for (std::size_t t = 0; t < x_row.size(); ++t) {
        const double others = total[t] - w * x_row[t];
        qp.q[t] = (w * w + row.block_aux) * spec.prices[t] + spec.c;
        qp.b[t] = spec.kappa * w * spec.prices[t] * others - 2.0 * spec.c * x_row[t];
    }
    qp.gamma = row.params->gamma;
    qp.lower = row.params->lower;
    qp.upper = row.params->upper;
}

inline BcdOutcome run_bcd(const BcdSpec& spec, const ChargingMatrix& start,
                          const SolverConfig& config, double qp_tol = 1e-12) {
    const std::size_t h = spec.prices.size();
    const std::size_t n = spec.rows.size();

    BcdOutcome out;
    out.x = start;
    std::vector<double> total = aggregate_of(spec, out.x);
    double phi = tracked_objective(spec, out.x, total);

    SeparableQP qp;
    qp.q.resize(h);
    qp.b.resize(h);
    std::deque<double> change_history;

    const bool gauss_seidel = config.schedule == Schedule::gauss_seidel;
    ChargingMatrix next;  // Jacobi staging

    int iter = 0;
    for (; iter < config.max_iter; ++iter) {
        double sweep_change = 0.0;
        if (gauss_seidel) {
            for (std::size_t r = 0; r < n; ++r) {
                const BcdRow& row = spec.rows[r];
                const double w = row.weight;
                fill_block_qp(spec, row, total, out.x.row(r), qp);
                const std::vector<double> z = solve_separable_qp(qp, qp_tol);

                // Apply the update and track the objective increment in O(h).
                double row_change = 0.0;
                double phi_delta = 0.0;
                for (std::size_t t = 0; t < h; ++t) {
                    const double old = out.x(r, t);
                    const double t_old = total[t];
                    const double t_new = t_old + w * (z[t] - old);
                    row_change = std::max(row_change, std::abs(z[t] - old));
                    phi_delta += spec.prices[t] * (t_new * t_new - t_old * t_old);
                    phi_delta += row.descent_aux * spec.prices[t] *
                                 (z[t] * z[t] - old * old);
                    total[t] = t_new;
                    out.x(r, t) = z[t];
                }
                sweep_change = std::max(sweep_change, row_change);
                if (phi_delta > 1e-9 * (1.0 + std::abs(phi))) {
                    out.max_descent_violation =
                        std::max(out.max_descent_violation, phi_delta);
                }
                phi += phi_delta;
            }
        } else {
            next = out.x;
            for (std::size_t r = 0; r < n; ++r) {
                fill_block_qp(spec, spec.rows[r], total, out.x.row(r), qp);
                const std::vector<double> z = solve_separable_qp(qp, qp_tol);
                for (std::size_t t = 0; t < h; ++t) {
                    sweep_change = std::max(sweep_change, std::abs(z[t] - out.x(r, t)));
                    next(r, t) = z[t];
                }
            }
            out.x = next;
        }

        // Refresh the aggregate from scratch once per sweep to cap drift.
        total = aggregate_of(spec, out.x);
        phi = tracked_objective(spec, out.x, total);

        change_history.push_back(sweep_change);
        if (change_history.size() > 10) change_history.pop_front();
        out.last_change = sweep_change;

        if (sweep_change <= config.tol_x) {
            ++iter;
            break;
        }
    }

    out.iterations = iter;
    out.hit_max_iter = out.last_change > config.tol_x;
    if (out.hit_max_iter && change_history.size() >= 10) {
        bool non_decreasing = true;
        for (std::size_t k = 1; k < change_history.size(); ++k) {
            if (change_history[k] < change_history[k - 1]) {
                non_decreasing = false;
                break;
            }
        }
        out.oscillating = non_decreasing;
    }
    return out;
}

}  // namespace chargegame::detail
