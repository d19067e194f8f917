#include "chargegame/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chargegame/game.hpp"
#include "chargegame/kernel.hpp"
#include "bcd.hpp"

namespace chargegame {

namespace {

void require_valid(const FleetInstance& instance) {
    const ValidationOutcome v = validate_instance(instance);
    if (v.ok()) return;
    for (const std::string& msg : v.violations) {
        if (msg.find("empty X^") != std::string::npos) {
            throw InfeasibleSet("invalid instance: " + msg);
        }
    }
    throw std::invalid_argument("invalid instance: " + v.violations.front());
}

detail::BcdSpec make_spec(const FleetInstance& instance, double block_aux,
                          double descent_aux, double kappa, double c) {
    detail::BcdSpec spec;
    spec.prices = instance.prices;
    spec.x0 = realized_base_load(instance);
    spec.rows.reserve(instance.agent_count());
    for (const AgentParams& a : instance.agents) {
        spec.rows.push_back({1.0, block_aux, descent_aux, &a});
    }
    spec.kappa = kappa;
    spec.c = c;
    return spec;
}

ChargingMatrix pick_start(const detail::BcdSpec& spec,
                          const std::optional<ChargingMatrix>& start,
                          const FleetInstance& instance) {
    if (!start) return detail::most_uniform_rows(spec, 1e-12);
    if (start->rows() != instance.agent_count() || start->cols() != instance.horizon()) {
        throw std::invalid_argument("start point does not match instance dimensions");
    }
    return *start;
}

// Largest objective improvement any single block re-optimization can still
// achieve; the stationarity certificate of the block-coordinate method.
double block_improvement_residual(const detail::BcdSpec& spec, const ChargingMatrix& x) {
    const std::size_t h = spec.prices.size();
    std::vector<double> total = detail::aggregate_of(spec, x);
    SeparableQP qp;
    qp.q.resize(h);
    qp.b.resize(h);
    double worst = 0.0;
    for (std::size_t r = 0; r < spec.rows.size(); ++r) {
        detail::fill_block_qp(spec, spec.rows[r], total, x.row(r), qp);
        const std::vector<double> z = solve_separable_qp(qp, 1e-12);
        worst = std::max(worst, qp_objective(qp, x.row(r)) - qp_objective(qp, z));
    }
    return worst;
}

}  // namespace

ChargingMatrix feasible_start(const FleetInstance& instance) {
    require_valid(instance);
    const detail::BcdSpec spec = make_spec(instance, 0.0, 0.0, 2.0, 0.0);
    return detail::most_uniform_rows(spec, 1e-12);
}

SolveResult solve_social(const FleetInstance& instance, const SolverConfig& config,
                         const std::optional<ChargingMatrix>& start) {
    require_valid(instance);
    const detail::BcdSpec spec = make_spec(instance, 0.0, 0.0, 2.0, 0.0);
    const detail::BcdOutcome run =
        detail::run_bcd(spec, pick_start(spec, start, instance), config);

    SolveResult result;
    result.x = run.x;
    result.report.objective = social_cost(run.x, instance);
    result.report.iterations = run.iterations;
    result.report.residual = run.last_change;
    result.report.max_descent_violation = run.max_descent_violation;
    result.report.oscillating = run.oscillating;

    const double stationarity = block_improvement_residual(spec, run.x);
    result.report.stationarity_residual = stationarity;
    const double scale = 1.0 + std::abs(result.report.objective);
    const bool certified = stationarity <= config.tol_residual * scale;
    result.report.status = (!run.hit_max_iter && certified) ? SolveStatus::converged
                                                            : SolveStatus::max_iter;
    return result;
}

SolveResult solve_nash_central(const FleetInstance& instance, const SolverConfig& config,
                               const std::optional<ChargingMatrix>& start) {
    require_valid(instance);
    const detail::BcdSpec spec = make_spec(instance, 1.0, 1.0, 2.0, 0.0);
    const detail::BcdOutcome run =
        detail::run_bcd(spec, pick_start(spec, start, instance), config);

    SolveResult result;
    result.x = run.x;
    result.report.objective = social_cost(run.x, instance);
    result.report.iterations = run.iterations;
    result.report.residual = run.last_change;
    result.report.max_descent_violation = run.max_descent_violation;
    result.report.oscillating = run.oscillating;

    const double cert = nash_residual(run.x, instance);
    result.report.nash_residual = cert;
    const double scale = 1.0 + std::abs(result.report.objective);
    const bool certified = cert <= config.tol_residual * scale;
    result.report.status = (!run.hit_max_iter && certified) ? SolveStatus::converged
                                                            : SolveStatus::max_iter;
    return result;
}

SolveResult solve_nash_decentralized(const FleetInstance& instance,
                                     const SolverConfig& config,
                                     const std::optional<ChargingMatrix>& start) {
    require_valid(instance);
    const double c = config.c.value_or(default_regularization(instance));
    if (!(c > 0.0)) throw std::invalid_argument("solver config: c must be > 0");

    detail::BcdSpec spec = make_spec(instance, 0.0, 1.0, 1.0, c);
    const detail::BcdOutcome run =
        detail::run_bcd(spec, pick_start(spec, start, instance), config);

    SolveResult result;
    result.x = run.x;
    result.report.objective = social_cost(run.x, instance);
    result.report.iterations = run.iterations;
    result.report.residual = run.last_change;
    result.report.max_descent_violation = run.max_descent_violation;
    result.report.oscillating = run.oscillating;

    const double cert = nash_residual(run.x, instance);
    result.report.nash_residual = cert;
    const double scale = 1.0 + std::abs(result.report.objective);
    const bool certified = cert <= config.tol_residual * scale;
    result.report.status = (!run.hit_max_iter && certified) ? SolveStatus::converged
                                                            : SolveStatus::max_iter;
    return result;
}

PoaResult price_of_anarchy(const FleetInstance& instance, const SolverConfig& config) {
    PoaResult out;
    out.social = solve_social(instance, config);
    out.nash = solve_nash_central(instance, config);
    const double f_social = out.social.report.objective;
    if (f_social <= 0.0) {
        throw DegenerateObjective("price_of_anarchy: social optimum objective <= 0");
    }
    out.ratio = out.nash.report.objective / f_social;
    out.relative_error = (out.nash.report.objective - f_social) / f_social;
    return out;
}

std::vector<double> objective_gradient_block(std::size_t i, const ChargingMatrix& x,
                                             const FleetInstance& instance,
                                             ObjectiveKind which) {
    const std::vector<double> s = aggregate_profile(x, instance);
    std::vector<double> g(instance.horizon());
    for (std::size_t t = 0; t < g.size(); ++t) {
        g[t] = 2.0 * instance.prices[t] * s[t];
        if (which == ObjectiveKind::auxiliary) {
            g[t] += 2.0 * instance.prices[t] * x(i, t);
        }
    }
    return g;
}

double objective_value(const ChargingMatrix& x, const FleetInstance& instance,
                       ObjectiveKind which) {
    double v = social_cost(x, instance);
    if (which == ObjectiveKind::auxiliary) v += auxiliary_cost(x, instance);
    return v;
}

ChargingMatrix projected_gradient_reference(const FleetInstance& instance,
                                            ObjectiveKind which, int step_count) {
    require_valid(instance);
    const std::size_t h = instance.horizon();
    const std::size_t m = instance.agent_count();
    double p_max = 0.0;
    for (double p : instance.prices) p_max = std::max(p_max, p);
    const double step = 1.0 / (2.0 * p_max * (static_cast<double>(m) + 1.0));

    ChargingMatrix x = feasible_start(instance);
    std::vector<double> v(h);
    for (int k = 0; k < step_count; ++k) {
        const std::vector<double> s = aggregate_profile(x, instance);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t t = 0; t < h; ++t) {
                double g = 2.0 * instance.prices[t] * s[t];
                if (which == ObjectiveKind::auxiliary) {
                    g += 2.0 * instance.prices[t] * x(i, t);
                }
                v[t] = x(i, t) - step * g;
            }
            const std::vector<double> z =
                project_box_simplex(v, instance.agents[i].gamma, instance.agents[i].lower,
                                    instance.agents[i].upper);
            for (std::size_t t = 0; t < h; ++t) x(i, t) = z[t];
        }
    }
    return x;
}

}  // namespace chargegame
