#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chargegame/model.hpp"
#include "chargegame/solvers.hpp"

namespace chargegame {

/// A homogeneous group: one parameter tuple shared by `count` agents.
struct GroupSpec {
    AgentParams params;
    std::size_t count = 0;
};

/// Fleet abstracted into homogeneous groups; one decision vector per group.
/// agent_to_group keeps the original index mapping for expansion.
struct GroupedInstance {
    std::vector<double> prices;
    std::vector<double> base_load_per_agent;
    std::vector<GroupSpec> groups;
    std::vector<std::size_t> agent_to_group;

    std::size_t horizon() const { return prices.size(); }
    std::size_t total_agents() const;
};

enum class GroupedProblem { social, auxiliary };

/// Partitions agents by exact equality of (gamma, lower, upper); groups are
/// ordered by first appearance. Near-duplicates stay distinct on purpose:
/// discrete masses are exact program inputs.
GroupedInstance group_agents(const FleetInstance& instance);

/// Rebuilds the plain instance (group parameters repeated count times).
FleetInstance to_fleet_instance(const GroupedInstance& grouped);

/// Solves the grouped problem by cyclic exact block minimization, one block
/// per group; group l's block is the separable QP with
///   q_t = n_l^2 p_t (+ n_l p_t for the auxiliary problem),
///   b_t = 2 n_l p_t (Abar_t^{-l} + x0_t).
/// The returned matrix has one row per group. report.objective is the grouped
/// fleet cost, which equals F^m of the expanded solution.
std::pair<ChargingMatrix, SolveReport> solve_grouped(const GroupedInstance& grouped,
                                                     GroupedProblem which,
                                                     const SolverConfig& config);

/// Copies group l's profile to every agent of group l. When the profiles
/// solve the grouped problem the expansion attains the optimal value of the
/// corresponding full problem.
ChargingMatrix expand_grouped(const GroupedInstance& grouped,
                              const ChargingMatrix& profiles);

/// Grouped fleet cost sum_t p_t (sum_l n_l xbar_lt + x0_t)^2 (x0 realized
/// from total_agents); identical to social_cost of the expanded matrix.
double grouped_social_cost(const GroupedInstance& grouped, const ChargingMatrix& profiles);

/// One mass of a discrete heterogeneity distribution.
struct DiscreteMass {
    double probability = 0.0;
    AgentParams params;
};

/// The population-limit value sum_t p_t (sum_l P_l xbar_lt + xhat0_t)^2 for
/// given per-group profiles. Throws std::invalid_argument when probabilities
/// do not sum to 1 within 1e-9.
double limit_value(const std::vector<DiscreteMass>& distribution,
                   const ChargingMatrix& profiles,
                   std::span<const double> base_load_per_agent,
                   std::span<const double> prices);

struct LimitSolution {
    ChargingMatrix profiles;  // one row per mass
    SolveReport report;
    double value = 0.0;
};

/// Solves the normalized limit problem: the grouped social problem with
/// counts replaced by mass probabilities and the per-agent base load. Its
/// optimal value is the limit of F^m(x*) / m^2.
LimitSolution solve_limit_problem(const std::vector<DiscreteMass>& distribution,
                                  std::span<const double> base_load_per_agent,
                                  std::span<const double> prices,
                                  const SolverConfig& config);

/// Grouped-instance file I/O: same JSON schema as plain instances with
/// `groups: [{count, gamma, lower, upper}]` in place of `agents`.
GroupedInstance load_grouped_instance(const std::string& path);
GroupedInstance parse_grouped_instance_text(const std::string& json_text);
std::string grouped_instance_to_json(const GroupedInstance& grouped);

}  // namespace chargegame
