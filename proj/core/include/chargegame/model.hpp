#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chargegame {

/// One vehicle's constraint data: charge gamma within per-slot rate bounds.
/// The feasible set is {z : sum_t z_t = gamma, lower_t <= z_t <= upper_t}.
struct AgentParams {
    double gamma = 0.0;
    std::vector<double> lower;
    std::vector<double> upper;

    bool operator==(const AgentParams&) const = default;
};

/// The full game datum: price coefficients, per-agent constraints and the
/// normalized non-PEV load. The realized base load scales linearly with the
/// number of agents: x0_t = m * base_load_per_agent_t.
struct FleetInstance {
    std::vector<double> prices;
    std::vector<double> base_load_per_agent;
    std::vector<AgentParams> agents;

    std::size_t horizon() const { return prices.size(); }
    std::size_t agent_count() const { return agents.size(); }
};

/// Row-major m x h matrix of charging rates; row i is agent i's profile.
class ChargingMatrix {
  public:
    ChargingMatrix() = default;
    ChargingMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t t) { return data_[i * cols_ + t]; }
    double operator()(std::size_t i, std::size_t t) const { return data_[i * cols_ + t]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    std::span<const double> flat() const { return data_; }
    std::span<double> flat() { return data_; }

    bool operator==(const ChargingMatrix&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class SolveStatus { converged, max_iter, infeasible };

std::string to_string(SolveStatus s);

/// Outcome of one solve. `residual` is the last sweep's sup-norm change,
/// `nash_residual` the equilibrium certificate (absent for pure social solves).
/// `max_descent_violation` tracks the largest per-block objective increase seen
/// in Gauss-Seidel mode; it stays at 0 for an exact monotone run.
struct SolveReport {
    double objective = 0.0;
    int iterations = 0;
    double residual = 0.0;
    std::optional<double> nash_residual;
    SolveStatus status = SolveStatus::converged;

    std::optional<double> stationarity_residual;
    double max_descent_violation = 0.0;
    bool oscillating = false;
};

struct ValidationOutcome {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Tolerance for row-sum feasibility checks; every solver in this library
/// promises at least this primal accuracy.
inline constexpr double kFeasibilityTol = 1e-9;

/// Checks every type invariant: positive prices, consistent vector lengths,
/// nonnegative bounds, and nonempty per-agent sets. Violations name the agent
/// (1-based, matching X^i) and the failed condition; they are data, not errors.
ValidationOutcome validate_instance(const FleetInstance& instance);

/// The realized non-PEV load m * base_load_per_agent.
std::vector<double> realized_base_load(const FleetInstance& instance);

/// True iff every row i lies in X^i: row sum equals gamma^i within tol and
/// entries stay inside the per-slot bounds.
bool feasible(const ChargingMatrix& x, const FleetInstance& instance,
              double tol = kFeasibilityTol);

/// Instance file I/O. The format is a UTF-8 JSON object with fields
/// `horizon`, `prices`, `base_load_per_agent` and `agents`; every array must
/// match `horizon` in length. Throws std::runtime_error on malformed input.
FleetInstance load_instance(const std::string& path);
FleetInstance parse_instance_text(const std::string& json_text);
std::string instance_to_json(const FleetInstance& instance);

std::string report_to_json(const SolveReport& report);

}  // namespace chargegame
