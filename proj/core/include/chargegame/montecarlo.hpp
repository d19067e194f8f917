#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "chargegame/grouping.hpp"
#include "chargegame/model.hpp"
#include "chargegame/solvers.hpp"

namespace chargegame {

enum class HeterogeneityKind { continuous_uniform_gamma, discrete_masses };

/// Sampling law for agent parameters. Continuous: gamma uniform on
/// [gamma_min, gamma_max] with a fixed box shared by all agents (draws hitting
/// the gamma = 0 boundary are resampled). Discrete: finite masses with
/// positive probabilities summing to 1.
struct HeterogeneityModel {
    HeterogeneityKind kind = HeterogeneityKind::continuous_uniform_gamma;
    std::uint64_t seed = 0;

    // continuous_uniform_gamma
    double gamma_min = 0.0;
    double gamma_max = 0.0;
    std::vector<double> lower;
    std::vector<double> upper;

    // discrete_masses
    std::vector<DiscreteMass> masses;
};

ValidationOutcome validate_model(const HeterogeneityModel& model, std::size_t horizon);

/// m i.i.d. draws, deterministic given (model.seed, trial_seed, m); the stream
/// seed is derive_stream(model.seed, m, trial_seed).
std::vector<AgentParams> sample_agents(const HeterogeneityModel& model, std::size_t m,
                                       std::uint64_t trial_seed);

/// One row of the experiment output; exactly the CSV schema.
struct SweepRecord {
    std::size_t m = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double F_social = 0.0;
    double F_nash = 0.0;
    double rel_error = 0.0;
    double poa = 0.0;
    double normalized_value = 0.0;  // F_social / m^2
    int iters_social = 0;
    int iters_nash = 0;
    SolveStatus status = SolveStatus::converged;
};

/// Deterministic prices and base load shared by all trials of an experiment.
struct ExperimentSetup {
    std::vector<double> prices;
    std::vector<double> base_load_per_agent;  // defaults to zeros
};

/// For each (m, trial): sample a population, solve the social and Nash
/// problems, record the relative error and the price of anarchy. Trials run
/// on `threads` workers (0 = hardware concurrency); output is ordered by
/// (m, trial) regardless of parallelism. Per-record solver failures land in
/// the row's status, they are not fatal.
std::vector<SweepRecord> poa_sweep(const HeterogeneityModel& model,
                                   const ExperimentSetup& setup,
                                   const std::vector<std::size_t>& m_values,
                                   std::size_t trials, const SolverConfig& config,
                                   int threads = 0);

struct LimitReport {
    double value = 0.0;            // optimal value of the normalized limit problem
    double value_finite_m = 0.0;   // limit formula at the largest-m grouped minimizer
    double gap = 0.0;              // |value - value_finite_m|
    std::size_t finite_m = 0;      // which m produced value_finite_m
    ChargingMatrix limit_profiles; // one row per mass, from the limit problem
};

struct HeteroSweepResult {
    std::vector<SweepRecord> records;
    LimitReport limit;
};

/// Concentration experiment for discrete-mass models. Each trial is solved
/// through the grouping abstraction, so the cost per trial depends on the
/// number of masses, not on m. Requires model.kind == discrete_masses.
HeteroSweepResult hetero_sweep(const HeterogeneityModel& model,
                               const ExperimentSetup& setup,
                               const std::vector<std::size_t>& m_values,
                               std::size_t trials, const SolverConfig& config,
                               int threads = 0);

/// The three curves of the valley-filling picture for one m: normalized PEV
/// totals (1/m) sum_i x_it + xhat0_t for both solved problems, and xhat0.
struct ValleyFillProfiles {
    std::size_t m = 0;
    std::vector<double> social_total;
    std::vector<double> nash_total;
    std::vector<double> base;
    SweepRecord record;
};

/// Solves both problems on one sampled population per m (trial 0). The base
/// load must have an interior minimum; validated by the caller.
std::vector<ValleyFillProfiles> valley_fill_experiment(const HeterogeneityModel& model,
                                                       const ExperimentSetup& setup,
                                                       const std::vector<std::size_t>& m_values,
                                                       const SolverConfig& config);

/// CSV with header m,trial,seed,F_social,F_nash,rel_error,poa,
/// normalized_value,iters_social,iters_nash,status. Doubles are written in
/// shortest round-trip form, so identical records give identical bytes.
std::string records_to_csv(const std::vector<SweepRecord>& records);

/// Shortest decimal form that round-trips to the same double.
std::string format_round_trip(double v);

/// Boxplot statistics per the usual 1.5 IQR whisker convention.
struct BoxStats {
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double lo_whisker = 0.0;
    double hi_whisker = 0.0;
    std::vector<double> outliers;
};

BoxStats summarize(std::vector<double> values);

}  // namespace chargegame
