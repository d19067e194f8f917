#include "chargegame/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "chargegame/game.hpp"
#include "chargegame/rng.hpp"

namespace chargegame {

ValidationOutcome validate_model(const HeterogeneityModel& model, std::size_t horizon) {
    ValidationOutcome out;
    if (model.kind == HeterogeneityKind::continuous_uniform_gamma) {
        if (!(model.gamma_max > model.gamma_min) || model.gamma_min < 0.0) {
            out.violations.push_back("gamma support must satisfy 0 <= min < max");
        }
        if (model.lower.size() != horizon || model.upper.size() != horizon) {
            out.violations.push_back("fixed box profiles must match horizon");
            return out;
        }
        double sum_lower = 0.0;
        double sum_upper = 0.0;
        for (std::size_t t = 0; t < horizon; ++t) {
            if (model.lower[t] < 0.0 || model.lower[t] > model.upper[t]) {
                out.violations.push_back("invalid box at t=" + std::to_string(t));
            }
            sum_lower += model.lower[t];
            sum_upper += model.upper[t];
        }
        // Every gamma in (min, max] must keep the agent set nonempty.
        if (sum_lower > model.gamma_min + kFeasibilityTol ||
            sum_upper < model.gamma_max - kFeasibilityTol) {
            out.violations.push_back("box does not admit the whole gamma support");
        }
    } else {
        if (model.masses.empty()) {
            out.violations.push_back("discrete model needs at least one mass");
            return out;
        }
        double sum = 0.0;
        for (std::size_t l = 0; l < model.masses.size(); ++l) {
            const DiscreteMass& mass = model.masses[l];
            const std::string who = "mass " + std::to_string(l);
            if (!(mass.probability > 0.0)) {
                out.violations.push_back(who + ": probability must be > 0");
            }
            sum += mass.probability;
            if (mass.params.lower.size() != horizon ||
                mass.params.upper.size() != horizon) {
                out.violations.push_back(who + ": bound vectors must match horizon");
                continue;
            }
            double sl = 0.0;
            double su = 0.0;
            bool box_ok = true;
            for (std::size_t t = 0; t < horizon; ++t) {
                if (mass.params.lower[t] < 0.0 ||
                    mass.params.lower[t] > mass.params.upper[t]) {
                    out.violations.push_back(who + ": invalid box at t=" + std::to_string(t));
                    box_ok = false;
                }
                sl += mass.params.lower[t];
                su += mass.params.upper[t];
            }
            if (box_ok && (mass.params.gamma < sl - kFeasibilityTol ||
                           mass.params.gamma > su + kFeasibilityTol ||
                           mass.params.gamma < 0.0)) {
                out.violations.push_back(who + ": infeasible parameters");
            }
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            out.violations.push_back("mass probabilities must sum to 1");
        }
    }
    return out;
}

std::vector<AgentParams> sample_agents(const HeterogeneityModel& model, std::size_t m,
                                       std::uint64_t trial_seed) {
    SplitMix64 rng(derive_stream(model.seed, m, trial_seed));
    std::vector<AgentParams> agents;
    agents.reserve(m);
    if (model.kind == HeterogeneityKind::continuous_uniform_gamma) {
        for (std::size_t i = 0; i < m; ++i) {
            double gamma = rng.next_in(model.gamma_min, model.gamma_max);
            while (gamma <= 0.0) {  // probability-zero boundary; keep gamma > 0
                gamma = rng.next_in(model.gamma_min, model.gamma_max);
            }
            agents.push_back({gamma, model.lower, model.upper});
        }
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            double u = rng.next_double();
            std::size_t pick = model.masses.size() - 1;
            for (std::size_t l = 0; l < model.masses.size(); ++l) {
                u -= model.masses[l].probability;
                if (u < 0.0) {
                    pick = l;
                    break;
                }
            }
            agents.push_back(model.masses[pick].params);
        }
    }
    return agents;
}

std::string format_round_trip(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

FleetInstance build_instance(const ExperimentSetup& setup,
                             std::vector<AgentParams> agents) {
    FleetInstance instance;
    instance.prices = setup.prices;
    instance.base_load_per_agent = setup.base_load_per_agent;
    if (instance.base_load_per_agent.empty()) {
        instance.base_load_per_agent.assign(setup.prices.size(), 0.0);
    }
    instance.agents = std::move(agents);
    return instance;
}

SolveStatus combine_status(SolveStatus a, SolveStatus b) {
    if (a == SolveStatus::infeasible || b == SolveStatus::infeasible) {
        return SolveStatus::infeasible;
    }
    if (a == SolveStatus::max_iter || b == SolveStatus::max_iter) {
        return SolveStatus::max_iter;
    }
    return SolveStatus::converged;
}

void run_indexed(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
    unsigned n = threads > 0 ? static_cast<unsigned>(threads)
                             : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, count == 0 ? 1 : static_cast<unsigned>(count));
    if (n <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = cursor.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (std::thread& t : pool) t.join();
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

std::vector<SweepRecord> poa_sweep(const HeterogeneityModel& model,
                                   const ExperimentSetup& setup,
                                   const std::vector<std::size_t>& m_values,
                                   std::size_t trials, const SolverConfig& config,
                                   int threads) {
    const std::size_t count = m_values.size() * trials;
    std::vector<SweepRecord> records(count);
    run_indexed(count, threads, [&](std::size_t idx) {
        const std::size_t m = m_values[idx / trials];
        const std::size_t trial = idx % trials;
        SweepRecord& rec = records[idx];
        rec.m = m;
        rec.trial = trial;
        rec.seed = derive_stream(model.seed, m, trial);

        const FleetInstance instance = build_instance(setup, sample_agents(model, m, trial));
        try {
            const PoaResult poa = price_of_anarchy(instance, config);
            rec.F_social = poa.social.report.objective;
            rec.F_nash = poa.nash.report.objective;
            rec.rel_error = poa.relative_error;
            rec.poa = poa.ratio;
            rec.normalized_value = rec.F_social / (static_cast<double>(m) * m);
            rec.iters_social = poa.social.report.iterations;
            rec.iters_nash = poa.nash.report.iterations;
            rec.status = combine_status(poa.social.report.status, poa.nash.report.status);
        } catch (const std::exception&) {
            rec.F_social = rec.F_nash = rec.rel_error = rec.poa = rec.normalized_value = kNan;
            rec.status = SolveStatus::infeasible;
        }
    });
    return records;
}

HeteroSweepResult hetero_sweep(const HeterogeneityModel& model,
                               const ExperimentSetup& setup,
                               const std::vector<std::size_t>& m_values,
                               std::size_t trials, const SolverConfig& config,
                               int threads) {
    if (model.kind != HeterogeneityKind::discrete_masses) {
        throw std::invalid_argument("hetero_sweep requires a discrete-mass model");
    }
    HeteroSweepResult out;
    const std::size_t count = m_values.size() * trials;
    out.records.resize(count);
    run_indexed(count, threads, [&](std::size_t idx) {
        const std::size_t m = m_values[idx / trials];
        const std::size_t trial = idx % trials;
        SweepRecord& rec = out.records[idx];
        rec.m = m;
        rec.trial = trial;
        rec.seed = derive_stream(model.seed, m, trial);

        const FleetInstance instance = build_instance(setup, sample_agents(model, m, trial));
        try {
            const GroupedInstance grouped = group_agents(instance);
            const SolveReport rs =
                solve_grouped(grouped, GroupedProblem::social, config).second;
            const SolveReport ra =
                solve_grouped(grouped, GroupedProblem::auxiliary, config).second;
            rec.F_social = rs.objective;
            rec.F_nash = ra.objective;
            rec.rel_error = (rec.F_nash - rec.F_social) / rec.F_social;
            rec.poa = rec.F_nash / rec.F_social;
            rec.normalized_value = rec.F_social / (static_cast<double>(m) * m);
            rec.iters_social = rs.iterations;
            rec.iters_nash = ra.iterations;
            rec.status = combine_status(rs.status, ra.status);
        } catch (const std::exception&) {
            rec.F_social = rec.F_nash = rec.rel_error = rec.poa = rec.normalized_value = kNan;
            rec.status = SolveStatus::infeasible;
        }
    });

    // Limit report: the normalized problem's optimum is the F/m^2 limit. The
    // finite-m variant plugs the grouped minimizer at expected counts for the
    // largest m into the same formula; both are exposed with their gap.
    std::vector<double> base = setup.base_load_per_agent;
    if (base.empty()) base.assign(setup.prices.size(), 0.0);
    const LimitSolution limit =
        solve_limit_problem(model.masses, base, setup.prices, config);
    out.limit.value = limit.value;
    out.limit.limit_profiles = limit.profiles;

    const std::size_t m_max = *std::max_element(m_values.begin(), m_values.end());
    GroupedInstance expected;
    expected.prices = setup.prices;
    expected.base_load_per_agent = base;
    for (const DiscreteMass& mass : model.masses) {
        const auto n = static_cast<std::size_t>(
            std::max(1.0, std::round(mass.probability * static_cast<double>(m_max))));
        expected.groups.push_back({mass.params, n});
    }
    const ChargingMatrix profiles_m =
        solve_grouped(expected, GroupedProblem::social, config).first;
    out.limit.finite_m = m_max;
    out.limit.value_finite_m = limit_value(model.masses, profiles_m, base, setup.prices);
    out.limit.gap = std::abs(out.limit.value - out.limit.value_finite_m);
    return out;
}

std::vector<ValleyFillProfiles> valley_fill_experiment(const HeterogeneityModel& model,
                                                       const ExperimentSetup& setup,
                                                       const std::vector<std::size_t>& m_values,
                                                       const SolverConfig& config) {
    std::vector<ValleyFillProfiles> out;
    out.reserve(m_values.size());
    for (const std::size_t m : m_values) {
        ValleyFillProfiles row;
        row.m = m;
        row.base = setup.base_load_per_agent;
        row.record.m = m;
        row.record.trial = 0;
        row.record.seed = derive_stream(model.seed, m, 0);

        const FleetInstance instance = build_instance(setup, sample_agents(model, m, 0));
        const PoaResult poa = price_of_anarchy(instance, config);
        const std::size_t h = instance.horizon();
        row.social_total.assign(h, 0.0);
        row.nash_total.assign(h, 0.0);
        const double inv_m = 1.0 / static_cast<double>(m);
        for (std::size_t t = 0; t < h; ++t) {
            double s_social = 0.0;
            double s_nash = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                s_social += poa.social.x(i, t);
                s_nash += poa.nash.x(i, t);
            }
            row.social_total[t] = inv_m * s_social + instance.base_load_per_agent[t];
            row.nash_total[t] = inv_m * s_nash + instance.base_load_per_agent[t];
        }
        row.record.F_social = poa.social.report.objective;
        row.record.F_nash = poa.nash.report.objective;
        row.record.rel_error = poa.relative_error;
        row.record.poa = poa.ratio;
        row.record.normalized_value =
            row.record.F_social / (static_cast<double>(m) * m);
        row.record.iters_social = poa.social.report.iterations;
        row.record.iters_nash = poa.nash.report.iterations;
        row.record.status =
            combine_status(poa.social.report.status, poa.nash.report.status);
        out.push_back(std::move(row));
    }
    return out;
}

std::string records_to_csv(const std::vector<SweepRecord>& records) {
    std::string csv =
        "m,trial,seed,F_social,F_nash,rel_error,poa,normalized_value,"
        "iters_social,iters_nash,status\n";
    for (const SweepRecord& r : records) {
        csv += std::to_string(r.m);
        csv += ',';
        csv += std::to_string(r.trial);
        csv += ',';
        csv += std::to_string(r.seed);
        csv += ',';
        csv += format_round_trip(r.F_social);
        csv += ',';
        csv += format_round_trip(r.F_nash);
        csv += ',';
        csv += format_round_trip(r.rel_error);
        csv += ',';
        csv += format_round_trip(r.poa);
        csv += ',';
        csv += format_round_trip(r.normalized_value);
        csv += ',';
        csv += std::to_string(r.iters_social);
        csv += ',';
        csv += std::to_string(r.iters_nash);
        csv += ',';
        csv += to_string(r.status);
        csv += '\n';
    }
    return csv;
}

BoxStats summarize(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty input");
    std::sort(values.begin(), values.end());
    BoxStats s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    const auto quantile = [&](double p) {
        const double k = p * static_cast<double>(values.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(k);
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double frac = k - static_cast<double>(lo);
        return values[lo] + frac * (values[hi] - values[lo]);
    };
    s.median = quantile(0.5);
    s.q1 = quantile(0.25);
    s.q3 = quantile(0.75);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    s.lo_whisker = s.q1;
    s.hi_whisker = s.q3;
    for (double v : values) {
        if (v < lo_fence || v > hi_fence) {
            s.outliers.push_back(v);
        } else {
            s.lo_whisker = std::min(s.lo_whisker, v);
            s.hi_whisker = std::max(s.hi_whisker, v);
        }
    }
    return s;
}

}  // namespace chargegame
