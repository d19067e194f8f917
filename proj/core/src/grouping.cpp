#include "chargegame/grouping.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "chargegame/game.hpp"
#include "chargegame/kernel.hpp"
#include "bcd.hpp"
#include "json_util.hpp"

namespace chargegame {

std::size_t GroupedInstance::total_agents() const {
    std::size_t m = 0;
    for (const GroupSpec& g : groups) m += g.count;
    return m;
}

GroupedInstance group_agents(const FleetInstance& instance) {
    GroupedInstance grouped;
    grouped.prices = instance.prices;
    grouped.base_load_per_agent = instance.base_load_per_agent;
    grouped.agent_to_group.reserve(instance.agent_count());

    // Exact parameter equality; groups keyed by the flattened tuple and
    // ordered by first appearance.
    std::map<std::vector<double>, std::size_t> index;
    for (const AgentParams& a : instance.agents) {
        std::vector<double> key;
        key.reserve(1 + a.lower.size() + a.upper.size());
        key.push_back(a.gamma);
        key.insert(key.end(), a.lower.begin(), a.lower.end());
        key.insert(key.end(), a.upper.begin(), a.upper.end());
        auto [it, inserted] = index.try_emplace(std::move(key), grouped.groups.size());
        if (inserted) {
            grouped.groups.push_back({a, 1});
        } else {
            ++grouped.groups[it->second].count;
        }
        grouped.agent_to_group.push_back(it->second);
    }
    return grouped;
}

FleetInstance to_fleet_instance(const GroupedInstance& grouped) {
    FleetInstance instance;
    instance.prices = grouped.prices;
    instance.base_load_per_agent = grouped.base_load_per_agent;
    if (!grouped.agent_to_group.empty()) {
        instance.agents.reserve(grouped.agent_to_group.size());
        for (std::size_t g : grouped.agent_to_group) {
            instance.agents.push_back(grouped.groups[g].params);
        }
    } else {
        for (const GroupSpec& g : grouped.groups) {
            for (std::size_t k = 0; k < g.count; ++k) {
                instance.agents.push_back(g.params);
            }
        }
    }
    return instance;
}

namespace {

void require_valid_grouped(const GroupedInstance& grouped) {
    FleetInstance probe;
    probe.prices = grouped.prices;
    probe.base_load_per_agent = grouped.base_load_per_agent;
    for (const GroupSpec& g : grouped.groups) {
        if (g.count < 1) throw std::invalid_argument("group with count < 1");
        probe.agents.push_back(g.params);
    }
    const ValidationOutcome v = validate_instance(probe);
    if (v.ok()) return;
    for (const std::string& msg : v.violations) {
        if (msg.find("empty X^") != std::string::npos) {
            throw InfeasibleSet("invalid grouped instance: " + msg);
        }
    }
    throw std::invalid_argument("invalid grouped instance: " + v.violations.front());
}

detail::BcdSpec make_grouped_spec(const GroupedInstance& grouped, GroupedProblem which) {
    detail::BcdSpec spec;
    spec.prices = grouped.prices;
    const double m = static_cast<double>(grouped.total_agents());
    spec.x0.resize(grouped.horizon());
    for (std::size_t t = 0; t < spec.x0.size(); ++t) {
        spec.x0[t] = m * grouped.base_load_per_agent[t];
    }
    for (const GroupSpec& g : grouped.groups) {
        const double n = static_cast<double>(g.count);
        // The auxiliary penalty carries the group count so that the grouped
        // problem reproduces F_a of the expanded profile; without it the
        // expansion would not minimize the full auxiliary problem.
        const double aux = which == GroupedProblem::auxiliary ? n : 0.0;
        spec.rows.push_back({n, aux, aux, &g.params});
    }
    spec.kappa = 2.0;
    spec.c = 0.0;
    return spec;
}

}  // namespace

std::pair<ChargingMatrix, SolveReport> solve_grouped(const GroupedInstance& grouped,
                                                     GroupedProblem which,
                                                     const SolverConfig& config) {
    require_valid_grouped(grouped);
    const detail::BcdSpec spec = make_grouped_spec(grouped, which);
    const ChargingMatrix start = detail::most_uniform_rows(spec, 1e-12);
    const detail::BcdOutcome run = detail::run_bcd(spec, start, config);

    SolveReport report;
    report.objective = grouped_social_cost(grouped, run.x);
    report.iterations = run.iterations;
    report.residual = run.last_change;
    report.max_descent_violation = run.max_descent_violation;
    report.oscillating = run.oscillating;

    // Stationarity certificate: best remaining single-block improvement.
    double worst = 0.0;
    {
        std::vector<double> total = detail::aggregate_of(spec, run.x);
        SeparableQP qp;
        qp.q.resize(grouped.horizon());
        qp.b.resize(grouped.horizon());
        for (std::size_t r = 0; r < spec.rows.size(); ++r) {
            detail::fill_block_qp(spec, spec.rows[r], total, run.x.row(r), qp);
            const std::vector<double> z = solve_separable_qp(qp, 1e-12);
            worst = std::max(worst, qp_objective(qp, run.x.row(r)) - qp_objective(qp, z));
        }
    }
    report.stationarity_residual = worst;
    const double scale = 1.0 + std::abs(report.objective);
    const bool certified = worst <= config.tol_residual * scale;
    report.status = (!run.hit_max_iter && certified) ? SolveStatus::converged
                                                     : SolveStatus::max_iter;
    return {run.x, report};
}

ChargingMatrix expand_grouped(const GroupedInstance& grouped,
                              const ChargingMatrix& profiles) {
    if (profiles.rows() != grouped.groups.size() ||
        profiles.cols() != grouped.horizon()) {
        throw std::invalid_argument("profiles do not match grouped instance");
    }
    const std::size_t m = grouped.agent_to_group.empty() ? grouped.total_agents()
                                                         : grouped.agent_to_group.size();
    ChargingMatrix x(m, grouped.horizon());
    if (!grouped.agent_to_group.empty()) {
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t g = grouped.agent_to_group[i];
            for (std::size_t t = 0; t < x.cols(); ++t) x(i, t) = profiles(g, t);
        }
    } else {
        std::size_t i = 0;
        for (std::size_t g = 0; g < grouped.groups.size(); ++g) {
            for (std::size_t k = 0; k < grouped.groups[g].count; ++k, ++i) {
                for (std::size_t t = 0; t < x.cols(); ++t) x(i, t) = profiles(g, t);
            }
        }
    }
    return x;
}

double grouped_social_cost(const GroupedInstance& grouped,
                           const ChargingMatrix& profiles) {
    const double m = static_cast<double>(grouped.total_agents());
    double f = 0.0;
    for (std::size_t t = 0; t < grouped.horizon(); ++t) {
        double s = m * grouped.base_load_per_agent[t];
        for (std::size_t g = 0; g < grouped.groups.size(); ++g) {
            s += static_cast<double>(grouped.groups[g].count) * profiles(g, t);
        }
        f += grouped.prices[t] * s * s;
    }
    return f;
}

namespace {

void check_distribution(const std::vector<DiscreteMass>& distribution) {
    if (distribution.empty()) throw std::invalid_argument("empty mass distribution");
    double sum = 0.0;
    for (const DiscreteMass& mass : distribution) {
        if (!(mass.probability > 0.0)) {
            throw std::invalid_argument("mass probabilities must be positive");
        }
        sum += mass.probability;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("mass probabilities must sum to 1");
    }
}

}  // namespace

double limit_value(const std::vector<DiscreteMass>& distribution,
                   const ChargingMatrix& profiles,
                   std::span<const double> base_load_per_agent,
                   std::span<const double> prices) {
    check_distribution(distribution);
    if (profiles.rows() != distribution.size() || profiles.cols() != prices.size()) {
        throw std::invalid_argument("profiles do not match distribution/horizon");
    }
    double value = 0.0;
    for (std::size_t t = 0; t < prices.size(); ++t) {
        double s = base_load_per_agent[t];
        for (std::size_t l = 0; l < distribution.size(); ++l) {
            s += distribution[l].probability * profiles(l, t);
        }
        value += prices[t] * s * s;
    }
    return value;
}

LimitSolution solve_limit_problem(const std::vector<DiscreteMass>& distribution,
                                  std::span<const double> base_load_per_agent,
                                  std::span<const double> prices,
                                  const SolverConfig& config) {
    check_distribution(distribution);

    // The normalized grouped problem: counts become probabilities, the base
    // load enters per agent. Its optimal value is the F^m/m^2 limit.
    detail::BcdSpec spec;
    spec.prices = prices;
    spec.x0.assign(base_load_per_agent.begin(), base_load_per_agent.end());
    for (const DiscreteMass& mass : distribution) {
        spec.rows.push_back({mass.probability, 0.0, 0.0, &mass.params});
    }
    spec.kappa = 2.0;
    spec.c = 0.0;

    const ChargingMatrix start = detail::most_uniform_rows(spec, 1e-12);
    const detail::BcdOutcome run = detail::run_bcd(spec, start, config);

    LimitSolution out;
    out.profiles = run.x;
    out.report.iterations = run.iterations;
    out.report.residual = run.last_change;
    out.report.max_descent_violation = run.max_descent_violation;
    out.report.oscillating = run.oscillating;
    out.report.status = run.hit_max_iter ? SolveStatus::max_iter : SolveStatus::converged;
    out.value = limit_value(distribution, run.x, base_load_per_agent, prices);
    out.report.objective = out.value;
    return out;
}

GroupedInstance parse_grouped_instance_text(const std::string& json_text) {
    const nlohmann::json j = detail::parse_json(json_text, "grouped instance");
    if (!j.is_object() || !j.contains("horizon") ||
        !j.at("horizon").is_number_integer()) {
        throw std::runtime_error("grouped instance: missing integer field horizon");
    }
    const auto h = j.at("horizon").get<long long>();
    if (h < 1) throw std::runtime_error("grouped instance: horizon must be >= 1");
    const auto read_vec = [&](const nlohmann::json& node, const std::string& key,
                              const std::string& ctx) {
        if (!node.contains(key) || !node.at(key).is_array() ||
            node.at(key).size() != static_cast<std::size_t>(h)) {
            throw std::runtime_error(ctx + ": " + key + " must be an array of length horizon");
        }
        std::vector<double> out;
        for (const auto& v : node.at(key)) out.push_back(v.get<double>());
        return out;
    };

    GroupedInstance grouped;
    grouped.prices = read_vec(j, "prices", "grouped instance");
    grouped.base_load_per_agent = read_vec(j, "base_load_per_agent", "grouped instance");
    if (!j.contains("groups") || !j.at("groups").is_array()) {
        throw std::runtime_error("grouped instance: missing array field groups");
    }
    std::size_t idx = 0;
    for (const auto& jg : j.at("groups")) {
        const std::string ctx = "groups[" + std::to_string(idx) + "]";
        GroupSpec g;
        if (!jg.contains("count") || !jg.at("count").is_number_integer() ||
            jg.at("count").get<long long>() < 1) {
            throw std::runtime_error(ctx + ": count must be a positive integer");
        }
        g.count = jg.at("count").get<std::size_t>();
        if (!jg.contains("gamma") || !jg.at("gamma").is_number()) {
            throw std::runtime_error(ctx + ": missing numeric field gamma");
        }
        g.params.gamma = jg.at("gamma").get<double>();
        g.params.lower = read_vec(jg, "lower", ctx);
        g.params.upper = read_vec(jg, "upper", ctx);
        grouped.groups.push_back(std::move(g));
        ++idx;
    }
    return grouped;
}

GroupedInstance load_grouped_instance(const std::string& path) {
    return parse_grouped_instance_text(detail::read_file(path));
}

std::string grouped_instance_to_json(const GroupedInstance& grouped) {
    nlohmann::json j;
    j["horizon"] = grouped.horizon();
    j["prices"] = grouped.prices;
    j["base_load_per_agent"] = grouped.base_load_per_agent;
    nlohmann::json groups = nlohmann::json::array();
    for (const GroupSpec& g : grouped.groups) {
        groups.push_back({{"count", g.count},
                          {"gamma", g.params.gamma},
                          {"lower", g.params.lower},
                          {"upper", g.params.upper}});
    }
    j["groups"] = std::move(groups);
    return j.dump(2);
}

}  // namespace chargegame
