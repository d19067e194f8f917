#include "chargegame/model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "json_util.hpp"

namespace chargegame {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::infeasible: return "infeasible";
    }
    return "unknown";
}

namespace {

bool finite_all(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace

ValidationOutcome validate_instance(const FleetInstance& instance) {
    ValidationOutcome out;
    const std::size_t h = instance.horizon();
    if (h < 1) {
        out.violations.push_back("horizon must be >= 1");
        return out;
    }
    for (std::size_t t = 0; t < h; ++t) {
        if (!std::isfinite(instance.prices[t]) || instance.prices[t] <= 0.0) {
            out.violations.push_back("nonpositive price at t=" + std::to_string(t));
        }
    }
    if (instance.base_load_per_agent.size() != h) {
        out.violations.push_back("base_load_per_agent length != horizon");
    } else {
        for (std::size_t t = 0; t < h; ++t) {
            if (!std::isfinite(instance.base_load_per_agent[t]) ||
                instance.base_load_per_agent[t] < 0.0) {
                out.violations.push_back("negative base load at t=" + std::to_string(t));
            }
        }
    }

    for (std::size_t i = 0; i < instance.agents.size(); ++i) {
        const AgentParams& a = instance.agents[i];
        const std::string who = "agent " + std::to_string(i + 1);
        if (a.lower.size() != h || a.upper.size() != h) {
            out.violations.push_back(who + ": bound vectors length != horizon");
            continue;
        }
        if (!std::isfinite(a.gamma) || a.gamma < 0.0) {
            out.violations.push_back(who + ": negative gamma");
            continue;
        }
        if (!finite_all(a.lower) || !finite_all(a.upper)) {
            out.violations.push_back(who + ": non-finite bound");
            continue;
        }
        bool box_ok = true;
        for (std::size_t t = 0; t < h; ++t) {
            if (a.lower[t] < 0.0) {
                out.violations.push_back(who + ": negative lower bound at t=" +
                                         std::to_string(t));
                box_ok = false;
            }
            if (a.lower[t] > a.upper[t]) {
                out.violations.push_back(who + ": lower > upper at t=" + std::to_string(t));
                box_ok = false;
            }
        }
        if (!box_ok) continue;
        const double sum_lower = std::accumulate(a.lower.begin(), a.lower.end(), 0.0);
        const double sum_upper = std::accumulate(a.upper.begin(), a.upper.end(), 0.0);
        if (a.gamma < sum_lower - kFeasibilityTol || a.gamma > sum_upper + kFeasibilityTol) {
            out.violations.push_back("empty X^" + std::to_string(i + 1));
        }
    }
    return out;
}

std::vector<double> realized_base_load(const FleetInstance& instance) {
    const double m = static_cast<double>(instance.agent_count());
    std::vector<double> x0(instance.base_load_per_agent.size());
    for (std::size_t t = 0; t < x0.size(); ++t) {
        x0[t] = m * instance.base_load_per_agent[t];
    }
    return x0;
}

bool feasible(const ChargingMatrix& x, const FleetInstance& instance, double tol) {
    const std::size_t h = instance.horizon();
    if (x.rows() != instance.agent_count() || x.cols() != h) return false;
    constexpr double box_tol = 1e-12;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const AgentParams& a = instance.agents[i];
        double sum = 0.0;
        for (std::size_t t = 0; t < h; ++t) {
            const double v = x(i, t);
            const double slack = box_tol * (1.0 + std::abs(a.lower[t]) + std::abs(a.upper[t]));
            if (v < a.lower[t] - slack || v > a.upper[t] + slack) return false;
            sum += v;
        }
        if (std::abs(sum - a.gamma) > tol * (1.0 + std::abs(a.gamma))) return false;
    }
    return true;
}

namespace {

std::vector<double> require_array(const nlohmann::json& j, const std::string& key,
                                  std::size_t h, const std::string& ctx) {
    if (!j.contains(key)) throw std::runtime_error(ctx + ": missing field " + key);
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw std::runtime_error(ctx + ": " + key + " must be an array");
    if (h > 0 && arr.size() != h) {
        throw std::runtime_error(ctx + ": " + key + " length must match horizon");
    }
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) throw std::runtime_error(ctx + ": " + key + " must be numeric");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

FleetInstance parse_instance_text(const std::string& json_text) {
    const nlohmann::json j = detail::parse_json(json_text, "instance");
    if (!j.is_object()) throw std::runtime_error("instance: top level must be an object");
    if (!j.contains("horizon") || !j.at("horizon").is_number_integer()) {
        throw std::runtime_error("instance: missing integer field horizon");
    }
    const auto h = j.at("horizon").get<long long>();
    if (h < 1) throw std::runtime_error("instance: horizon must be >= 1");

    FleetInstance instance;
    instance.prices = require_array(j, "prices", static_cast<std::size_t>(h), "instance");
    instance.base_load_per_agent =
        require_array(j, "base_load_per_agent", static_cast<std::size_t>(h), "instance");
    if (!j.contains("agents") || !j.at("agents").is_array()) {
        throw std::runtime_error("instance: missing array field agents");
    }
    std::size_t idx = 0;
    for (const auto& ja : j.at("agents")) {
        const std::string ctx = "agents[" + std::to_string(idx) + "]";
        AgentParams a;
        if (!ja.contains("gamma") || !ja.at("gamma").is_number()) {
            throw std::runtime_error(ctx + ": missing numeric field gamma");
        }
        a.gamma = ja.at("gamma").get<double>();
        a.lower = require_array(ja, "lower", static_cast<std::size_t>(h), ctx);
        a.upper = require_array(ja, "upper", static_cast<std::size_t>(h), ctx);
        instance.agents.push_back(std::move(a));
        ++idx;
    }
    return instance;
}

FleetInstance load_instance(const std::string& path) {
    return parse_instance_text(detail::read_file(path));
}

std::string instance_to_json(const FleetInstance& instance) {
    nlohmann::json j;
    j["horizon"] = instance.horizon();
    j["prices"] = instance.prices;
    j["base_load_per_agent"] = instance.base_load_per_agent;
    nlohmann::json agents = nlohmann::json::array();
    for (const AgentParams& a : instance.agents) {
        agents.push_back({{"gamma", a.gamma}, {"lower", a.lower}, {"upper", a.upper}});
    }
    j["agents"] = std::move(agents);
    return j.dump(2);
}

std::string report_to_json(const SolveReport& report) {
    return detail::report_json(report).dump(2);
}

}  // namespace chargegame
