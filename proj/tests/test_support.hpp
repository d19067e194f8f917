#pragma once

// Test-only helpers: an exhaustive grid oracle over the equality-constrained
// feasible set (independent of the kernel it checks) and deterministic random
// instance generators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "chargegame/kernel.hpp"
#include "chargegame/model.hpp"

namespace testsupport {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform() {
        return static_cast<double>(gen() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen() % n); }
};

inline double grid_objective(const std::vector<double>& q, const std::vector<double>& b,
                             const std::vector<double>& z) {
    double f = 0.0;
    for (std::size_t t = 0; t < z.size(); ++t) f += q[t] * z[t] * z[t] + b[t] * z[t];
    return f;
}

// Best objective over the grid restricted to sum z = gamma, h <= 3. Free
// coordinates walk their box on the given step; the last coordinate absorbs
// the equality constraint.
inline double grid_best(const chargegame::SeparableQP& qp, double step) {
    const std::size_t h = qp.q.size();
    double best = std::numeric_limits<double>::infinity();
    if (h == 1) {
        if (qp.gamma >= qp.lower[0] - 1e-12 && qp.gamma <= qp.upper[0] + 1e-12) {
            best = grid_objective(qp.q, qp.b, {qp.gamma});
        }
        return best;
    }
    if (h == 2) {
        const double lo = std::max(qp.lower[0], qp.gamma - qp.upper[1]);
        const double hi = std::min(qp.upper[0], qp.gamma - qp.lower[1]);
        for (double z0 = lo; z0 <= hi + 1e-15; z0 += step) {
            const double z1 = qp.gamma - z0;
            best = std::min(best, grid_objective(qp.q, qp.b, {z0, z1}));
        }
        return best;
    }
    const double lo0 = std::max(qp.lower[0], qp.gamma - qp.upper[1] - qp.upper[2]);
    const double hi0 = std::min(qp.upper[0], qp.gamma - qp.lower[1] - qp.lower[2]);
    for (double z0 = lo0; z0 <= hi0 + 1e-15; z0 += step) {
        const double rest = qp.gamma - z0;
        const double lo1 = std::max(qp.lower[1], rest - qp.upper[2]);
        const double hi1 = std::min(qp.upper[1], rest - qp.lower[2]);
        for (double z1 = lo1; z1 <= hi1 + 1e-15; z1 += step) {
            const double z2 = rest - z1;
            best = std::min(best, grid_objective(qp.q, qp.b, {z0, z1, z2}));
        }
    }
    return best;
}

inline chargegame::SeparableQP random_qp(Rng& rng, std::size_t h) {
    chargegame::SeparableQP qp;
    qp.q.resize(h);
    qp.b.resize(h);
    qp.lower.resize(h);
    qp.upper.resize(h);
    double sum_lower = 0.0;
    double sum_upper = 0.0;
    for (std::size_t t = 0; t < h; ++t) {
        qp.q[t] = rng.uniform(0.1, 3.0);
        qp.b[t] = rng.uniform(-2.0, 2.0);
        qp.lower[t] = rng.uniform(0.0, 0.4);
        qp.upper[t] = qp.lower[t] + rng.uniform(0.1, 0.8);
        sum_lower += qp.lower[t];
        sum_upper += qp.upper[t];
    }
    qp.gamma = sum_lower + rng.uniform(0.05, 0.95) * (sum_upper - sum_lower);
    return qp;
}

inline chargegame::AgentParams random_agent(Rng& rng, std::size_t h) {
    chargegame::AgentParams a;
    a.lower.resize(h);
    a.upper.resize(h);
    double sum_lower = 0.0;
    double sum_upper = 0.0;
    for (std::size_t t = 0; t < h; ++t) {
        a.lower[t] = rng.uniform(0.0, 0.2);
        a.upper[t] = a.lower[t] + rng.uniform(0.3, 1.0);
        sum_lower += a.lower[t];
        sum_upper += a.upper[t];
    }
    a.gamma = sum_lower + rng.uniform(0.1, 0.9) * (sum_upper - sum_lower);
    return a;
}

inline chargegame::FleetInstance random_instance(Rng& rng, std::size_t m, std::size_t h,
                                                 bool with_base_load = true) {
    chargegame::FleetInstance instance;
    instance.prices.resize(h);
    instance.base_load_per_agent.assign(h, 0.0);
    for (std::size_t t = 0; t < h; ++t) {
        instance.prices[t] = rng.uniform(0.2, 3.0);
        if (with_base_load) instance.base_load_per_agent[t] = rng.uniform(0.0, 1.0);
    }
    for (std::size_t i = 0; i < m; ++i) {
        instance.agents.push_back(random_agent(rng, h));
    }
    return instance;
}

// Random feasible point: uniform draw in the box, each row projected onto its
// simplex slice.
inline chargegame::ChargingMatrix random_feasible(Rng& rng,
                                                  const chargegame::FleetInstance& instance) {
    const std::size_t h = instance.horizon();
    chargegame::ChargingMatrix x(instance.agent_count(), h);
    std::vector<double> v(h);
    for (std::size_t i = 0; i < instance.agent_count(); ++i) {
        const chargegame::AgentParams& a = instance.agents[i];
        for (std::size_t t = 0; t < h; ++t) {
            v[t] = rng.uniform(a.lower[t], a.upper[t]);
        }
        const std::vector<double> z =
            chargegame::project_box_simplex(v, a.gamma, a.lower, a.upper);
        for (std::size_t t = 0; t < h; ++t) x(i, t) = z[t];
    }
    return x;
}

inline double sup_distance(const chargegame::ChargingMatrix& a,
                           const chargegame::ChargingMatrix& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t t = 0; t < a.cols(); ++t) {
            d = std::max(d, std::abs(a(i, t) - b(i, t)));
        }
    }
    return d;
}

}  // namespace testsupport
