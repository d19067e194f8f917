#include "chargegame/kernel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace chargegame {

namespace {

double clip(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// z(lambda) and its coordinate sum; sum is continuous, piecewise linear and
// nondecreasing in lambda.
double sum_at(const SeparableQP& qp, double lambda) {
    double s = 0.0;
    for (std::size_t t = 0; t < qp.q.size(); ++t) {
        s += clip((lambda - qp.b[t]) / (2.0 * qp.q[t]), qp.lower[t], qp.upper[t]);
    }
    return s;
}

void check_shape(const SeparableQP& qp) {
    const std::size_t h = qp.q.size();
    if (h == 0 || qp.b.size() != h || qp.lower.size() != h || qp.upper.size() != h) {
        throw std::invalid_argument("SeparableQP: inconsistent vector lengths");
    }
    for (std::size_t t = 0; t < h; ++t) {
        if (!(qp.q[t] > 0.0)) {
            throw std::invalid_argument("SeparableQP: q must be strictly positive");
        }
        if (!(qp.lower[t] <= qp.upper[t])) {
            throw std::invalid_argument("SeparableQP: lower > upper at slot " +
                                        std::to_string(t));
        }
    }
}

}  // namespace

std::vector<double> solve_separable_qp(const SeparableQP& qp, double tol) {
    check_shape(qp);
    if (!(tol > 0.0)) throw std::invalid_argument("solve_separable_qp: tol must be > 0");

    const std::size_t h = qp.q.size();
    const double sum_lower = std::accumulate(qp.lower.begin(), qp.lower.end(), 0.0);
    const double sum_upper = std::accumulate(qp.upper.begin(), qp.upper.end(), 0.0);

    // Infeasibility beyond tolerance is an error; within it, clamp gamma onto
    // the attainable range.
    const double feas_slack = 1e-9 * (1.0 + std::abs(qp.gamma));
    if (qp.gamma < sum_lower - feas_slack || qp.gamma > sum_upper + feas_slack) {
        throw InfeasibleSet("solve_separable_qp: gamma outside [sum lower, sum upper]");
    }
    const double gamma = clip(qp.gamma, sum_lower, sum_upper);

    if (gamma >= sum_upper) return qp.upper;
    if (gamma <= sum_lower) return qp.lower;

    // Bracket: at lambda_lo every coordinate clips to its lower bound, at
    // lambda_hi to its upper bound.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    double inv_scale = 0.0;  // d(sum)/d(lambda) upper bound
    for (std::size_t t = 0; t < h; ++t) {
        lo = std::min(lo, 2.0 * qp.q[t] * qp.lower[t] + qp.b[t]);
        hi = std::max(hi, 2.0 * qp.q[t] * qp.upper[t] + qp.b[t]);
        inv_scale += 1.0 / (2.0 * qp.q[t]);
    }

    // Bisection until the bracket width, scaled by the maximal slope of the
    // sum, can no longer move the residual by more than tol. Also stop once
    // the bracket saturates at floating-point resolution.
    while ((hi - lo) * inv_scale > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        assert(sum_at(qp, lo) <= gamma + 1e-9 && sum_at(qp, hi) >= gamma - 1e-9);
        if (sum_at(qp, mid) < gamma) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double lambda = 0.5 * (lo + hi);

    // Pattern polish: with the clip pattern at lambda fixed, the equality is
    // linear in lambda and can be solved exactly. Repeats while the pattern
    // keeps shifting (at most a few times near a breakpoint).
    std::vector<double> z(h);
    for (int pass = 0; pass < 4; ++pass) {
        double fixed = 0.0;
        double slope = 0.0;
        double offset = 0.0;
        for (std::size_t t = 0; t < h; ++t) {
            const double raw = (lambda - qp.b[t]) / (2.0 * qp.q[t]);
            if (raw <= qp.lower[t]) {
                fixed += qp.lower[t];
            } else if (raw >= qp.upper[t]) {
                fixed += qp.upper[t];
            } else {
                slope += 1.0 / (2.0 * qp.q[t]);
                offset += -qp.b[t] / (2.0 * qp.q[t]);
            }
        }
        if (slope == 0.0) break;  // fully clipped; boundary case
        const double candidate = (gamma - fixed - offset) / slope;
        if (candidate == lambda) break;
        lambda = candidate;
        double s = 0.0;
        for (std::size_t t = 0; t < h; ++t) {
            z[t] = clip((lambda - qp.b[t]) / (2.0 * qp.q[t]), qp.lower[t], qp.upper[t]);
            s += z[t];
        }
        if (std::abs(s - gamma) <= tol) return z;
    }

    for (std::size_t t = 0; t < h; ++t) {
        z[t] = clip((lambda - qp.b[t]) / (2.0 * qp.q[t]), qp.lower[t], qp.upper[t]);
    }
    return z;
}

std::vector<double> project_box_simplex(std::span<const double> v, double gamma,
                                        std::span<const double> lower,
                                        std::span<const double> upper, double tol) {
    SeparableQP qp;
    qp.q.assign(v.size(), 1.0);
    qp.b.resize(v.size());
    for (std::size_t t = 0; t < v.size(); ++t) qp.b[t] = -2.0 * v[t];
    qp.gamma = gamma;
    qp.lower.assign(lower.begin(), lower.end());
    qp.upper.assign(upper.begin(), upper.end());
    return solve_separable_qp(qp, tol);
}

double kkt_residual(const SeparableQP& qp, std::span<const double> z) {
    check_shape(qp);
    const std::size_t h = qp.q.size();
    if (z.size() != h) throw std::invalid_argument("kkt_residual: size mismatch");

    // Recover the multiplier: interior coordinates pin it exactly; otherwise
    // take the midpoint of the interval allowed by the active bounds.
    double lambda = 0.0;
    std::size_t interior = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    constexpr double edge = 1e-11;
    for (std::size_t t = 0; t < h; ++t) {
        const double g = 2.0 * qp.q[t] * z[t] + qp.b[t];
        const double width = qp.upper[t] - qp.lower[t];
        const double margin = edge * (1.0 + std::abs(qp.lower[t]) + std::abs(qp.upper[t]));
        if (width > 2.0 * margin && z[t] > qp.lower[t] + margin &&
            z[t] < qp.upper[t] - margin) {
            lambda += g;
            ++interior;
        } else if (z[t] <= qp.lower[t] + margin) {
            hi = std::min(hi, g);  // at lower bound: lambda <= gradient value
        } else {
            lo = std::max(lo, g);  // at upper bound: lambda >= gradient value
        }
    }
    if (interior > 0) {
        lambda /= static_cast<double>(interior);
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
        lambda = 0.5 * (lo + hi);
    } else if (std::isfinite(lo)) {
        lambda = lo;
    } else if (std::isfinite(hi)) {
        lambda = hi;
    }

    double res = 0.0;
    for (std::size_t t = 0; t < h; ++t) {
        const double zt =
            std::min(std::max((lambda - qp.b[t]) / (2.0 * qp.q[t]), qp.lower[t]),
                     qp.upper[t]);
        res = std::max(res, std::abs(z[t] - zt));
    }
    return res;
}

double qp_objective(const SeparableQP& qp, std::span<const double> z) {
    double f = 0.0;
    for (std::size_t t = 0; t < z.size(); ++t) {
        f += qp.q[t] * z[t] * z[t] + qp.b[t] * z[t];
    }
    return f;
}

}  // namespace chargegame
