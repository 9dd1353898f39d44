#pragma once

// PAC-Bayesian bound evaluation and the optimal aggregation distribution.
//
// For p > 1 and q = p / (p - 1), with probability at least 1 - delta and
// uniformly over rho,
//
//   | int R drho - int r_n drho | <= (M / delta)^{1/q} (D_{phi_p - 1}(rho, pi) + 1)^{1/p}
//
// where M bounds the moment term. The right-hand side of the upper bound is
// minimized by rho_hat, whose density against pi is proportional to
// [rbar - r_n]_+^{1/(p-1)}, with rbar the level at which
// int [rbar - r_n]_+^q dpi = M / delta. The minimum value equals rbar.

#include "hostile_pac/divergence.hpp"
#include "hostile_pac/error.hpp"
#include "hostile_pac/moments.hpp"
#include "hostile_pac/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hostile_pac {

struct BoundConfig {
    double p = 2.0;
    double q = 2.0;
    double delta = 0.1;
    MomentBound moment;

    double moment_over_delta() const { return moment.value / delta; }
};

// q is derived from p; the moment bound must have been computed at that q.
inline BoundConfig make_bound_config(double p, double delta, const MomentBound& moment) {
    detail::require(std::isfinite(p) && p > 1.0, "bound config requires p > 1");
    detail::require(delta > 0.0 && delta < 1.0, "bound config requires delta in (0, 1)");
    detail::require(std::isfinite(moment.value) && moment.value >= 0.0, "moment bound must be finite and >= 0");
    BoundConfig cfg{p, p / (p - 1.0), delta, moment};
    detail::require(std::abs(1.0 / cfg.p + 1.0 / cfg.q - 1.0) <= 1e-12, "1/p + 1/q must equal 1");
    detail::require(std::abs(moment.q - cfg.q) <= 1e-9,
                    "moment bound was computed at q = " + std::to_string(moment.q) + " but p implies q = " +
                        std::to_string(cfg.q));
    return cfg;
}

// Conjugate exponent helper for callers that start from q.
inline double conjugate_exponent(double q) {
    detail::require(q > 1.0, "conjugate exponent requires a value > 1");
    return q / (q - 1.0);
}

struct BoundReport {
    std::string label;
    double rn_integral = 0.0;
    double margin = 0.0;
    double upper = 0.0;
    double lower = 0.0;
    double divergence_plus_one = 1.0;
    std::optional<double> rbar;
    std::optional<double> oracle_empirical;
    std::optional<double> oracle_population;
};

// (M / delta)^{1/q} (D + 1)^{1/p}; +infinity propagates.
inline double pac_margin(const BoundConfig& cfg, double div_plus_one) {
    if (std::isinf(div_plus_one)) return kInfinity;
    detail::require(div_plus_one >= 1.0 - 1e-12, "D + 1 must be >= 1");
    return std::pow(cfg.moment_over_delta(), 1.0 / cfg.q) * std::pow(std::max(div_plus_one, 1.0), 1.0 / cfg.p);
}

inline BoundReport evaluate_bound(const DiscreteDistribution& rho, const DiscreteDistribution& pi, std::span<const double> rn,
                                  const BoundConfig& cfg, std::string label = {}) {
    detail::require(rho.size() == pi.size() && rn.size() == pi.size(), "evaluate_bound: mismatched atom sets");
    BoundReport rep;
    rep.label = std::move(label);
    rep.rn_integral = expectation(rho, rn);
    rep.divergence_plus_one = phi_divergence_plus_one(rho, pi, cfg.p);
    rep.margin = pac_margin(cfg, rep.divergence_plus_one);
    rep.upper = rep.rn_integral + rep.margin;
    rep.lower = rep.rn_integral - rep.margin;
    return rep;
}

// int r_n drho + margin(rho): the quantity rho_hat minimizes.
inline double bound_objective(const DiscreteDistribution& rho, const DiscreteDistribution& pi, std::span<const double> rn,
                              const BoundConfig& cfg) {
    return evaluate_bound(rho, pi, rn, cfg).upper;
}

inline std::size_t erm_index(std::span<const double> rn) {
    detail::require(!rn.empty(), "erm_index of an empty vector");
    std::size_t best = 0;
    for (std::size_t j = 1; j < rn.size(); ++j)
        if (rn[j] < rn[best]) best = j;
    return best;
}

struct RbarSolution {
    double value = 0.0;
    double relative_residual = 0.0;
    int iterations = 0;
};

inline constexpr int kRbarMaxIterations = 200;
inline constexpr double kRbarResidualTolerance = 1e-10;

// Smallest u with sum_j pi_j [u - r_n(theta_j)]_+^q = M / delta, by bisection.
// Works in the offset t = u - min r_n so precision is relative to the gap, not
// to the magnitude of the risks.
inline RbarSolution solve_rbar_detailed(std::span<const double> rn, const DiscreteDistribution& pi, double q, double m,
                                        double delta) {
    detail::require(rn.size() == pi.size(), "solve_rbar: r_n/prior size mismatch");
    detail::require(q > 1.0, "solve_rbar requires q > 1");
    detail::require(std::isfinite(m) && m > 0.0, "solve_rbar requires M > 0");
    detail::require(delta > 0.0 && delta < 1.0, "solve_rbar requires delta in (0, 1)");

    double lowest = kInfinity;
    for (std::size_t j = 0; j < rn.size(); ++j)
        if (pi[j] > 0.0 && std::isfinite(rn[j])) lowest = std::min(lowest, rn[j]);
    if (!std::isfinite(lowest)) throw ConfigError("solve_rbar: all prior mass sits on atoms with infinite risk");

    double w_star = 0.0;
    std::vector<double> gap;
    std::vector<double> weight;
    for (std::size_t j = 0; j < rn.size(); ++j) {
        if (!(pi[j] > 0.0) || !std::isfinite(rn[j])) continue;
        if (rn[j] == lowest) w_star += pi[j];
        gap.push_back(rn[j] - lowest);
        weight.push_back(pi[j]);
    }

    const double target = m / delta;
    auto level = [&](double t) {
        double s = 0.0;
        for (std::size_t j = 0; j < gap.size(); ++j)
            if (t > gap[j]) s += weight[j] * std::pow(t - gap[j], q);
        return s;
    };

    double lo = std::pow(target, 1.0 / q);
    double hi = std::pow(target / w_star, 1.0 / q);
    int it = 0;
    for (; it < kRbarMaxIterations && lo < hi; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (level(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    const double r_lo = std::abs(level(lo) - target);
    const double r_hi = std::abs(level(hi) - target);
    const double t = r_lo <= r_hi ? lo : hi;
    RbarSolution sol{lowest + t, std::min(r_lo, r_hi) / target, it};
    if (!(sol.relative_residual <= kRbarResidualTolerance))
        throw NumericalError("solve_rbar: residual " + std::to_string(sol.relative_residual) + " above tolerance after " +
                             std::to_string(it) + " iterations");
    return sol;
}

inline double solve_rbar(std::span<const double> rn, const DiscreteDistribution& pi, double q, double m, double delta) {
    return solve_rbar_detailed(rn, pi, q, m, delta).value;
}

// Population analogue: level of int [u - R]_+^q dpi = 2^q M / delta.
inline double solve_population_rbar(std::span<const double> risk, const DiscreteDistribution& pi, double q, double m,
                                    double delta) {
    return solve_rbar(risk, pi, q, std::pow(2.0, q) * m, delta);
}

// Density against pi proportional to [rbar - r_n]_+^{1/(p-1)}; atoms at or
// above rbar get exactly zero mass.
inline DiscreteDistribution rho_hat(std::span<const double> rn, const DiscreteDistribution& pi, double p, double rbar) {
    detail::require(rn.size() == pi.size(), "rho_hat: r_n/prior size mismatch");
    detail::require(p > 1.0, "rho_hat requires p > 1");
    const double expo = 1.0 / (p - 1.0);
    std::vector<double> mass(rn.size(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < rn.size(); ++j) {
        const double gap = rbar - rn[j];
        if (pi[j] > 0.0 && gap > 0.0) {
            mass[j] = pi[j] * std::pow(gap, expo);
            total += mass[j];
        }
    }
    if (!(total > 0.0)) throw NumericalError("rho_hat: zero normalizer (rbar does not exceed any atom's risk)");
    return DiscreteDistribution::from_masses(std::move(mass));
}

struct MinimizedObjective {
    double rbar = 0.0;
    DiscreteDistribution rho_hat;
    double objective = 0.0;
};

// rbar, rho_hat and the bound objective at rho_hat; the latter two agree.
inline MinimizedObjective minimized_objective_identity(std::span<const double> rn, const DiscreteDistribution& pi,
                                                       const BoundConfig& cfg) {
    MinimizedObjective out;
    out.rbar = solve_rbar(rn, pi, cfg.q, cfg.moment.value, cfg.delta);
    out.rho_hat = rho_hat(rn, pi, cfg.p, out.rbar);
    out.objective = bound_objective(out.rho_hat, pi, rn, cfg);
    return out;
}

// pi restricted to {r_n <= min r_n + gamma} and renormalized. The minimum is
// taken over the prior's support so the set always carries mass.
inline DiscreteDistribution catoni_pi_gamma(std::span<const double> rn, const DiscreteDistribution& pi, double gamma) {
    detail::require(rn.size() == pi.size(), "catoni_pi_gamma: r_n/prior size mismatch");
    detail::require(gamma >= 0.0, "catoni_pi_gamma requires gamma >= 0");
    double lowest = kInfinity;
    for (std::size_t j = 0; j < rn.size(); ++j)
        if (pi[j] > 0.0) lowest = std::min(lowest, rn[j]);
    std::vector<double> mass(rn.size(), 0.0);
    for (std::size_t j = 0; j < rn.size(); ++j)
        if (pi[j] > 0.0 && rn[j] - lowest <= gamma) mass[j] = pi[j];
    return DiscreteDistribution::from_masses(std::move(mass));
}

// gamma = (d (1 - 1/p) M / delta)^{1 / (1 + d (1 - 1/p))}
inline double optimal_gamma(double d, double p, double m, double delta) {
    detail::require(d > 0.0 && p > 1.0 && m > 0.0, "optimal_gamma requires d > 0, p > 1, M > 0");
    detail::require(delta > 0.0 && delta < 1.0, "optimal_gamma requires delta in (0, 1)");
    const double a = d * (1.0 - 1.0 / p);
    return std::pow(a * m / delta, 1.0 / (1.0 + a));
}

inline constexpr double kComplexityResolution = 1e-3;
inline constexpr double kComplexityCap = 64.0;

struct ComplexityEstimate {
    double d = 0.0;
    // every d in [d, d_largest] is valid; d_largest is the cap when satisfied
    double d_largest = 0.0;
    double gamma_lo = 0.0;
    double gamma_hi = 0.0;
    bool satisfied = false;
};

// Prior mass of {values <= min + gamma}, min over the prior's support.
inline double sublevel_mass(std::span<const double> values, const DiscreteDistribution& pi, double gamma) {
    double lowest = kInfinity;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (pi[j] > 0.0) lowest = std::min(lowest, values[j]);
    double mass = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j)
        if (pi[j] > 0.0 && values[j] - lowest <= gamma) mass += pi[j];
    return std::min(mass, 1.0);
}

// Smallest complexity exponent d (on a 1e-3 grid, at least 1e-3) with
// pi{values <= min + gamma} >= gamma^d at every grid point. Smaller d means a
// faster oracle rate; any larger d also satisfies the inequality since gamma < 1.
// `satisfied` is false when the required d exceeds the cap of 64.
inline ComplexityEstimate verify_complexity(std::span<const double> values, const DiscreteDistribution& pi,
                                            std::span<const double> gamma_grid) {
    detail::require(!gamma_grid.empty(), "verify_complexity: empty gamma grid");
    detail::require(values.size() == pi.size(), "verify_complexity: values/prior size mismatch");
    ComplexityEstimate est;
    est.gamma_lo = *std::min_element(gamma_grid.begin(), gamma_grid.end());
    est.gamma_hi = *std::max_element(gamma_grid.begin(), gamma_grid.end());
    detail::require(est.gamma_lo > 0.0 && est.gamma_hi < 1.0, "verify_complexity: gamma grid must lie in (0, 1)");

    std::vector<double> masses;
    masses.reserve(gamma_grid.size());
    double needed = 0.0;
    for (double g : gamma_grid) {
        const double mass = sublevel_mass(values, pi, g);
        masses.push_back(mass);
        needed = std::max(needed, std::log(mass) / std::log(g));
    }
    auto holds = [&](double d) {
        for (std::size_t i = 0; i < gamma_grid.size(); ++i)
            if (masses[i] < std::pow(gamma_grid[i], d)) return false;
        return true;
    };
    double d = std::max(std::ceil(needed / kComplexityResolution - 1e-9) * kComplexityResolution, kComplexityResolution);
    while (d <= kComplexityCap && !holds(d)) d += kComplexityResolution;
    est.satisfied = d <= kComplexityCap;
    est.d = est.satisfied ? d : kComplexityCap;
    est.d_largest = est.satisfied ? kComplexityCap : 0.0;
    return est;
}

// inf r_n + 2 (M / delta)^{1/(q + d)}
inline double oracle_bound_empirical(double rn_min, double m, double delta, double q, double d) {
    detail::require(m >= 0.0 && delta > 0.0 && q > 1.0 && d >= 0.0, "oracle_bound_empirical: invalid inputs");
    return rn_min + 2.0 * std::pow(m / delta, 1.0 / (q + d));
}

// inf R + 2^{q/(q + d)} (M / delta)^{1/(q + d)}
inline double oracle_bound_population(double risk_min, double m, double delta, double q, double d) {
    detail::require(m >= 0.0 && delta > 0.0 && q > 1.0 && d >= 0.0, "oracle_bound_population: invalid inputs");
    return risk_min + std::pow(2.0, q / (q + d)) * std::pow(m / delta, 1.0 / (q + d));
}

} // namespace hostile_pac
