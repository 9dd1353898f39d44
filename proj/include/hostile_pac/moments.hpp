#pragma once

// Upper bounds on the moment term M_{phi_q,n} = int E|r_n - R|^q dpi for each
// data regime, plus the auxiliary constants they are built from.

#include "hostile_pac/error.hpp"
#include "hostile_pac/param_space.hpp"
#include "hostile_pac/risk.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hostile_pac {

namespace regime {
// s2 = int Var[l_1(theta)] dpi
struct IidVariance {
    double s2 = 0.0;
};
// every l_i(theta) sub-Gaussian with parameter sigma2
struct SubGaussian {
    double sigma2 = 0.0;
};
// losses in [0, 1], alpha_sum = sum_{j in Z} alpha_j
struct MixingBounded {
    double alpha_sum = 0.0;
};
// 1/r + 2/s = 1; moment_integral = int {E[l^s]}^{2/s} dpi;
// alpha_frac_sum = sum_j alpha_j^{1/r}
struct MixingUnbounded {
    double r = 3.0;
    double s = 3.0;
    double moment_integral = 0.0;
    double alpha_frac_sum = 0.0;
    double davydov_factor = 8.0;
};
} // namespace regime

using MomentRegime = std::variant<regime::IidVariance, regime::SubGaussian, regime::MixingBounded, regime::MixingUnbounded>;

enum class RegimeTag { IidVariance, SubGaussian, MixingBounded, MixingUnbounded };

inline const char* to_string(RegimeTag t) {
    switch (t) {
    case RegimeTag::IidVariance: return "variance";
    case RegimeTag::SubGaussian: return "subgaussian";
    case RegimeTag::MixingBounded: return "mixing_bounded";
    case RegimeTag::MixingUnbounded: return "mixing_unbounded";
    }
    return "?";
}

// A bound on M_{phi_q,n}; only valid for the q it was computed at.
struct MomentBound {
    double value = 0.0;
    double q = 2.0;
    std::size_t n = 0;
    RegimeTag tag = RegimeTag::IidVariance;
};

namespace detail {
inline void require_n(std::size_t n) { require(n >= 1, "moment bound needs n >= 1"); }
} // namespace detail

// (s2 / n)^{q/2}, valid for 1 < q <= 2.
inline MomentBound moment_iid_variance(double s2, std::size_t n, double q) {
    detail::require_n(n);
    detail::require(std::isfinite(s2) && s2 >= 0.0, "s2 must be finite and >= 0");
    detail::require(q > 1.0 && q <= 2.0, "variance regime requires 1 < q <= 2");
    return {std::pow(s2 / static_cast<double>(n), 0.5 * q), q, n, RegimeTag::IidVariance};
}

// 2 (q sigma2 / n)^{q/2}, valid for q >= 2.
inline MomentBound moment_subgaussian(double sigma2, std::size_t n, double q) {
    detail::require_n(n);
    detail::require(std::isfinite(sigma2) && sigma2 >= 0.0, "sigma2 must be finite and >= 0");
    detail::require(q >= 2.0, "sub-Gaussian regime requires q >= 2");
    return {2.0 * std::pow(q * sigma2 / static_cast<double>(n), 0.5 * q), q, n, RegimeTag::SubGaussian};
}

// alpha_sum / n at q = 2; losses must lie in [0, 1].
inline MomentBound moment_mixing_bounded(double alpha_sum, std::size_t n) {
    detail::require_n(n);
    detail::require(std::isfinite(alpha_sum) && alpha_sum >= 0.0, "alpha_sum must be finite and >= 0");
    return {alpha_sum / static_cast<double>(n), 2.0, n, RegimeTag::MixingBounded};
}

inline void validate(const regime::MixingUnbounded& m) {
    detail::require(m.r >= 1.0, "mixing_unbounded requires r >= 1");
    detail::require(m.s >= 2.0, "mixing_unbounded requires s >= 2");
    detail::require(std::abs(1.0 / m.r + 2.0 / m.s - 1.0) <= 1e-12, "mixing_unbounded requires 1/r + 2/s = 1");
    detail::require(std::isfinite(m.moment_integral) && m.moment_integral >= 0.0, "moment_integral must be >= 0");
    detail::require(std::isfinite(m.alpha_frac_sum) && m.alpha_frac_sum >= 0.0, "alpha_frac_sum must be >= 0");
    detail::require(std::isfinite(m.davydov_factor) && m.davydov_factor > 0.0, "davydov_factor must be > 0");
}

// factor * moment_integral * alpha_frac_sum / n at q = 2. The default factor 8
// is the covariance-inequality constant; factor 1 gives the bare product.
inline MomentBound moment_mixing_unbounded(const regime::MixingUnbounded& m, std::size_t n) {
    detail::require_n(n);
    validate(m);
    return {m.davydov_factor * m.moment_integral * m.alpha_frac_sum / static_cast<double>(n), 2.0, n,
            RegimeTag::MixingUnbounded};
}

inline RegimeTag tag_of(const MomentRegime& r) { return static_cast<RegimeTag>(r.index()); }

// Dispatch on the regime; mixing regimes only exist at q = 2.
inline MomentBound moment_bound(const MomentRegime& regime, std::size_t n, double q) {
    return std::visit(
        [&](const auto& r) -> MomentBound {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, regime::IidVariance>) {
                return moment_iid_variance(r.s2, n, q);
            } else if constexpr (std::is_same_v<R, regime::SubGaussian>) {
                return moment_subgaussian(r.sigma2, n, q);
            } else {
                detail::require(std::abs(q - 2.0) <= 1e-9, "mixing regimes are only available at q = 2 (p = 2)");
                if constexpr (std::is_same_v<R, regime::MixingBounded>)
                    return moment_mixing_bounded(r.alpha_sum, n);
                else
                    return moment_mixing_unbounded(r, n);
            }
        },
        regime);
}

// Majorant of sum_{j in Z} (c1 e^{-c2 |j|})^{1/power}: 2 c1^{1/power} / (1 - e^{-c2/power}).
inline double geometric_alpha_sum(double c1, double c2, double power = 1.0) {
    detail::require(std::isfinite(c1) && c1 >= 0.0, "geometric_alpha_sum requires c1 >= 0");
    detail::require(std::isfinite(c2) && c2 > 0.0, "geometric_alpha_sum requires c2 > 0");
    detail::require(power >= 1.0, "geometric_alpha_sum requires power >= 1");
    if (c1 == 0.0) return 0.0;
    return 2.0 * std::pow(c1, 1.0 / power) / -std::expm1(-c2 / power);
}

// kappa = 8 [E(Y^4) + tau E(||X||^4)], an upper bound on s2 for the squared
// loss with linear predictors.
inline double kappa_quadratic(double ey4, double tau, double ex4) {
    detail::require(ey4 >= 0.0 && tau >= 0.0 && ex4 >= 0.0, "kappa_quadratic inputs must be >= 0");
    return 8.0 * (ey4 + tau * ex4);
}

struct OptimizedQ {
    double q = 2.0;
    // set when 2 log(2K/delta) < 2 and q was raised to 2
    bool clamped = false;
};

// q = 2 log(2K / delta), the minimizer of the finite-class sub-Gaussian ERM bound.
inline OptimizedQ optimal_q_finite(std::size_t k, double delta) {
    detail::require(k >= 1, "optimal_q_finite requires K >= 1");
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    const double q = 2.0 * std::log(2.0 * static_cast<double>(k) / delta);
    if (q < 2.0) return {2.0, true};
    return {q, false};
}

// sqrt(2 e sigma2 log(2K/delta) / n): the ERM excess term at the optimized q.
inline double optimized_finite_bound_term(double sigma2, std::size_t n, std::size_t k, double delta) {
    detail::require(n >= 1 && k >= 1, "optimized_finite_bound_term requires n, K >= 1");
    detail::require(delta > 0.0 && delta < 1.0, "delta must lie in (0, 1)");
    return std::sqrt(2.0 * std::numbers::e * sigma2 * std::log(2.0 * static_cast<double>(k) / delta) /
                     static_cast<double>(n));
}

// Direct Monte Carlo estimate of M_{phi_q,n} from replicated empirical risks:
// the mean over replications of sum_j pi_j |r_n(theta_j) - R(theta_j)|^q.
// For validating theoretical bounds only.
inline double empirical_moment_estimate(std::span<const std::vector<double>> rn_replications, std::span<const double> risk,
                                        const DiscreteDistribution& pi, double q) {
    detail::require(rn_replications.size() >= 1, "empirical moment estimate needs at least one replication");
    detail::require(risk.size() == pi.size(), "empirical moment estimate: risk/prior size mismatch");
    double acc = 0.0;
    for (const auto& rn : rn_replications) {
        detail::require(rn.size() == pi.size(), "empirical moment estimate: r_n/prior size mismatch");
        double s = 0.0;
        for (std::size_t j = 0; j < rn.size(); ++j)
            if (pi[j] > 0.0) s += pi[j] * std::pow(std::abs(rn[j] - risk[j]), q);
        acc += s;
    }
    return acc / static_cast<double>(rn_replications.size());
}

inline double empirical_moment_estimate(std::span<const LossTable> tables, std::span<const double> risk,
                                        const DiscreteDistribution& pi, double q) {
    detail::require(tables.size() >= 2, "empirical moment estimate needs at least two tables");
    std::vector<std::vector<double>> rn;
    rn.reserve(tables.size());
    for (const auto& t : tables) rn.push_back(empirical_risk(t));
    return empirical_moment_estimate(std::span<const std::vector<double>>(rn), risk, pi, q);
}

} // namespace hostile_pac
