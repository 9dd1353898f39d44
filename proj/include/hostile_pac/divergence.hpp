#pragma once

// Csiszar f-divergences between discrete distributions on a shared atom set.

#include "hostile_pac/error.hpp"
#include "hostile_pac/param_space.hpp"

#include <cmath>
#include <limits>
#include <variant>

namespace hostile_pac {

namespace divergence_kind {
// f(x) = x^p - 1, p > 1
struct PhiP {
    double p = 2.0;
};
// f(x) = x log x, natural logarithm
struct KL {};
// f(x) = x^2 - 1; identical to PhiP{2}
struct ChiSquare {};
} // namespace divergence_kind

using DivergenceKind = std::variant<divergence_kind::PhiP, divergence_kind::KL, divergence_kind::ChiSquare>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

// Both generators are evaluated in the tilted form g(x) = f(x) - f'(1)(x - 1).
// The linear part integrates to zero against pi (sum rho = sum pi = 1), and the
// tilted form keeps every term nonnegative, so tiny deviations rho != pi still
// produce a strictly positive divergence instead of cancelling to zero.

// (1+h)^p - 1 - p h
inline double tilted_power(double h, double p) {
    if (std::abs(h) < 1e-3) {
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k <= 16; ++k) {
            term *= (p - (k - 1)) * h / k;
            if (k >= 2) sum += term;
            if (k >= 2 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    const double x = 1.0 + h;
    return std::pow(x, p) - 1.0 - p * h;
}

// (1+h) log(1+h) - h, with 0 log 0 = 0
inline double tilted_xlogx(double h) {
    if (std::abs(h) < 1e-3) {
        double sum = 0.0;
        double hk = h;
        for (int k = 2; k <= 16; ++k) {
            hk *= h;
            const double t = ((k % 2 == 0) ? 1.0 : -1.0) * hk / (static_cast<double>(k) * (k - 1));
            sum += t;
            if (std::abs(t) <= 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    const double x = 1.0 + h;
    if (x == 0.0) return 1.0;
    return x * std::log(x) - h;
}

template <class Tilted>
double csiszar_sum(const DiscreteDistribution& rho, const DiscreteDistribution& pi, Tilted g) {
    require(rho.size() == pi.size(), "f_divergence: distributions live on different atom sets");
    double acc = 0.0;
    for (std::size_t j = 0; j < pi.size(); ++j) {
        if (pi[j] == 0.0) {
            if (rho[j] > 0.0) return kInfinity;
            continue;
        }
        const double h = (rho[j] - pi[j]) / pi[j];
        acc += pi[j] * g(h);
    }
    return acc < 0.0 ? 0.0 : acc;
}

} // namespace detail

// D_f(rho, pi); +infinity when rho is not absolutely continuous w.r.t. pi.
inline double f_divergence(const DiscreteDistribution& rho, const DiscreteDistribution& pi, const DivergenceKind& kind) {
    return std::visit(
        [&](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, divergence_kind::PhiP>) {
                detail::require(k.p > 1.0, "PhiP divergence requires p > 1");
                return detail::csiszar_sum(rho, pi, [p = k.p](double h) { return detail::tilted_power(h, p); });
            } else if constexpr (std::is_same_v<K, divergence_kind::KL>) {
                return detail::csiszar_sum(rho, pi, [](double h) { return detail::tilted_xlogx(h); });
            } else {
                return f_divergence(rho, pi, divergence_kind::PhiP{2.0});
            }
        },
        kind);
}

// D_{phi_p - 1}(rho, pi) + 1, the quantity entering the bound.
inline double phi_divergence_plus_one(const DiscreteDistribution& rho, const DiscreteDistribution& pi, double p) {
    return f_divergence(rho, pi, divergence_kind::PhiP{p}) + 1.0;
}

// Closed form against the uniform prior on K atoms: K^{p-1} sum_j rho_j^p.
inline double divergence_plus_one_uniform(const DiscreteDistribution& rho, std::size_t k, double p) {
    detail::require(p > 1.0, "divergence_plus_one_uniform requires p > 1");
    detail::require(rho.size() == k, "divergence_plus_one_uniform: rho must live on the K atoms");
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j)
        if (rho[j] > 0.0) s += std::pow(rho[j], p);
    return std::pow(static_cast<double>(k), p - 1.0) * s;
}

} // namespace hostile_pac
