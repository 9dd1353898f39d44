#pragma once

// Closed-form checks run by `hostile_pac selftest`.

#include "hostile_pac/aggregation.hpp"
#include "hostile_pac/datagen.hpp"
#include "hostile_pac/divergence.hpp"
#include "hostile_pac/moments.hpp"
#include "hostile_pac/param_space.hpp"
#include "hostile_pac/risk.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace hostile_pac {

struct SelftestCase {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

namespace detail {

inline MomentBound raw_moment(double m, double q) { return {m, q, 1, RegimeTag::IidVariance}; }

} // namespace detail

inline std::vector<SelftestCase> run_selftest() {
    std::vector<SelftestCase> out;
    auto check = [&](std::string name, const std::function<double()>& f, double expected, double tol = 1e-9) {
        SelftestCase c{std::move(name), 0.0, expected, tol, false};
        try {
            c.value = f();
            c.passed = std::isinf(expected) ? c.value == expected : std::abs(c.value - expected) <= tol;
        } catch (const std::exception&) {
            c.value = std::nan("");
        }
        out.push_back(std::move(c));
    };
    auto throws = [&](std::string name, const std::function<void()>& f) {
        SelftestCase c{std::move(name), 0.0, 1.0, 0.0, false};
        try {
            f();
        } catch (const std::exception&) {
            c.value = 1.0;
            c.passed = true;
        }
        out.push_back(std::move(c));
    };
    using DD = DiscreteDistribution;
    const DD half{{0.5, 0.5}};
    const DD quarter{{0.25, 0.75}};
    const std::vector<double> two{0.0, 1.0};

    check("expectation", [&] { return expectation(quarter, std::vector<double>{4.0, 0.0}); }, 1.0);
    check("prior_moment_tau.single_atom", [] {
        return prior_moment_tau(AtomSet({{1.0, 1.0}}), DD::dirac(1, 0));
    }, 4.0);
    check("prior_moment_tau.symmetric", [] { return prior_moment_tau(AtomSet({{-1.0}, {1.0}}), DD::uniform(2)); }, 1.0);

    check("loss.squared", [] { return evaluate_loss(loss_kind::Squared{}, 3.0, 0.0); }, 9.0);
    check("loss.absolute", [] { return evaluate_loss(loss_kind::Absolute{}, 3.0, 0.0); }, 3.0);
    check("empirical_risk.mean", [] { return empirical_risk(LossTable(3, 1, {0.0, 1.0, 2.0}))[0]; }, 1.0);

    check("divergence.chi_square", [&] { return f_divergence(half, quarter, divergence_kind::ChiSquare{}); }, 1.0 / 3.0);
    check("divergence.kl", [&] { return f_divergence(half, quarter, divergence_kind::KL{}); }, 0.5 * std::log(4.0 / 3.0));
    check("divergence.phi2_dirac_k10", [] { return phi_divergence_plus_one(DD::dirac(10, 3), DD::uniform(10), 2.0); }, 10.0);
    check("divergence.uniform_half", [] { return divergence_plus_one_uniform(DD{{0.5, 0.5, 0.0, 0.0}}, 4, 2.0); }, 2.0);
    check("divergence.self", [&] { return f_divergence(quarter, quarter, divergence_kind::PhiP{3.0}); }, 0.0);

    check("moment.variance_q2", [] { return moment_iid_variance(4.0, 100, 2.0).value; }, 0.04);
    check("moment.variance_q1.5", [] { return moment_iid_variance(4.0, 100, 1.5).value; }, std::pow(0.04, 0.75));
    check("moment.subgaussian_q2", [] { return moment_subgaussian(1.0, 100, 2.0).value; }, 0.04);
    check("moment.subgaussian_q4", [] { return moment_subgaussian(1.0, 100, 4.0).value; }, 0.0032);
    check("moment.mixing_bounded", [] { return moment_mixing_bounded(2.0, 100).value; }, 0.02);
    check("moment.mixing_unbounded", [] {
        return moment_mixing_unbounded({3.0, 3.0, 1.0, 1.0, 8.0}, 100).value;
    }, 0.08);
    check("moment.mixing_unbounded_bare", [] {
        return moment_mixing_unbounded({3.0, 3.0, 2.0, 3.0, 1.0}, 100).value;
    }, 0.06);
    check("geometric_alpha_sum", [] { return geometric_alpha_sum(1.0, 1.0, 1.0); }, 2.0 / (1.0 - std::exp(-1.0)));
    check("geometric_alpha_sum.power3", [] { return geometric_alpha_sum(1.0, 3.0, 3.0); }, 2.0 / (1.0 - std::exp(-1.0)));
    check("kappa_quadratic", [] { return kappa_quadratic(9.0, 2.0, 3.0); }, 120.0);
    check("kappa_quadratic.t5", [] {
        return kappa_quadratic(noise_moment(noise_law::StudentT{5.0, 1.0}, 4), 1.0, 3.0);
    }, 224.0);
    check("optimal_q_finite", [] { return optimal_q_finite(10, 0.05).q; }, 2.0 * std::log(400.0));
    check("optimized_finite_bound_term", [] { return optimized_finite_bound_term(1.0, 100, 10, 0.05); },
          std::sqrt(2.0 * std::numbers::e * std::log(400.0) / 100.0));

    check("pac_margin.dirac", [] {
        return pac_margin(make_bound_config(2.0, 0.1, detail::raw_moment(0.004, 2.0)), 10.0);
    }, std::sqrt(0.4));
    check("pac_margin.infinite", [] {
        return pac_margin(make_bound_config(2.0, 0.1, detail::raw_moment(0.04, 2.0)), kInfinity);
    }, kInfinity);
    check("evaluate_bound.prior", [] {
        const auto cfg = make_bound_config(2.0, 0.1, detail::raw_moment(0.04, 2.0));
        return evaluate_bound(DD::uniform(3), DD::uniform(3), std::vector<double>(3, 0.5), cfg).upper;
    }, 0.5 + std::sqrt(0.4));
    check("solve_rbar.interior", [&] { return solve_rbar(two, half, 2.0, 0.0125, 0.1); }, 0.5, 1e-10);
    check("solve_rbar.both_active", [&] { return solve_rbar(two, half, 2.0, 0.0625, 0.1); }, (1.0 + std::sqrt(1.5)) / 2.0,
          1e-10);
    check("solve_rbar.single_atom", [] { return solve_rbar(std::vector<double>{0.3}, DD::dirac(1, 0), 3.0, 0.08, 0.1); },
          0.3 + std::cbrt(0.8), 1e-10);
    check("rho_hat.two_atom", [&] { return rho_hat(two, half, 2.0, (1.0 + std::sqrt(1.5)) / 2.0)[0]; },
          (1.0 + std::sqrt(1.5)) / (2.0 * std::sqrt(1.5)), 1e-12);
    check("minimized_objective", [&] {
        return minimized_objective_identity(two, half, make_bound_config(2.0, 0.1, detail::raw_moment(0.0125, 2.0))).objective;
    }, 0.5, 1e-10);
    check("catoni_pi_gamma", [] {
        return catoni_pi_gamma(std::vector<double>{0.0, 0.1, 1.0}, DD::uniform(3), 0.2)[0];
    }, 0.5);
    check("optimal_gamma", [] { return optimal_gamma(2.0, 2.0, 0.001, 0.1); }, 0.1);
    check("optimal_gamma.d1", [] { return optimal_gamma(1.0, 2.0, 0.004, 0.1); }, std::pow(0.02, 2.0 / 3.0));
    check("erm_index.tie", [] { return static_cast<double>(erm_index(std::vector<double>{0.3, 0.1, 0.1})); }, 1.0);
    check("verify_complexity.linear", [] {
        std::vector<double> v(100);
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = static_cast<double>(j) / 100.0;
        const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
        return verify_complexity(v, DD::uniform(100), grid).d;
    }, 1.0, 0.03);
    check("oracle_bound_empirical", [] { return oracle_bound_empirical(0.2, 1e-5, 0.1, 2.0, 2.0); }, 0.4);
    check("oracle_bound_population", [] { return oracle_bound_population(0.1, 1e-5, 0.1, 2.0, 2.0); }, 0.1 + std::sqrt(2.0) * 0.1);

    check("noise_moment.t5_fourth", [] { return noise_moment(noise_law::StudentT{5.0, 1.0}, 4); }, 25.0);
    check("noise_moment.gaussian_fourth", [] { return noise_moment(noise_law::Gaussian{2.0}, 4); }, 12.0);
    throws("noise_moment.t5_sixth_missing", [] { noise_moment(noise_law::StudentT{5.0, 1.0}, 6); });
    check("true_risk.iid_shift", [] {
        const GeneratorSpec g = generator::IidLinearRegression{{1.0, -1.0}, covariate_law::Gaussian{1.0}, noise_law::Gaussian{0.5}};
        return true_risk_closed_form(g, AtomSet({{2.0, -1.0}}))[0];
    }, 1.5);
    check("true_risk.ar1_optimal", [] {
        const GeneratorSpec g = generator::AR1{0.5, noise_law::Gaussian{1.0}, std::nullopt};
        return true_risk_closed_form(g, AtomSet({{0.0, 0.5}}))[0];
    }, 1.0);
    return out;
}

} // namespace hostile_pac
