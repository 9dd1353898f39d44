#include "hostile_pac/aggregation.hpp"
#include "hostile_pac/rng.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hostile_pac;
using DD = DiscreteDistribution;

namespace {
MomentBound raw(double m, double q = 2.0) { return {m, q, 1, RegimeTag::IidVariance}; }
const std::vector<double> kTwo{0.0, 1.0};
const DD kHalf({0.5, 0.5});
} // namespace

TEST(BoundConfig, RejectsMismatchedQ) {
    EXPECT_THROW(make_bound_config(2.0, 0.1, raw(0.1, 3.0)), ConfigError);
    EXPECT_THROW(make_bound_config(1.0, 0.1, raw(0.1)), ConfigError);
    EXPECT_THROW(make_bound_config(2.0, 1.0, raw(0.1)), ConfigError);
    EXPECT_NO_THROW(make_bound_config(3.0, 0.1, raw(0.1, 1.5)));
}

TEST(PacMargin, Examples) {
    EXPECT_NEAR(pac_margin(make_bound_config(2.0, 0.1, raw(0.004)), 10.0), 0.632456, 1e-6);
    EXPECT_NEAR(pac_margin(make_bound_config(2.0, 0.1, raw(0.04)), 1.0), std::sqrt(0.4), 1e-15);
    EXPECT_TRUE(std::isinf(pac_margin(make_bound_config(2.0, 0.1, raw(0.04)), kInfinity)));
}

TEST(EvaluateBound, PriorWithConstantRisk) {
    const BoundReport r = evaluate_bound(DD::uniform(4), DD::uniform(4), std::vector<double>(4, 0.5),
                                         make_bound_config(2.0, 0.1, raw(0.04)));
    EXPECT_NEAR(r.upper, 0.5 + std::sqrt(0.4), 1e-14);
    EXPECT_NEAR(r.lower, 0.5 - std::sqrt(0.4), 1e-14);
}

TEST(EvaluateBound, DiracOnPriorNullAtomIsVacuous) {
    const BoundReport r = evaluate_bound(DD::dirac(2, 1), DD::dirac(2, 0), kTwo, make_bound_config(2.0, 0.1, raw(0.04)));
    EXPECT_TRUE(std::isinf(r.upper));
    EXPECT_TRUE(std::isinf(r.margin));
}

TEST(EvaluateBound, FiniteClassDiracErmTwoRoutes) {
    std::vector<double> rn(10);
    for (std::size_t j = 0; j < 10; ++j) rn[j] = 0.1 * static_cast<double>(10 - j);
    const BoundConfig cfg = make_bound_config(2.0, 0.1, raw(0.001));
    const BoundReport r = evaluate_bound(DD::dirac(10, erm_index(rn)), DD::uniform(10), rn, cfg);
    const double finite_class = std::pow(10.0, 1.0 - 1.0 / cfg.p) * std::pow(cfg.moment_over_delta(), 1.0 / cfg.q);
    EXPECT_NEAR(r.margin, 0.316228, 1e-6);
    EXPECT_NEAR(r.margin, finite_class, 1e-12);
}

TEST(SolveRbar, ClosedFormTwoAtom) {
    EXPECT_NEAR(solve_rbar(kTwo, kHalf, 2.0, 0.0125, 0.1), 0.5, 1e-10);
    EXPECT_NEAR(solve_rbar(kTwo, kHalf, 2.0, 0.0625, 0.1), (1.0 + std::sqrt(1.5)) / 2.0, 1e-10);
    EXPECT_NEAR(solve_rbar(kTwo, kHalf, 2.0, 0.0625, 0.1), 1.112372, 1e-6);
}

TEST(SolveRbar, SingleAtom) {
    for (double q : {1.2, 2.0, 5.0})
        EXPECT_NEAR(solve_rbar(std::vector<double>{0.7}, DD::dirac(1, 0), q, 0.05, 0.5), 0.7 + std::pow(0.1, 1.0 / q), 1e-12);
}

TEST(SolveRbar, IgnoresPriorNullAtoms) {
    const DD pi({0.5, 0.0, 0.5});
    const std::vector<double> rn{0.0, -100.0, 1.0};
    EXPECT_NEAR(solve_rbar(rn, pi, 2.0, 0.0125, 0.1), 0.5, 1e-10);
}

TEST(SolveRbar, InvalidInputs) {
    EXPECT_THROW(solve_rbar(kTwo, kHalf, 1.0, 0.1, 0.1), ConfigError);
    EXPECT_THROW(solve_rbar(kTwo, kHalf, 2.0, 0.0, 0.1), ConfigError);
    EXPECT_THROW(solve_rbar(kTwo, DD::uniform(3), 2.0, 0.1, 0.1), ConfigError);
}

TEST(SolveRbar, LargeOffsetKeepsRelativePrecision) {
    const std::vector<double> rn{1e6, 1e6 + 1.0};
    const RbarSolution s = solve_rbar_detailed(rn, kHalf, 2.0, 0.0125, 0.1);
    EXPECT_NEAR(s.value - 1e6, 0.5, 1e-9);
    EXPECT_LE(s.relative_residual, 1e-10);
}

TEST(RhoHat, Examples) {
    const DD a = rho_hat(kTwo, kHalf, 2.0, 0.5);
    EXPECT_DOUBLE_EQ(a[0], 1.0);
    EXPECT_DOUBLE_EQ(a[1], 0.0);
    const DD b = rho_hat(kTwo, kHalf, 2.0, (1.0 + std::sqrt(1.5)) / 2.0);
    EXPECT_NEAR(b[0], 0.908248, 1e-6);
    EXPECT_NEAR(b[1], 0.091752, 1e-6);
    const DD pi({0.2, 0.3, 0.5});
    const DD c = rho_hat(std::vector<double>(3, 1.0), pi, 3.0, 2.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(c[j], pi[j], 1e-15);
}

TEST(MinimizedObjective, TwoAtomExamples) {
    const BoundConfig cfg = make_bound_config(2.0, 0.1, raw(0.0125));
    const MinimizedObjective m = minimized_objective_identity(kTwo, kHalf, cfg);
    EXPECT_NEAR(m.rbar, 0.5, 1e-10);
    EXPECT_NEAR(m.objective, 0.5, 1e-10);
    EXPECT_NEAR(bound_objective(kHalf, kHalf, kTwo, cfg), 0.5 + std::sqrt(0.125), 1e-12);
    EXPECT_NEAR(bound_objective(kHalf, kHalf, kTwo, cfg), 0.853553, 1e-6);
}

TEST(MinimizedObjective, ConstantRisk) {
    const BoundConfig cfg = make_bound_config(1.5, 0.2, raw(0.01, 3.0));
    const MinimizedObjective m = minimized_objective_identity(std::vector<double>(5, 0.3), DD::uniform(5), cfg);
    EXPECT_NEAR(m.objective, 0.3 + std::cbrt(0.05), 1e-10);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(m.rho_hat[j], 0.2, 1e-14);
}

TEST(MinimizedObjective, BeatsRandomProbes) {
    Rng rng = make_rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> e(1.0);
    for (int inst = 0; inst < 20; ++inst) {
        const std::size_t k = 3 + inst;
        std::vector<double> rn(k), w(k);
        for (std::size_t j = 0; j < k; ++j) {
            rn[j] = u(rng);
            w[j] = e(rng);
        }
        const DD pi = DD::from_masses(w);
        const double p = 1.2 + 2.0 * u(rng);
        const BoundConfig cfg = make_bound_config(p, 0.1, raw(0.01 * u(rng) + 1e-4, p / (p - 1.0)));
        const MinimizedObjective m = minimized_objective_identity(rn, pi, cfg);
        EXPECT_NEAR(m.objective, m.rbar, 1e-8 * m.rbar);
        for (int t = 0; t < 100; ++t) {
            std::vector<double> r(k);
            for (auto& x : r) x = e(rng);
            EXPECT_LE(m.objective, bound_objective(DD::from_masses(r), pi, rn, cfg) * (1 + 1e-12));
        }
    }
}

TEST(CatoniPiGamma, Examples) {
    const std::vector<double> rn{0.0, 0.1, 1.0};
    const DD a = catoni_pi_gamma(rn, DD::uniform(3), 0.2);
    EXPECT_DOUBLE_EQ(a[0], 0.5);
    EXPECT_DOUBLE_EQ(a[1], 0.5);
    EXPECT_DOUBLE_EQ(a[2], 0.0);
    const DD b = catoni_pi_gamma(std::vector<double>{0.2, 0.0, 0.0}, DD::uniform(3), 0.0);
    EXPECT_DOUBLE_EQ(b[0], 0.0);
    EXPECT_DOUBLE_EQ(b[1], 0.5);
    const DD pi({0.1, 0.2, 0.7});
    const DD c = catoni_pi_gamma(rn, pi, 5.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(c[j], pi[j]);
}

TEST(OptimalGamma, Examples) {
    EXPECT_NEAR(optimal_gamma(2.0, 2.0, 0.001, 0.1), 0.1, 1e-14);
    EXPECT_NEAR(optimal_gamma(2.0, 2.0, 0.1, 0.1), 1.0, 1e-14);
    EXPECT_NEAR(optimal_gamma(1.0, 2.0, 0.004, 0.1), 0.073681, 1e-6);
}

TEST(ErmIndex, Examples) {
    EXPECT_EQ(erm_index(std::vector<double>{0.3, 0.1, 0.1}), 1u);
    EXPECT_EQ(erm_index(std::vector<double>{5.0}), 0u);
    EXPECT_EQ(erm_index(std::vector<double>{4, 3, 2, 1}), 3u);
}

TEST(VerifyComplexity, LinearValues) {
    std::vector<double> v(100);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = static_cast<double>(j) / 100.0;
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const ComplexityEstimate e = verify_complexity(v, DD::uniform(100), grid);
    EXPECT_TRUE(e.satisfied);
    EXPECT_LE(e.d, 1.0);
    EXPECT_GT(e.d, 0.95);
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_GE(sublevel_mass(v, DD::uniform(100), grid[i]), std::pow(grid[i], e.d));
}

TEST(VerifyComplexity, ConstantValues) {
    const ComplexityEstimate e = verify_complexity(std::vector<double>(5, 1.0), DD::uniform(5), std::vector<double>{0.1, 0.5});
    EXPECT_TRUE(e.satisfied);
    EXPECT_DOUBLE_EQ(e.d, kComplexityResolution);
    EXPECT_DOUBLE_EQ(e.d_largest, kComplexityCap);
}

TEST(VerifyComplexity, TwoAtomsThreshold) {
    const ComplexityEstimate e = verify_complexity(kTwo, kHalf, std::vector<double>{0.5});
    EXPECT_TRUE(e.satisfied);
    EXPECT_NEAR(e.d, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(e.d_largest, kComplexityCap);
}

TEST(VerifyComplexity, UnsatisfiableBeyondCap) {
    std::vector<double> v(1000, 1.0);
    v[0] = 0.0;
    const ComplexityEstimate e = verify_complexity(v, DD::uniform(1000), std::vector<double>{0.9});
    EXPECT_FALSE(e.satisfied);
}

TEST(VerifyComplexity, GridOutsideUnitIntervalRejected) {
    EXPECT_THROW(verify_complexity(kTwo, kHalf, std::vector<double>{1.5}), ConfigError);
}

TEST(OracleBounds, Examples) {
    EXPECT_NEAR(oracle_bound_empirical(0.2, 1e-5, 0.1, 2.0, 2.0), 0.4, 1e-14);
    EXPECT_NEAR(oracle_bound_empirical(0.3, 0.5, 0.5, 2.0, 3.0), 2.3, 1e-14);
    EXPECT_NEAR(oracle_bound_empirical(0.0, 0.04, 0.1, 2.0, 1e-9), 2.0 * std::sqrt(0.4), 1e-8);
    EXPECT_NEAR(oracle_bound_population(0.0, 0.1, 0.1, 2.0, 2.0), 1.414214, 1e-6);
    EXPECT_NEAR(oracle_bound_population(0.0, 0.04, 0.1, 2.0, 0.0), 2.0 * std::sqrt(0.4), 1e-14);
    EXPECT_NEAR(oracle_bound_population(0.1, 1e-5, 0.1, 2.0, 2.0), 0.241421, 1e-6);
}
