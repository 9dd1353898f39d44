#include "hostile_pac/datagen.hpp"
#include "hostile_pac/moments.hpp"
#include "hostile_pac/true_risk.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace hostile_pac;

TEST(MomentIidVariance, Examples) {
    EXPECT_NEAR(moment_iid_variance(4.0, 100, 2.0).value, 0.04, 1e-15);
    EXPECT_EQ(moment_iid_variance(0.0, 100, 2.0).value, 0.0);
    EXPECT_NEAR(moment_iid_variance(4.0, 100, 1.5).value, 0.0894427190999916, 1e-13);
}

TEST(MomentIidVariance, RejectsQAboveTwo) {
    EXPECT_THROW(moment_iid_variance(1.0, 10, 2.5), ConfigError);
    EXPECT_THROW(moment_iid_variance(1.0, 0, 2.0), ConfigError);
}

TEST(MomentSubGaussian, Examples) {
    EXPECT_NEAR(moment_subgaussian(1.0, 100, 2.0).value, 0.04, 1e-15);
    EXPECT_EQ(moment_subgaussian(0.0, 100, 3.0).value, 0.0);
    EXPECT_NEAR(moment_subgaussian(1.0, 100, 4.0).value, 0.0032, 1e-15);
    EXPECT_THROW(moment_subgaussian(1.0, 100, 1.5), ConfigError);
}

TEST(MomentMixingBounded, Examples) {
    EXPECT_NEAR(moment_mixing_bounded(2.0, 100).value, 0.02, 1e-15);
    EXPECT_EQ(moment_mixing_bounded(0.0, 100).value, 0.0);
    EXPECT_NEAR(moment_mixing_bounded(geometric_alpha_sum(1.0, 1.0), 100).value, 0.0316395, 1e-7);
}

TEST(MomentMixingUnbounded, Examples) {
    EXPECT_NEAR(moment_mixing_unbounded({3.0, 3.0, 1.0, 1.0, 8.0}, 100).value, 0.08, 1e-15);
    EXPECT_EQ(moment_mixing_unbounded({3.0, 3.0, 1.0, 0.0, 8.0}, 100).value, 0.0);
    EXPECT_NEAR(moment_mixing_unbounded({3.0, 3.0, 2.0, 3.0, 1.0}, 100).value, 0.06, 1e-15);
}

TEST(MomentMixingUnbounded, ExponentIdentityEnforced) {
    EXPECT_THROW(moment_mixing_unbounded({2.0, 3.0, 1.0, 1.0, 8.0}, 100), ConfigError);
    EXPECT_NO_THROW(moment_mixing_unbounded({2.0, 4.0, 1.0, 1.0, 8.0}, 100));
}

TEST(MomentBound, MixingNeedsQTwo) {
    EXPECT_THROW(moment_bound(regime::MixingBounded{1.0}, 10, 3.0), ConfigError);
    EXPECT_EQ(moment_bound(regime::MixingBounded{1.0}, 10, 2.0).tag, RegimeTag::MixingBounded);
}

TEST(GeometricAlphaSum, Examples) {
    const double base = 2.0 / (1.0 - std::exp(-1.0));
    EXPECT_NEAR(geometric_alpha_sum(1.0, 1.0, 1.0), 3.16395, 1e-5);
    EXPECT_NEAR(geometric_alpha_sum(1.0, 1.0, 1.0), base, 1e-14);
    EXPECT_EQ(geometric_alpha_sum(0.0, 1.0, 1.0), 0.0);
    EXPECT_NEAR(geometric_alpha_sum(1.0, 3.0, 3.0), base, 1e-14);
}

TEST(GeometricAlphaSum, DominatesTwoSidedSeries) {
    for (double c2 : {0.3, 0.7, 2.0}) {
        double direct = 0.0;
        for (int j = -2000; j <= 2000; ++j) direct += std::pow(2.0 * std::exp(-c2 * std::abs(j)), 1.0 / 3.0);
        EXPECT_GE(geometric_alpha_sum(2.0, c2, 3.0), direct);
    }
}

TEST(KappaQuadratic, Examples) {
    EXPECT_DOUBLE_EQ(kappa_quadratic(9.0, 2.0, 3.0), 120.0);
    EXPECT_DOUBLE_EQ(kappa_quadratic(0.0, 0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(kappa_quadratic(noise_moment(noise_law::StudentT{5.0, 1.0}, 4), 1.0, 3.0), 224.0);
}

TEST(OptimalQ, Examples) {
    EXPECT_NEAR(optimal_q_finite(10, 0.05).q, 11.982929094215963, 1e-12);
    EXPECT_FALSE(optimal_q_finite(10, 0.05).clamped);
    const OptimizedQ edge = optimal_q_finite(1, 2.0 / std::numbers::e);
    EXPECT_NEAR(edge.q, 2.0, 1e-12);
    EXPECT_TRUE(optimal_q_finite(1, 0.9).clamped);
    EXPECT_EQ(optimal_q_finite(1, 0.9).q, 2.0);
    EXPECT_NEAR(optimized_finite_bound_term(1.0, 100, 10, 0.05), 0.5707274166, 1e-9);
}

TEST(EmpiricalMomentEstimate, Examples) {
    const DiscreteDistribution pi = DiscreteDistribution::uniform(2);
    const std::vector<double> risk{0.5, 1.5};
    const std::vector<LossTable> same(3, LossTable(2, 2, {0.5, 1.5, 0.5, 1.5}));
    EXPECT_EQ(empirical_moment_estimate(std::span<const LossTable>(same), risk, pi, 2.0), 0.0);

    const std::vector<std::vector<double>> one{{0.6}};
    EXPECT_NEAR(empirical_moment_estimate(std::span<const std::vector<double>>(one), std::vector<double>{0.5},
                                          DiscreteDistribution::dirac(1, 0), 2.0),
                0.01, 1e-15);
    const std::vector<LossTable> twice(2, LossTable(1, 1, {0.6}));
    EXPECT_NEAR(empirical_moment_estimate(std::span<const LossTable>(twice), std::vector<double>{0.5},
                                          DiscreteDistribution::dirac(1, 0), 2.0),
                0.01, 1e-15);
}

TEST(EmpiricalMomentEstimate, BelowVarianceBoundForIidRegression) {
    const GeneratorSpec gen = generator::IidLinearRegression{{1.0, -0.5}, covariate_law::Gaussian{1.0}, noise_law::StudentT{5.0, 1.0}};
    const Prior prior = build_prior(prior_spec::IidSample{prior_spec::SampleLaw::Gaussian, 1.0, 2, 20, 3}, 0);
    const std::vector<double> risk = true_risk_closed_form(gen, prior.atoms);
    std::vector<std::vector<double>> rn;
    for (std::size_t r = 0; r < 500; ++r)
        rn.push_back(empirical_risk(compute_loss_table(generate(gen, 200, stream_seed(9, r, stream::data)), prior.atoms,
                                                       loss_kind::Squared{})));
    const double est = empirical_moment_estimate(std::span<const std::vector<double>>(rn), risk, prior.weights, 2.0);
    const AnalyticMoments m = analytic_moments(gen, 4);
    EXPECT_LE(est, moment_iid_variance(kappa_quadratic(m.ey4, prior_moment_tau(prior.atoms, prior.weights), m.ex4), 200, 2.0).value);
}
