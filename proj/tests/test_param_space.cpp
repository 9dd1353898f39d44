#include "hostile_pac/param_space.hpp"

#include <gtest/gtest.h>

using namespace hostile_pac;

TEST(UniformGrid, OneAxisThreePoints) {
    const Prior p = build_prior(prior_spec::UniformGrid{{-1.0}, {1.0}, 3}, 0);
    ASSERT_EQ(p.atoms.size(), 3u);
    EXPECT_DOUBLE_EQ(p.atoms[0][0], -1.0);
    EXPECT_DOUBLE_EQ(p.atoms[1][0], 0.0);
    EXPECT_DOUBLE_EQ(p.atoms[2][0], 1.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(p.weights[j], 1.0 / 3.0);
}

TEST(UniformGrid, LastCoordinateVariesFastest) {
    const Prior p = build_prior(prior_spec::UniformGrid{{0.0, 10.0}, {1.0, 11.0}, 2}, 0);
    ASSERT_EQ(p.atoms.size(), 4u);
    EXPECT_EQ(p.atoms.to_vectors(), (std::vector<std::vector<double>>{{0, 10}, {0, 11}, {1, 10}, {1, 11}}));
}

TEST(ExplicitPrior, ReturnedUnchanged) {
    const Prior p = build_prior(prior_spec::Explicit{{{1.0}, {2.0}}, {0.25, 0.75}}, 0);
    EXPECT_DOUBLE_EQ(p.weights[0], 0.25);
    EXPECT_DOUBLE_EQ(p.weights[1], 0.75);
    EXPECT_DOUBLE_EQ(p.atoms[1][0], 2.0);
}

TEST(ExplicitPrior, RejectsBadWeights) {
    EXPECT_THROW(build_prior(prior_spec::Explicit{{{1.0}, {2.0}}, {0.5, 0.6}}, 0), ConfigError);
    EXPECT_THROW(build_prior(prior_spec::Explicit{{{1.0}, {2.0}}, {1.5, -0.5}}, 0), ConfigError);
    EXPECT_THROW(build_prior(prior_spec::Explicit{{{1.0}, {2.0, 3.0}}, {0.5, 0.5}}, 0), ConfigError);
}

TEST(DiscreteDistribution, RenormalizesTinyDrift) {
    const DiscreteDistribution d({0.5, 0.5 + 1e-10});
    EXPECT_NEAR(d[0] + d[1], 1.0, 1e-15);
}

TEST(IidSamplePrior, DeterministicPerSeed) {
    const prior_spec::IidSample s{prior_spec::SampleLaw::Gaussian, 1.0, 3, 100, 7};
    const Prior a = build_prior(s, 0);
    const Prior b = build_prior(s, 12345);
    EXPECT_EQ(a.atoms.to_vectors(), b.atoms.to_vectors());
    prior_spec::IidSample other = s;
    other.seed = 8;
    EXPECT_NE(a.atoms.to_vectors(), build_prior(other, 0).atoms.to_vectors());
}

TEST(IidSamplePrior, UniformBoxStaysInside) {
    const Prior p = build_prior(prior_spec::IidSample{prior_spec::SampleLaw::UniformBox, 2.0, 2, 500, 3}, 0);
    for (std::size_t j = 0; j < p.atoms.size(); ++j)
        for (double c : p.atoms[j]) EXPECT_LE(std::abs(c), 2.0);
}

TEST(Expectation, HandArithmetic) {
    EXPECT_DOUBLE_EQ(expectation(DiscreteDistribution({0.25, 0.75}), std::vector<double>{4.0, 0.0}), 1.0);
}

TEST(Expectation, ConstantAndDirac) {
    const DiscreteDistribution d({0.1, 0.2, 0.7});
    EXPECT_NEAR(expectation(d, std::vector<double>(3, 2.5)), 2.5, 1e-15);
    EXPECT_DOUBLE_EQ(expectation(DiscreteDistribution::dirac(3, 2), std::vector<double>{1, 2, 3}), 3.0);
}

TEST(Expectation, ZeroWeightIgnoresInfinity) {
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_DOUBLE_EQ(expectation(DiscreteDistribution::dirac(2, 0), std::vector<double>{1.0, inf}), 1.0);
}

TEST(PriorMomentTau, Examples) {
    EXPECT_DOUBLE_EQ(prior_moment_tau(AtomSet({{1.0, 1.0}}), DiscreteDistribution::dirac(1, 0)), 4.0);
    EXPECT_DOUBLE_EQ(prior_moment_tau(AtomSet({{0.0, 0.0}}), DiscreteDistribution::dirac(1, 0)), 0.0);
    EXPECT_DOUBLE_EQ(prior_moment_tau(AtomSet({{-1.0}, {1.0}}), DiscreteDistribution::uniform(2)), 1.0);
}
