#include "hostile_pac/divergence.hpp"
#include "hostile_pac/rng.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace hostile_pac;
using DD = DiscreteDistribution;

namespace {
DD random_dist(std::size_t k, Rng& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> m(k);
    for (auto& x : m) x = e(rng);
    return DD::from_masses(std::move(m));
}
} // namespace

TEST(FDivergence, SelfIsZero) {
    const DD d({0.1, 0.6, 0.3});
    EXPECT_EQ(f_divergence(d, d, divergence_kind::KL{}), 0.0);
    EXPECT_EQ(f_divergence(d, d, divergence_kind::ChiSquare{}), 0.0);
    EXPECT_EQ(f_divergence(d, d, divergence_kind::PhiP{3.5}), 0.0);
}

TEST(FDivergence, DiracAgainstUniform) {
    EXPECT_NEAR(f_divergence(DD::dirac(10, 4), DD::uniform(10), divergence_kind::PhiP{2.0}), 9.0, 1e-12);
    EXPECT_NEAR(phi_divergence_plus_one(DD::dirac(10, 0), DD::uniform(10), 2.0), 10.0, 1e-12);
}

TEST(FDivergence, HandComputedTwoAtom) {
    const DD rho({0.5, 0.5}), pi({0.25, 0.75});
    EXPECT_NEAR(f_divergence(rho, pi, divergence_kind::ChiSquare{}), 1.0 / 3.0, 1e-14);
    EXPECT_NEAR(f_divergence(rho, pi, divergence_kind::KL{}), 0.5 * std::log(4.0 / 3.0), 1e-14);
    EXPECT_NEAR(f_divergence(rho, pi, divergence_kind::KL{}), 0.1438410362258904, 1e-14);
}

TEST(FDivergence, InfiniteWhenNotAbsolutelyContinuous) {
    const DD pi({1.0, 0.0});
    const DD rho({0.5, 0.5});
    EXPECT_TRUE(std::isinf(f_divergence(rho, pi, divergence_kind::KL{})));
    EXPECT_TRUE(std::isinf(f_divergence(rho, pi, divergence_kind::PhiP{2.0})));
    EXPECT_TRUE(std::isinf(phi_divergence_plus_one(rho, pi, 1.5)));
}

TEST(FDivergence, MismatchedSizesRejected) {
    EXPECT_THROW(f_divergence(DD::uniform(2), DD::uniform(3), divergence_kind::KL{}), ConfigError);
}

TEST(FDivergence, PhiPRequiresPAboveOne) {
    EXPECT_THROW(f_divergence(DD::uniform(2), DD::uniform(2), divergence_kind::PhiP{1.0}), ConfigError);
}

TEST(FDivergence, NonNegativeAndChiSquareMatchesPhi2) {
    Rng rng = make_rng(11);
    for (int t = 0; t < 500; ++t) {
        const std::size_t k = 2 + t % 9;
        const DD rho = random_dist(k, rng), pi = random_dist(k, rng);
        EXPECT_GE(f_divergence(rho, pi, divergence_kind::KL{}), 0.0);
        EXPECT_GE(f_divergence(rho, pi, divergence_kind::PhiP{1.3}), 0.0);
        const double chi = f_divergence(rho, pi, divergence_kind::ChiSquare{});
        double direct = -1.0;
        for (std::size_t j = 0; j < k; ++j) direct += rho[j] * rho[j] / pi[j];
        EXPECT_NEAR(chi, direct, 1e-10 * std::max(1.0, direct));
    }
}

TEST(FDivergence, NearEqualInputsStayAccurate) {
    // rho = pi(1 + h) with tiny h: chi-square is sum pi h^2 exactly.
    const double h = 1e-7;
    const DD pi({0.5, 0.5});
    const DD rho({0.5 * (1 + h), 0.5 * (1 - h)});
    EXPECT_NEAR(f_divergence(rho, pi, divergence_kind::ChiSquare{}), h * h, 1e-22);
    EXPECT_NEAR(f_divergence(rho, pi, divergence_kind::KL{}), 0.5 * h * h, 1e-21);
}

TEST(UniformDivergence, Examples) {
    EXPECT_NEAR(divergence_plus_one_uniform(DD::dirac(10, 2), 10, 2.0), 10.0, 1e-12);
    EXPECT_NEAR(divergence_plus_one_uniform(DD::uniform(7), 7, 3.0), 1.0, 1e-12);
    EXPECT_NEAR(divergence_plus_one_uniform(DD({0.5, 0.5, 0.0, 0.0}), 4, 2.0), 2.0, 1e-12);
}

TEST(UniformDivergence, AgreesWithGeneralRoute) {
    Rng rng = make_rng(5);
    std::uniform_real_distribution<double> pu(1.05, 4.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t k = 1 + t % 20;
        const DD rho = random_dist(k, rng);
        const double p = pu(rng);
        const double a = divergence_plus_one_uniform(rho, k, p);
        EXPECT_NEAR(phi_divergence_plus_one(rho, DD::uniform(k), p), a, 1e-12 * a);
    }
}
