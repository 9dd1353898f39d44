#include "hostile_pac/risk.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace hostile_pac;

namespace {
Dataset one_row(std::vector<double> x, double y) {
    Dataset d(x.size());
    d.push_back(x, y);
    return d;
}
} // namespace

TEST(LossTable, SquaredPerfectPrediction) {
    const LossTable t = compute_loss_table(one_row({1.0}, 2.0), AtomSet({{2.0}}), loss_kind::Squared{});
    EXPECT_DOUBLE_EQ(t(0, 0), 0.0);
}

TEST(LossTable, SquaredAndAbsolute) {
    const Dataset d = one_row({1.0, 1.0}, 0.0);
    const AtomSet atoms({{1.0, 2.0}});
    EXPECT_DOUBLE_EQ(compute_loss_table(d, atoms, loss_kind::Squared{})(0, 0), 9.0);
    EXPECT_DOUBLE_EQ(compute_loss_table(d, atoms, loss_kind::Absolute{})(0, 0), 3.0);
}

TEST(LossTable, ZeroOneThreshold) {
    EXPECT_DOUBLE_EQ(evaluate_loss(loss_kind::ZeroOne{0.0}, 0.3, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(evaluate_loss(loss_kind::ZeroOne{0.0}, -0.3, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(evaluate_loss(loss_kind::ZeroOne{0.0}, -0.3, -1.0), 0.0);
    EXPECT_DOUBLE_EQ(evaluate_loss(loss_kind::ZeroOne{0.5}, 0.3, 1.0), 1.0);
}

TEST(LossTable, DimensionMismatchRejected) {
    EXPECT_THROW(compute_loss_table(one_row({1.0}, 0.0), AtomSet({{1.0, 2.0}}), loss_kind::Squared{}), ConfigError);
}

TEST(EmpiricalRisk, ColumnMeans) {
    EXPECT_EQ(empirical_risk(LossTable(3, 1, {0.0, 1.0, 2.0})), std::vector<double>{1.0});
    EXPECT_EQ(empirical_risk(LossTable(2, 2, {1.5, 0.0, 1.5, 0.0})), (std::vector<double>{1.5, 0.0}));
    EXPECT_EQ(empirical_risk(LossTable(1, 3, {4.0, 5.0, 6.0})), (std::vector<double>{4.0, 5.0, 6.0}));
}

TEST(LossTable, RejectsNegativeOrNonFinite) {
    EXPECT_THROW(LossTable(1, 1, {-1.0}), ConfigError);
    EXPECT_THROW(LossTable(1, 1, {std::nan("")}), ConfigError);
    EXPECT_THROW(LossTable(2, 1, {1.0}), ConfigError);
}

TEST(DatasetIo, RoundTrip) {
    Dataset d(2);
    d.push_back(std::vector<double>{0.1, -2.0}, 3.5);
    d.push_back(std::vector<double>{1e-17, 4.0}, -0.25);
    std::stringstream ss;
    write_dataset(ss, d);
    const Dataset back = read_dataset(ss);
    ASSERT_EQ(back.size(), 2u);
    ASSERT_EQ(back.dimension(), 2u);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(back.y(i), d.y(i));
        for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(back.x(i)[c], d.x(i)[c]);
    }
}

TEST(DatasetIo, RejectsRaggedRows) {
    std::stringstream ss("1,2,3\n1,2\n");
    EXPECT_THROW(read_dataset(ss), ConfigError);
}
