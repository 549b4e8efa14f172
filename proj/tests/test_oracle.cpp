#include <gtest/gtest.h>

#include <cmath>

#include "permuton/oracle.hpp"
#include "permuton/starmodel.hpp"

using namespace permuton;

TEST(JointStarCounts, SmallCases) {
    const StarCountTable two = joint_star_counts(2);
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two.at(StarCounts{0, 0, 0, 0}), 1u);
    EXPECT_EQ(two.at(StarCounts{1, 0, 0, 0}), 1u);
    const StarCountTable three = joint_star_counts(3);
    std::uint64_t total = 0;
    for (const auto& [c, k] : three) {
        total += k;
    }
    EXPECT_EQ(total, 6u);
    EXPECT_EQ(marginal(three, 0), (std::vector<std::uint64_t>{1, 2, 2, 1}));
    // each 3-permutation has exactly one triple, split 2/2/2 by its last value
    EXPECT_EQ(marginal(three, 1), (std::vector<std::uint64_t>{4, 2}));
    EXPECT_EQ(marginal(three, 3), (std::vector<std::uint64_t>{4, 2}));
}

TEST(JointStarCounts, AppendingRuleMatchesEnumeration) {
    for (std::size_t n = 1; n <= 8; ++n) {
        EXPECT_EQ(joint_star_counts(n), joint_star_counts_by_appending(n)) << n;
    }
    EXPECT_THROW(joint_star_counts(9), ValidationError);
    EXPECT_THROW(joint_star_counts(0), ValidationError);
}

TEST(JointStarCounts, PerPermutationStatistic) {
    // 2 4 1 3: triples 241 -> **1, 243 -> **2, 213 -> **3, 413 -> **2
    EXPECT_EQ(star_counts({1, 3, 0, 2}), (StarCounts{3, 1, 2, 1}));
    EXPECT_EQ(star_counts({0, 1, 2, 3, 4}), (StarCounts{10, 10, 0, 0}));
    EXPECT_EQ(star_counts({4, 3, 2, 1, 0}), (StarCounts{0, 0, 0, 10}));
}

TEST(JointStarCounts, MarginalsReproduceMahonian) {
    for (std::size_t n = 1; n <= 8; ++n) {
        const std::vector<std::uint64_t> m = marginal(joint_star_counts(n), 0);
        const std::vector<double> logc = mahonian_log_gf(n);
        ASSERT_EQ(m.size(), logc.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            EXPECT_EQ(static_cast<std::uint64_t>(std::llround(std::exp(logc[i]))), m[i]) << n << " " << i;
        }
    }
}

TEST(LdpEstimate, FrozenSequenceAndBounds) {
    const double s = star12_entropy(star12_r_from_rho(0.4));
    EXPECT_NEAR(s, -0.04575, 1e-5);
    const double e50 = ldp_estimate(50, 0.4, 0.05);
    const double e100 = ldp_estimate(100, 0.4, 0.05);
    const double e200 = ldp_estimate(200, 0.4, 0.05);
    EXPECT_NEAR(e50, -0.037457, 1e-6);
    EXPECT_NEAR(e100, -0.026541, 1e-6);
    EXPECT_NEAR(e200, -0.020164, 1e-6);
    EXPECT_LT(e50, e100);
    EXPECT_LT(e100, e200);
    EXPECT_LE(std::abs(e200 - s), 0.05);
    // the window limit is the best rate inside it, at its edge nearest 1/2
    EXPECT_LE(e200, 0.0);
    EXPECT_GE(e200, s);
}

TEST(LdpEstimate, HalfTendsToZero) {
    // the full window counts every permutation
    EXPECT_NEAR(ldp_estimate(200, 0.5, 0.6), 0.0, 1e-12);
    double prev = -1.0;
    for (std::size_t n : {20u, 50u, 100u, 200u}) {
        const double e = ldp_estimate(n, 0.5, 0.02);
        EXPECT_LT(e, 0.0);
        EXPECT_GT(e, prev) << n;
        prev = e;
    }
}

TEST(LdpEstimate, SmallRho) {
    const double e = ldp_estimate(200, 0.1, 0.02);
    EXPECT_LT(e, -0.3);
    const double lo = star12_entropy(star12_r_from_rho(0.08));
    EXPECT_GT(e, lo - 0.05);
}

TEST(LdpEstimate, MonotoneInEps) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double eps : {0.005, 0.01, 0.02, 0.05, 0.1, 0.3}) {
        const double e = ldp_estimate(120, 0.3, eps);
        EXPECT_GE(e, prev) << eps;
        prev = e;
    }
}

TEST(LdpEstimate, Validation) {
    EXPECT_THROW(ldp_estimate(501, 0.4, 0.05), ValidationError);
    EXPECT_THROW(ldp_estimate(50, 0.0, 0.05), ValidationError);
    EXPECT_THROW(ldp_estimate(50, 0.4, 0.0), ValidationError);
    // C(4,2) = 6: counts sit at multiples of 1/6, none within 0.01 of 0.25
    EXPECT_THROW(ldp_estimate(4, 0.25, 0.01), ValidationError);
}
