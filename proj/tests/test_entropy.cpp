#include <gtest/gtest.h>

#include <cmath>

#include "permuton/entropy.hpp"
#include "permuton/starmodel.hpp"
#include "test_util.hpp"

using namespace permuton;

TEST(EntropyGrid, UniformIsZero) {
    for (std::size_t m : {1u, 4u, 17u}) {
        EXPECT_NEAR(entropy_grid(GridPermuton::uniform(m)), 0.0, 1e-14);
    }
}

TEST(EntropyGrid, PermutationGridIsMinusLogN) {
    for (std::size_t n : {2u, 7u, 16u, 50u}) {
        const Permutation pi = sample_permutation(GridPermuton::uniform(1), n, n);
        EXPECT_DOUBLE_EQ(entropy_grid(grid_from_permutation(pi, n)), -std::log(static_cast<double>(n)));
    }
    EXPECT_NEAR(entropy_grid(GridPermuton::identity(16)), -2.7725887222397811, 1e-15);
}

TEST(EntropyGrid, NonPositiveAndCoarseningIncreases) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GridPermuton g = test_util::random_grid(12, seed);
        const double h = entropy_grid(g);
        EXPECT_LT(h, 0.0);
        EXPECT_GE(entropy_grid(coarsen(g, 6)), h - 1e-15);
        EXPECT_GE(entropy_grid(coarsen(g, 3)), entropy_grid(coarsen(g, 6)) - 1e-15);
    }
}

TEST(RiemannRefinement, Sequences) {
    for (const auto& [m, h] : riemann_refinement(GridPermuton::uniform(16), {1, 2, 4, 8, 16})) {
        EXPECT_NEAR(h, 0.0, 1e-14) << m;
    }
    const auto id = riemann_refinement(GridPermuton::identity(64), {2, 4, 8, 16, 32, 64});
    for (const auto& [m, h] : id) {
        EXPECT_NEAR(h, -std::log(static_cast<double>(m)), 1e-14);
    }
    const auto s = riemann_refinement(star12_grid(-3.0, 64), {8, 16, 32, 64});
    for (std::size_t k = 1; k < s.size(); ++k) {
        EXPECT_LT(s[k].second, s[k - 1].second);
    }
    EXPECT_GT(s.back().second, star12_entropy(-3.0));
    EXPECT_NEAR(s.back().second, star12_entropy(-3.0), 2e-3);
    EXPECT_THROW(riemann_refinement(GridPermuton::uniform(8), {3}), ValidationError);
}

TEST(HeatFlow, ZeroTimeIsIdentity) {
    const GridPermuton g = test_util::random_grid(10, 1);
    const HeatFlowResult r = heat_flow(g, {0.0});
    EXPECT_EQ(r.clipped, 0u);
    EXPECT_LE(rect_distance(r.grid, g), 1e-10);
}

TEST(HeatFlow, LongTimeIsUniform) {
    const HeatFlowResult r = heat_flow(GridPermuton::identity(12), {50.0});
    EXPECT_LE(rect_distance(r.grid, GridPermuton::uniform(12)), 1e-12);
}

TEST(HeatFlow, IdentityGridSmooths) {
    const GridPermuton id = GridPermuton::identity(32);
    const HeatFlowResult r = heat_flow(id, {0.05});
    EXPECT_LE(r.grid.max_marginal_defect(), 1e-12);
    EXPECT_GT(entropy_grid(r.grid), -std::log(32.0));
}

TEST(HeatFlow, MarginalsAndEntropyMonotone) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GridPermuton g = test_util::random_grid(16, seed, 5.0);
        for (double t : {1e-3, 1e-2, 0.1}) {
            const HeatFlowResult r = heat_flow(g, {t});
            EXPECT_LE(r.grid.max_marginal_defect(), 1e-12);
            EXPECT_GE(entropy_grid(r.grid), entropy_grid(g) - 1e-12);
        }
    }
}

TEST(HeatFlow, Semigroup) {
    const GridPermuton g = test_util::random_grid(16, 3);
    const HeatFlowResult a = heat_flow(g, {0.02});
    const HeatFlowResult ab = heat_flow(a.grid, {0.03});
    const HeatFlowResult direct = heat_flow(g, {0.05});
    ASSERT_EQ(a.clipped + ab.clipped + direct.clipped, 0u);
    for (std::size_t c = 0; c < 256; ++c) {
        EXPECT_NEAR(ab.grid.masses()[c], direct.grid.masses()[c], 1e-8);
    }
}

TEST(HeatFlow, ModeCutoff) {
    // keeping only mode 0 in x flattens every row band
    const HeatFlowResult r = heat_flow(test_util::random_grid(8, 4), {0.0, 1, 0});
    for (std::size_t i = 1; i < 8; ++i) {
        for (std::size_t j = 0; j < 8; ++j) {
            EXPECT_NEAR(r.grid(i, j), r.grid(0, j), 1e-14);
        }
    }
    EXPECT_THROW(heat_flow(GridPermuton::uniform(4), {-1.0}), ValidationError);
}
