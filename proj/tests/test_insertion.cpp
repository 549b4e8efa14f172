#include <gtest/gtest.h>

#include <cmath>

#include "permuton/entropy.hpp"
#include "permuton/insertion.hpp"
#include "permuton/patterns.hpp"

using namespace permuton;

TEST(InsertionFamily, ColumnsNormalized) {
    const InsertionFamily f = star12_insertion_family(-4.0, 64, 64);
    for (std::size_t c = 0; c < f.mt(); ++c) {
        double total = 0.0;
        for (std::size_t k = 0; k < f.rows(c); ++k) {
            total += f(c, k) * f.width(c);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
        EXPECT_GE(f.rows(c), 8u);
        EXPECT_NEAR(f.column_cdf(c, 1.0), 1.0, 1e-12);
    }
    EXPECT_THROW(InsertionFamily(1, 1, {std::vector<double>(8, 0.5)}), ValidationError);
}

TEST(InsertionFromPermuton, UniformIsFlat) {
    const InsertionFamily f = insertion_from_permuton(GridPermuton::uniform(16));
    for (std::size_t c = 0; c < f.mt(); ++c) {
        for (std::size_t k = 0; k < f.rows(c); ++k) {
            EXPECT_NEAR(f(c, k), 1.0 / f.x(c), 1e-12);
        }
    }
    EXPECT_NEAR(insertion_entropy(f), 0.0, 1e-12);
}

TEST(InsertionFromPermuton, IdentityRejected) {
    EXPECT_THROW(insertion_from_permuton(GridPermuton::identity(8)), ValidationError);
}

TEST(InsertionFromPermuton, Star12IsTruncatedExponential) {
    const double r = -3.0;
    const InsertionFamily f = insertion_from_permuton(star12_grid(r, 128));
    double worst = 0.0;
    for (std::size_t c = 8; c < f.mt(); c += 8) {
        const double x = f.x(c);
        for (std::size_t k = 0; k < f.rows(c); ++k) {
            const double y = (k + 0.5) * f.width(c);
            worst = std::max(worst, std::abs(f(c, k) / star12_insertion_density(r, x, y) - 1.0));
        }
    }
    EXPECT_LE(worst, 0.05);
}

TEST(PermutonFromInsertion, FlatFamilyGivesUniform) {
    const InsertionFamily f = InsertionFamily::from_function(64, 64, [](double x, double) { return 1.0 / x; });
    const InsertionFlowResult r = permuton_from_insertion(f, 32);
    EXPECT_LE(rect_distance(r.grid, GridPermuton::uniform(32)), 0.01);
    EXPECT_LE(r.grid.max_marginal_defect(), 1e-12);
    EXPECT_LT(r.correction, 1e-3);
}

TEST(PermutonFromInsertion, TruncatedExponentialGivesStar12) {
    for (double r : {-3.0, 2.0}) {
        const InsertionFlowResult out = permuton_from_insertion(star12_insertion_family(r, 256, 256), 32, 512);
        EXPECT_LE(rect_distance(out.grid, star12_grid(r, 32)), 0.02) << r;
        EXPECT_LT(out.correction, 1e-3);
    }
}

TEST(PermutonFromInsertion, RoundTrip) {
    const GridPermuton g = star12_grid(-2.5, 64);
    const InsertionFlowResult back = permuton_from_insertion(insertion_from_permuton(g), 64);
    EXPECT_LE(rect_distance(back.grid, g), 0.02);
}

TEST(InsertionEntropy, MatchesStar12ClosedForm) {
    for (double r : {-2.0, -6.0, 4.0}) {
        EXPECT_NEAR(insertion_entropy(star12_insertion_family(r, 2048, 2048)), star12_entropy(r), 1e-5) << r;
    }
}

TEST(InsertionEntropy, AgreesWithGridEntropy) {
    for (double r : {-4.0, -1.0, 1.0, 4.0}) {
        const GridPermuton g = star12_grid(r, 128);
        EXPECT_NEAR(insertion_entropy(insertion_from_permuton(g)), entropy_grid(g), 5.0 / 128) << r;
    }
}

TEST(StarFamily, OrientationMatchesPatternClasses) {
    // the permuton built from a solved star model must carry the requested class densities
    const StarModel shape{{{1, 0}, {2, 0}}};
    const StarSolution s = solve_star(shape, {0.5, 0.53});
    const InsertionFlowResult out = permuton_from_insertion(star_insertion_family(s.model, 512, 512), 128, 1024);
    EXPECT_NEAR(density_grid_exact(out.grid, PatternSpec::parse("*2")), 0.5, 2e-3);
    EXPECT_NEAR(density_grid_exact(out.grid, PatternSpec::parse("**3")), 0.53, 2e-3);
    const StarModel mixed{{{1, 1}, {0, 2}}};
    const StarSolution s2 = solve_star(mixed, {0.4, 0.25});
    const InsertionFlowResult out2 = permuton_from_insertion(star_insertion_family(s2.model, 512, 512), 128, 1024);
    EXPECT_NEAR(density_grid_exact(out2.grid, PatternSpec::parse("**2")), 0.4, 2e-3);
    EXPECT_NEAR(density_grid_exact(out2.grid, PatternSpec::parse("**1")), 0.25, 2e-3);
}
