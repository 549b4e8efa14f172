#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "permuton/core.hpp"
#include "test_util.hpp"

using namespace permuton;

namespace {

Permutation perm(std::vector<int> one_based) { return Permutation::from_one_line(one_based); }

}

TEST(Permutation, RejectsNonBijection) {
    EXPECT_THROW(perm({1, 1, 2}), ValidationError);
    EXPECT_THROW(perm({0, 1}), ValidationError);
    EXPECT_EQ(perm({2, 4, 1, 3}).inverse().one_line(), (std::vector<int>{3, 1, 4, 2}));
}

TEST(GridFromPermutation, IdentityIsDiagonal) {
    const GridPermuton g = grid_from_permutation(Permutation::identity(4), 4);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_EQ(g(i, j), i == j ? 0.25 : 0.0);
        }
    }
}

TEST(GridFromPermutation, ReverseIsAntidiagonal) {
    const GridPermuton g = grid_from_permutation(perm({4, 3, 2, 1}), 4);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(g(i, 3 - i), 0.25);
    }
}

TEST(GridFromPermutation, Aggregates2413) {
    const GridPermuton g = grid_from_permutation(perm({2, 4, 1, 3}), 2);
    for (double v : g.masses()) {
        EXPECT_EQ(v, 0.25);
    }
    EXPECT_THROW(grid_from_permutation(perm({2, 4, 1, 3}), 3), ValidationError);
}

TEST(GridPermuton, RejectsBadMarginals) {
    EXPECT_THROW(GridPermuton(2, {0.5, 0.0, 0.0, 0.25}), ValidationError);
    EXPECT_THROW(GridPermuton(2, {0.5, -0.0001, 0.0, 0.5001}), ValidationError);
}

TEST(GridPermuton, BalancedReportsCorrection) {
    // scaling preserves the cross ratio w00 w11 / (w01 w10) = 3
    const BalanceResult r = balance_marginals({1.0, 1.0, 1.0, 3.0}, 2);
    const double a = 0.5 * std::sqrt(3.0) / (1.0 + std::sqrt(3.0));
    EXPECT_NEAR(r.masses[0], a, 1e-14);
    EXPECT_NEAR(r.masses[3], a, 1e-14);
    EXPECT_NEAR(r.masses[1], 0.5 - a, 1e-14);
    EXPECT_NEAR(r.correction, a / (1.0 / 6.0) - 1.0, 1e-12);
    // a support with no perfect matching cannot be balanced
    EXPECT_THROW(balance_marginals({1.0, 1.0, 0.0, 0.0}, 2), ConvergenceError);
}

TEST(Cdf, SmallCases) {
    EXPECT_DOUBLE_EQ(cdf(GridPermuton::uniform(2))(1, 1), 0.25);
    EXPECT_DOUBLE_EQ(cdf(GridPermuton::identity(2))(1, 1), 0.5);
    const CDFField G = cdf(grid_from_permutation(perm({2, 4, 1, 3}), 4));
    EXPECT_DOUBLE_EQ(G(2, 2), 0.25);
}

TEST(Cdf, BoundaryValuesAndSupermodularity) {
    const GridPermuton g = test_util::random_grid(7, 3);
    const CDFField G = cdf(g);
    for (std::size_t k = 0; k <= 7; ++k) {
        EXPECT_EQ(G(0, k), 0.0);
        EXPECT_EQ(G(k, 0), 0.0);
        EXPECT_NEAR(G(7, k), k / 7.0, 1e-12);
        EXPECT_NEAR(G(k, 7), k / 7.0, 1e-12);
    }
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = 0; j < 7; ++j) {
            EXPECT_NEAR(G.mass(i, j), g(i, j), 1e-15);
        }
    }
}

TEST(Distances, SmallCases) {
    const GridPermuton u = GridPermuton::uniform(2);
    const GridPermuton id = GridPermuton::identity(2);
    const GridPermuton rev = GridPermuton::reverse(2);
    EXPECT_EQ(rect_distance(id, id), 0.0);
    EXPECT_DOUBLE_EQ(rect_distance(id, rev), 0.5);
    EXPECT_DOUBLE_EQ(rect_distance(u, id), 0.25);
    EXPECT_EQ(cdf_linf_distance(id, id), 0.0);
    // G_id(1/2, 1/2) = 1/2 while G_rev(1/2, 1/2) = 0
    EXPECT_DOUBLE_EQ(cdf_linf_distance(id, rev), 0.5);
    EXPECT_DOUBLE_EQ(cdf_linf_distance(u, id), 0.25);
    EXPECT_THROW(rect_distance(u, GridPermuton::uniform(3)), ValidationError);
}

// Brute-force rectangle enumeration as an independent oracle for the Kadane scan.
TEST(Distances, KadaneMatchesEnumerationAndMetricEquivalence) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const GridPermuton a = test_util::random_grid(6, seed);
        const GridPermuton b = test_util::random_grid(6, seed + 100);
        const CDFField A = cdf(a);
        const CDFField B = cdf(b);
        double best = 0.0;
        for (std::size_t i0 = 0; i0 < 6; ++i0) {
            for (std::size_t i1 = i0 + 1; i1 <= 6; ++i1) {
                for (std::size_t j0 = 0; j0 < 6; ++j0) {
                    for (std::size_t j1 = j0 + 1; j1 <= 6; ++j1) {
                        auto rect = [&](const CDFField& G) { return G(i1, j1) - G(i0, j1) - G(i1, j0) + G(i0, j0); };
                        best = std::max(best, std::abs(rect(A) - rect(B)));
                    }
                }
            }
        }
        const double r = rect_distance(a, b);
        const double c = cdf_linf_distance(a, b);
        EXPECT_NEAR(r, best, 1e-15);
        EXPECT_LE(c, r + 1e-15);
        EXPECT_LE(r, 4.0 * c + 1e-15);
    }
}

TEST(Coarsen, BlockSums) {
    const GridPermuton u = coarsen(GridPermuton::uniform(8), 4);
    for (double v : u.masses()) {
        EXPECT_DOUBLE_EQ(v, 1.0 / 16.0);
    }
    const GridPermuton id = coarsen(GridPermuton::identity(8), 4);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(id(i, i), 0.25);
    }
    const GridPermuton p = coarsen(grid_from_permutation(perm({2, 4, 1, 3}), 4), 2);
    for (double v : p.masses()) {
        EXPECT_DOUBLE_EQ(v, 0.25);
    }
    EXPECT_THROW(coarsen(GridPermuton::uniform(8), 3), ValidationError);
}

TEST(Coarsen, Composes) {
    // dyadic masses make every block sum exact
    Permutation pi = sample_permutation(GridPermuton::uniform(1), 64, 11);
    const GridPermuton g = grid_from_permutation(pi, 64);
    const GridPermuton twice = coarsen(coarsen(g, 16), 4);
    const GridPermuton once = coarsen(g, 4);
    for (std::size_t c = 0; c < 16; ++c) {
        EXPECT_EQ(twice.masses()[c], once.masses()[c]);
    }
    const GridPermuton r = test_util::random_grid(24, 5);
    const GridPermuton t2 = coarsen(coarsen(r, 12), 3);
    const GridPermuton o2 = coarsen(r, 3);
    for (std::size_t c = 0; c < 9; ++c) {
        EXPECT_NEAR(t2.masses()[c], o2.masses()[c], 1e-15);
    }
}

TEST(GammaAB, ReverseDiagonalAtOrigin) {
    const SegmentPermuton s = gamma_ab(0.0, 0.0);
    ASSERT_EQ(s.segments().size(), 1u);
    EXPECT_EQ(s.segments()[0].slope, -1);
    EXPECT_EQ(s.segments()[0].x0, 0.0);
    EXPECT_EQ(s.segments()[0].x1, 1.0);
}

TEST(GammaAB, TwoHalfDiagonals) {
    const SegmentPermuton s = gamma_ab(1.0, 0.5);
    ASSERT_EQ(s.segments().size(), 2u);
    EXPECT_DOUBLE_EQ(s.segments()[0].y_at(0.0), 0.5);
    EXPECT_DOUBLE_EQ(s.segments()[0].y_at(0.5), 0.0);
    EXPECT_DOUBLE_EQ(s.segments()[1].y_at(0.5), 1.0);
    EXPECT_DOUBLE_EQ(s.segments()[1].y_at(1.0), 0.5);
}

TEST(GammaAB, Breakpoints07_02) {
    const SegmentPermuton s = gamma_ab(0.7, 0.2);
    ASSERT_EQ(s.segments().size(), 5u);
    const std::vector<double> x0{0.0, 0.3, 0.5, 0.7, 0.9};
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_NEAR(s.segments()[k].x0, x0[k], 1e-15);
        EXPECT_EQ(s.segments()[k].slope, -1);
        EXPECT_GE(s.segments()[k].y_min(), -1e-15);
        EXPECT_LE(s.segments()[k].y_max(), 1.0 + 1e-15);
    }
    // step j covers y in ((j-1)b, jb]
    EXPECT_NEAR(s.segments()[1].y_min(), 0.0, 1e-15);
    EXPECT_NEAR(s.segments()[3].y_max(), 0.6, 1e-15);
    EXPECT_NEAR(s.segments()[4].y_max(), 0.7, 1e-15);
    EXPECT_LE(s.marginal_defect(), 1e-12);
}

TEST(GammaAB, AscentWhenBIsZero) {
    const SegmentPermuton s = gamma_ab(0.8, 0.0);
    ASSERT_EQ(s.segments().size(), 2u);
    EXPECT_EQ(s.segments()[1].slope, 1);
    EXPECT_NEAR(s.segments()[1].y_at(1.0), 0.8, 1e-15);
    EXPECT_THROW(gamma_ab(0.5, 0.3), ValidationError);
    EXPECT_THROW(gamma_ab(1.2, 0.1), ValidationError);
}

TEST(GammaAB, UniformMarginalsAcrossTriangle) {
    for (int i = 0; i <= 20; ++i) {
        const double a = i / 20.0;
        for (int j = 0; j <= 10; ++j) {
            const double b = a / 2.0 * j / 10.0;
            EXPECT_LE(gamma_ab(a, b).marginal_defect(), 1e-9) << a << " " << b;
        }
    }
}

TEST(GridFromSegments, MassesAndMarginals) {
    const GridPermuton g = grid_from_segments(gamma_ab(0.7, 0.2), 10);
    EXPECT_LE(g.max_marginal_defect(), 1e-12);
    EXPECT_NEAR(g(0, 9), 0.1, 1e-12);  // reverse diagonal part
    const GridPermuton rev = grid_from_segments(gamma_ab(0.0, 0.0), 8);
    EXPECT_LE(rect_distance(rev, GridPermuton::reverse(8)), 1e-12);
}

TEST(Sampling, ReverseSegmentGivesReverse) {
    const Permutation p = sample_permutation(gamma_ab(0.0, 0.0), 5, 42);
    EXPECT_EQ(p.one_line(), (std::vector<int>{5, 4, 3, 2, 1}));
    const SegmentPermuton id({{0.0, 1.0, 0.0, +1, 1.0}});
    EXPECT_EQ(sample_permutation(id, 50, 9), Permutation::identity(50));
}

TEST(Sampling, IdentityGridOnlyInvertsWithinCells) {
    // inside a diagonal cell the two coordinates are independent, so only same-cell pairs may invert
    const std::size_t m = 8;
    Rng rng(5);
    const GridSampler s(GridPermuton::identity(m));
    std::vector<Point> pts = sample_points(s, 200, rng);
    for (const Point& a : pts) {
        for (const Point& b : pts) {
            if (a.x < b.x && a.y > b.y) {
                EXPECT_EQ(static_cast<int>(a.x * m), static_cast<int>(b.x * m));
            }
        }
    }
}

TEST(Sampling, Reproducible) {
    const GridPermuton g = test_util::random_grid(5, 1);
    EXPECT_EQ(sample_permutation(g, 100, 77), sample_permutation(g, 100, 77));
    EXPECT_NE(sample_permutation(g, 100, 77), sample_permutation(g, 100, 78));
    EXPECT_THROW(sample_permutation(g, 0, 1), ValidationError);
}

TEST(Sampling, UniformPatternFrequencies) {
    const GridPermuton u = GridPermuton::uniform(4);
    std::map<std::vector<int>, int> counts;
    const int trials = 100000;
    for (int t = 0; t < trials; ++t) {
        counts[sample_permutation(u, 3, derive_seed(2024, t)).values()]++;
    }
    ASSERT_EQ(counts.size(), 6u);
    const double sigma = std::sqrt(trials * (1.0 / 6) * (5.0 / 6));
    for (const auto& [p, c] : counts) {
        EXPECT_NEAR(c, trials / 6.0, 3.0 * sigma);
    }
}
