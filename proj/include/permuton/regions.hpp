#ifndef PERMUTON_REGIONS_HPP
#define PERMUTON_REGIONS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "core.hpp"
#include "curves.hpp"
#include "parallel.hpp"
#include "patterns.hpp"

namespace permuton {

/// Upper boundary of the 1 2 3 / 3 2 1 region as a graph: y = 1 - 3t^2 + 2t^3 at x = t^3.
inline double region_123_321_upper(double x) {
    const double t = std::cbrt(x);
    return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

/**
 * Boundary of the feasible (rho_123, rho_321) region: the upper curves
 * F1 = (t^3, (1-t)^3 + 3t(1-t)^2) and its mirror F2, the segment C on
 * x + y = 1/4 and the axis pieces D (x from 1/4 to 1) and E (y from 1/4 to 1).
 */
inline std::vector<RegionCurve> region_123_321(std::size_t samples) {
    require(samples >= 2, "region_123_321: at least two samples");
    RegionCurve f1{"F1", {}};
    RegionCurve f2{"F2", {}};
    RegionCurve c{"C", {}};
    RegionCurve d{"D", {}};
    RegionCurve e{"E", {}};
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(samples - 1);
        const double u = 1.0 - t;
        const double cube = t * t * t;
        const double rest = u * u * u + 3.0 * t * u * u;
        f1.points.push_back({t, cube, rest});
        f2.points.push_back({t, rest, cube});
        c.points.push_back({t, 0.25 * t, 0.25 * (1.0 - t)});
        d.points.push_back({t, 0.25 + 0.75 * t, 0.0});
        e.points.push_back({t, 0.0, 0.25 + 0.75 * t});
    }
    return {f1, f2, c, d, e};
}

/// Membership in the region bounded by C, D, E and the upper envelope of F1, F2.
inline bool region_123_321_contains(double x, double y) {
    if (x < 0.0 || y < 0.0 || x > 1.0 || y > 1.0 || x + y < 0.25) {
        return false;
    }
    return y <= region_123_321_upper(x) || x <= region_123_321_upper(y);
}

/**
 * Whether the box [x +- dx] x [y +- dy] meets the region. Below the upper
 * curves the region is down-closed and the line x + y = 1/4 bounds it from
 * below, so only the lowest admissible anti-diagonal of the box matters;
 * the upper boundary is convex, so its two ends decide.
 */
inline bool region_123_321_within(double x, double y, double dx, double dy) {
    const double lo_x = std::max(0.0, x - dx);
    const double lo_y = std::max(0.0, y - dy);
    const double hi_x = std::min(1.0, x + dx);
    const double hi_y = std::min(1.0, y + dy);
    if (lo_x > hi_x || lo_y > hi_y) {
        return false;
    }
    const double s = std::max(0.25, lo_x + lo_y);
    if (s > hi_x + hi_y) {
        return false;
    }
    const double ax = std::max(lo_x, s - hi_y);
    const double by = std::max(lo_y, s - hi_x);
    auto upper_ok = [](double px, double py) {
        return py <= region_123_321_upper(px) || px <= region_123_321_upper(py);
    };
    return upper_ok(ax, s - ax) || upper_ok(s - by, by);
}

struct Dimple {
    double s;
    double r;
};

/// Crossing (r, r) of F1 and F2: s^3 = (1-s)^3 + 3s(1-s)^2, r = s^3.
inline Dimple dimple() {
    auto f = [](double s) {
        const double u = 1.0 - s;
        return s * s * s - (u * u * u + 3.0 * s * u * u);
    };
    double lo = 0.0;  // f(0) = -1
    double hi = 1.0;  // f(1) = 1
    while (hi - lo > 1e-15) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    const double s = 0.5 * (lo + hi);
    return {s, s * s * s};
}

struct SweepPoint {
    double a = 0.0;
    double b = 0.0;
    DensityEstimate rho12;
    DensityEstimate rho123;
    DensityEstimate rho321;
};

/**
 * Monte-Carlo densities over the staircase family: a = i/(na-1),
 * b = (a/2) j/(nb-1). The three densities share the points of every trial.
 * Each cell has its own seed stream, so the table does not depend on threads.
 */
inline std::vector<SweepPoint> gamma_ab_sweep(std::size_t na, std::size_t nb, std::uint64_t trials, std::uint64_t seed,
                                              std::size_t threads = 0) {
    require(na >= 2 && nb >= 2, "gamma_ab_sweep: need at least two samples per axis");
    require(trials >= 1, "gamma_ab_sweep: trials must be at least 1");
    std::vector<SweepPoint> out(na * nb);
    const std::vector<PatternSpec> specs{PatternSpec::parse("12"), PatternSpec::parse("123"), PatternSpec::parse("321")};
    parallel_tasks(out.size(), threads, [&](std::size_t cell) {
        const std::size_t i = cell / nb;
        const std::size_t j = cell % nb;
        const double a = static_cast<double>(i) / static_cast<double>(na - 1);
        const double b = 0.5 * a * static_cast<double>(j) / static_cast<double>(nb - 1);
        MonteCarloOptions opts;
        opts.n_points = 3;
        opts.trials = trials;
        opts.seed = derive_seed(seed, cell);
        opts.threads = 1;
        const auto est = density_mc(SegmentSampler(gamma_ab(a, b)), specs, opts);
        out[cell] = {a, b, est[0], est[1], est[2]};
    });
    return out;
}

}

#endif
