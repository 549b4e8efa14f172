#ifndef PERMUTON_ENTROPY_HPP
#define PERMUTON_ENTROPY_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "core.hpp"

namespace permuton {

/// H of the step permuton: -sum w log(m^2 w), with 0 log 0 = 0. Compensated sum.
inline double entropy_grid(const GridPermuton& g) {
    const double m2 = static_cast<double>(g.m() * g.m());
    double h = 0.0;
    double carry = 0.0;
    for (double w : g.masses()) {
        if (w > 0.0) {
            const double term = -w * std::log(m2 * w);
            const double t = h + term;
            carry += std::abs(h) >= std::abs(term) ? (h - t) + term : (term - t) + h;
            h = t;
        }
    }
    return h + carry;
}

/// (level, H(coarsen(g, level))) for each requested level.
inline std::vector<std::pair<std::size_t, double>> riemann_refinement(const GridPermuton& g,
                                                                      const std::vector<std::size_t>& levels) {
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t level : levels) {
        out.emplace_back(level, entropy_grid(coarsen(g, level)));
    }
    return out;
}

struct HeatFlowSpec {
    double t = 0.0;
    std::size_t j_max = 0;  ///< x-modes j >= j_max are dropped; 0 means m
    std::size_t k_max = 0;  ///< y-modes likewise
};

struct HeatFlowResult {
    GridPermuton grid;
    std::size_t clipped = 0;  ///< cells that came out negative and were set to zero
    double correction = 0.0;  ///< largest relative change made by rebalancing
};

namespace detail {

// A = C^T diag(e^{-j^2 t}, j < cutoff) C with C the orthonormal DCT-II on cell centres.
inline std::vector<double> heat_matrix(std::size_t m, double t, std::size_t cutoff) {
    std::vector<double> c(m * m);
    for (std::size_t j = 0; j < m; ++j) {
        const double s = std::sqrt((j == 0 ? 1.0 : 2.0) / static_cast<double>(m));
        for (std::size_t i = 0; i < m; ++i) {
            c[j * m + i] = s * std::cos(std::numbers::pi * static_cast<double>(j) * (i + 0.5) / static_cast<double>(m));
        }
    }
    std::vector<double> a(m * m, 0.0);
    for (std::size_t j = 0; j < std::min(cutoff, m); ++j) {
        const double decay = std::exp(-static_cast<double>(j * j) * t);
        for (std::size_t p = 0; p < m; ++p) {
            const double cp = decay * c[j * m + p];
            for (std::size_t q = 0; q < m; ++q) {
                a[p * m + q] += cp * c[j * m + q];
            }
        }
    }
    return a;
}

}

/**
 * Damps the cosine modes of the cell density by e^{-(j^2 + k^2) t}. Mode
 * (0, 0) and the marginals are untouched; cells that turn negative after
 * truncation are clipped and the marginals restored by rescaling.
 */
inline HeatFlowResult heat_flow(const GridPermuton& g, const HeatFlowSpec& spec) {
    require(spec.t >= 0.0 && std::isfinite(spec.t), "heat_flow: t must be finite and nonnegative");
    const std::size_t m = g.m();
    const std::vector<double> ax = detail::heat_matrix(m, spec.t, spec.j_max == 0 ? m : spec.j_max);
    const std::vector<double> ay = detail::heat_matrix(m, spec.t, spec.k_max == 0 ? m : spec.k_max);
    const auto w = g.masses();
    std::vector<double> tmp(m * m, 0.0);
    // tmp = A_x W
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t i = 0; i < m; ++i) {
            const double a = ax[p * m + i];
            for (std::size_t j = 0; j < m; ++j) {
                tmp[p * m + j] += a * w[i * m + j];
            }
        }
    }
    // out = tmp A_y^T
    std::vector<double> out(m * m, 0.0);
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = 0; q < m; ++q) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                s += tmp[p * m + j] * ay[q * m + j];
            }
            out[p * m + q] = s;
        }
    }
    std::size_t clipped = 0;
    for (double& v : out) {
        if (v < 0.0) {
            v = 0.0;
            ++clipped;
        }
    }
    BalanceResult b = balance_marginals(std::move(out), m);
    return {GridPermuton(m, std::move(b.masses)), clipped, b.correction};
}

}

#endif
