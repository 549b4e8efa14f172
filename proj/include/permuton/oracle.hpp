#ifndef PERMUTON_ORACLE_HPP
#define PERMUTON_ORACLE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <vector>

#include "error.hpp"
#include "special.hpp"
#include "starmodel.hpp"

namespace permuton {

/// (*2, **3, **2, **1) occurrence counts: pairs ending in their larger value,
/// triples ending in their largest, middle and smallest value.
using StarCounts = std::array<int, 4>;
using StarCountTable = std::map<StarCounts, std::uint64_t>;

inline StarCounts star_counts(const std::vector<int>& p) {
    StarCounts c{0, 0, 0, 0};
    const std::size_t n = p.size();
    for (std::size_t k = 0; k < n; ++k) {
        int below = 0;
        int above = 0;
        for (std::size_t a = 0; a < k; ++a) {
            (p[a] < p[k] ? below : above) += 1;
        }
        c[0] += below;
        // triples with k last: both earlier below, one each side, both above
        c[1] += below * (below - 1) / 2;
        c[2] += below * above;
        c[3] += above * (above - 1) / 2;
    }
    return c;
}

/// Exhaustive enumeration of S_n, with each statistic counted pattern by pattern.
inline StarCountTable joint_star_counts(std::size_t n) {
    require(n >= 1 && n <= 8, "joint_star_counts: n must be in [1, 8]");
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    StarCountTable out;
    do {
        StarCounts c{0, 0, 0, 0};
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                c[0] += p[a] < p[b] ? 1 : 0;
                for (std::size_t d = b + 1; d < n; ++d) {
                    const int below = (p[a] < p[d] ? 1 : 0) + (p[b] < p[d] ? 1 : 0);
                    c[3 - below] += 1;
                }
            }
        }
        ++out[c];
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/**
 * The same table built by appending one element at a time: a new last
 * element with i of the j earlier elements below it adds
 * (i, C(i,2), i(j-i), C(j-i,2)).
 */
inline StarCountTable joint_star_counts_by_appending(std::size_t n) {
    require(n >= 1 && n <= 12, "joint_star_counts_by_appending: n must be in [1, 12]");
    StarCountTable cur{{StarCounts{0, 0, 0, 0}, 1}};
    for (int j = 1; j < static_cast<int>(n); ++j) {
        StarCountTable next;
        for (const auto& [c, count] : cur) {
            for (int i = 0; i <= j; ++i) {
                const StarCounts d{c[0] + i, c[1] + i * (i - 1) / 2, c[2] + i * (j - i),
                                   c[3] + (j - i) * (j - i - 1) / 2};
                next[d] += count;
            }
        }
        cur = std::move(next);
    }
    return cur;
}

/// Marginal over one statistic: entry v is the number of permutations with that count equal to v.
inline std::vector<std::uint64_t> marginal(const StarCountTable& t, std::size_t which) {
    require(which < 4, "marginal: statistic index out of range");
    std::vector<std::uint64_t> out;
    for (const auto& [c, count] : t) {
        const auto v = static_cast<std::size_t>(c[which]);
        if (out.size() <= v) {
            out.resize(v + 1, 0);
        }
        out[v] += count;
    }
    return out;
}

/**
 * (1/n)(log sum_{i in W} C_i - log n!), C_i the number of permutations of
 * n with i occurrences of 1 2 and W the counts with |i/C(n,2) - rho| < eps.
 */
inline double ldp_estimate(std::size_t n, double rho, double eps) {
    require(n >= 2 && n <= 500, "ldp_estimate: n must be in [2, 500]");
    require(rho > 0.0 && rho < 1.0, "ldp_estimate: rho must lie in (0, 1)");
    require(eps > 0.0, "ldp_estimate: eps must be positive");
    const std::vector<double> logc = mahonian_log_gf(n);
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    double acc = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < logc.size(); ++i) {
        if (std::abs(static_cast<double>(i) / pairs - rho) < eps) {
            acc = logaddexp(acc, logc[i]);
            any = true;
        }
    }
    require(any, "ldp_estimate: the window around rho contains no attainable count");
    return (acc - std::lgamma(static_cast<double>(n) + 1.0)) / static_cast<double>(n);
}

}

#endif
