#ifndef PERMUTON_CORE_HPP
#define PERMUTON_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "random.hpp"

namespace permuton {

/// Tolerance for structural identities (marginals, total mass).
inline constexpr double kStructuralTol = 1e-12;

// ---------------------------------------------------------------------------
// Permutation
// ---------------------------------------------------------------------------

/**
 * A bijection of {0, ..., n-1}, stored as the 0-based one-line notation.
 * Text and file formats use 1-based values; see from_one_line / one_line.
 */
class Permutation {
public:
    Permutation() = default;

    explicit Permutation(std::vector<int> values) : values_(std::move(values)) {
        std::vector<char> seen(values_.size(), 0);
        for (int v : values_) {
            require(v >= 0 && static_cast<std::size_t>(v) < values_.size() && !seen[v],
                    "permutation values must form a bijection on {0..n-1}");
            seen[v] = 1;
        }
    }

    static Permutation from_one_line(const std::vector<int>& one_based) {
        std::vector<int> v(one_based.size());
        std::transform(one_based.begin(), one_based.end(), v.begin(), [](int x) { return x - 1; });
        return Permutation(std::move(v));
    }

    static Permutation identity(std::size_t n) {
        std::vector<int> v(n);
        std::iota(v.begin(), v.end(), 0);
        return Permutation(std::move(v));
    }

    static Permutation reverse(std::size_t n) {
        std::vector<int> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = static_cast<int>(n - 1 - i);
        }
        return Permutation(std::move(v));
    }

    std::size_t size() const { return values_.size(); }
    int operator[](std::size_t i) const { return values_[i]; }
    const std::vector<int>& values() const { return values_; }

    std::vector<int> one_line() const {
        std::vector<int> v(values_);
        for (int& x : v) {
            ++x;
        }
        return v;
    }

    Permutation inverse() const {
        std::vector<int> inv(values_.size());
        for (std::size_t i = 0; i < values_.size(); ++i) {
            inv[values_[i]] = static_cast<int>(i);
        }
        return Permutation(std::move(inv));
    }

    std::string to_string() const {
        std::string out;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (i) {
                out += values_.size() > 9 ? " " : "";
            }
            out += std::to_string(values_[i] + 1);
        }
        return out;
    }

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> values_;
};

// ---------------------------------------------------------------------------
// Marginal balancing
// ---------------------------------------------------------------------------

struct BalanceResult {
    std::vector<double> masses;
    /// max |w_out / w_in - 1| over cells with positive input mass (input normalized to total 1).
    double correction = 0.0;
    std::size_t iterations = 0;
};

/**
 * Alternating row/column scaling (Sinkhorn) of a nonnegative m x m matrix
 * until every row and column sums to 1/m. Throws ConvergenceError if the
 * support does not admit uniform marginals to within kStructuralTol.
 */
inline BalanceResult balance_marginals(std::vector<double> w, std::size_t m, std::size_t max_iter = 20000) {
    require(m > 0 && w.size() == m * m, "balance_marginals: size mismatch");
    double total = 0.0;
    for (double v : w) {
        require(std::isfinite(v) && v >= 0.0, "balance_marginals: masses must be finite and nonnegative");
        total += v;
    }
    require(total > 0.0, "balance_marginals: zero total mass");
    for (double& v : w) {
        v /= total;
    }
    const std::vector<double> input = w;
    const double target = 1.0 / static_cast<double>(m);
    std::vector<double> sums(m);

    auto row_defect = [&]() {
        double worst = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                s += w[i * m + j];
            }
            worst = std::max(worst, std::abs(s - target));
        }
        return worst;
    };

    BalanceResult out;
    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                s += w[i * m + j];
            }
            if (s <= 0.0) {
                throw ConvergenceError("balance_marginals: empty row " + std::to_string(i), target);
            }
            const double f = target / s;
            for (std::size_t j = 0; j < m; ++j) {
                w[i * m + j] *= f;
            }
        }
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                sums[j] += w[i * m + j];
            }
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (sums[j] <= 0.0) {
                throw ConvergenceError("balance_marginals: empty column " + std::to_string(j), target);
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                w[i * m + j] *= target / sums[j];
            }
        }
        // columns are exact after the column step; rows carry the remaining defect
        if (row_defect() <= 1e-3 * kStructuralTol) {
            ++it;
            break;
        }
    }
    const double defect = row_defect();
    if (defect > kStructuralTol) {
        throw ConvergenceError("balance_marginals: support does not admit uniform marginals", defect);
    }
    for (std::size_t c = 0; c < w.size(); ++c) {
        if (input[c] > 0.0) {
            out.correction = std::max(out.correction, std::abs(w[c] / input[c] - 1.0));
        }
    }
    out.masses = std::move(w);
    out.iterations = it;
    return out;
}

// ---------------------------------------------------------------------------
// GridPermuton
// ---------------------------------------------------------------------------

/**
 * Step permuton on an m x m grid. Cell (i, j) (0-based) is the half-open
 * square (i/m, (i+1)/m] x (j/m, (j+1)/m]; i indexes x, j indexes y.
 * Masses are stored row-major by x.
 */
class GridPermuton {
public:
    GridPermuton(std::size_t m, std::vector<double> masses, double tol = kStructuralTol)
        : m_(m), w_(std::move(masses)) {
        require(m_ > 0, "grid resolution must be positive");
        require(w_.size() == m_ * m_, "grid mass array must have m*m entries");
        for (double v : w_) {
            require(std::isfinite(v) && v >= 0.0, "grid masses must be finite and nonnegative");
        }
        const double defect = max_marginal_defect();
        require(defect <= tol, "grid marginals are not uniform (defect " + std::to_string(defect) + ")");
    }

    /// Balances an arbitrary nonnegative matrix onto uniform marginals first.
    static GridPermuton balanced(std::size_t m, std::vector<double> masses) {
        return GridPermuton(m, balance_marginals(std::move(masses), m).masses);
    }

    static GridPermuton uniform(std::size_t m) {
        const double v = 1.0 / static_cast<double>(m * m);
        return GridPermuton(m, std::vector<double>(m * m, v));
    }

    static GridPermuton identity(std::size_t m) {
        std::vector<double> w(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            w[i * m + i] = 1.0 / static_cast<double>(m);
        }
        return GridPermuton(m, std::move(w));
    }

    static GridPermuton reverse(std::size_t m) {
        std::vector<double> w(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            w[i * m + (m - 1 - i)] = 1.0 / static_cast<double>(m);
        }
        return GridPermuton(m, std::move(w));
    }

    std::size_t m() const { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return w_[i * m_ + j]; }
    std::span<const double> masses() const { return w_; }

    double max_marginal_defect() const {
        const double target = 1.0 / static_cast<double>(m_);
        double worst = 0.0;
        std::vector<double> cols(m_, 0.0);
        double total = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m_; ++j) {
                s += w_[i * m_ + j];
                cols[j] += w_[i * m_ + j];
            }
            total += s;
            worst = std::max(worst, std::abs(s - target));
        }
        for (double c : cols) {
            worst = std::max(worst, std::abs(c - target));
        }
        return std::max(worst, std::abs(total - 1.0));
    }

    /// Mirror x -> 1 - x; maps pattern densities to those of the reversed patterns.
    GridPermuton flip_x() const {
        std::vector<double> w(w_.size());
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                w[(m_ - 1 - i) * m_ + j] = w_[i * m_ + j];
            }
        }
        return GridPermuton(m_, std::move(w));
    }

    /// Mirror y -> 1 - y; maps pattern densities to those of the complemented patterns.
    GridPermuton flip_y() const {
        std::vector<double> w(w_.size());
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                w[i * m_ + (m_ - 1 - j)] = w_[i * m_ + j];
            }
        }
        return GridPermuton(m_, std::move(w));
    }

    /// Swap x and y; maps pattern densities to those of the inverse patterns.
    GridPermuton transpose() const {
        std::vector<double> w(w_.size());
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < m_; ++j) {
                w[j * m_ + i] = w_[i * m_ + j];
            }
        }
        return GridPermuton(m_, std::move(w));
    }

private:
    std::size_t m_;
    std::vector<double> w_;
};

/// Aggregates gamma_pi onto an m x m grid; m must divide n (m = n gives gamma_pi exactly).
inline GridPermuton grid_from_permutation(const Permutation& pi, std::size_t m) {
    const std::size_t n = pi.size();
    require(n > 0, "grid_from_permutation: empty permutation");
    require(m > 0 && n % m == 0,
            "grid_from_permutation: m = " + std::to_string(m) + " does not divide n = " + std::to_string(n));
    const std::size_t block = n / m;
    std::vector<double> w(m * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        w[(i / block) * m + static_cast<std::size_t>(pi[i]) / block] += 1.0 / static_cast<double>(n);
    }
    return GridPermuton(m, std::move(w));
}

// ---------------------------------------------------------------------------
// CDF field and metrics
// ---------------------------------------------------------------------------

/// G[i][j] = gamma([0, i/m] x [0, j/m]) on the (m+1) x (m+1) grid corners.
class CDFField {
public:
    CDFField(std::size_t m, std::vector<double> values) : m_(m), g_(std::move(values)) {
        require(g_.size() == (m_ + 1) * (m_ + 1), "CDF field must have (m+1)^2 entries");
    }

    std::size_t m() const { return m_; }
    double operator()(std::size_t i, std::size_t j) const { return g_[i * (m_ + 1) + j]; }
    std::span<const double> values() const { return g_; }

    /// Cell mass by inclusion-exclusion.
    double mass(std::size_t i, std::size_t j) const {
        return (*this)(i + 1, j + 1) - (*this)(i, j + 1) - (*this)(i + 1, j) + (*this)(i, j);
    }

private:
    std::size_t m_;
    std::vector<double> g_;
};

inline CDFField cdf(const GridPermuton& g) {
    const std::size_t m = g.m();
    std::vector<double> G((m + 1) * (m + 1), 0.0);
    for (std::size_t i = 1; i <= m; ++i) {
        double row = 0.0;
        for (std::size_t j = 1; j <= m; ++j) {
            row += g(i - 1, j - 1);
            G[i * (m + 1) + j] = G[(i - 1) * (m + 1) + j] + row;
        }
    }
    return CDFField(m, std::move(G));
}

/**
 * max over grid-aligned rectangles R of |g1(R) - g2(R)|, computed as the
 * largest absolute subrectangle sum of the difference matrix (2-D Kadane).
 */
inline double rect_distance(const GridPermuton& g1, const GridPermuton& g2) {
    require(g1.m() == g2.m(), "rect_distance: resolution mismatch (coarsen first)");
    const std::size_t m = g1.m();
    double best = 0.0;
    std::vector<double> col(m);
    for (std::size_t top = 0; top < m; ++top) {
        std::fill(col.begin(), col.end(), 0.0);
        for (std::size_t bottom = top; bottom < m; ++bottom) {
            for (std::size_t j = 0; j < m; ++j) {
                col[j] += g1(bottom, j) - g2(bottom, j);
            }
            double run_max = 0.0;
            double run_min = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                run_max = std::max(col[j], run_max + col[j]);
                run_min = std::min(col[j], run_min + col[j]);
                best = std::max({best, run_max, -run_min});
            }
        }
    }
    return best;
}

inline double cdf_linf_distance(const GridPermuton& g1, const GridPermuton& g2) {
    require(g1.m() == g2.m(), "cdf_linf_distance: resolution mismatch (coarsen first)");
    const CDFField a = cdf(g1);
    const CDFField b = cdf(g2);
    double best = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        best = std::max(best, std::abs(a.values()[k] - b.values()[k]));
    }
    return best;
}

inline GridPermuton coarsen(const GridPermuton& g, std::size_t m2) {
    const std::size_t m = g.m();
    require(m2 > 0 && m % m2 == 0, "coarsen: " + std::to_string(m2) + " does not divide " + std::to_string(m));
    const std::size_t f = m / m2;
    std::vector<double> w(m2 * m2, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            w[(i / f) * m2 + j / f] += g(i, j);
        }
    }
    return GridPermuton(m2, std::move(w));
}

// ---------------------------------------------------------------------------
// SegmentPermuton
// ---------------------------------------------------------------------------

/// Uniform 1-D mass on the line y = y0 + slope * (x - x0), x in [x0, x1].
struct Segment {
    double x0;
    double x1;
    double y0;
    int slope;
    double mass;

    double y_at(double x) const { return y0 + slope * (x - x0); }
    double y_min() const { return slope > 0 ? y0 : y_at(x1); }
    double y_max() const { return slope > 0 ? y_at(x1) : y0; }
};

class SegmentPermuton {
public:
    explicit SegmentPermuton(std::vector<Segment> segments, double tol = 1e-9) : segments_(std::move(segments)) {
        require(!segments_.empty(), "segment permuton needs at least one segment");
        double total = 0.0;
        for (const Segment& s : segments_) {
            require(s.x0 < s.x1, "segment requires x0 < x1");
            require(s.slope == 1 || s.slope == -1, "segment slope must be +1 or -1");
            require(s.mass >= 0.0, "segment mass must be nonnegative");
            require(s.x0 >= -tol && s.x1 <= 1.0 + tol && s.y_min() >= -tol && s.y_max() <= 1.0 + tol,
                    "segment leaves the unit square");
            total += s.mass;
        }
        require(std::abs(total - 1.0) <= kStructuralTol, "segment masses must sum to 1");
        const double defect = marginal_defect();
        require(defect <= tol, "segment permuton marginals are not uniform (defect " + std::to_string(defect) + ")");
    }

    const std::vector<Segment>& segments() const { return segments_; }

    /**
     * Largest deviation of the projected x- and y-densities from 1. The
     * projections are piecewise constant, so evaluating at the midpoints
     * between breakpoints is exact.
     */
    double marginal_defect() const {
        auto check = [&](auto lo, auto hi) {
            std::vector<double> cuts{0.0, 1.0};
            for (const Segment& s : segments_) {
                cuts.push_back(lo(s));
                cuts.push_back(hi(s));
            }
            std::sort(cuts.begin(), cuts.end());
            double worst = 0.0;
            for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
                if (cuts[k + 1] - cuts[k] < 1e-12) {
                    continue;
                }
                const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
                if (mid < 0.0 || mid > 1.0) {
                    continue;
                }
                double density = 0.0;
                for (const Segment& s : segments_) {
                    if (lo(s) < mid && mid < hi(s)) {
                        density += s.mass / (s.x1 - s.x0);
                    }
                }
                worst = std::max(worst, std::abs(density - 1.0));
            }
            return worst;
        };
        const double dx = check([](const Segment& s) { return s.x0; }, [](const Segment& s) { return s.x1; });
        const double dy = check([](const Segment& s) { return s.y_min(); }, [](const Segment& s) { return s.y_max(); });
        return std::max(dx, dy);
    }

private:
    std::vector<Segment> segments_;
};

/**
 * Slope -1 staircase permuton gamma_{a,b} on 0 <= a <= 1, 0 <= b <= a/2:
 * the reverse diagonal over [0, 1-a], then k = floor(a/b) descending steps
 * of width b covering y in [0, kb], then one descending remainder covering
 * y in (kb, a]. For b = 0 the staircase becomes the ascending diagonal from
 * (1-a, 0) to (1, a). Masses equal x-lengths.
 */
inline SegmentPermuton gamma_ab(double a, double b) {
    require(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 0.5 * a + 1e-15,
            "gamma_ab: (a, b) must satisfy 0 <= a <= 1 and 0 <= b <= a/2");
    constexpr double kMinWidth = 1e-14;
    std::vector<Segment> segs;
    const double start = 1.0 - a;
    if (start > kMinWidth) {
        segs.push_back({0.0, start, 1.0, -1, start});
    }
    if (a > kMinWidth) {
        if (b <= 0.0) {
            segs.push_back({start, 1.0, 0.0, +1, a});
        } else {
            // relative guard so that a/b landing just below an integer still counts that step
            std::size_t k = static_cast<std::size_t>(std::floor(a / b * (1.0 + 1e-12)));
            k = std::max<std::size_t>(k, 1);
            for (std::size_t j = 1; j <= k; ++j) {
                const double x0 = start + static_cast<double>(j - 1) * b;
                const double x1 = std::min(1.0, start + static_cast<double>(j) * b);
                if (x1 - x0 > kMinWidth) {
                    segs.push_back({x0, x1, static_cast<double>(j) * b, -1, x1 - x0});
                }
            }
            const double x0 = start + static_cast<double>(k) * b;
            if (1.0 - x0 > kMinWidth) {
                segs.push_back({x0, 1.0, a, -1, 1.0 - x0});
            }
        }
    }
    double total = 0.0;
    for (const Segment& s : segs) {
        total += s.mass;
    }
    for (Segment& s : segs) {
        s.mass /= total;
    }
    return SegmentPermuton(std::move(segs));
}

/// Exact cell masses of a segment permuton on an m x m grid.
inline GridPermuton grid_from_segments(const SegmentPermuton& sp, std::size_t m) {
    require(m > 0, "grid resolution must be positive");
    std::vector<double> w(m * m, 0.0);
    const double md = static_cast<double>(m);
    for (const Segment& s : sp.segments()) {
        std::vector<double> cuts{s.x0, s.x1};
        for (std::size_t k = 1; k < m; ++k) {
            const double c = static_cast<double>(k) / md;
            if (c > s.x0 && c < s.x1) {
                cuts.push_back(c);
            }
            const double xc = s.x0 + s.slope * (c - s.y0);  // x where the segment crosses y = c
            if (xc > s.x0 && xc < s.x1) {
                cuts.push_back(xc);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        const double density = s.mass / (s.x1 - s.x0);
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double len = cuts[k + 1] - cuts[k];
            if (len <= 0.0) {
                continue;
            }
            const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
            const auto cell = [&](double v) {
                return std::min<std::size_t>(m - 1, static_cast<std::size_t>(std::max(0.0, v * md)));
            };
            w[cell(mid) * m + cell(s.y_at(mid))] += density * len;
        }
    }
    return GridPermuton::balanced(m, std::move(w));
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

struct Point {
    double x;
    double y;
};

/// Draws i.i.d. points from a grid permuton: cell by mass, then uniform inside the cell.
class GridSampler {
public:
    explicit GridSampler(const GridPermuton& g) : m_(g.m()), cumulative_(g.m() * g.m()) {
        double run = 0.0;
        for (std::size_t c = 0; c < cumulative_.size(); ++c) {
            run += g.masses()[c];
            cumulative_[c] = run;
        }
    }

    Point operator()(Rng& rng) const {
        const double u = unit_uniform(rng) * cumulative_.back();
        std::size_t c = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                                  cumulative_.begin());
        c = std::min(c, cumulative_.size() - 1);
        const double md = static_cast<double>(m_);
        return {(static_cast<double>(c / m_) + unit_uniform(rng)) / md,
                (static_cast<double>(c % m_) + unit_uniform(rng)) / md};
    }

private:
    std::size_t m_;
    std::vector<double> cumulative_;
};

/// Draws i.i.d. points from a segment permuton: segment by mass, then uniform along it.
class SegmentSampler {
public:
    explicit SegmentSampler(const SegmentPermuton& s) : segments_(s.segments()), cumulative_(segments_.size()) {
        double run = 0.0;
        for (std::size_t k = 0; k < segments_.size(); ++k) {
            run += segments_[k].mass;
            cumulative_[k] = run;
        }
    }

    Point operator()(Rng& rng) const {
        const double u = unit_uniform(rng) * cumulative_.back();
        std::size_t k = static_cast<std::size_t>(std::upper_bound(cumulative_.begin(), cumulative_.end(), u) -
                                                  cumulative_.begin());
        k = std::min(k, segments_.size() - 1);
        const Segment& s = segments_[k];
        const double x = s.x0 + unit_uniform(rng) * (s.x1 - s.x0);
        return {x, s.y_at(x)};
    }

private:
    std::vector<Segment> segments_;
    std::vector<double> cumulative_;
};

inline GridSampler make_sampler(const GridPermuton& g) { return GridSampler(g); }
inline SegmentSampler make_sampler(const SegmentPermuton& s) { return SegmentSampler(s); }

template <typename S>
concept PointSampler = requires(const S& s, Rng& rng) {
    { s(rng) } -> std::convertible_to<Point>;
};

/// Relative order of y-values after sorting by x, written into `ranks` (0-based).
inline void pattern_of_points(std::span<Point> pts, std::span<int> ranks) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
    const std::size_t k = pts.size();
    for (std::size_t p = 0; p < k; ++p) {
        int r = 0;
        for (std::size_t q = 0; q < k; ++q) {
            r += pts[q].y < pts[p].y ? 1 : 0;
        }
        ranks[p] = r;
    }
}

inline bool has_ties(std::span<const Point> pts) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const Point& p : pts) {
        xs.push_back(p.x);
        ys.push_back(p.y);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    return std::adjacent_find(xs.begin(), xs.end()) != xs.end() ||
           std::adjacent_find(ys.begin(), ys.end()) != ys.end();
}

template <PointSampler S>
std::vector<Point> sample_points(const S& sampler, std::size_t n, Rng& rng) {
    std::vector<Point> pts(n);
    for (Point& p : pts) {
        p = sampler(rng);
    }
    return pts;
}

/// Rank sequence of n i.i.d. points sorted by x. Samples with coordinate ties are redrawn.
template <PointSampler S>
Permutation sample_permutation(const S& sampler, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "sample_permutation: n must be at least 1");
    Rng rng(seed);
    std::vector<Point> pts = sample_points(sampler, n, rng);
    while (has_ties(pts)) {
        pts = sample_points(sampler, n, rng);
    }
    std::vector<int> ranks(n);
    pattern_of_points(pts, ranks);
    return Permutation(std::move(ranks));
}

inline Permutation sample_permutation(const GridPermuton& g, std::size_t n, std::uint64_t seed) {
    return sample_permutation(GridSampler(g), n, seed);
}

inline Permutation sample_permutation(const SegmentPermuton& s, std::size_t n, std::uint64_t seed) {
    return sample_permutation(SegmentSampler(s), n, seed);
}

}

#endif
