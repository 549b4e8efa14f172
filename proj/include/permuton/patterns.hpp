#ifndef PERMUTON_PATTERNS_HPP
#define PERMUTON_PATTERNS_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "core.hpp"
#include "parallel.hpp"

namespace permuton {

// ---------------------------------------------------------------------------
// Pattern specifications
// ---------------------------------------------------------------------------

/**
 * An explicit pattern tau in S_k (k <= 4) or a star class *...*l: all
 * patterns of length k whose final entry is l.
 */
class PatternSpec {
public:
    static PatternSpec pattern(const Permutation& tau) {
        require(tau.size() >= 1 && tau.size() <= 4, "patterns must have length 1..4");
        PatternSpec s;
        s.k_ = static_cast<int>(tau.size());
        s.tau_ = tau;
        return s;
    }

    /// Star class of length k ending in `last` (1-based).
    static PatternSpec star(int k, int last) {
        require(k >= 1 && k <= 4, "star classes must have length 1..4");
        require(last >= 1 && last <= k, "star class final symbol must lie in 1..k");
        PatternSpec s;
        s.k_ = k;
        s.last_ = last;
        return s;
    }

    /// "12", "321", "**3", "*2".
    static PatternSpec parse(const std::string& text) {
        require(!text.empty() && text.size() <= 4, "bad pattern '" + text + "'");
        if (text.front() == '*') {
            const std::size_t stars = text.find_first_not_of('*');
            require(stars == text.size() - 1 && std::isdigit(static_cast<unsigned char>(text.back())),
                    "bad star class '" + text + "'");
            return star(static_cast<int>(text.size()), text.back() - '0');
        }
        std::vector<int> v;
        for (char c : text) {
            require(c >= '1' && c <= '9', "bad pattern '" + text + "'");
            v.push_back(c - '0');
        }
        return pattern(Permutation::from_one_line(v));
    }

    int length() const { return k_; }
    bool is_star() const { return last_ > 0; }

    std::vector<Permutation> members() const {
        if (!is_star()) {
            return {tau_};
        }
        std::vector<Permutation> out;
        std::vector<int> v(static_cast<std::size_t>(k_));
        std::iota(v.begin(), v.end(), 0);
        do {
            if (v.back() == last_ - 1) {
                out.emplace_back(v);
            }
        } while (std::next_permutation(v.begin(), v.end()));
        return out;
    }

    std::string to_string() const {
        if (is_star()) {
            return std::string(static_cast<std::size_t>(k_ - 1), '*') + std::to_string(last_);
        }
        std::string s;
        for (int v : tau_.one_line()) {
            s += std::to_string(v);
        }
        return s;
    }

    /// Lookup table over base-k codes of rank sequences (see code_of).
    std::vector<char> code_table() const {
        std::size_t size = 1;
        for (int i = 0; i < k_; ++i) {
            size *= static_cast<std::size_t>(k_);
        }
        std::vector<char> table(size, 0);
        for (const Permutation& p : members()) {
            table[code_of(p.values())] = 1;
        }
        return table;
    }

    static std::size_t code_of(const std::vector<int>& ranks) {
        std::size_t code = 0;
        for (int r : ranks) {
            code = code * ranks.size() + static_cast<std::size_t>(r);
        }
        return code;
    }

private:
    int k_ = 0;
    int last_ = 0;
    Permutation tau_;
};

struct DensityEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t trials = 0;
};

namespace detail {

// Advances an increasing index tuple over k-subsets of {0..n-1}; false when exhausted.
inline bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    std::size_t i = k;
    while (i > 0) {
        --i;
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

// Base-k code of the relative order of ys (already ordered by x).
template <typename Get>
std::size_t subset_code(const std::vector<std::size_t>& idx, Get y) {
    const std::size_t k = idx.size();
    std::size_t code = 0;
    for (std::size_t p = 0; p < k; ++p) {
        std::size_t r = 0;
        for (std::size_t q = 0; q < k; ++q) {
            r += y(idx[q]) < y(idx[p]) ? 1 : 0;
        }
        code = code * k + r;
    }
    return code;
}

}

/// Number of index k-subsets of pi whose pattern lies in `tau`, by direct enumeration.
inline std::uint64_t pattern_count(const Permutation& pi, const PatternSpec& tau) {
    const std::size_t k = static_cast<std::size_t>(tau.length());
    require(k <= pi.size(), "pattern_count: pattern longer than permutation");
    const std::vector<char> table = tau.code_table();
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::uint64_t count = 0;
    do {
        count += table[detail::subset_code(idx, [&](std::size_t i) { return pi[i]; })] ? 1 : 0;
    } while (detail::next_combination(idx, pi.size()));
    return count;
}

// ---------------------------------------------------------------------------
// Exact densities of step permutons (k <= 3)
// ---------------------------------------------------------------------------

namespace detail {

using Matrix = std::vector<double>;

inline Matrix flip_x(const Matrix& a, std::size_t m) {
    Matrix b(a.size());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            b[(m - 1 - i) * m + j] = a[i * m + j];
        }
    }
    return b;
}

inline Matrix flip_y(const Matrix& a, std::size_t m) {
    Matrix b(a.size());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            b[i * m + (m - 1 - j)] = a[i * m + j];
        }
    }
    return b;
}

inline Matrix flip_xy(const Matrix& a) { return Matrix(a.rbegin(), a.rend()); }

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
    Matrix c(a.size());
    for (std::size_t t = 0; t < a.size(); ++t) {
        c[t] = a[t] * b[t];
    }
    return c;
}

inline double dot(const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        s += a[t] * b[t];
    }
    return s;
}

/*
 * Expected mass strictly below/left of a point uniform in cell (i, j), with
 * cells sharing a row or column counted at half weight and the own cell at
 * a quarter:
 *   ll   lower-left quadrant
 *   rowl same y-band, to the left     (plus half of the own cell)
 *   coll same x-column, below         (plus half of the own cell)
 * The upper/right versions come from a point reflection of the grid.
 */
struct LowerOps {
    Matrix ll;
    Matrix rowl;
    Matrix coll;
};

inline LowerOps lower_ops(const Matrix& x, std::size_t m) {
    LowerOps out{Matrix(m * m), Matrix(m * m), Matrix(m * m)};
    std::vector<double> prefix((m + 1) * (m + 1), 0.0);  // prefix[i][j] = sum over i' < i, j' < j
    for (std::size_t i = 0; i < m; ++i) {
        double col = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            col += x[i * m + j];
            prefix[(i + 1) * (m + 1) + j + 1] = prefix[i * (m + 1) + j + 1] + col;
        }
    }
    auto P = [&](std::size_t i, std::size_t j) { return prefix[i * (m + 1) + j]; };
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double corner = P(i, j);
            const double left = P(i, j + 1) - corner;       // i' < i, j' = j
            const double below = P(i + 1, j) - corner;      // i' = i, j' < j
            const double own = x[i * m + j];
            out.ll[i * m + j] = corner + 0.5 * left + 0.5 * below + 0.25 * own;
            out.rowl[i * m + j] = left + 0.5 * own;
            out.coll[i * m + j] = below + 0.5 * own;
        }
    }
    return out;
}

inline LowerOps upper_ops(const Matrix& x, std::size_t m) {
    LowerOps r = lower_ops(flip_xy(x), m);
    return {flip_xy(r.ll), flip_xy(r.rowl), flip_xy(r.coll)};
}

// rho_12 and its gradient.
inline double density_12(const Matrix& w, std::size_t m, Matrix* grad) {
    const LowerOps lo = lower_ops(w, m);
    const LowerOps up = upper_ops(w, m);
    if (grad) {
        grad->resize(w.size());
        for (std::size_t t = 0; t < w.size(); ++t) {
            (*grad)[t] = 2.0 * (up.ll[t] + lo.ll[t]);
        }
    }
    return 2.0 * dot(w, up.ll);
}

/*
 * rho_123 or rho_132 (0-based tau[0] == 0). Both share the form
 *   6 (T1 - (T2 + T3)/12 + T4/144)
 * where T1 is the product of cell-averaged quadrant masses and the
 * remaining terms correct for the covariance of the within-cell position.
 */
inline double density_1xx(const Matrix& w, std::size_t m, bool ascending, Matrix* grad) {
    const LowerOps lo = lower_ops(w, m);
    const LowerOps up = upper_ops(w, m);
    const std::size_t n = w.size();

    double t1 = 0.0;
    double t2 = 0.0;
    double t3 = 0.0;
    double t4 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        t1 += ascending ? w[t] * lo.ll[t] * up.ll[t] : lo.ll[t] * up.rowl[t] * up.coll[t];
        t2 += w[t] * lo.rowl[t] * up.rowl[t];
        t3 += w[t] * lo.coll[t] * up.coll[t];
        t4 += w[t] * w[t] * w[t];
    }

    if (grad) {
        Matrix g1(n);
        if (ascending) {
            // adjoint pairs: LL <-> UR, RowL <-> RowU, ColL <-> ColU
            const Matrix a = upper_ops(hadamard(w, up.ll), m).ll;
            const Matrix b = lower_ops(hadamard(w, lo.ll), m).ll;
            for (std::size_t t = 0; t < n; ++t) {
                g1[t] = lo.ll[t] * up.ll[t] + a[t] + b[t];
            }
        } else {
            const Matrix a = upper_ops(hadamard(up.rowl, up.coll), m).ll;
            const Matrix b = lower_ops(hadamard(lo.ll, up.coll), m).rowl;
            const Matrix c = lower_ops(hadamard(lo.ll, up.rowl), m).coll;
            for (std::size_t t = 0; t < n; ++t) {
                g1[t] = a[t] + b[t] + c[t];
            }
        }
        const Matrix r1 = upper_ops(hadamard(w, up.rowl), m).rowl;
        const Matrix r2 = lower_ops(hadamard(w, lo.rowl), m).rowl;
        const Matrix c1 = upper_ops(hadamard(w, up.coll), m).coll;
        const Matrix c2 = lower_ops(hadamard(w, lo.coll), m).coll;
        grad->resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            const double g2 = lo.rowl[t] * up.rowl[t] + r1[t] + r2[t];
            const double g3 = lo.coll[t] * up.coll[t] + c1[t] + c2[t];
            (*grad)[t] = 6.0 * (g1[t] - (g2 + g3) / 12.0 + 3.0 * w[t] * w[t] / 144.0);
        }
    }
    return 6.0 * (t1 - (t2 + t3) / 12.0 + t4 / 144.0);
}

// Density of one explicit pattern of length <= 3 with gradient in the original orientation.
inline double explicit_density(const Matrix& w, std::size_t m, const std::vector<int>& tau, Matrix* grad) {
    const std::size_t k = tau.size();
    if (k == 1) {
        if (grad) {
            grad->assign(w.size(), 0.0);
        }
        return 1.0;
    }
    if (k == 2) {
        const double r = density_12(w, m, grad);
        if (tau[0] == 0) {
            return r;
        }
        if (grad) {
            for (double& g : *grad) {
                g = -g;
            }
        }
        return 1.0 - r;
    }
    // Reduce to tau[0] == 0 with reflections; each reflection is an involution on cells.
    bool fx = false;
    bool fy = false;
    if (tau[0] == 2) {
        fy = true;
    } else if (tau[0] == 1) {
        fx = true;
        fy = tau[2] == 2;
    }
    std::vector<int> t = tau;
    if (fx) {
        std::reverse(t.begin(), t.end());
    }
    if (fy) {
        for (int& v : t) {
            v = 2 - v;
        }
    }
    Matrix v = w;
    if (fx) {
        v = flip_x(v, m);
    }
    if (fy) {
        v = flip_y(v, m);
    }
    const double r = density_1xx(v, m, t[1] == 1, grad);
    if (grad) {
        if (fy) {
            *grad = flip_y(*grad, m);
        }
        if (fx) {
            *grad = flip_x(*grad, m);
        }
    }
    return r;
}

}

/**
 * Exact pattern density of a step permuton (k <= 3), including the
 * contributions of points that share a cell row, column or cell. When `grad`
 * is non-null it receives d rho / d w_ij with the masses treated as free
 * variables.
 */
inline double density_grid_exact(std::span<const double> masses, std::size_t m, const PatternSpec& tau,
                                 std::vector<double>* grad = nullptr) {
    require(tau.length() <= 3, "density_grid_exact supports k <= 3; use density_mc for longer patterns");
    require(masses.size() == m * m, "density_grid_exact: size mismatch");
    const detail::Matrix w(masses.begin(), masses.end());
    double total = 0.0;
    if (grad) {
        grad->assign(w.size(), 0.0);
    }
    detail::Matrix g;
    for (const Permutation& p : tau.members()) {
        total += detail::explicit_density(w, m, p.values(), grad ? &g : nullptr);
        if (grad) {
            for (std::size_t t = 0; t < g.size(); ++t) {
                (*grad)[t] += g[t];
            }
        }
    }
    return total;
}

inline double density_grid_exact(const GridPermuton& g, const PatternSpec& tau) {
    return density_grid_exact(g.masses(), g.m(), tau);
}

// ---------------------------------------------------------------------------
// Monte Carlo densities
// ---------------------------------------------------------------------------

struct MonteCarloOptions {
    std::size_t n_points = 0;  ///< points per trial; 0 means the longest pattern length
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    std::size_t threads = 0;   ///< 0 = all cores
    std::size_t chunks = 64;   ///< fixed partition plan; results do not depend on threads
};

/**
 * Estimates several densities from shared draws. Each trial draws n_points
 * i.i.d. points and scores, per pattern, the fraction of k-subsets realizing
 * it; the estimate is the mean over trials with the standard error from the trial
 * variance. With n_points = k each trial is a Bernoulli draw.
 */
template <PointSampler S>
std::vector<DensityEstimate> density_mc(const S& sampler, const std::vector<PatternSpec>& specs,
                                        const MonteCarloOptions& opts) {
    require(!specs.empty(), "density_mc: no patterns");
    require(opts.trials >= 1, "density_mc: trials must be at least 1");
    require(opts.chunks >= 1, "density_mc: chunks must be at least 1");
    std::size_t kmax = 0;
    for (const PatternSpec& s : specs) {
        kmax = std::max(kmax, static_cast<std::size_t>(s.length()));
    }
    const std::size_t n = opts.n_points == 0 ? kmax : opts.n_points;
    require(n >= kmax, "density_mc: n_points is smaller than the pattern length");

    struct Setup {
        std::vector<char> table;
        std::vector<std::vector<std::size_t>> subsets;
    };
    std::vector<Setup> setups;
    for (const PatternSpec& s : specs) {
        Setup st{s.code_table(), {}};
        std::vector<std::size_t> idx(static_cast<std::size_t>(s.length()));
        std::iota(idx.begin(), idx.end(), 0);
        do {
            st.subsets.push_back(idx);
        } while (detail::next_combination(idx, n));
        setups.push_back(std::move(st));
    }

    const std::size_t q = specs.size();
    const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(opts.chunks, opts.trials));
    std::vector<std::vector<double>> sums(chunks, std::vector<double>(2 * q, 0.0));
    parallel_tasks(chunks, opts.threads, [&](std::size_t c) {
        const std::uint64_t begin = opts.trials * c / chunks;
        const std::uint64_t end = opts.trials * (c + 1) / chunks;
        Rng rng(derive_seed(opts.seed, c));
        std::vector<Point> pts(n);
        std::vector<double> ys(n);
        for (std::uint64_t t = begin; t < end; ++t) {
            do {
                for (Point& p : pts) {
                    p = sampler(rng);
                }
            } while (has_ties(pts));
            std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
            for (std::size_t i = 0; i < n; ++i) {
                ys[i] = pts[i].y;
            }
            for (std::size_t s = 0; s < q; ++s) {
                std::size_t hits = 0;
                for (const auto& idx : setups[s].subsets) {
                    hits += setups[s].table[detail::subset_code(idx, [&](std::size_t i) { return ys[i]; })] ? 1 : 0;
                }
                const double v = static_cast<double>(hits) / static_cast<double>(setups[s].subsets.size());
                sums[c][2 * s] += v;
                sums[c][2 * s + 1] += v * v;
            }
        }
    });

    std::vector<DensityEstimate> out(q);
    const double T = static_cast<double>(opts.trials);
    for (std::size_t s = 0; s < q; ++s) {
        double sum = 0.0;
        double sumsq = 0.0;
        for (std::size_t c = 0; c < chunks; ++c) {
            sum += sums[c][2 * s];
            sumsq += sums[c][2 * s + 1];
        }
        const double mean = sum / T;
        const double var = opts.trials > 1 ? std::max(0.0, (sumsq - T * mean * mean) / (T - 1.0)) : 0.0;
        out[s] = {mean, std::sqrt(var / T), opts.trials};
    }
    return out;
}

template <PointSampler S>
DensityEstimate density_mc(const S& sampler, const PatternSpec& spec, const MonteCarloOptions& opts) {
    return density_mc(sampler, std::vector<PatternSpec>{spec}, opts).front();
}

inline DensityEstimate density_mc(const GridPermuton& g, const PatternSpec& spec, const MonteCarloOptions& opts) {
    return density_mc(GridSampler(g), spec, opts);
}

inline DensityEstimate density_mc(const SegmentPermuton& s, const PatternSpec& spec, const MonteCarloOptions& opts) {
    return density_mc(SegmentSampler(s), spec, opts);
}

}

#endif
