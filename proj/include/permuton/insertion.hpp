#ifndef PERMUTON_INSERTION_HPP
#define PERMUTON_INSERTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "starmodel.hpp"

namespace permuton {

/**
 * Insertion densities f(x, y) on 0 <= y <= x <= 1. Column c sits at
 * x_c = (c + 1/2) / mt and holds n_c = max(8, ceil(x_c my)) midpoint values
 * on a uniform grid over [0, x_c]; short columns near x = 0 keep at least 8
 * rows. Each column integrates to 1.
 */
class InsertionFamily {
public:
    InsertionFamily(std::size_t mt, std::size_t my, std::vector<std::vector<double>> columns)
        : mt_(mt), my_(my), f_(std::move(columns)) {
        require(mt_ > 0 && my_ > 0, "insertion family resolutions must be positive");
        require(f_.size() == mt_, "insertion family needs mt columns");
        for (std::size_t c = 0; c < mt_; ++c) {
            require(f_[c].size() == rows(c), "insertion column " + std::to_string(c) + " has the wrong row count");
            double total = 0.0;
            for (double v : f_[c]) {
                require(std::isfinite(v) && v >= 0.0, "insertion densities must be finite and nonnegative");
                total += v * width(c);
            }
            require(std::abs(total - 1.0) <= 1e-8,
                    "insertion column " + std::to_string(c) + " integrates to " + std::to_string(total));
        }
        build_cumulative();
    }

    static std::size_t rows_for(std::size_t mt, std::size_t my, std::size_t c) {
        const double x = (static_cast<double>(c) + 0.5) / static_cast<double>(mt);
        return std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(x * static_cast<double>(my) - 1e-9)));
    }

    /// Samples f at the row midpoints and rescales each column to unit mass.
    static InsertionFamily from_function(std::size_t mt, std::size_t my, const std::function<double(double, double)>& f) {
        std::vector<std::vector<double>> cols(mt);
        for (std::size_t c = 0; c < mt; ++c) {
            const double x = (static_cast<double>(c) + 0.5) / static_cast<double>(mt);
            const std::size_t n = rows_for(mt, my, c);
            const double h = x / static_cast<double>(n);
            double total = 0.0;
            cols[c].resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                cols[c][k] = f(x, (static_cast<double>(k) + 0.5) * h);
                total += cols[c][k] * h;
            }
            require(total > 0.0 && std::isfinite(total), "insertion column " + std::to_string(c) + " has no mass");
            for (double& v : cols[c]) {
                v /= total;
            }
        }
        return InsertionFamily(mt, my, std::move(cols));
    }

    std::size_t mt() const { return mt_; }
    std::size_t my() const { return my_; }
    std::size_t rows(std::size_t c) const { return rows_for(mt_, my_, c); }
    double x(std::size_t c) const { return (static_cast<double>(c) + 0.5) / static_cast<double>(mt_); }
    double width(std::size_t c) const { return x(c) / static_cast<double>(rows(c)); }
    double operator()(std::size_t c, std::size_t k) const { return f_[c][k]; }
    const std::vector<std::vector<double>>& columns() const { return f_; }

    /// CDF of nu_x at relative height u = y/x in column c (piecewise linear).
    double column_cdf(std::size_t c, double u) const {
        const std::size_t n = rows(c);
        const double pos = std::clamp(u, 0.0, 1.0) * static_cast<double>(n);
        const std::size_t k = std::min(n - 1, static_cast<std::size_t>(pos));
        return cum_[c][k] + f_[c][k] * width(c) * (pos - static_cast<double>(k));
    }

    /// CDF of nu_x at y, interpolated linearly in x between columns at equal u = y/x.
    double cdf(double x, double y) const {
        if (x <= 0.0) {
            return 0.0;
        }
        const double u = y / x;
        const double s = x * static_cast<double>(mt_) - 0.5;
        if (s <= 0.0) {
            return column_cdf(0, u);
        }
        if (s >= static_cast<double>(mt_ - 1)) {
            return column_cdf(mt_ - 1, u);
        }
        const std::size_t c = static_cast<std::size_t>(s);
        const double lam = s - static_cast<double>(c);
        return (1.0 - lam) * column_cdf(c, u) + lam * column_cdf(c + 1, u);
    }

private:
    void build_cumulative() {
        cum_.resize(mt_);
        for (std::size_t c = 0; c < mt_; ++c) {
            cum_[c].assign(rows(c) + 1, 0.0);
            for (std::size_t k = 0; k < rows(c); ++k) {
                cum_[c][k + 1] = cum_[c][k] + f_[c][k] * width(c);
            }
        }
    }

    std::size_t mt_;
    std::size_t my_;
    std::vector<std::vector<double>> f_;
    std::vector<std::vector<double>> cum_;
};

/// Truncated exponential family r e^{-ry} / (1 - e^{-rx}) of the 1 2 model.
inline InsertionFamily star12_insertion_family(double r, std::size_t mt, std::size_t my) {
    return InsertionFamily::from_function(mt, my, [r](double x, double y) { return star12_insertion_density(r, x, y); });
}

/// Insertion family of a star model: f(x, t) proportional to exp(p(t, x)) on [0, x].
inline InsertionFamily star_insertion_family(const StarModel& model, std::size_t mt, std::size_t my) {
    model.validate();
    std::vector<double> inv_fact;
    for (const StarTerm& t : model.terms) {
        inv_fact.push_back(1.0 / (boost::math::factorial<double>(static_cast<unsigned>(t.r)) *
                                  boost::math::factorial<double>(static_cast<unsigned>(t.s))));
    }
    // from_function rescales each column, so a column-wise shift of the exponent is harmless
    auto exponent = [&](double x, double t) {
        double p = 0.0;
        for (std::size_t i = 0; i < model.terms.size(); ++i) {
            const StarTerm& term = model.terms[i];
            p += term.alpha * std::pow(t, term.r) * std::pow(x - t, term.s) * inv_fact[i];
        }
        return p;
    };
    std::vector<std::vector<double>> cols(mt);
    for (std::size_t c = 0; c < mt; ++c) {
        const double x = (static_cast<double>(c) + 0.5) / static_cast<double>(mt);
        const std::size_t n = InsertionFamily::rows_for(mt, my, c);
        const double h = x / static_cast<double>(n);
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) {
            p[k] = exponent(x, (static_cast<double>(k) + 0.5) * h);
        }
        const double top = *std::max_element(p.begin(), p.end());
        double total = 0.0;
        for (double& v : p) {
            v = std::exp(v - top);
            total += v * h;
        }
        for (double& v : p) {
            v /= total;
        }
        cols[c] = std::move(p);
    }
    return InsertionFamily(mt, my, std::move(cols));
}

/**
 * Insertion measures of a grid permuton. At the centre x of grid column i
 * the level y~ = j/m sits at location G(x, j/m) ~ (G[i][j] + G[i+1][j]) / 2
 * and nu_x has CDF G_x ~ m (G[i+1][j] - G[i][j]) there. The family's rows
 * (with my = row resolution) average the derivative of that piecewise-linear
 * CDF.
 */
inline InsertionFamily insertion_from_permuton(const GridPermuton& g, std::size_t my = 0) {
    const std::size_t m = g.m();
    if (my == 0) {
        my = m;
    }
    const CDFField G = cdf(g);
    std::vector<std::vector<double>> cols(m);
    std::vector<double> ys(m + 1);
    std::vector<double> Fs(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
        for (std::size_t j = 0; j <= m; ++j) {
            ys[j] = 0.5 * (G(i, j) + G(i + 1, j));
            Fs[j] = static_cast<double>(m) * (G(i + 1, j) - G(i, j));
        }
        ys[m] = x;
        Fs[m] = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (!(ys[j + 1] > ys[j])) {
                throw ValidationError("insertion_from_permuton: column " + std::to_string(i) +
                                      " is not invertible (a y-band carries no mass up to this column)");
            }
        }
        // F as a piecewise-linear function of y
        auto F = [&](double y) {
            const std::size_t k = std::min<std::size_t>(
                m - 1, static_cast<std::size_t>(std::upper_bound(ys.begin(), ys.end(), y) - ys.begin()) - 1);
            const double lam = std::clamp((y - ys[k]) / (ys[k + 1] - ys[k]), 0.0, 1.0);
            return Fs[k] + lam * (Fs[k + 1] - Fs[k]);
        };
        const std::size_t n = InsertionFamily::rows_for(m, my, i);
        const double h = x / static_cast<double>(n);
        cols[i].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double lo = static_cast<double>(k) * h;
            const double hi = k + 1 == n ? x : static_cast<double>(k + 1) * h;
            cols[i][k] = std::max(0.0, (F(hi) - F(lo)) / h);
        }
    }
    return InsertionFamily(m, my, std::move(cols));
}

struct InsertionFlowResult {
    GridPermuton grid;
    double correction = 0.0;   ///< relative change made by rebalancing
    std::size_t clipped = 0;   ///< negative inclusion-exclusion masses set to zero
};

/**
 * Rebuilds the permuton by following characteristics dX/dx = F_x(X) with
 * fixed-step RK4. For a fixed height y~ the curve x -> G(x, y~) solves this
 * equation with G(1, y~) = y~, so each seed j/m_out is integrated backward
 * from x = 1 and sampled at x = i/m_out; cell masses follow by
 * inclusion-exclusion.
 */
inline InsertionFlowResult permuton_from_insertion(const InsertionFamily& fam, std::size_t m_out,
                                                   std::size_t n_steps = 0) {
    require(m_out > 0, "permuton_from_insertion: m_out must be positive");
    if (n_steps == 0) {
        n_steps = 512;
    }
    // step boundaries must fall on the output grid
    n_steps = ((n_steps + m_out - 1) / m_out) * m_out;
    const double h = 1.0 / static_cast<double>(n_steps);
    const std::size_t per_cell = n_steps / m_out;
    constexpr double kTol = 1e-6;

    std::vector<double> G((m_out + 1) * (m_out + 1), 0.0);
    auto rhs = [&](double x, double X) { return fam.cdf(x, X); };
    for (std::size_t j = 0; j <= m_out; ++j) {
        double X = static_cast<double>(j) / static_cast<double>(m_out);
        G[m_out * (m_out + 1) + j] = X;
        // G(0, y~) = 0; the last step would evaluate the field at x = 0 where u = X/x is undefined
        for (std::size_t step = n_steps; step > 1; --step) {
            const double x = static_cast<double>(step) * h;
            // backward in x: dX = -h F
            const double k1 = rhs(x, X);
            const double k2 = rhs(x - 0.5 * h, X - 0.5 * h * k1);
            const double k3 = rhs(x - 0.5 * h, X - 0.5 * h * k2);
            const double k4 = rhs(x - h, X - h * k3);
            X -= h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            const double xn = x - h;
            if (X < -kTol || X > xn + kTol) {
                throw ConvergenceError("permuton_from_insertion: characteristic left [0, x] at x = " +
                                           std::to_string(xn),
                                       X);
            }
            X = std::clamp(X, 0.0, xn);
            if ((step - 1) % per_cell == 0) {
                G[((step - 1) / per_cell) * (m_out + 1) + j] = X;
            }
        }
    }
    std::vector<double> w(m_out * m_out);
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < m_out; ++i) {
        for (std::size_t j = 0; j < m_out; ++j) {
            const double v = G[(i + 1) * (m_out + 1) + j + 1] - G[i * (m_out + 1) + j + 1] -
                             G[(i + 1) * (m_out + 1) + j] + G[i * (m_out + 1) + j];
            if (v < 0.0) {
                ++clipped;
            }
            w[i * m_out + j] = std::max(0.0, v);
        }
    }
    BalanceResult b = balance_marginals(std::move(w), m_out);
    return {GridPermuton(m_out, std::move(b.masses)), b.correction, clipped};
}

/// Permuton entropy from the insertion measures: int_0^1 int_0^x -f log(x f) dy dx, midpoint rule.
inline double insertion_entropy(const InsertionFamily& fam) {
    double h = 0.0;
    for (std::size_t c = 0; c < fam.mt(); ++c) {
        const double x = fam.x(c);
        double col = 0.0;
        for (std::size_t k = 0; k < fam.rows(c); ++k) {
            const double f = fam(c, k);
            if (f > 0.0) {
                col -= f * std::log(x * f);
            }
        }
        h += col * fam.width(c) / static_cast<double>(fam.mt());
    }
    return h;
}

}

#endif
