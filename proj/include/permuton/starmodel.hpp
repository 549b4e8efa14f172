#ifndef PERMUTON_STARMODEL_HPP
#define PERMUTON_STARMODEL_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/factorials.hpp>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <set>
#include <utility>
#include <vector>

#include "core.hpp"
#include "curves.hpp"
#include "error.hpp"
#include "special.hpp"

namespace permuton {

// ---------------------------------------------------------------------------
// The 1 2 model
// ---------------------------------------------------------------------------

namespace detail {

// Below this |r| the closed forms lose digits to cancellation; the Bernoulli series is used instead.
inline constexpr double kStar12SeriesRadius = 1.0;

inline double star12_rho_series(double r) {
    double sum = 0.5;
    double power = r;  // r^(2n-1)
    for (unsigned n = 1; n <= 40; ++n) {
        const double b = boost::math::bernoulli_b2n<double>(static_cast<int>(n));
        const double term = -2.0 * b * power / ((2.0 * n + 1.0) * boost::math::factorial<double>(2 * n));
        sum += term;
        if (std::abs(term) < 1e-18) {
            break;
        }
        power *= r * r;
    }
    return sum;
}

inline double star12_entropy_series(double r) {
    double sum = 0.0;
    double power = r * r;  // r^(2n)
    for (unsigned n = 1; n <= 40; ++n) {
        const double b = boost::math::bernoulli_b2n<double>(static_cast<int>(n));
        const double term = -b * power * (2.0 * n - 1.0) /
                            (2.0 * n * boost::math::factorial<double>(2 * n) * (2.0 * n + 1.0));
        sum += term;
        if (std::abs(term) < 1e-18) {
            break;
        }
        power *= r * r;
    }
    return sum;
}

}

/// 1 2 density of the maximizer with rate r (x = e^{-r} weights each 1 2 occurrence). Decreasing in r.
inline double star12_rho(double r) {
    require(std::isfinite(r), "star12_rho: r must be finite");
    if (std::abs(r) < detail::kStar12SeriesRadius) {
        return detail::star12_rho_series(r);
    }
    if (r > 0.0) {
        return 1.0 - star12_rho(-r);
    }
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double e = std::exp(r);
    return (r * (r - 2.0 * std::log1p(-e) + 2.0) - 2.0 * dilog(e)) / (r * r) + pi2 / (3.0 * r * r);
}

/// Entropy of the 1 2 maximizer with rate r; even in r, zero at r = 0.
inline double star12_entropy(double r) {
    require(std::isfinite(r), "star12_entropy: r must be finite");
    if (std::abs(r) < detail::kStar12SeriesRadius) {
        return detail::star12_entropy_series(r);
    }
    if (r > 0.0) {
        return star12_entropy(-r);
    }
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double e = std::exp(r);
    return -2.0 * dilog(e) / r + pi2 / (3.0 * r) - std::log1p(-e) - std::log(-r) + 2.0;
}

/// Inverse of star12_rho by bisection on the monotone map.
inline double star12_r_from_rho(double rho) {
    require(rho > 0.0 && rho < 1.0, "star12_r_from_rho: rho must lie in (0, 1)");
    if (rho == 0.5) {
        return 0.0;
    }
    // rho is decreasing: rho > 1/2 needs r < 0
    double lo = rho > 0.5 ? -1.0 : 0.0;
    double hi = rho > 0.5 ? 0.0 : 1.0;
    while (star12_rho(lo) < rho) {
        hi = lo;
        lo *= 2.0;
        require(lo > -1e8, "star12_r_from_rho: rho too close to 1");
    }
    while (star12_rho(hi) > rho) {
        lo = hi;
        hi *= 2.0;
        require(hi < 1e8, "star12_r_from_rho: rho too close to 0");
    }
    for (int it = 0; it < 400 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (star12_rho(mid) > rho) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// CDF of the 1 2 maximizer: log(1 + (e^{rx}-1)(e^{ry}-1)/(e^r-1)) / r; xy at r = 0.
inline double star12_cdf(double r, double x, double y) {
    if (r == 0.0) {
        return x * y;
    }
    if (r > 0.0) {
        // g_r(x, y) = g_{-r}(x, 1 - y) keeps every exponential bounded by 1
        return x - star12_cdf(-r, x, 1.0 - y);
    }
    return std::log1p(std::expm1(r * x) * std::expm1(r * y) / std::expm1(r)) / r;
}

/// Density d^2 G / dx dy of the 1 2 maximizer; 1 at r = 0.
inline double star12_density(double r, double x, double y) {
    if (r == 0.0) {
        return 1.0;
    }
    if (r > 0.0) {
        return star12_density(-r, x, 1.0 - y);
    }
    const double em = std::expm1(r);
    const double d = em + std::expm1(r * x) * std::expm1(r * y);
    return r * std::exp(r * (x + y)) * em / (d * d);
}

/// Insertion density r e^{-ry} / (1 - e^{-rx}) on [0, x]; 1/x at r = 0.
inline double star12_insertion_density(double r, double x, double y) {
    if (r == 0.0) {
        return 1.0 / x;
    }
    return r * std::exp(-r * y) / (-std::expm1(-r * x));
}

/// Exact cell masses of the 1 2 maximizer on an m x m grid.
inline GridPermuton star12_grid(double r, std::size_t m) {
    require(m > 0, "star12_grid: m must be positive");
    std::vector<double> G((m + 1) * (m + 1));
    for (std::size_t i = 0; i <= m; ++i) {
        for (std::size_t j = 0; j <= m; ++j) {
            G[i * (m + 1) + j] = star12_cdf(r, static_cast<double>(i) / m, static_cast<double>(j) / m);
        }
    }
    std::vector<double> w(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double v = G[(i + 1) * (m + 1) + j + 1] - G[i * (m + 1) + j + 1] - G[(i + 1) * (m + 1) + j] +
                             G[i * (m + 1) + j];
            w[i * m + j] = std::max(0.0, v);
        }
    }
    return GridPermuton::balanced(m, std::move(w));
}

// ---------------------------------------------------------------------------
// Mahonian numbers
// ---------------------------------------------------------------------------

/**
 * log C_i, i = 0 .. n(n-1)/2, where C_i counts permutations of n with i
 * occurrences of 1 2: the coefficients of prod_{j=0}^{n-1} (1 + x + ... + x^j).
 * Each factor is applied as a window sum of prefix sums in log space; the
 * coefficients are symmetric, so only the lower half is computed.
 */
inline std::vector<double> mahonian_log_gf(std::size_t n) {
    require(n >= 1, "mahonian_log_gf: n must be at least 1");
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> c{0.0};
    std::vector<double> prefix;
    for (std::size_t j = 1; j < n; ++j) {
        const std::size_t len = c.size() + j;
        std::vector<double> next(len, ninf);
        const std::size_t half = (len - 1) / 2;
        if (j <= 16) {
            for (std::size_t i = 0; i <= half; ++i) {
                double acc = ninf;
                for (std::size_t t = 0; t <= j && t <= i; ++t) {
                    if (i - t < c.size()) {
                        acc = logaddexp(acc, c[i - t]);
                    }
                }
                next[i] = acc;
            }
        } else {
            prefix.assign(half + 1, ninf);
            double run = ninf;
            for (std::size_t i = 0; i <= half; ++i) {
                if (i < c.size()) {
                    run = logaddexp(run, c[i]);
                }
                prefix[i] = run;
            }
            for (std::size_t i = 0; i <= half; ++i) {
                if (i <= j) {
                    next[i] = prefix[i];
                } else {
                    next[i] = prefix[i] + std::log1p(-std::exp(prefix[i - j - 1] - prefix[i]));
                }
            }
        }
        for (std::size_t i = half + 1; i < len; ++i) {
            next[i] = next[len - 1 - i];
        }
        c = std::move(next);
    }
    return c;
}

// ---------------------------------------------------------------------------
// Star models
// ---------------------------------------------------------------------------

/**
 * One term alpha * t^r (x - t)^s / (r! s!) of the exponent. It weights the
 * class of patterns of length k = r + s + 1 ending in l = r + 1: when the
 * element at position x lands at relative height t, r earlier elements lie
 * below and s above it.
 */
struct StarTerm {
    int r = 0;
    int s = 0;
    double alpha = 0.0;

    int length() const { return r + s + 1; }
    double factorial_k() const { return boost::math::factorial<double>(static_cast<unsigned>(length())); }
};

struct StarModel {
    std::vector<StarTerm> terms;
    double tol = 1e-12;            ///< convergence of F and its gradient under panel doubling
    std::size_t max_panels = 64;   ///< 20-point Gauss-Legendre panels per axis

    void validate() const {
        require(!terms.empty(), "star model needs at least one term");
        std::set<std::pair<int, int>> seen;
        for (const StarTerm& t : terms) {
            require(t.r >= 0 && t.s >= 0 && t.r + t.s >= 1, "star term exponents must be nonnegative with r + s >= 1");
            require(std::isfinite(t.alpha), "star term coefficient must be finite");
            require(seen.insert({t.r, t.s}).second, "star term exponent pairs must be distinct");
        }
    }

    Eigen::VectorXd alpha() const {
        Eigen::VectorXd a(static_cast<Eigen::Index>(terms.size()));
        for (std::size_t i = 0; i < terms.size(); ++i) {
            a[static_cast<Eigen::Index>(i)] = terms[i].alpha;
        }
        return a;
    }

    StarModel with_alpha(const Eigen::VectorXd& a) const {
        StarModel out = *this;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            out.terms[i].alpha = a[static_cast<Eigen::Index>(i)];
        }
        return out;
    }
};

struct FreeEnergyResult {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
    std::size_t panels = 0;
};

namespace detail {

inline FreeEnergyResult free_energy_fixed(const StarModel& model, std::size_t panels) {
    const std::size_t q = model.terms.size();
    const QuadratureRule rule = composite_gauss_legendre(0.0, 1.0, panels);
    const std::size_t nq = rule.nodes.size();
    std::vector<double> inv_fact(q);
    for (std::size_t i = 0; i < q; ++i) {
        inv_fact[i] = 1.0 / (boost::math::factorial<double>(static_cast<unsigned>(model.terms[i].r)) *
                             boost::math::factorial<double>(static_cast<unsigned>(model.terms[i].s)));
    }

    FreeEnergyResult out;
    out.gradient = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q));
    out.hessian = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
    out.panels = panels;
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(nq), static_cast<Eigen::Index>(q));
    std::vector<double> logw(nq);
    for (std::size_t a = 0; a < nq; ++a) {
        const double x = rule.nodes[a];
        // inner integral over t = x u; log x integrates to -1 and cancels the leading 1
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < nq; ++b) {
            const double t = x * rule.nodes[b];
            double p = 0.0;
            for (std::size_t i = 0; i < q; ++i) {
                const StarTerm& term = model.terms[i];
                const double v = std::pow(t, term.r) * std::pow(x - t, term.s) * inv_fact[i];
                phi(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(i)) = v;
                p += term.alpha * v;
            }
            logw[b] = std::log(rule.weights[b]) + p;
            top = std::max(top, logw[b]);
        }
        double z = 0.0;
        for (std::size_t b = 0; b < nq; ++b) {
            logw[b] = std::exp(logw[b] - top);
            z += logw[b];
        }
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q));
        for (std::size_t b = 0; b < nq; ++b) {
            logw[b] /= z;
            mean += logw[b] * phi.row(static_cast<Eigen::Index>(b)).transpose();
        }
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
        for (std::size_t b = 0; b < nq; ++b) {
            const Eigen::VectorXd d = phi.row(static_cast<Eigen::Index>(b)).transpose() - mean;
            cov.noalias() += logw[b] * d * d.transpose();
        }
        const double wx = rule.weights[a];
        out.value += wx * (top + std::log(z));
        out.gradient += wx * mean;
        out.hessian += wx * cov;
    }
    return out;
}

}

/**
 * Normalized free energy F = 1 + int_0^1 log int_0^x exp(p(t, x)) dt dx,
 * with its gradient (tilted means of the monomials) and Hessian (integrated
 * covariances) from the same quadrature pass. Panels are doubled until F and
 * the gradient change by less than model.tol.
 */
inline FreeEnergyResult evaluate_free_energy(const StarModel& model) {
    model.validate();
    FreeEnergyResult prev = detail::free_energy_fixed(model, 1);
    for (std::size_t panels = 2; panels <= model.max_panels; panels *= 2) {
        FreeEnergyResult cur = detail::free_energy_fixed(model, panels);
        const double scale = std::max(1.0, std::abs(cur.value));
        const double df = std::abs(cur.value - prev.value);
        const double dg = (cur.gradient - prev.gradient).cwiseAbs().maxCoeff();
        if (df <= model.tol * scale && dg <= model.tol * scale) {
            return cur;
        }
        prev = std::move(cur);
    }
    throw ConvergenceError("free energy quadrature did not converge at " + std::to_string(model.max_panels) +
                               " panels",
                           std::abs(prev.value));
}

inline double free_energy(const StarModel& model) { return evaluate_free_energy(model).value; }
inline Eigen::VectorXd grad_free_energy(const StarModel& model) { return evaluate_free_energy(model).gradient; }
inline Eigen::MatrixXd hessian_free_energy(const StarModel& model) { return evaluate_free_energy(model).hessian; }

/// Pattern-class densities rho_i = k_i! dF/d alpha_i.
inline Eigen::VectorXd star_densities(const StarModel& model, const Eigen::VectorXd& gradient) {
    Eigen::VectorXd rho = gradient;
    for (std::size_t i = 0; i < model.terms.size(); ++i) {
        rho[static_cast<Eigen::Index>(i)] *= model.terms[i].factorial_k();
    }
    return rho;
}

struct StarSolution {
    StarModel model;  ///< terms carry the solved coefficients
    Eigen::VectorXd alpha;
    Eigen::VectorXd densities;
    double free_energy = 0.0;
    /// F(alpha) - sum_i alpha_i rho_i / k_i!, the Legendre dual at the targets.
    double entropy = 0.0;
    Eigen::MatrixXd hessian;
    std::size_t newton_iterations = 0;
    double residual = 0.0;
};

struct SolveOptions {
    double residual_tol = 1e-10;
    std::size_t max_iter = 100;
    int max_halvings = 30;
    /// consecutive iterations with < 1% residual reduction that count as a stall
    std::size_t stall_window = 3;
};

/**
 * Finds alpha with k_i! dF/d alpha_i = targets_i by damped Newton steps on
 * the convex function F(alpha) - sum alpha_i targets_i / k_i!. Throws
 * ConvergenceError when the iteration stalls, which happens for targets
 * outside the feasible region or on its boundary.
 */
inline StarSolution solve_star(StarModel shape, const std::vector<double>& targets, const SolveOptions& opts = {}) {
    shape.validate();
    const std::size_t q = shape.terms.size();
    require(targets.size() == q, "solve_star: one target per term required");
    Eigen::VectorXd c(static_cast<Eigen::Index>(q));
    for (std::size_t i = 0; i < q; ++i) {
        require(targets[i] > 0.0 && targets[i] < 1.0, "solve_star: targets must lie in (0, 1)");
        c[static_cast<Eigen::Index>(i)] = targets[i] / shape.terms[i].factorial_k();
    }

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q));
    FreeEnergyResult cur = evaluate_free_energy(shape.with_alpha(alpha));
    double res = (cur.gradient - c).cwiseAbs().maxCoeff();
    std::size_t it = 0;
    std::size_t slow = 0;
    while (res > opts.residual_tol) {
        if (it >= opts.max_iter) {
            throw ConvergenceError("solve_star: iteration cap reached (target infeasible or on the boundary?)", res);
        }
        ++it;
        Eigen::LLT<Eigen::MatrixXd> llt(cur.hessian);
        if (llt.info() != Eigen::Success) {
            throw ConvergenceError("solve_star: Hessian lost positive definiteness", res);
        }
        const Eigen::VectorXd step = llt.solve(c - cur.gradient);
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings && !accepted; ++h, lambda *= 0.5) {
            const Eigen::VectorXd trial = alpha + lambda * step;
            try {
                FreeEnergyResult next = evaluate_free_energy(shape.with_alpha(trial));
                const double r2 = (next.gradient - c).cwiseAbs().maxCoeff();
                if (r2 < res) {
                    slow = r2 > 0.99 * res ? slow + 1 : 0;
                    alpha = trial;
                    cur = std::move(next);
                    res = r2;
                    accepted = true;
                }
            } catch (const ConvergenceError&) {
                // the quadrature cannot resolve this alpha; shorten the step
            }
        }
        if (!accepted) {
            throw ConvergenceError("solve_star: no step reduces the residual (target infeasible or on the boundary?)",
                                   res);
        }
        if (slow >= opts.stall_window) {
            // alpha runs off to infinity while the residual levels out: the target is not attained
            throw ConvergenceError("solve_star: residual stalled (target infeasible or on the boundary?)", res);
        }
    }

    StarSolution sol;
    sol.model = shape.with_alpha(alpha);
    sol.alpha = alpha;
    sol.densities = star_densities(shape, cur.gradient);
    sol.free_energy = cur.value;
    sol.entropy = cur.value - alpha.dot(c);
    sol.hessian = cur.hessian;
    sol.newton_iterations = it;
    sol.residual = res;
    return sol;
}

/// Boundary of the (rho_*2, rho_**3) region: lower (2t - t^2, 3t^2 - 2t^3), upper (1 - t^2, 1 - t^3).
inline std::pair<RegionCurve, RegionCurve> region_star23_boundary(std::size_t samples) {
    require(samples >= 2, "region_star23_boundary: need at least two samples");
    RegionCurve lower{"lower", {}};
    RegionCurve upper{"upper", {}};
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(samples - 1);
        lower.points.push_back({t, 2.0 * t - t * t, 3.0 * t * t - 2.0 * t * t * t});
        upper.points.push_back({t, 1.0 - t * t, 1.0 - t * t * t});
    }
    return {lower, upper};
}

}

#endif
