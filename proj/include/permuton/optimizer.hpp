#ifndef PERMUTON_OPTIMIZER_HPP
#define PERMUTON_OPTIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "entropy.hpp"
#include "patterns.hpp"

namespace permuton {

struct Constraint {
    PatternSpec pattern;
    double target;
};

using ConstraintSet = std::vector<Constraint>;

/// "12=0.4,123=0.25".
inline ConstraintSet parse_constraints(const std::string& text) {
    ConstraintSet out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::size_t eq = item.find('=');
        require(eq != std::string::npos, "constraint '" + item + "' is not of the form pattern=value");
        double target = 0.0;
        try {
            target = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ValidationError("constraint '" + item + "' has a non-numeric target");
        }
        out.push_back({PatternSpec::parse(item.substr(0, eq)), target});
    }
    return out;
}

struct OptimizerOptions {
    double residual_tol = 1e-6;
    double gradient_tol = 1e-6;
    std::size_t max_inner = 10000;
    std::size_t max_outer = 50;
    double penalty = 10.0;           ///< initial augmented-Lagrangian weight mu
    double max_penalty = 1e4;
    std::size_t restarts = 0;        ///< extra runs from seeded perturbations of the uniform start
    double perturbation = 0.5;       ///< scale of the log-mass perturbation for restarts
    std::uint64_t seed = 0;
};

struct OptimizerResult {
    GridPermuton grid = GridPermuton::uniform(1);
    double entropy = 0.0;
    std::vector<double> achieved;
    std::vector<double> residuals;
    std::vector<double> multipliers;
    std::size_t iterations = 0;        ///< inner iterations summed over outer rounds
    std::size_t outer_iterations = 0;
    double projected_gradient = 0.0;
    bool converged = false;
    /// augmented-Lagrangian value after every accepted inner step, tagged with its outer round
    std::vector<std::pair<std::size_t, double>> objective_trace;
    std::vector<double> restart_entropies;  ///< final entropy of each run (index 0 = uniform start)
};

namespace detail {

inline double entropy_of(const std::vector<double>& w, std::size_t m) {
    const double m2 = static_cast<double>(m * m);
    double h = 0.0;
    for (double v : w) {
        if (v > 0.0) {
            h -= v * std::log(m2 * v);
        }
    }
    return h;
}

// Removes the best mass-weighted fit a_i + b_j (directions the marginal
// rescaling undoes) and returns sqrt(sum w r^2) of what is left.
inline double project_gradient(std::vector<double>& g, const std::vector<double>& w, std::size_t m) {
    const double md = static_cast<double>(m);
    std::vector<double> a(m, 0.0);
    std::vector<double> b(m, 0.0);
    for (int sweep = 0; sweep < 50; ++sweep) {
        double shift = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                s += w[i * m + j] * (g[i * m + j] - b[j]);
            }
            shift = std::max(shift, std::abs(md * s - a[i]));
            a[i] = md * s;
        }
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                s += w[i * m + j] * (g[i * m + j] - a[i]);
            }
            shift = std::max(shift, std::abs(md * s - b[j]));
            b[j] = md * s;
        }
        if (shift <= 1e-15 * (1.0 + std::abs(a[0]))) {
            break;
        }
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double& v = g[i * m + j];
            v -= a[i] + b[j];
            sq += w[i * m + j] * v * v;
        }
    }
    return std::sqrt(sq);
}

struct Evaluation {
    double entropy = 0.0;
    double lagrangian = 0.0;
    std::vector<double> c;                  // rho_i - target_i
    std::vector<std::vector<double>> grads; // d rho_i / d w
};

inline Evaluation evaluate(const std::vector<double>& w, std::size_t m, const ConstraintSet& cons,
                           const std::vector<double>& lambda, double mu, bool with_grad) {
    Evaluation e;
    e.entropy = entropy_of(w, m);
    e.lagrangian = e.entropy;
    for (std::size_t i = 0; i < cons.size(); ++i) {
        std::vector<double> g;
        const double rho = density_grid_exact(w, m, cons[i].pattern, with_grad ? &g : nullptr);
        const double c = rho - cons[i].target;
        e.c.push_back(c);
        e.lagrangian += lambda[i] * c - 0.5 * mu * c * c;
        e.grads.push_back(std::move(g));
    }
    return e;
}

struct RunState {
    std::vector<double> w;
    std::vector<double> lambda;
    Evaluation eval;
    double projected_gradient = 0.0;
    std::size_t inner = 0;
    std::size_t outer = 0;
    bool converged = false;
    std::vector<std::pair<std::size_t, double>> trace;
};

inline RunState run_augmented_lagrangian(std::vector<double> w, std::size_t m, const ConstraintSet& cons,
                                         const OptimizerOptions& opts) {
    const std::size_t q = cons.size();
    RunState st;
    st.lambda.assign(q, 0.0);
    double mu = opts.penalty;
    double eta = 1.0;
    double prev_violation = std::numeric_limits<double>::infinity();
    std::vector<double> step(m * m);

    auto violation = [](const Evaluation& e) {
        double v = 0.0;
        for (double c : e.c) {
            v = std::max(v, std::abs(c));
        }
        return v;
    };

    for (st.outer = 0; st.outer < opts.max_outer; ++st.outer) {
        Evaluation cur = evaluate(w, m, cons, st.lambda, mu, true);
        double pg = 0.0;
        eta = 1.0;
        for (std::size_t it = 0; it < opts.max_inner; ++it) {
            // gradient of H + sum lambda c - mu/2 sum c^2 with respect to the cell masses
            const double m2 = static_cast<double>(m * m);
            for (std::size_t t = 0; t < w.size(); ++t) {
                double g = -std::log(m2 * w[t]) - 1.0;
                for (std::size_t i = 0; i < q; ++i) {
                    g += (st.lambda[i] - mu * cur.c[i]) * cur.grads[i][t];
                }
                step[t] = g;
            }
            pg = project_gradient(step, w, m);
            if (pg <= opts.gradient_tol) {
                break;
            }
            bool accepted = false;
            for (int half = 0; half < 40 && !accepted; ++half) {
                std::vector<double> trial(w.size());
                double top = -std::numeric_limits<double>::infinity();
                for (std::size_t t = 0; t < w.size(); ++t) {
                    trial[t] = std::log(w[t]) + eta * step[t];
                    top = std::max(top, trial[t]);
                }
                for (double& v : trial) {
                    v = std::exp(v - top);
                }
                try {
                    trial = balance_marginals(std::move(trial), m).masses;
                } catch (const ConvergenceError&) {
                    eta *= 0.5;  // step underflowed whole rows
                    continue;
                }
                Evaluation next = evaluate(trial, m, cons, st.lambda, mu, true);
                if (next.lagrangian >= cur.lagrangian) {
                    w = std::move(trial);
                    cur = std::move(next);
                    accepted = true;
                    eta = std::min(1.0, 1.5 * eta);
                } else {
                    eta *= 0.5;
                }
            }
            ++st.inner;
            if (!accepted) {
                break;  // no ascent direction at floating-point resolution
            }
            st.trace.emplace_back(st.outer, cur.lagrangian);
        }
        st.eval = cur;
        st.projected_gradient = pg;
        const double viol = violation(cur);
        if (viol <= opts.residual_tol && pg <= opts.gradient_tol) {
            st.converged = true;
            ++st.outer;
            break;
        }
        for (std::size_t i = 0; i < q; ++i) {
            st.lambda[i] -= mu * cur.c[i];
        }
        if (viol > opts.residual_tol && viol > 0.5 * prev_violation) {
            mu = std::min(2.0 * mu, opts.max_penalty);
        }
        prev_violation = viol;
    }
    st.w = std::move(w);
    return st;
}

}

/**
 * Maximizes entropy_grid over m x m grid permutons subject to exact grid
 * pattern densities rho_i = target_i. Augmented Lagrangian outer loop;
 * inner loop of entropic mirror-ascent steps (multiplicative updates of
 * the masses, then marginal rescaling) with backtracking so that every
 * accepted step does not decrease the augmented Lagrangian.
 */
inline OptimizerResult maximize_entropy(const ConstraintSet& cons, std::size_t m, const OptimizerOptions& opts = {}) {
    require(m >= 2, "maximize_entropy: m must be at least 2");
    require(!cons.empty(), "maximize_entropy: no constraints");
    for (std::size_t i = 0; i < cons.size(); ++i) {
        require(cons[i].pattern.length() <= 3, "maximize_entropy: constraints must have pattern length <= 3");
        require(cons[i].target > 0.0 && cons[i].target < 1.0, "maximize_entropy: targets must lie in (0, 1)");
        for (std::size_t j = 0; j < i; ++j) {
            require(cons[i].pattern.to_string() != cons[j].pattern.to_string(),
                    "maximize_entropy: duplicate constraint " + cons[i].pattern.to_string());
        }
    }

    OptimizerResult best;
    bool have_best = false;
    double best_viol = std::numeric_limits<double>::infinity();
    for (std::size_t run = 0; run <= opts.restarts; ++run) {
        std::vector<double> w(m * m, 1.0 / static_cast<double>(m * m));
        if (run > 0) {
            Rng rng(derive_seed(opts.seed, run));
            for (double& v : w) {
                v *= std::exp(opts.perturbation * (2.0 * unit_uniform(rng) - 1.0));
            }
            w = balance_marginals(std::move(w), m).masses;
        }
        detail::RunState st = detail::run_augmented_lagrangian(std::move(w), m, cons, opts);
        double viol = 0.0;
        for (double c : st.eval.c) {
            viol = std::max(viol, std::abs(c));
        }
        best.restart_entropies.push_back(st.eval.entropy);
        // prefer converged runs, then feasibility, then entropy
        const bool better = !have_best || (st.converged && !best.converged) ||
                            (st.converged == best.converged &&
                             (st.converged ? st.eval.entropy > best.entropy : viol < best_viol));
        if (better) {
            std::vector<double> entropies = std::move(best.restart_entropies);
            best = OptimizerResult{};
            best.restart_entropies = std::move(entropies);
            best.grid = GridPermuton(m, st.w);
            best.entropy = st.eval.entropy;
            for (std::size_t i = 0; i < cons.size(); ++i) {
                best.achieved.push_back(st.eval.c[i] + cons[i].target);
            }
            best.residuals = st.eval.c;
            best.multipliers = st.lambda;
            best.iterations = st.inner;
            best.outer_iterations = st.outer;
            best.projected_gradient = st.projected_gradient;
            best.converged = st.converged;
            best.objective_trace = std::move(st.trace);
            best_viol = viol;
            have_best = true;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Euler-Lagrange residuals
// ---------------------------------------------------------------------------

struct PdeFit {
    double alpha = 0.0;
    double rms = 0.0;
    std::size_t nodes = 0;
};

namespace detail {

inline constexpr std::size_t kPdeMargin = 2;

inline void require_positive_interior(const GridPermuton& g) {
    const std::size_t m = g.m();
    require(m >= 2 * kPdeMargin + 1, "PDE residual needs m >= 5");
    for (std::size_t i = kPdeMargin - 1; i + kPdeMargin - 1 < m; ++i) {
        for (std::size_t j = kPdeMargin - 1; j + kPdeMargin - 1 < m; ++j) {
            require(g(i, j) > 0.0, "PDE residual: zero cell (" + std::to_string(i) + ", " + std::to_string(j) +
                                       ") in the interior");
        }
    }
}

// Central mixed difference of a cell-centred field at (i, j).
template <typename F>
double mixed_difference(F f, std::size_t i, std::size_t j, double h) {
    return (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) / (4.0 * h * h);
}

inline PdeFit fit_alpha(const std::vector<double>& d, const std::vector<double>& s, double factor) {
    double ds = 0.0;
    double ss = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        ds += d[k] * s[k];
        ss += s[k] * s[k];
    }
    PdeFit fit;
    fit.alpha = ss > 0.0 ? -ds / (factor * ss) + 0.0 : 0.0;  // + 0.0 turns -0 into 0
    double sq = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const double r = d[k] + factor * fit.alpha * s[k];
        sq += r * r;
    }
    fit.nodes = d.size();
    fit.rms = d.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(d.size()));
    return fit;
}

}

/// Least-squares alpha and RMS residual of (log g)_xy + 2 alpha g = 0 at interior cell centres.
inline PdeFit pde_residual_12(const GridPermuton& g) {
    detail::require_positive_interior(g);
    const std::size_t m = g.m();
    const double m2 = static_cast<double>(m * m);
    const double h = 1.0 / static_cast<double>(m);
    auto logg = [&](std::size_t i, std::size_t j) { return std::log(m2 * g(i, j)); };
    std::vector<double> d;
    std::vector<double> s;
    for (std::size_t i = detail::kPdeMargin; i + detail::kPdeMargin < m; ++i) {
        for (std::size_t j = detail::kPdeMargin; j + detail::kPdeMargin < m; ++j) {
            d.push_back(detail::mixed_difference(logg, i, j, h));
            s.push_back(m2 * g(i, j));
        }
    }
    return detail::fit_alpha(d, s, 2.0);
}

/**
 * Residual of the 1 2 3 equation in the form
 *   (log K_xy)_xy + 3 alpha (2 K_xy K + K_x K_y - 1) = 0,  K = 2G - x - y + 1,
 * with G, G_x, G_y at cell centres from corner averages.
 */
inline PdeFit pde_residual_123(const GridPermuton& g) {
    detail::require_positive_interior(g);
    const std::size_t m = g.m();
    const double md = static_cast<double>(m);
    const double m2 = md * md;
    const double h = 1.0 / md;
    const CDFField G = cdf(g);
    auto logkxy = [&](std::size_t i, std::size_t j) { return std::log(2.0 * m2 * g(i, j)); };
    std::vector<double> d;
    std::vector<double> s;
    for (std::size_t i = detail::kPdeMargin; i + detail::kPdeMargin < m; ++i) {
        for (std::size_t j = detail::kPdeMargin; j + detail::kPdeMargin < m; ++j) {
            const double x = (static_cast<double>(i) + 0.5) * h;
            const double y = (static_cast<double>(j) + 0.5) * h;
            const double gc = 0.25 * (G(i, j) + G(i + 1, j) + G(i, j + 1) + G(i + 1, j + 1));
            const double gx = 0.5 * md * (G(i + 1, j) + G(i + 1, j + 1) - G(i, j) - G(i, j + 1));
            const double gy = 0.5 * md * (G(i, j + 1) + G(i + 1, j + 1) - G(i, j) - G(i + 1, j));
            const double K = 2.0 * gc - x - y + 1.0;
            const double Kx = 2.0 * gx - 1.0;
            const double Ky = 2.0 * gy - 1.0;
            const double Kxy = 2.0 * m2 * g(i, j);
            d.push_back(detail::mixed_difference(logkxy, i, j, h));
            s.push_back(2.0 * Kxy * K + Kx * Ky - 1.0);
        }
    }
    return detail::fit_alpha(d, s, 3.0);
}

}

#endif
