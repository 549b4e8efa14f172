#ifndef PERMUTON_SPECIAL_HPP
#define PERMUTON_SPECIAL_HPP

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace permuton {

/// Real dilogarithm Li2(x) for x <= 1. Power series on [-1/2, 1/2], reflections elsewhere.
inline double dilog(double x) {
    require(x <= 1.0, "dilog: argument must not exceed 1");
    constexpr double pi2_6 = std::numbers::pi * std::numbers::pi / 6.0;
    if (x == 1.0) {
        return pi2_6;
    }
    if (x > 0.5) {
        return pi2_6 - std::log(x) * std::log1p(-x) - dilog(1.0 - x);
    }
    if (x < -1.0) {
        // Li2(x) = -pi^2/6 - log(-x)^2 / 2 - Li2(1/x)
        const double l = std::log(-x);
        return -pi2_6 - 0.5 * l * l - dilog(1.0 / x);
    }
    if (x < -0.5) {
        // Landen: Li2(x) = -Li2(x / (x - 1)) - log(1 - x)^2 / 2, with x / (x - 1) in (1/3, 1/2]
        const double l = std::log1p(-x);
        return -dilog(x / (x - 1.0)) - 0.5 * l * l;
    }
    double term = x;
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
        const double add = term / (static_cast<double>(k) * k);
        sum += add;
        if (std::abs(add) <= 1e-18 * std::abs(sum)) {
            break;
        }
        term *= x;
    }
    return sum;
}

/// log(exp(a) + exp(b)) without overflow.
inline double logaddexp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    if (b == -std::numeric_limits<double>::infinity()) {
        return a;
    }
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// Composite Gauss-Legendre nodes and weights on [a, b].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline QuadratureRule composite_gauss_legendre(double a, double b, std::size_t panels) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const auto& absc = Rule::abscissa();
    const auto& wts = Rule::weights();
    QuadratureRule out;
    const double h = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * h;
        for (std::size_t k = 0; k < absc.size(); ++k) {
            // boost stores the nonnegative half of a symmetric rule
            out.nodes.push_back(mid - 0.5 * h * absc[k]);
            out.weights.push_back(0.5 * h * wts[k]);
            if (absc[k] != 0.0) {
                out.nodes.push_back(mid + 0.5 * h * absc[k]);
                out.weights.push_back(0.5 * h * wts[k]);
            }
        }
    }
    return out;
}

}

#endif
