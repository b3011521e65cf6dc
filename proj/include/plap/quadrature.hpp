#pragma once

#include "plap/error.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <vector>

namespace plap {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule mapped to [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
    require(n >= 1, ErrorKind::invalid_argument, "Gauss-Legendre needs at least one node");
    // Boost returns the nonnegative zeros of P_n in ascending order.
    const std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<double> x;
    std::vector<double> w;
    auto weight = [n](double z) {
        const double dp = boost::math::legendre_p_prime<double>(n, z);
        return 2.0 / ((1.0 - z * z) * dp * dp);
    };
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
        if (*it == 0.0) continue;
        x.push_back(-*it);
        w.push_back(weight(*it));
    }
    for (double z : zeros) {
        x.push_back(z);
        w.push_back(weight(z));
    }
    QuadratureRule r;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < x.size(); ++i) {
        r.nodes.push_back(mid + half * x[i]);
        r.weights.push_back(half * w[i]);
    }
    return r;
}

/// n-point trapezoid rule for a periodic integrand on [a, b).
inline QuadratureRule periodic_trapezoid(int n, double a, double b) {
    require(n >= 1, ErrorKind::invalid_argument, "trapezoid rule needs at least one node");
    QuadratureRule r;
    const double h = (b - a) / n;
    for (int i = 0; i < n; ++i) {
        r.nodes.push_back(a + h * i);
        r.weights.push_back(h);
    }
    return r;
}

}  // namespace plap
