#pragma once

#include "plap/eigen/model_space.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace plap::eigen {

/// Relative offset cut from ends where the volume density vanishes.
inline constexpr double kWarpedOffset = 1e-4;

/// Piecewise-linear discretization of the weighted p-Rayleigh quotient on a
/// uniform grid. Periodic problems store N nodes and N cells (the last cell
/// wraps around); the others store N + 1 nodes and N cells.
struct Problem1D {
    double p = 2.0;
    bool periodic = false;
    bool fixed_lo = false;
    bool fixed_hi = false;
    double h = 0.0;
    std::vector<double> x;         // nodes
    std::vector<double> x_mid;     // cell midpoints
    std::vector<double> rho_mid;   // density at cell midpoints
    std::vector<double> rho_node;  // density at nodes
    std::vector<double> wq;        // trapezoid weights at nodes

    std::size_t nodes() const { return x.size(); }
    std::size_t cells() const { return x_mid.size(); }
    std::size_t right(std::size_t c) const { return periodic && c + 1 == x.size() ? 0 : c + 1; }
    /// Zero p-mean constraint applies when no end is pinned.
    bool constrained() const { return !fixed_lo && !fixed_hi; }
};

inline double phi(double s, double p) { return s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), p - 1.0), s); }

inline Problem1D build_problem(const ModelSpace1D& space, double p, int N) {
    require(p > 1.0 && std::isfinite(p), ErrorKind::invalid_argument, "p must lie in (1, inf)");
    require(N >= 16, ErrorKind::invalid_argument, "N must be at least 16");
    Problem1D pr;
    pr.p = p;
    pr.periodic = space.periodic();
    pr.fixed_lo = space.fixed_lo();
    pr.fixed_hi = space.fixed_hi();
    const double off = kWarpedOffset * space.length();
    const double a = space.singular_lo() ? space.lo() + off : space.lo();
    const double b = space.singular_hi() ? space.hi() - off : space.hi();
    pr.h = (b - a) / N;
    const int n_nodes = pr.periodic ? N : N + 1;
    for (int i = 0; i < n_nodes; ++i) pr.x.push_back(a + pr.h * i);
    for (int c = 0; c < N; ++c) pr.x_mid.push_back(a + pr.h * (c + 0.5));
    auto density = [&](double x) {
        const double r = space.density(x);
        require(r > 0.0 && std::isfinite(r), ErrorKind::invalid_space,
                "density " + std::to_string(r) + " at x = " + std::to_string(x) + " is not positive");
        return r;
    };
    for (double xm : pr.x_mid) pr.rho_mid.push_back(density(xm));
    for (double xn : pr.x) pr.rho_node.push_back(density(xn));
    pr.wq.assign(pr.x.size(), pr.h);
    if (!pr.periodic) {
        pr.wq.front() *= 0.5;
        pr.wq.back() *= 0.5;
    }
    return pr;
}

struct Rayleigh {
    double value = 0.0;
    double energy = 0.0;  // Σ h ρ |u'|^p
    double mass = 0.0;    // Σ w ρ |u|^p
    std::vector<double> gradient;
};

/// Discrete Rayleigh quotient and its exact gradient.
inline Rayleigh rayleigh(const Problem1D& pr, std::span<const double> u, bool with_gradient = true) {
    require(u.size() == pr.nodes(), ErrorKind::invalid_argument, "sample count does not match the grid");
    const double p = pr.p;
    Rayleigh r;
    std::vector<double> dE(with_gradient ? u.size() : 0, 0.0);
    for (std::size_t c = 0; c < pr.cells(); ++c) {
        const std::size_t j = pr.right(c);
        const double du = (u[j] - u[c]) / pr.h;
        r.energy += pr.h * pr.rho_mid[c] * std::pow(std::abs(du), p);
        if (with_gradient) {
            const double g = p * pr.rho_mid[c] * phi(du, p);
            dE[j] += g;
            dE[c] -= g;
        }
    }
    std::vector<double> dM(with_gradient ? u.size() : 0, 0.0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        r.mass += pr.wq[i] * pr.rho_node[i] * std::pow(std::abs(u[i]), p);
        if (with_gradient) dM[i] = p * pr.wq[i] * pr.rho_node[i] * phi(u[i], p);
    }
    require(r.mass > 0.0, ErrorKind::invalid_argument, "Rayleigh quotient of the zero function");
    r.value = r.energy / r.mass;
    if (with_gradient) {
        r.gradient.resize(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r.gradient[i] = (dE[i] - r.value * dM[i]) / r.mass;
    }
    return r;
}

/// Σ |u - c|^{p-2}(u - c) ρ w, strictly decreasing in c.
inline double pmean_moment(const Problem1D& pr, std::span<const double> u, double c) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += phi(u[i] - c, pr.p) * pr.rho_node[i] * pr.wq[i];
    return s;
}

/// The unique c with Σ |u - c|^{p-2}(u - c) ρ w = 0. Bisection on [min u,
/// max u], with Newton steps taken whenever they stay inside the bracket.
inline double zero_pmean_shift(const Problem1D& pr, std::span<const double> u) {
    require(u.size() == pr.nodes(), ErrorKind::invalid_argument, "sample count does not match the grid");
    const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
    require(*mx > *mn, ErrorKind::invalid_argument, "zero p-mean shift of a constant function");
    const double p = pr.p;
    if (p == 2.0) {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            num += u[i] * pr.rho_node[i] * pr.wq[i];
            den += pr.rho_node[i] * pr.wq[i];
        }
        return num / den;
    }
    double scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) scale += std::pow(std::abs(u[i]), p - 1.0) * pr.rho_node[i] * pr.wq[i];
    const double target = 1e-13 * scale;
    double lo = *mn, hi = *mx;
    double c = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double g = 0.0, dg = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = u[i] - c;
            const double wgt = pr.rho_node[i] * pr.wq[i];
            g += phi(d, p) * wgt;
            if (d != 0.0) dg += (p - 1.0) * std::pow(std::abs(d), p - 2.0) * wgt;
        }
        if (std::abs(g) <= target) return c;
        if (g > 0.0) lo = c; else hi = c;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)))
            return c;
        const double newton = dg > 0.0 ? c + g / dg : lo - 1.0;
        c = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
    }
    return c;
}

}  // namespace plap::eigen
