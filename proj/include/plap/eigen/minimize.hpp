#pragma once

#include "plap/eigen/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>
#include <array>

namespace plap::eigen {

struct SolverOptions {
    int restarts = 4;
    int max_iter = 5000;
    double tol = 1e-12;
    std::uint64_t seed = 0;
};

struct EigenResult {
    double lambda = 0.0;
    std::vector<double> x;
    std::vector<double> u;  // normalized so that max |u| = 1
    int iterations = 0;     // of the best restart
    int restarts = 0;
    bool converged = false;
    double weak_residual = 0.0;  // discrete integral identity check
    double rayleigh_gap = 0.0;   // |λ - R_p(u)|
    double pmean = 0.0;          // Σ|u|^{p-2}u ρ w / Σ|u|^{p-1} ρ w, constrained problems only
};

namespace detail {

/// Solves a tridiagonal system in place; sub[0] and sup[n-1] are unused.
inline void solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                              std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = sub[i] / diag[i - 1];
        diag[i] -= m * sup[i - 1];
        rhs[i] -= m * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

/// Cyclic tridiagonal solve: corner entries sub[0] (row 0, col n-1) and
/// sup[n-1] (row n-1, col 0), by a Sherman-Morrison correction.
inline void solve_cyclic(const std::vector<double>& sub, std::vector<double> diag, const std::vector<double>& sup,
                         std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    const double alpha = sup[n - 1];
    const double beta = sub[0];
    const double gamma = -diag[0];
    diag[0] -= gamma;
    diag[n - 1] -= alpha * beta / gamma;
    std::vector<double> x = rhs;
    solve_tridiagonal(sub, diag, sup, x);
    std::vector<double> z(n, 0.0);
    z[0] = gamma;
    z[n - 1] = alpha;
    solve_tridiagonal(sub, diag, sup, z);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = x[i] - fact * z[i];
}

/// Applies the inverse of a positive definite tridiagonal model of the
/// Rayleigh Hessian: the second variation of the energy plus a shifted mass
/// term, both with the p-power factors floored away from zero.
inline std::vector<double> precondition(const Problem1D& pr, const std::vector<double>& u, double R, double mass,
                                        const std::vector<double>& g) {
    const double p = pr.p;
    const std::size_t n = u.size();
    double max_du = 0.0;
    for (std::size_t c = 0; c < pr.cells(); ++c) max_du = std::max(max_du, std::abs(u[pr.right(c)] - u[c]) / pr.h);
    const double eta_du = 1e-6 * max_du;
    const double eta_u = 1e-6;
    constexpr double sigma = 0.2;
    std::vector<double> diag(n, 0.0), sub(n, 0.0), sup(n, 0.0);
    for (std::size_t c = 0; c < pr.cells(); ++c) {
        const std::size_t j = pr.right(c);
        const double du = std::max(std::abs(u[j] - u[c]) / pr.h, eta_du);
        const double k = p * (p - 1.0) * pr.rho_mid[c] * std::pow(du, p - 2.0) / pr.h / mass;
        diag[c] += k;
        diag[j] += k;
        sup[c] -= k;  // row c, column j (the wrap corner for the last periodic cell)
        sub[j] -= k;  // row j, column c
    }
    for (std::size_t i = 0; i < n; ++i)
        diag[i] += sigma * R * p * (p - 1.0) * pr.wq[i] * pr.rho_node[i] *
                   std::pow(std::max(std::abs(u[i]), eta_u), p - 2.0) / mass;

    std::vector<double> out = g;
    if (pr.periodic) {
        solve_cyclic(sub, diag, sup, out);
        return out;
    }
    // Pinned ends are removed from the system.
    const std::size_t lo = pr.fixed_lo ? 1 : 0;
    const std::size_t hi = pr.fixed_hi ? n - 1 : n;
    std::vector<double> s(sub.begin() + lo, sub.begin() + hi), d(diag.begin() + lo, diag.begin() + hi),
        t(sup.begin() + lo, sup.begin() + hi), r(g.begin() + lo, g.begin() + hi);
    solve_tridiagonal(s, d, t, r);
    std::fill(out.begin(), out.end(), 0.0);
    std::copy(r.begin(), r.end(), out.begin() + lo);
    return out;
}

/// Puts u onto the admissible set: pinned ends zeroed, zero p-mean for
/// constrained problems, max |u| = 1.
inline void admissible(const Problem1D& pr, std::vector<double>& u) {
    if (pr.fixed_lo) u.front() = 0.0;
    if (pr.fixed_hi) u.back() = 0.0;
    if (pr.constrained()) {
        const double c = zero_pmean_shift(pr, u);
        for (double& v : u) v -= c;
    }
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    for (double& v : u) v /= m;
}

inline std::vector<double> initial_guess(const Problem1D& pr, int restart, std::mt19937_64& rng) {
    const std::size_t n = pr.nodes();
    const double a = pr.x.front();
    const double span = pr.periodic ? pr.h * static_cast<double>(n) : pr.x.back() - a;
    constexpr double pi = std::numbers::pi;
    // Mode k of the end conditions, k = 0 being the lowest admissible profile.
    auto mode = [&](int k, double t, bool alt) {
        if (pr.periodic) return alt ? std::sin(2.0 * pi * (k + 1) * t) : std::cos(2.0 * pi * (k + 1) * t);
        if (pr.fixed_lo && pr.fixed_hi) return std::sin(pi * (k + 1) * t);
        if (pr.fixed_hi) return std::cos(pi * (k + 0.5) * t);
        return std::cos(pi * (k + 1) * t);
    };
    constexpr int kModes = 4;
    std::array<double, kModes> c{1.0, 0.0, 0.0, 0.0};
    std::array<double, kModes> s{0.0, 0.0, 0.0, 0.0};
    if (restart > 0) {
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int k = 0; k < kModes; ++k) {
            c[static_cast<std::size_t>(k)] = U(rng) / (k + 1);
            s[static_cast<std::size_t>(k)] = pr.periodic ? U(rng) / (k + 1) : 0.0;
        }
    }
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (pr.x[i] - a) / span;
        double v = 0.0;
        for (int k = 0; k < kModes; ++k)
            v += c[static_cast<std::size_t>(k)] * mode(k, t, false) + s[static_cast<std::size_t>(k)] * mode(k, t, true);
        u[i] = v;
    }
    return u;
}

struct Descent {
    std::vector<double> u;
    double R = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct Trial {
    std::vector<double> u;
    Rayleigh r;
    bool ok = false;
};

inline Trial step(const Problem1D& pr, const std::vector<double>& u, const std::vector<double>& s, double alpha) {
    Trial t;
    t.u.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) t.u[i] = u[i] - alpha * s[i];
    try {
        admissible(pr, t.u);
        t.r = rayleigh(pr, t.u);
        t.ok = std::isfinite(t.r.value);
    } catch (const Error&) {
        t.ok = false;  // collapsed to a constant or to zero
    }
    return t;
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Preconditioned nonlinear conjugate gradients (Polak-Ribiere+) with a
/// retraction onto the admissible set after every step.
inline Descent descend(const Problem1D& pr, std::vector<double> u, const SolverOptions& opts) {
    admissible(pr, u);
    Rayleigh r = rayleigh(pr, u);
    Descent out;
    std::vector<double> s_prev, d_prev, g_prev;
    double alpha = 1.0;
    int quiet = 0;
    for (int it = 0; it < opts.max_iter; ++it) {
        out.iterations = it + 1;
        const std::vector<double> d = precondition(pr, u, r.value, r.mass, r.gradient);
        std::vector<double> s = d;
        if (!s_prev.empty()) {
            const double beta = std::max(0.0, (dot(r.gradient, d) - dot(r.gradient, d_prev)) / dot(g_prev, d_prev));
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += beta * s_prev[i];
            if (dot(r.gradient, s) <= 0.0) s = d;
        }
        const double slope = dot(r.gradient, s);
        if (!(slope > 0.0)) {
            out.converged = true;
            break;
        }
        // Quadratic model along the ray from one trial, then backtracking.
        Trial best;
        Trial t1 = step(pr, u, s, alpha);
        if (t1.ok) {
            const double curv = t1.r.value - r.value + slope * alpha;
            if (curv > 0.0) {
                const double aq = slope * alpha * alpha / (2.0 * curv);
                Trial t2 = step(pr, u, s, aq);
                if (t2.ok && (!t1.ok || t2.r.value < t1.r.value)) {
                    best = std::move(t2);
                    alpha = aq;
                }
            }
            if (!best.ok && t1.r.value <= r.value) best = std::move(t1);
        }
        for (int ls = 0; ls < 40 && !(best.ok && best.r.value <= r.value); ++ls) {
            alpha *= 0.5;
            best = step(pr, u, s, alpha);
        }
        if (!(best.ok && best.r.value <= r.value)) {
            out.converged = true;  // no representable descent left
            break;
        }
        const double decrease = (r.value - best.r.value) / best.r.value;
        s_prev = std::move(s);
        d_prev = d;
        g_prev = r.gradient;
        u = std::move(best.u);
        r = std::move(best.r);
        alpha = std::clamp(alpha * 1.5, 1e-8, 16.0);
        quiet = decrease < opts.tol ? quiet + 1 : 0;
        if (quiet >= 3) {
            out.converged = true;
            break;
        }
    }
    out.u = std::move(u);
    out.R = r.value;
    return out;
}

}  // namespace detail

/// Cell-averaged discrete form of λ∫|u|^{2p-2}dμ = (p-1)∫|u'|^p|u|^{p-2}dμ,
/// normalized by the larger side. The average of |u|^{p-2} over a cell is
/// taken exactly for the linear interpolant.
inline double eq34_residual(const Problem1D& pr, std::span<const double> u, double lambda) {
    const double p = pr.p;
    double lhs = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        lhs += pr.wq[i] * pr.rho_node[i] * std::pow(std::abs(u[i]), 2.0 * p - 2.0);
    lhs *= lambda;
    double rhs = 0.0;
    for (std::size_t c = 0; c < pr.cells(); ++c) {
        const std::size_t j = pr.right(c);
        const double du = u[j] - u[c];
        double avg;
        if (std::abs(du) > 1e-12 * std::max(std::abs(u[j]), std::abs(u[c]))) {
            avg = (phi(u[j], p) - phi(u[c], p)) / ((p - 1.0) * du);
        } else {
            avg = std::pow(std::abs(0.5 * (u[j] + u[c])), p - 2.0);
        }
        rhs += pr.h * pr.rho_mid[c] * std::pow(std::abs(du / pr.h), p) * avg;
    }
    rhs *= (p - 1.0);
    return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

struct IdentityResiduals {
    double eq34 = 0.0;
    double rayleigh_gap = 0.0;
};

inline IdentityResiduals identity_residuals(const Problem1D& pr, const EigenResult& res) {
    IdentityResiduals out;
    out.eq34 = eq34_residual(pr, res.u, res.lambda);
    out.rayleigh_gap = std::abs(res.lambda - rayleigh(pr, res.u, false).value);
    return out;
}

/// First nonzero (free or closed ends) or first (pinned ends) eigenvalue by
/// preconditioned descent on the Rayleigh quotient, best over restarts.
inline EigenResult minimize_eig(const Problem1D& pr, const SolverOptions& opts = {}) {
    require(opts.restarts >= 1, ErrorKind::invalid_argument, "restarts must be at least 1");
    require(opts.max_iter >= 1, ErrorKind::invalid_argument, "max_iter must be at least 1");
    std::mt19937_64 rng(opts.seed);
    detail::Descent best;
    best.R = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opts.restarts; ++k) {
        detail::Descent d = detail::descend(pr, detail::initial_guess(pr, k, rng), opts);
        if (d.R < best.R) best = std::move(d);
    }
    EigenResult res;
    res.lambda = best.R;
    res.x = pr.x;
    res.u = std::move(best.u);
    res.iterations = best.iterations;
    res.restarts = opts.restarts;
    res.converged = best.converged;
    const auto ir = identity_residuals(pr, res);
    res.weak_residual = ir.eq34;
    res.rayleigh_gap = ir.rayleigh_gap;
    if (pr.constrained()) {
        double scale = 0.0;
        for (std::size_t i = 0; i < res.u.size(); ++i)
            scale += std::pow(std::abs(res.u[i]), pr.p - 1.0) * pr.rho_node[i] * pr.wq[i];
        res.pmean = std::abs(pmean_moment(pr, res.u, 0.0)) / scale;
    }
    return res;
}

}  // namespace plap::eigen
