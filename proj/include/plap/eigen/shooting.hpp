#pragma once

#include "plap/eigen/model_space.hpp"
#include "plap/eigen/problem.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <vector>

namespace plap::eigen {

struct ShootingOptions {
    int initial_steps = 1024;
    int max_steps = 1 << 20;
    double rel_tol = 1e-8;      // agreement between successive step halvings
    double lambda_lo = 1e-8;    // bracket search range
    double lambda_hi = 1e8;
};

struct ShootingResult {
    double lambda = 0.0;
    int steps = 0;           // RK4 steps on the final level
    double last_change = 0.0;  // relative change at the final halving
    bool converged = false;
};

namespace detail {

/// One Sturm-Liouville segment [a, b] with free or pinned ends.
struct Segment {
    double a = 0.0;
    double b = 0.0;
    bool fixed_lo = false;
    bool fixed_hi = false;
};

inline double phi_inv(double s, double p) {
    return s == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(s), 1.0 / (p - 1.0)), s);
}

/// RK4 integration of u' = Φ^{-1}(q/ρ), q' = -λρΦ(u) on a fixed grid of
/// half-step densities. Returns true when the first-eigenvalue event
/// happened inside (a, b], i.e. when λ lies at or above the eigenvalue.
inline bool overshoots(const Segment& seg, const std::vector<double>& rho, int steps, double p, double lambda) {
    const double h = (seg.b - seg.a) / steps;
    double u = seg.fixed_lo ? 0.0 : 1.0;
    double q = seg.fixed_lo ? 1.0 : 0.0;
    auto du = [p](double, double qq, double r) { return phi_inv(qq / r, p); };
    auto dq = [p, lambda](double uu, double r) { return -lambda * r * phi(uu, p); };
    for (int k = 0; k < steps; ++k) {
        const double r0 = rho[2 * static_cast<std::size_t>(k)];
        const double r1 = rho[2 * static_cast<std::size_t>(k) + 1];
        const double r2 = rho[2 * static_cast<std::size_t>(k) + 2];
        const double k1u = du(u, q, r0), k1q = dq(u, r0);
        const double k2u = du(u + 0.5 * h * k1u, q + 0.5 * h * k1q, r1), k2q = dq(u + 0.5 * h * k1u, r1);
        const double k3u = du(u + 0.5 * h * k2u, q + 0.5 * h * k2q, r1), k3q = dq(u + 0.5 * h * k2u, r1);
        const double k4u = du(u + h * k3u, q + h * k3q, r2), k4q = dq(u + h * k3u, r2);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        q += h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        if (seg.fixed_hi) {
            if (u <= 0.0) return true;
        } else if (seg.fixed_lo ? q <= 0.0 : q >= 0.0) {
            return true;
        }
    }
    return false;
}

inline double bisect(const std::function<bool(double)>& over, double lo, double hi) {
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (over(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

inline ShootingResult shoot_segment(const Segment& seg, const std::function<double(double)>& density, double p,
                                    const ShootingOptions& opts) {
    ShootingResult res;
    std::optional<double> prev;
    double lo = 0.0, hi = 0.0;
    for (int steps = opts.initial_steps; steps <= opts.max_steps; steps *= 2) {
        std::vector<double> rho(2 * static_cast<std::size_t>(steps) + 1);
        const double hh = (seg.b - seg.a) / (2.0 * steps);
        for (std::size_t j = 0; j < rho.size(); ++j) rho[j] = density(seg.a + hh * static_cast<double>(j));
        auto over = [&](double lam) { return overshoots(seg, rho, steps, p, lam); };
        if (!prev) {
            auto bracket_error = [&] {
                std::ostringstream os;
                os << "no eigenvalue bracket in [" << opts.lambda_lo << ", " << opts.lambda_hi << "]";
                fail(ErrorKind::bracket, os.str());
            };
            lo = std::clamp(1.0, opts.lambda_lo, opts.lambda_hi);
            if (over(lo)) {
                while (over(lo)) {
                    lo *= 0.5;
                    if (lo < opts.lambda_lo) bracket_error();
                }
                hi = 2.0 * lo;
            } else {
                hi = lo;
                while (!over(hi)) {
                    hi *= 2.0;
                    if (hi > opts.lambda_hi) bracket_error();
                }
                lo = 0.5 * hi;
            }
        } else {
            // Re-bracket near the previous level's value.
            double w = std::max(1e-6 * *prev, 4.0 * res.last_change * *prev);
            lo = *prev - w;
            hi = *prev + w;
            while (over(lo)) lo -= (w *= 2.0);
            while (!over(hi)) hi += (w *= 2.0);
        }
        const double lam = bisect(over, lo, hi);
        res.steps = steps;
        if (prev) {
            res.last_change = std::abs(lam - *prev) / lam;
            res.lambda = lam;
            if (res.last_change <= opts.rel_tol) {
                res.converged = true;
                return res;
            }
        } else {
            res.last_change = 1e-3;
        }
        res.lambda = lam;
        prev = lam;
    }
    return res;
}

/// Axis of reflection symmetry of the circle density, if any: 0 or L/4.
inline std::optional<double> circle_symmetry_center(const ModelSpace1D& space) {
    const double L = space.length();
    for (double c : {0.0, 0.25 * L}) {
        bool even = true;
        for (int k = 1; k <= 64 && even; ++k) {
            const double t = L * k / 129.0;
            const double a = space.density(c + t);
            const double b = space.density(c - t + L);
            even = std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
        }
        if (even) return c;
    }
    return std::nullopt;
}

}  // namespace detail

/// Independent ODE oracle for the first eigenvalue of the 1-d model.
inline ShootingResult shooting_eig(const ModelSpace1D& space, double p, const ShootingOptions& opts = {}) {
    require(p > 1.0 && std::isfinite(p), ErrorKind::invalid_argument, "p must lie in (1, inf)");
    auto density = [&space](double x) { return space.density(x); };
    const double off = kWarpedOffset * space.length();
    switch (space.kind()) {
        case SpaceKind::interval:
            return detail::shoot_segment({space.lo(), space.hi(), space.fixed_lo(), space.fixed_hi()}, density, p,
                                         opts);
        case SpaceKind::sphere:
            return detail::shoot_segment({space.lo() + off, space.hi() - off, false, false}, density, p, opts);
        case SpaceKind::ball:
            return detail::shoot_segment({space.lo() + off, space.hi(), false, true}, density, p, opts);
        case SpaceKind::circle: {
            const auto c = detail::circle_symmetry_center(space);
            require(c.has_value(), ErrorKind::unsupported,
                    "circle shooting needs a density even about 0 or L/4");
            const double half = 0.5 * space.length();
            const auto even = detail::shoot_segment({*c, *c + half, false, false}, density, p, opts);
            const auto odd = detail::shoot_segment({*c, *c + half, true, true}, density, p, opts);
            return even.lambda <= odd.lambda ? even : odd;
        }
    }
    fail(ErrorKind::unsupported, "unsupported space");
}

}  // namespace plap::eigen
