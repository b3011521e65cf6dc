#pragma once

#include "plap/eigen/minimize.hpp"
#include "plap/eigen/model_space.hpp"
#include "plap/geometry/boundary.hpp"
#include "plap/geometry/calculus.hpp"
#include "plap/geometry/chart.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace plap::bounds {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kBoundTol = 1e-6;

enum class PiMode { closed_form, quadrature };

/// Generalized π: 2π/(p sin(π/p)), or 2∫₀¹(1 - s^p)^{-1/p} ds by tanh-sinh
/// quadrature with the endpoint singularity evaluated from the distance to 1.
inline double pi_p(double p, PiMode mode = PiMode::closed_form) {
    require(p > 1.0 && std::isfinite(p), ErrorKind::invalid_argument, "pi_p needs p > 1");
    if (mode == PiMode::closed_form) return 2.0 * std::numbers::pi / (p * std::sin(std::numbers::pi / p));
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto integrand = [p](double s, double sc) {
        // sc is the distance from s to the nearer endpoint.
        const double one_minus = s > 0.5 ? -std::expm1(p * std::log1p(-sc)) : 1.0 - std::pow(s, p);
        return std::pow(one_minus, -1.0 / p);
    };
    return 2.0 * integrator.integrate(integrand, 0.0, 1.0, 1e-15);
}

/// C(p, m) = 2/(m+1) (p/(p-1))^{p-1} e^{-p}.
inline double c_pm(double p, double m) {
    return 2.0 / (m + 1.0) * std::pow(p / (p - 1.0), p - 1.0) * std::exp(-p);
}

/// Lichnerowicz-type bound (mK/(m-1))^{p/2}/(p-1)^{p-1}; K^{p/2}/(p-1)^{p-1}
/// for m = infinity.
inline double bound_lichnerowicz(double p, double m, double K) {
    require(p >= 2.0, ErrorKind::not_applicable, "requires p >= 2");
    require(K > 0.0, ErrorKind::not_applicable, "requires K > 0");
    require(std::isinf(m) || m > 1.0, ErrorKind::invalid_argument, "m must exceed 1");
    const double k_eff = std::isinf(m) ? K : m * K / (m - 1.0);
    return std::pow(k_eff, p / 2.0) / std::pow(p - 1.0, p - 1.0);
}

/// Li-Yau-type bound (p-1)(π_p/(2D))^p.
inline double bound_liyau(double p, double D) {
    require(p > 1.0, ErrorKind::invalid_argument, "p must exceed 1");
    require(D > 0.0, ErrorKind::invalid_argument, "D must be positive");
    return (p - 1.0) * std::pow(pi_p(p) / (2.0 * D), p);
}

/// Bound under Ric_f^m >= -K g: C(p,m) D^{-p} exp(-sqrt((m-1)K) D).
inline double bound_negative(double p, double m, double K, double D) {
    require(!std::isinf(m), ErrorKind::not_applicable, "requires finite m");
    require(p > 1.0 && m > 1.0 && K >= 0.0 && D > 0.0, ErrorKind::invalid_argument,
            "requires p > 1, m > 1, K >= 0, D > 0");
    return c_pm(p, m) * std::pow(D, -p) * std::exp(-std::sqrt((m - 1.0) * K) * D);
}

struct Hypotheses {
    double K_min = 0.0;
    double m = kInfinity;
    double D = 0.0;
    bool has_boundary = false;
    std::optional<double> Hf_min;
    std::optional<double> II_min;
    double p = 2.0;
    bool dirichlet = false;  // eigenvalue problem carries Dirichlet conditions
};

/// Smallest curvature eigenvalue over `samples` evenly spaced points of a 1-d
/// model (ends with vanishing density cut by the solver offset), plus the
/// boundary minima.
inline Hypotheses hypothesis_scan(const eigen::ModelSpace1D& space, double m, double p, int samples = 1000) {
    require(samples >= 64, ErrorKind::invalid_argument, "hypothesis scan needs at least 64 samples");
    space.validate_m(m);
    Hypotheses h;
    h.m = m;
    h.p = p;
    h.D = space.diameter();
    const double off = eigen::kWarpedOffset * space.length();
    const double a = space.singular_lo() ? space.lo() + off : space.lo();
    const double b = space.singular_hi() ? space.hi() - off : space.hi();
    h.K_min = std::numeric_limits<double>::infinity();
    const int count = space.periodic() ? samples : samples + 1;
    for (int k = 0; k < count; ++k) h.K_min = std::min(h.K_min, space.min_curvature(a + (b - a) * k / samples, m));
    h.has_boundary = space.has_boundary();
    h.dirichlet = space.bc() == eigen::BoundaryCondition::dirichlet;
    if (h.has_boundary) {
        for (const auto& e : space.boundary()) {
            h.Hf_min = std::min(h.Hf_min.value_or(kInfinity), e.H_f);
            h.II_min = std::min(h.II_min.value_or(kInfinity), e.ii);
        }
    }
    return h;
}

/// The same scan over a catalog chart: a samples x samples grid on the
/// interior box, and `samples` points on each boundary segment.
inline Hypotheses hypothesis_scan(const geometry::Chart& chart, const ScalarField& f, double m, double p,
                                  int samples = 128) {
    require(samples >= 64, ErrorKind::invalid_argument, "hypothesis scan needs at least 64 samples");
    geometry::validate_m(m, chart.dim(), f.is_constant());
    Hypotheses h;
    h.m = m;
    h.p = p;
    h.D = chart.diameter();
    h.K_min = std::numeric_limits<double>::infinity();
    auto axis_points = [&](int a) {
        const auto [lo, hi] = chart.interior_range(a);
        std::vector<double> pts;
        const bool periodic = chart.axis(a).periodic;
        const int count = periodic ? samples : samples + 1;
        for (int k = 0; k < count; ++k) pts.push_back(lo + (hi - lo) * k / samples);
        return pts;
    };
    const auto p0 = axis_points(0);
    if (chart.dim() == 1) {
        for (double x : p0) h.K_min = std::min(h.K_min, geometry::curvature(chart, f, m, std::vector<double>{x}).min_eig);
    } else {
        const auto p1 = axis_points(1);
        for (double x : p0)
            for (double y : p1)
                h.K_min = std::min(h.K_min, geometry::curvature(chart, f, m, std::vector<double>{x, y}).min_eig);
    }
    h.has_boundary = chart.has_boundary();
    for (const auto& seg : chart.boundary()) {
        std::vector<double> params{0.0};
        if (chart.dim() == 2) params = axis_points(1 - seg.fixed_axis);
        for (double s : params) {
            const auto bd = geometry::boundary_geometry(chart, f, seg, s);
            h.Hf_min = std::min(h.Hf_min.value_or(kInfinity), bd.H_f);
            h.II_min = std::min(h.II_min.value_or(kInfinity), bd.ii);
        }
    }
    return h;
}

enum class Theorem { t11_closed, t11_dirichlet, t11_neumann, t13_closed, t13_dirichlet, t13_neumann, t15 };

inline std::string to_string(Theorem t) {
    switch (t) {
        case Theorem::t11_closed: return "T1.1-closed";
        case Theorem::t11_dirichlet: return "T1.1-dirichlet";
        case Theorem::t11_neumann: return "T1.1-neumann";
        case Theorem::t13_closed: return "T1.3-closed";
        case Theorem::t13_dirichlet: return "T1.3-dirichlet";
        case Theorem::t13_neumann: return "T1.3-neumann";
        case Theorem::t15: return "T1.5";
    }
    return "?";
}

inline Theorem theorem_from_string(const std::string& s) {
    for (Theorem t : {Theorem::t11_closed, Theorem::t11_dirichlet, Theorem::t11_neumann, Theorem::t13_closed,
                      Theorem::t13_dirichlet, Theorem::t13_neumann, Theorem::t15})
        if (to_string(t) == s) return t;
    fail(ErrorKind::invalid_argument, "unknown theorem id '" + s + "'");
}

struct BoundReport {
    Theorem theorem = Theorem::t11_closed;
    bool applicable = false;
    std::string reason;  // failed gate, empty when applicable
    double rhs = 0.0;
    double lambda = 0.0;
    double margin = 0.0;
    bool pass = true;
};

namespace detail {

enum class Side { closed, dirichlet, neumann };

inline std::string boundary_gate(Side side, const Hypotheses& h) {
    switch (side) {
        case Side::closed: return h.has_boundary ? "boundary present" : "";
        case Side::dirichlet:
            if (!h.has_boundary) return "no boundary";
            return h.Hf_min.value_or(-kInfinity) >= 0.0 ? "" : "Hf_min < 0";
        case Side::neumann:
            if (!h.has_boundary) return "no boundary";
            return h.II_min.value_or(-kInfinity) >= 0.0 ? "" : "II_min < 0";
    }
    return "";
}

}  // namespace detail

/// Gates the theorem's hypotheses, evaluates its right-hand side and compares
/// with λ. Inapplicable reports pass vacuously and carry the failed gate.
inline BoundReport check_bound(Theorem t, const Hypotheses& h, double lambda) {
    using detail::Side;
    BoundReport r;
    r.theorem = t;
    r.lambda = lambda;
    std::string gate;
    auto side_of = [](Theorem th) {
        switch (th) {
            case Theorem::t11_dirichlet:
            case Theorem::t13_dirichlet: return Side::dirichlet;
            case Theorem::t11_neumann:
            case Theorem::t13_neumann: return Side::neumann;
            default: return Side::closed;
        }
    };
    switch (t) {
        case Theorem::t11_closed:
        case Theorem::t11_dirichlet:
        case Theorem::t11_neumann:
            if (h.p < 2.0) gate = "p < 2";
            else if (!(h.K_min > 0.0)) gate = "K_min <= 0";
            else gate = detail::boundary_gate(side_of(t), h);
            if (gate.empty()) r.rhs = bound_lichnerowicz(h.p, h.m, h.K_min);
            break;
        case Theorem::t13_closed:
        case Theorem::t13_dirichlet:
        case Theorem::t13_neumann:
            // Ric_f^m >= 0 for finite m implies Ric_f >= 0.
            if (!(h.K_min >= 0.0)) gate = "K_min < 0";
            else gate = detail::boundary_gate(side_of(t), h);
            if (gate.empty()) r.rhs = bound_liyau(h.p, h.D);
            break;
        case Theorem::t15:
            if (std::isinf(h.m)) gate = "m = infinity";
            else if (h.dirichlet) gate = "dirichlet problem";
            else if (h.has_boundary && h.II_min.value_or(-kInfinity) < 0.0) gate = "II_min < 0";
            if (gate.empty()) r.rhs = bound_negative(h.p, h.m, std::max(0.0, -h.K_min), h.D);
            break;
    }
    r.applicable = gate.empty();
    r.reason = gate;
    if (r.applicable) {
        r.margin = lambda - r.rhs;
        r.pass = r.margin >= -kBoundTol * std::max(std::abs(r.rhs), 1.0);
    }
    return r;
}

struct GradientEstimate {
    bool applicable = true;
    std::string reason;
    double maxF = 0.0;
    double bound = 0.0;
    bool pass = true;
};

/// max over cells of |u'|^p/(1 - |u|^p) against λ/(p-1) on a closed model.
/// u is flipped so that max u = 1 >= |min u|, then scaled by 1 - 1e-6; u' is
/// the cell difference quotient and |u| is taken at the cell midpoint.
inline GradientEstimate gradient_estimate_check(const eigen::ModelSpace1D& space, const eigen::Problem1D& pr,
                                                const eigen::EigenResult& res, double p) {
    GradientEstimate g;
    g.bound = res.lambda / (p - 1.0);
    if (!space.periodic()) {
        g.applicable = false;
        g.reason = "space is not closed";
        return g;
    }
    const auto hyp = hypothesis_scan(space, kInfinity, p);
    if (hyp.K_min < 0.0) {
        g.applicable = false;
        g.reason = "Ric_f < 0";
        return g;
    }
    std::vector<double> u = res.u;
    const auto [mn, mx] = std::minmax_element(u.begin(), u.end());
    const double top = std::abs(*mx) >= std::abs(*mn) ? *mx : *mn;
    if (top != 0.0) {
        for (double& v : u) v *= (1.0 - 1e-6) / top;
    }
    for (std::size_t c = 0; c < pr.cells(); ++c) {
        const std::size_t j = pr.right(c);
        const double du = (u[j] - u[c]) / pr.h;
        const double um = 0.5 * (u[j] + u[c]);
        g.maxF = std::max(g.maxF, std::pow(std::abs(du), p) / (1.0 - std::pow(std::abs(um), p)));
    }
    g.pass = g.maxF <= g.bound * (1.0 + 1e-3);
    return g;
}

}  // namespace plap::bounds
