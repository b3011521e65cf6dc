#pragma once

#include "plap/geometry/boundary.hpp"
#include "plap/geometry/calculus.hpp"
#include "plap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace plap::identities {

using geometry::Chart;
using geometry::kDegenerateGradient;

/// x ↦ |∇u|^p as a computed field. Its jets are exact to order 2 (they are
/// built from the order-3 jet of u); the order-3 slots are zero.
inline ScalarField grad_power_field(const Chart& chart, const ScalarField& u, double p) {
    require(p >= 2.0, ErrorKind::invalid_argument, "|∇u|^p field is only built for p >= 2");
    return ScalarField::computed("|grad(" + u.str() + ")|^p", [chart, u, p](std::span<const double> x) {
        const auto m = geometry::metric_jets(chart, x);
        const auto gj = geometry::gradient_jets(m, u.jet(x));
        if (p == 2.0) return gj.w.truncated(2);
        require(gj.w.value() > kDegenerateGradient, ErrorKind::degenerate_gradient,
                "|∇u|² = " + std::to_string(gj.w.value()) + " at " + geometry::detail::point_str(x));
        return pow(gj.w, p / 2.0).truncated(2);
    });
}

/// x ↦ Δ_{p,f}u as a computed field whose jets are exact to order 1.
inline ScalarField p_laplacian_field(const Chart& chart, const ScalarField& f, double p, const ScalarField& u) {
    return ScalarField::computed("Δ_p,f(" + u.str() + ")", [chart, f, p, u](std::span<const double> x) {
        const auto m = geometry::metric_jets(chart, x);
        const auto gj = geometry::gradient_jets(m, u.jet(x));
        return geometry::p_laplacian_jet(m, gj, f.jet(x), p);
    });
}

struct Linearized {
    double curly = 0.0;     // full linearization, first-order terms included
    double straight = 0.0;  // second-order part only
};

/// Linearized weighted p-Laplacian at u applied to psi, evaluated at x.
inline Linearized linearized_apply(const Chart& chart, const ScalarField& f, double p, const ScalarField& u,
                                   const ScalarField& psi, std::span<const double> x) {
    const auto c = geometry::covariant_data(chart, u, f, p, x);
    const auto m = geometry::metric_jets(chart, x);
    const Jet pj = psi.jet(x);
    const Jet fj = f.jet(x);
    const int n = chart.dim();

    geometry::Vec dpsi{};
    for (int i = 0; i < n; ++i) dpsi[i] = pj.d(i);
    double lap_f_psi = 0.0;
    double hess_psi_gg = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double h = pj.d(i, j);
            for (int k = 0; k < n; ++k) h -= m.gamma[k][i][j].value() * dpsi[k];
            const double gij = m.ginv[i][j].value();
            lap_f_psi += gij * (h - fj.d(i) * dpsi[j]);
            hess_psi_gg += h * c.grad_u[i] * c.grad_u[j];
        }
    }
    Linearized out;
    if (p == 2.0) {
        out.straight = out.curly = lap_f_psi;
        return out;
    }
    const double w = c.w;
    out.straight = std::pow(w, p / 2.0 - 1.0) * lap_f_psi + (p - 2.0) * std::pow(w, p / 2.0 - 2.0) * hess_psi_gg;

    const double plap = std::pow(w, p / 2.0 - 1.0) * (c.lap_f_u + (p - 2.0) * *c.delta_inf_u);
    double gu_gpsi = 0.0;
    for (int i = 0; i < n; ++i) gu_gpsi += c.grad_u[i] * dpsi[i];
    // V = ∇psi - ∇u <∇u, ∇psi>/w, contravariant
    geometry::Vec v{};
    for (int j = 0; j < n; ++j) {
        double gpsi = 0.0;
        for (int k = 0; k < n; ++k) gpsi += m.ginv[j][k].value() * dpsi[k];
        v[j] = gpsi - c.grad_u[j] * gu_gpsi / w;
    }
    double hess_u_gv = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) hess_u_gv += c.hess_u[i][j] * c.grad_u[i] * v[j];
    out.curly = out.straight + (p - 2.0) * plap * gu_gpsi / w +
                2.0 * (p - 2.0) * std::pow(w, p / 2.0 - 2.0) * hess_u_gv;
    return out;
}

struct BochnerResidual {
    double lhs22 = 0.0;
    double rhs22 = 0.0;
    double lhs23 = 0.0;
    double rhs23 = 0.0;
    double res22 = 0.0;
    double res23 = 0.0;
    double scale = 0.0;
};

/// Both sides of the weighted p-Bochner identities at x.
///
/// The left sides differentiate the composed field |∇u|^p through jets and
/// apply the linearized operators; the right sides are assembled from the
/// covariant data, the Bakry-Emery tensor and the gradient of the composed
/// field Δ_{p,f}u. The two paths share only the metric jets.
inline BochnerResidual bochner_residual(const Chart& chart, const ScalarField& f, double p, const ScalarField& u,
                                        std::span<const double> x) {
    require(p >= 2.0, ErrorKind::invalid_argument, "Bochner identities are checked for p >= 2 only");
    const auto c = geometry::covariant_data(chart, u, f, p, x);
    require(c.w > kDegenerateGradient, ErrorKind::degenerate_gradient,
            "|∇u|² = " + std::to_string(c.w) + " at " + geometry::detail::point_str(x));
    const auto curv = geometry::curvature(chart, f, geometry::kInfinity, x);
    const int n = chart.dim();

    const auto lin = linearized_apply(chart, f, p, u, grad_power_field(chart, u, p), x);
    const Jet plap_jet = p_laplacian_field(chart, f, p, u).jet(x);

    double ric_f_uu = 0.0;
    double grad_plap_u = 0.0;
    for (int i = 0; i < n; ++i) {
        grad_plap_u += plap_jet.d(i) * c.grad_u[i];
        for (int j = 0; j < n; ++j) ric_f_uu += curv.ric_f[i][j] * c.grad_u[i] * c.grad_u[j];
    }
    const double dinf = *c.delta_inf_u;
    const double wa = std::pow(c.w, p - 2.0);
    const double wb = std::pow(c.w, p / 2.0 - 1.0);
    const double plap = wb * (c.lap_f_u + (p - 2.0) * dinf);

    const double t_hess = wa * c.hess_sq;
    const double t_inf = wa * p * (p - 2.0) * dinf * dinf;
    const double t_ric = wa * ric_f_uu;
    const double t_grad = wb * grad_plap_u;
    const double t_mix = wb * (p - 2.0) * dinf * plap;
    const double t_hess_a = wa * c.hess_sq_A;

    BochnerResidual r;
    r.lhs22 = lin.straight / p;
    r.lhs23 = lin.curly / p;
    r.rhs22 = t_hess + t_inf + t_ric + t_grad - t_mix;
    r.rhs23 = t_hess_a + t_ric + t_grad;
    for (double t : {t_hess, t_inf, t_ric, t_grad, t_mix, t_hess_a, r.lhs22, r.lhs23}) {
        r.scale = std::max(r.scale, std::abs(t));
    }
    const double norm = std::max(r.scale, 1.0);
    r.res22 = std::abs(r.lhs22 - r.rhs22) / norm;
    r.res23 = std::abs(r.lhs23 - r.rhs23) / norm;
    return r;
}

struct ClassicalBochner {
    double lhs = 0.0;  // ½ Δ_f |∇u|²
    double rhs = 0.0;  // |Hess u|² + Ric_f(∇u, ∇u) + <∇u, ∇Δ_f u>
};

/// The p = 2 weighted Bochner formula, computed without any p-dependent
/// machinery: Hessians and Ricci are formed directly from jets here.
inline ClassicalBochner classical_bochner(const Chart& chart, const ScalarField& f, const ScalarField& u,
                                          std::span<const double> x) {
    const auto m = geometry::metric_jets(chart, x);
    const int n = chart.dim();
    const Jet uj = u.jet(x);
    const Jet fj = f.jet(x);
    const auto gj = geometry::gradient_jets(m, uj);

    // Δ_f u as a jet valid to order 1.
    Jet lap_f_u(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lap_f_u += m.ginv[i][j] * (gj.hess[i][j] - fj.differentiate(i) * gj.du[j]);

    ClassicalBochner out;
    for (int i = 0; i < n; ++i) {
        out.rhs += gj.grad[i].value() * lap_f_u.d(i);
        for (int j = 0; j < n; ++j) {
            const double gij = m.ginv[i][j].value();
            double hw = gj.w.d(i, j);
            for (int k = 0; k < n; ++k) hw -= m.gamma[k][i][j].value() * gj.w.d(k);
            out.lhs += 0.5 * gij * (hw - fj.d(i) * gj.w.d(j));
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    out.rhs += gij * m.ginv[k][l].value() * gj.hess[i][k].value() * gj.hess[j][l].value();
        }
    }
    const auto curv = geometry::curvature(chart, f, geometry::kInfinity, x);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.rhs += curv.ric_f[i][j] * gj.grad[i].value() * gj.grad[j].value();
    return out;
}

enum class ReillyDomain {
    // Gauss-Legendre over the whole coordinate box; nodes never sit on a
    // singular axis. The boundary is the chart's physical boundary.
    full,
    // Cut a collar of width interior_offset around singular axes and add the
    // cut as an extra boundary component.
    shrunk,
};

struct ReillyOptions {
    int interior_nodes = 64;   // per axis
    int boundary_nodes = 256;  // per boundary segment
    ReillyDomain domain = ReillyDomain::full;
};

struct ReillyResidual {
    double interior_lhs = 0.0;
    double boundary_rhs = 0.0;
    double residual = 0.0;
    // p = 2 only: the boundary integral written with the doubled Δ_{∂,f}
    // term and no <∇_∂u, ∇_∂u_n> term.
    std::optional<double> remark_rhs;
    // max |interior integrand| times the weighted volume within the interior
    // offset of singular axes.
    double collar_bound = 0.0;
    int interior_nodes = 0;  // total
    int boundary_nodes = 0;  // total
    double min_w = 0.0;
};

namespace detail {

inline QuadratureRule axis_rule(const Chart& chart, int a, int n, bool shrink) {
    const auto& ax = chart.axis(a);
    if (ax.periodic) return periodic_trapezoid(n, ax.lo, ax.hi);
    if (shrink) {
        const auto [lo, hi] = chart.interior_range(a);
        return gauss_legendre(n, lo, hi);
    }
    return gauss_legendre(n, ax.lo, ax.hi);
}

inline double volume_element(const geometry::MetricJets& m) {
    if (m.dim == 1) return std::sqrt(m.g[0][0].value());
    return std::sqrt(m.g[0][0].value() * m.g[1][1].value() - m.g[0][1].value() * m.g[0][1].value());
}

inline void for_each_node(const Chart& chart, int nodes, bool shrink,
                          const std::function<void(std::span<const double>, double)>& visit) {
    if (chart.dim() == 1) {
        const auto r0 = axis_rule(chart, 0, nodes, shrink);
        for (std::size_t i = 0; i < r0.size(); ++i) {
            const double x[1] = {r0.nodes[i]};
            visit(x, r0.weights[i]);
        }
        return;
    }
    const auto r0 = axis_rule(chart, 0, nodes, shrink);
    const auto r1 = axis_rule(chart, 1, nodes, shrink);
    for (std::size_t i = 0; i < r0.size(); ++i) {
        for (std::size_t j = 0; j < r1.size(); ++j) {
            const double x[2] = {r0.nodes[i], r1.nodes[j]};
            visit(x, r0.weights[i] * r1.weights[j]);
        }
    }
}

}  // namespace detail

/// Integrated weighted p-Reilly identity on a chart with boundary: the
/// interior integral of (Δ_{p,f}u)² - |∇u|^{2p-4}(|Hess u|²_A + Ric_f(∇u,∇u))
/// against dμ versus the boundary integral against dσ.
inline ReillyResidual reilly_residual(const Chart& chart, const ScalarField& f, double p, const ScalarField& u,
                                      const ReillyOptions& opts = {}) {
    require(chart.has_boundary(), ErrorKind::invalid_argument, "chart " + chart.name() + " has no boundary");
    require(p >= 2.0, ErrorKind::invalid_argument, "Reilly identity is checked for p >= 2 only");
    require(opts.interior_nodes >= 2 && opts.boundary_nodes >= 2, ErrorKind::invalid_argument,
            "quadrature needs at least two nodes per axis");
    const bool shrink = opts.domain == ReillyDomain::shrunk;
    const int n = chart.dim();

    ReillyResidual out;
    out.min_w = std::numeric_limits<double>::infinity();
    double max_integrand = 0.0;
    int node_index = 0;
    detail::for_each_node(chart, opts.interior_nodes, shrink, [&](std::span<const double> x, double weight) {
        geometry::CovariantData c;
        try {
            c = geometry::covariant_data(chart, u, f, p, x);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::degenerate_gradient) throw;
            fail(ErrorKind::degenerate_gradient,
                 "interior node " + std::to_string(node_index) + " " + geometry::detail::point_str(x) + ": " + e.what());
        }
        const auto curv = geometry::curvature(chart, f, geometry::kInfinity, x);
        const auto m = geometry::metric_jets(chart, x);
        double ric = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) ric += curv.ric_f[i][j] * c.grad_u[i] * c.grad_u[j];
        const double plap =
            p == 2.0 ? c.lap_f_u : std::pow(c.w, p / 2.0 - 1.0) * (c.lap_f_u + (p - 2.0) * *c.delta_inf_u);
        const double integrand = plap * plap - std::pow(c.w, p - 2.0) * (c.hess_sq_A + ric);
        max_integrand = std::max(max_integrand, std::abs(integrand));
        out.min_w = std::min(out.min_w, c.w);
        out.interior_lhs += weight * integrand * std::exp(-f(x)) * detail::volume_element(m);
        ++node_index;
    });
    out.interior_nodes = node_index;

    const auto segments = shrink ? chart.integration_boundary() : chart.boundary();
    double remark = 0.0;
    for (const auto& seg : segments) {
        auto visit = [&](double s, double weight) {
            const auto bd = geometry::boundary_tangential(chart, f, u, seg, s);
            const std::span<const double> xs(bd.point.data(), static_cast<std::size_t>(n));
            const auto m = geometry::metric_jets(chart, xs);
            const auto gj = geometry::gradient_jets(m, u.jet(xs));
            const double w = gj.w.value();
            require(p == 2.0 || w > kDegenerateGradient, ErrorKind::degenerate_gradient,
                    "boundary node " + geometry::detail::point_str(xs) + " has |∇u|² = " + std::to_string(w));
            const double dsigma = weight * std::exp(-f(xs)) * bd.line_element;
            const double ii_uu = bd.ii * bd.grad_bdy_u * bd.grad_bdy_u;
            out.boundary_rhs += dsigma * std::pow(w, p - 2.0) *
                                ((bd.H_f * bd.u_n + bd.lap_bdy_f_u) * bd.u_n + ii_uu - bd.grad_bdy_u * bd.grad_bdy_un);
            remark += dsigma * ((bd.H_f * bd.u_n + 2.0 * bd.lap_bdy_f_u) * bd.u_n + ii_uu);
            ++out.boundary_nodes;
        };
        if (n == 1) {
            visit(0.0, 1.0);
            continue;
        }
        const int run = 1 - seg.fixed_axis;
        const auto rule = detail::axis_rule(chart, run, opts.boundary_nodes, shrink);
        for (std::size_t k = 0; k < rule.size(); ++k) visit(rule.nodes[k], rule.weights[k]);
    }
    if (p == 2.0) out.remark_rhs = remark;

    // Weighted volume of the collars around singular axes.
    double collar_volume = 0.0;
    for (int a = 0; a < n; ++a) {
        const auto& ax = chart.axis(a);
        for (int side = 0; side < 2; ++side) {
            if ((side == 0 && !ax.singular_lo) || (side == 1 && !ax.singular_hi)) continue;
            const double lo = side == 0 ? ax.lo : ax.hi - chart.interior_offset();
            const auto strip = gauss_legendre(8, lo, lo + chart.interior_offset());
            const auto other = detail::axis_rule(chart, 1 - a, opts.interior_nodes, false);
            for (std::size_t i = 0; i < strip.size(); ++i) {
                for (std::size_t j = 0; j < other.size(); ++j) {
                    double x[2];
                    x[a] = strip.nodes[i];
                    x[1 - a] = other.nodes[j];
                    const auto m = geometry::metric_jets(chart, x);
                    collar_volume += strip.weights[i] * other.weights[j] * std::exp(-f(x)) * detail::volume_element(m);
                }
            }
        }
    }
    out.collar_bound = max_integrand * collar_volume;
    out.residual = std::abs(out.interior_lhs - out.boundary_rhs) /
                   std::max({std::abs(out.interior_lhs), std::abs(out.boundary_rhs), 1.0});
    return out;
}

}  // namespace plap::identities
