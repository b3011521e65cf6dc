#pragma once

#include "plap/geometry/calculus.hpp"

namespace plap::geometry {

/// Boundary quantities at one boundary point. In 2-d the boundary is a curve
/// with unit tangent T, so II is the single number II(T, T) and tangential
/// gradients are components along T. In 1-d the boundary is a point: II and
/// H vanish and all tangential quantities are zero.
struct BoundaryData {
    Vec point{};
    Vec normal{};   // outward unit normal, contravariant
    Vec tangent{};  // unit tangent, contravariant (zero in 1-d)
    double line_element = 1.0;  // √h, with h the induced metric in the running coordinate
    double ii = 0.0;
    double H = 0.0;
    double H_f = 0.0;
    // Field part; zero when only the geometry was requested.
    double u_n = 0.0;
    double grad_bdy_u = 0.0;
    double lap_bdy_u = 0.0;
    double lap_bdy_f_u = 0.0;
    double grad_bdy_un = 0.0;
};

namespace detail {

inline Vec boundary_point(const Chart& chart, const BoundarySegment& seg, double s) {
    Vec x{};
    x[seg.fixed_axis] = seg.value;
    if (chart.dim() == 2) x[1 - seg.fixed_axis] = s;
    return x;
}

struct BoundaryJets {
    MetricJets m;
    JVec normal{};  // valid to order 3
};

inline BoundaryJets boundary_jets(const Chart& chart, const BoundarySegment& seg, const Vec& x) {
    BoundaryJets b{metric_jets(chart, std::span<const double>(x.data(), static_cast<std::size_t>(chart.dim()))), {}};
    const int n = chart.dim();
    const int k = seg.fixed_axis;
    // n^a = ± g^{ak} / sqrt(g^{kk}): the normalized gradient of the fixed coordinate.
    const Jet inv_len = pow(b.m.ginv[k][k], -0.5);
    for (int a = 0; a < n; ++a) b.normal[a] = b.m.ginv[a][k] * inv_len * static_cast<double>(seg.outward);
    return b;
}

}  // namespace detail

/// n, II, H and H_f = H - <∇f, n> at boundary parameter s of `seg`.
inline BoundaryData boundary_geometry(const Chart& chart, const ScalarField& f, const BoundarySegment& seg,
                                      double s) {
    require(chart.has_boundary() || seg.collar, ErrorKind::invalid_argument,
            "chart " + chart.name() + " has no boundary");
    const int n = chart.dim();
    const Vec x = detail::boundary_point(chart, seg, s);
    const auto b = detail::boundary_jets(chart, seg, x);
    const Jet fj = f.jet(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
    BoundaryData d;
    d.point = x;
    for (int a = 0; a < n; ++a) d.normal[a] = b.normal[a].value();
    if (n == 2) {
        const int j = 1 - seg.fixed_axis;
        const double h = b.m.g[j][j].value();
        d.line_element = std::sqrt(h);
        d.tangent[j] = 1.0 / d.line_element;
        // (∇_T n)^a = T^j (∂_j n^a + Γ^a_{jc} n^c)
        Vec dn{};
        for (int a = 0; a < n; ++a) {
            double v = b.normal[a].d(j);
            for (int c = 0; c < n; ++c) v += b.m.gamma[a][j][c].value() * d.normal[c];
            dn[a] = d.tangent[j] * v;
        }
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) d.ii += b.m.g[a][c].value() * dn[a] * d.tangent[c];
        d.H = d.ii;
    }
    double fn = 0.0;
    for (int a = 0; a < n; ++a) fn += d.normal[a] * fj.d(a);
    d.H_f = d.H - fn;
    return d;
}

/// Geometry plus the field quantities u_n, ∇_∂u, Δ_∂u, Δ_{∂,f}u and ∇_∂u_n.
inline BoundaryData boundary_tangential(const Chart& chart, const ScalarField& f, const ScalarField& u,
                                        const BoundarySegment& seg, double s) {
    BoundaryData d = boundary_geometry(chart, f, seg, s);
    const int n = chart.dim();
    const auto b = detail::boundary_jets(chart, seg, d.point);
    const std::span<const double> xs(d.point.data(), static_cast<std::size_t>(n));
    const Jet uj = u.jet(xs);
    const Jet fj = f.jet(xs);
    Jet un(n);
    for (int a = 0; a < n; ++a) un += b.normal[a] * uj.differentiate(a);
    d.u_n = un.value();
    if (n == 2) {
        const int j = 1 - seg.fixed_axis;
        const Jet& h = b.m.g[j][j];
        const double hv = h.value();
        const double us = uj.d(j);
        d.grad_bdy_u = us / std::sqrt(hv);
        d.lap_bdy_u = uj.d(j, j) / hv - h.d(j) * us / (2.0 * hv * hv);
        d.lap_bdy_f_u = d.lap_bdy_u - fj.d(j) * us / hv;
        d.grad_bdy_un = un.d(j) / std::sqrt(hv);
    }
    return d;
}

}  // namespace plap::geometry
