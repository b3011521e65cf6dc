#pragma once

#include "plap/error.hpp"
#include "plap/field.hpp"
#include "plap/geometry/chart.hpp"
#include "plap/jet.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>

namespace plap::geometry {

using Vec = std::array<double, kMaxDim>;
using Mat = std::array<Vec, kMaxDim>;
using JVec = std::array<Jet, kMaxDim>;
using JMat = std::array<JVec, kMaxDim>;

/// Γ^k_ij stored as christoffel[k][i][j].
using Christoffel = std::array<Mat, kMaxDim>;

inline constexpr double kDegenerateGradient = 1e-12;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Metric data at a point, all as jets so that further derivatives can be
/// taken. Validity: g and ginv to order 3, dg and gamma to order 2.
struct MetricJets {
    int dim = 0;
    JMat g{};
    JMat ginv{};
    std::array<JMat, kMaxDim> dg{};     // dg[l][i][j] = ∂_l g_ij
    std::array<JMat, kMaxDim> gamma{};  // gamma[k][i][j] = Γ^k_ij
};

namespace detail {

inline std::string point_str(std::span<const double> x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(x[i]);
    }
    return s + ")";
}

inline void check_point(const Chart& chart, std::span<const double> x) {
    require(static_cast<int>(x.size()) == chart.dim(), ErrorKind::invalid_argument,
            "point dimension does not match chart " + chart.name());
}

}  // namespace detail

inline MetricJets metric_jets(const Chart& chart, std::span<const double> x) {
    detail::check_point(chart, x);
    const int n = chart.dim();
    MetricJets m;
    m.dim = n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            m.g[i][j] = chart.metric(i, j).jet(x);
        }
    }
    if (n == 1) {
        require(m.g[0][0].value() > 1e-20, ErrorKind::singular_point,
                "metric degenerates at " + detail::point_str(x) + " on " + chart.name());
        m.ginv[0][0] = recip(m.g[0][0]);
    } else {
        const Jet det = m.g[0][0] * m.g[1][1] - m.g[0][1] * m.g[0][1];
        require(det.value() > 1e-20, ErrorKind::singular_point,
                "metric degenerates at " + detail::point_str(x) + " on " + chart.name());
        const Jet inv = recip(det);
        m.ginv[0][0] = m.g[1][1] * inv;
        m.ginv[1][1] = m.g[0][0] * inv;
        m.ginv[0][1] = -(m.g[0][1] * inv);
        m.ginv[1][0] = m.ginv[0][1];
    }
    require(chart.contains(x), ErrorKind::invalid_argument,
            "point " + detail::point_str(x) + " lies outside the interior of " + chart.name());
    for (int l = 0; l < n; ++l) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                m.dg[l][i][j] = m.g[i][j].differentiate(l);
            }
        }
    }
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                Jet acc(n);
                for (int l = 0; l < n; ++l) {
                    acc += m.ginv[k][l] * (m.dg[i][j][l] + m.dg[j][i][l] - m.dg[l][i][j]);
                }
                m.gamma[k][i][j] = acc * 0.5;
            }
        }
    }
    return m;
}

/// Levi-Civita connection coefficients Γ^k_ij at x.
inline Christoffel christoffel(const Chart& chart, std::span<const double> x) {
    const MetricJets m = metric_jets(chart, x);
    Christoffel out{};
    for (int k = 0; k < m.dim; ++k)
        for (int i = 0; i < m.dim; ++i)
            for (int j = 0; j < m.dim; ++j) out[k][i][j] = m.gamma[k][i][j].value();
    return out;
}

/// Jets of first-order covariant quantities of u. Validity: du, grad and w
/// to order 2; d2u and hess to order 1.
struct GradientJets {
    int dim = 0;
    JVec du{};
    JMat d2u{};
    JVec grad{};
    Jet w;
    JMat hess{};
};

inline GradientJets gradient_jets(const MetricJets& m, const Jet& u) {
    const int n = m.dim;
    GradientJets gj;
    gj.dim = n;
    gj.w = Jet(n);
    for (int i = 0; i < n; ++i) gj.du[i] = u.differentiate(i);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gj.d2u[i][j] = gj.du[i].differentiate(j);
    for (int i = 0; i < n; ++i) {
        Jet acc(n);
        for (int j = 0; j < n; ++j) acc += m.ginv[i][j] * gj.du[j];
        gj.grad[i] = acc;
        gj.w += acc * gj.du[i];
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            Jet h = gj.d2u[i][j];
            for (int k = 0; k < n; ++k) h -= m.gamma[k][i][j] * gj.du[k];
            gj.hess[i][j] = h;
        }
    }
    return gj;
}

/// Δ_{p,f}u = w^{p/2-1}(Δ_f u + (p-2)Δ_∞u) as a jet valid to order 1.
inline Jet p_laplacian_jet(const MetricJets& m, const GradientJets& gj, const Jet& f, double p) {
    const int n = m.dim;
    Jet lap_f(n);
    Jet hess_gg(n);
    for (int i = 0; i < n; ++i) {
        const Jet fi = f.differentiate(i);
        for (int j = 0; j < n; ++j) {
            lap_f += m.ginv[i][j] * (gj.hess[i][j] - fi * gj.du[j]);
            hess_gg += gj.hess[i][j] * gj.grad[i] * gj.grad[j];
        }
    }
    if (p == 2.0) return lap_f.truncated(1);
    require(gj.w.value() > kDegenerateGradient, ErrorKind::degenerate_gradient,
            "|∇u|² = " + std::to_string(gj.w.value()) + " is below the degenerate-gradient threshold");
    return (pow(gj.w, p / 2.0 - 1.0) * lap_f + (p - 2.0) * pow(gj.w, p / 2.0 - 2.0) * hess_gg).truncated(1);
}

struct CovariantData {
    int dim = 0;
    Vec du{};       // covariant components u_i
    Vec grad_u{};   // contravariant components u^i
    double w = 0.0; // |∇u|²
    Mat hess_u{};
    double lap_u = 0.0;
    double lap_f_u = 0.0;
    std::optional<double> delta_inf_u;  // defined only when w > threshold
    double hess_sq = 0.0;
    double hess_sq_A = 0.0;
    // ∇w as covariant components and the two scalars built from it.
    Vec dw{};
    double grad_w_sq = 0.0;
    double grad_u_dot_grad_w = 0.0;
};

/// Pointwise covariant quantities of u for the weighted p-Laplacian with
/// weight e^{-f}. For p != 2 a gradient below `threshold` is an error.
inline CovariantData covariant_data(const Chart& chart, const ScalarField& u, const ScalarField& f, double p,
                                    std::span<const double> x, double threshold = kDegenerateGradient) {
    const MetricJets m = metric_jets(chart, x);
    const Jet uj = u.jet(x);
    const Jet fj = f.jet(x);
    const GradientJets gj = gradient_jets(m, uj);
    const int n = m.dim;
    CovariantData c;
    c.dim = n;
    c.w = gj.w.value();
    for (int i = 0; i < n; ++i) {
        c.du[i] = gj.du[i].value();
        c.grad_u[i] = gj.grad[i].value();
        for (int j = 0; j < n; ++j) c.hess_u[i][j] = gj.hess[i][j].value();
    }
    Vec df{};
    for (int i = 0; i < n; ++i) df[i] = fj.d(i);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double gij = m.ginv[i][j].value();
            c.lap_u += gij * c.hess_u[i][j];
            c.lap_f_u -= gij * df[i] * c.du[j];
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    c.hess_sq += gij * m.ginv[k][l].value() * c.hess_u[i][k] * c.hess_u[j][l];
        }
    }
    c.lap_f_u += c.lap_u;
    // ∇_i w = 2 u^k u_ki
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += 2.0 * c.grad_u[k] * c.hess_u[k][i];
        c.dw[i] = s;
    }
    for (int i = 0; i < n; ++i) {
        c.grad_u_dot_grad_w += c.grad_u[i] * c.dw[i];
        for (int j = 0; j < n; ++j) c.grad_w_sq += m.ginv[i][j].value() * c.dw[i] * c.dw[j];
    }
    if (c.w > threshold) {
        double hgg = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) hgg += c.hess_u[i][j] * c.grad_u[i] * c.grad_u[j];
        c.delta_inf_u = hgg / c.w;
        c.hess_sq_A = c.hess_sq + (p - 2.0) / 2.0 * c.grad_w_sq / c.w +
                      (p - 2.0) * (p - 2.0) / 4.0 * c.grad_u_dot_grad_w * c.grad_u_dot_grad_w / (c.w * c.w);
    } else {
        require(p == 2.0, ErrorKind::degenerate_gradient,
                "|∇u|² = " + std::to_string(c.w) + " at " + detail::point_str(x) +
                    " is below the degenerate-gradient threshold");
        c.hess_sq_A = c.hess_sq;
    }
    return c;
}

/// Weighted p-Laplacian Δ_{p,f}u at x.
inline double p_laplacian(const Chart& chart, const ScalarField& f, double p, const ScalarField& u,
                          std::span<const double> x) {
    const CovariantData c = covariant_data(chart, u, f, p, x);
    if (p == 2.0) return c.lap_f_u;
    return std::pow(c.w, p / 2.0 - 1.0) * (c.lap_f_u + (p - 2.0) * *c.delta_inf_u);
}

/// Smallest λ with det(S - λ g) = 0 for symmetric S and SPD g.
inline double min_generalized_eigenvalue(const Mat& s, const Mat& g, int dim) {
    if (dim == 1) return s[0][0] / g[0][0];
    const double a = g[0][0] * g[1][1] - g[0][1] * g[0][1];
    const double b = s[0][0] * g[1][1] + s[1][1] * g[0][0] - 2.0 * s[0][1] * g[0][1];
    const double c = s[0][0] * s[1][1] - s[0][1] * s[0][1];
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    const double root = std::sqrt(disc);
    // Stable pairing of the two roots.
    const double q = -0.5 * (-b + (b >= 0.0 ? -root : root));
    const double r1 = q / a;
    const double r2 = q != 0.0 ? c / q : r1;
    return std::min(r1, r2);
}

struct CurvatureData {
    int dim = 0;
    Mat ric{};
    Mat ric_f{};
    Mat ric_fm{};
    double min_eig = 0.0;
};

/// Checks the dimension parameter m of Ric_f^m against the chart dimension.
/// m equal to the dimension is accepted only for constant f, where Ric_f^m
/// reduces to Ric.
inline void validate_m(double m, int dim, bool f_constant) {
    if (std::isinf(m)) {
        require(m > 0, ErrorKind::invalid_argument, "m must be +infinity or finite > dim");
        return;
    }
    require(m > dim || (m == dim && f_constant), ErrorKind::invalid_argument,
            "m = " + std::to_string(m) + " must exceed the dimension " + std::to_string(dim) +
                " (or equal it for constant f)");
}

/// Ric, Ric_f = Ric + Hess f and Ric_f^m = Ric_f - df⊗df/(m-n) at x, with
/// the smallest eigenvalue of Ric_f^m relative to g. Pass m = kInfinity for
/// the Bakry-Emery tensor without the m-term.
inline CurvatureData curvature(const Chart& chart, const ScalarField& f, double m, std::span<const double> x) {
    validate_m(m, chart.dim(), f.is_constant());
    const MetricJets mj = metric_jets(chart, x);
    const int n = mj.dim;
    const Jet fj = f.jet(x);
    CurvatureData c;
    c.dim = n;
    Mat g{};
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            g[i][j] = mj.g[i][j].value();
            double r = 0.0;
            for (int k = 0; k < n; ++k) {
                r += mj.gamma[k][i][j].d(k) - mj.gamma[k][k][j].d(i);
                for (int l = 0; l < n; ++l) {
                    r += mj.gamma[k][k][l].value() * mj.gamma[l][i][j].value() -
                         mj.gamma[k][i][l].value() * mj.gamma[l][k][j].value();
                }
            }
            c.ric[i][j] = r;
            double hf = fj.d(i, j);
            for (int k = 0; k < n; ++k) hf -= mj.gamma[k][i][j].value() * fj.d(k);
            c.ric_f[i][j] = r + hf;
            c.ric_fm[i][j] = c.ric_f[i][j];
            if (!std::isinf(m) && m > n) c.ric_fm[i][j] -= fj.d(i) * fj.d(j) / (m - n);
        }
    }
    c.min_eig = min_generalized_eigenvalue(c.ric_fm, g, n);
    return c;
}

}  // namespace plap::geometry
