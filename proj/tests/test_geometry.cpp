#include "plap/geometry/boundary.hpp"
#include "plap/geometry/calculus.hpp"
#include "plap/geometry/chart.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace {

using namespace plap;
using namespace plap::geometry;
constexpr double pi = std::numbers::pi;

ScalarField parse(const Chart& c, const std::string& s) { return c.parser().parse(s); }

std::vector<double> random_interior(const Chart& c, std::mt19937_64& rng) {
    std::vector<double> x;
    for (int a = 0; a < c.dim(); ++a) {
        auto [lo, hi] = c.interior_range(a);
        const double pad = 0.05 * (hi - lo);
        std::uniform_real_distribution<double> U(lo + pad, hi - pad);
        x.push_back(U(rng));
    }
    return x;
}

}  // namespace

TEST(Field, PlainEvaluationMatchesJetValue) {
    const FieldParser p({"x", "y"});
    const ScalarField u = p.parse("sin(x)*exp(y) + x^3 - 2*cos(y)/(1+x^2) + pow(2+x,0.5) + log(3+y)");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const std::vector<double> x{U(rng), U(rng)};
        const double plain = u(x);
        EXPECT_NEAR(u.jet(x).value(), plain, 1e-14 * std::max(1.0, std::abs(plain)));
    }
}

TEST(Field, ParserRejectsUnknownNames) {
    const FieldParser p({"x"});
    EXPECT_THROW(p.parse("y + 1"), Error);
    EXPECT_THROW(p.parse("tan(x)"), Error);
    EXPECT_THROW(p.parse("x^x"), Error);
    EXPECT_THROW(p.parse("(x"), Error);
}

TEST(Field, ParserConstantsFold) {
    const FieldParser p({"x"});
    const ScalarField c = p.parse("2*pi - 3");
    ASSERT_TRUE(c.is_constant());
    EXPECT_DOUBLE_EQ(c.constant_value(), 2 * pi - 3);
}

TEST(Chart, CatalogMetricsArePositiveDefinite) {
    std::mt19937_64 rng(41);
    for (ChartId id : {ChartId::euclidean_plane, ChartId::flat_torus, ChartId::sphere2, ChartId::disk_polar,
                       ChartId::hemisphere2, ChartId::line1d, ChartId::circle1d}) {
        const Chart c = make_chart(id);
        for (int k = 0; k < 10; ++k) {
            const auto x = random_interior(c, rng);
            const auto m = metric_jets(c, x);
            Mat g{};
            Mat id_m{};
            for (int i = 0; i < c.dim(); ++i) {
                id_m[i][i] = 1.0;
                for (int j = 0; j < c.dim(); ++j) g[i][j] = m.g[i][j].value();
            }
            EXPECT_GT(min_generalized_eigenvalue(g, id_m, c.dim()), 0.0) << c.name();
        }
        for (const auto& ax : c.axes()) {
            if (ax.periodic) {
                EXPECT_GT(ax.extent(), 0.0);
            }
        }
        EXPECT_EQ(chart_id_from_string(c.name()), id);
    }
    EXPECT_THROW(chart_id_from_string("klein_bottle"), Error);
}

TEST(Christoffel, FlatPlaneVanishes) {
    const Chart c = make_chart(ChartId::euclidean_plane);
    const auto g = christoffel(c, std::vector<double>{0.3, -1.1});
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) EXPECT_EQ(g[k][i][j], 0.0);
}

TEST(Christoffel, SphereAtSixtyDegrees) {
    const Chart c = make_chart(ChartId::sphere2);
    const auto g = christoffel(c, std::vector<double>{pi / 3, 0.4});
    EXPECT_NEAR(g[0][1][1], -std::sin(pi / 3) * std::cos(pi / 3), 1e-14);
    EXPECT_NEAR(g[0][1][1], -0.43301, 1e-5);
    EXPECT_NEAR(g[1][0][1], 0.57735, 1e-5);
    EXPECT_NEAR(g[1][1][0], g[1][0][1], 1e-15);
}

TEST(Christoffel, DiskPolar) {
    const Chart c = make_chart(ChartId::disk_polar);
    const auto g = christoffel(c, std::vector<double>{0.5, 1.0});
    EXPECT_NEAR(g[0][1][1], -0.5, 1e-14);
    EXPECT_NEAR(g[1][0][1], 2.0, 1e-14);
}

TEST(Christoffel, SingularPointErrors) {
    const Chart c = make_chart(ChartId::sphere2);
    try {
        christoffel(c, std::vector<double>{0.0, 1.0});
        ADD_FAILURE() << "pole accepted";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::singular_point);
    }
    EXPECT_THROW(christoffel(make_chart(ChartId::disk_polar), std::vector<double>{0.0, 0.0}), Error);
}

TEST(CovariantData, QuadraticInThePlane) {
    const Chart c = make_chart(ChartId::euclidean_plane);
    const auto d = covariant_data(c, parse(c, "x^2 + y^2"), ScalarField::constant(0), 3.0, std::vector<double>{1, 1});
    EXPECT_NEAR(d.grad_u[0], 2, 1e-14);
    EXPECT_NEAR(d.grad_u[1], 2, 1e-14);
    EXPECT_NEAR(d.hess_u[0][0], 2, 1e-14);
    EXPECT_NEAR(d.hess_u[0][1], 0, 1e-14);
    EXPECT_NEAR(d.lap_u, 4, 1e-14);
    EXPECT_NEAR(d.w, 8, 1e-14);
}

TEST(CovariantData, SphericalHarmonic) {
    const Chart c = make_chart(ChartId::sphere2);
    const auto d = covariant_data(c, parse(c, "cos(theta)"), ScalarField::constant(0), 2.0,
                                  std::vector<double>{pi / 4, 2.0});
    EXPECT_NEAR(d.lap_u, -2 * std::cos(pi / 4), 1e-13);
    EXPECT_NEAR(d.lap_u, -1.41421, 1e-5);
}

TEST(CovariantData, LinearFunctionHasNoSecondOrderTerms) {
    const Chart c = make_chart(ChartId::euclidean_plane);
    for (double p : {2.0, 3.0, 4.5}) {
        const auto d = covariant_data(c, parse(c, "x"), ScalarField::constant(0), p, std::vector<double>{0.2, 0.7});
        ASSERT_TRUE(d.delta_inf_u.has_value());
        EXPECT_EQ(*d.delta_inf_u, 0.0);
        EXPECT_EQ(d.hess_sq_A, 0.0);
    }
}

TEST(CovariantData, DegenerateGradient) {
    const Chart c = make_chart(ChartId::euclidean_plane);
    const auto u = parse(c, "x^2 + y^2");
    try {
        covariant_data(c, u, ScalarField::constant(0), 3.0, std::vector<double>{0, 0});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate_gradient);
    }
    const auto d = covariant_data(c, u, ScalarField::constant(0), 2.0, std::vector<double>{0, 0});
    EXPECT_FALSE(d.delta_inf_u.has_value());
    EXPECT_EQ(d.hess_sq_A, d.hess_sq);
}

TEST(CovariantData, Invariants) {
    std::mt19937_64 rng(43);
    for (ChartId id : {ChartId::sphere2, ChartId::disk_polar, ChartId::flat_torus}) {
        const Chart c = make_chart(id);
        const auto names = c.coordinate_names();
        const auto u = parse(c, "sin(" + names[0] + ") + 0.5*cos(2*" + names[1] + ") + " + names[0] + "*" + names[1]);
        const auto f = parse(c, "0.3*cos(" + names[1] + ")");
        for (int k = 0; k < 10; ++k) {
            const auto x = random_interior(c, rng);
            const auto m = metric_jets(c, x);
            for (double p : {2.0, 3.0, 4.0}) {
                const auto d = covariant_data(c, u, f, p, x);
                double w = 0, tr = 0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        w += m.ginv[i][j].value() * d.du[i] * d.du[j];
                        tr += m.ginv[i][j].value() * d.hess_u[i][j];
                    }
                EXPECT_NEAR(d.w, w, 1e-13);
                EXPECT_GE(d.w, 0.0);
                EXPECT_NEAR(d.lap_u, tr, 1e-12);
                if (p == 2.0) {
                    EXPECT_EQ(d.hess_sq_A, d.hess_sq);
                } else {
                    EXPECT_GE(d.hess_sq_A, d.hess_sq - 1e-12);
                }
            }
        }
    }
}

TEST(PLaplacian, Examples) {
    const Chart plane = make_chart(ChartId::euclidean_plane);
    EXPECT_NEAR(p_laplacian(plane, ScalarField::constant(0), 3.0, parse(plane, "x"), std::vector<double>{0.5, 0.5}),
                0.0, 1e-15);
    const Chart line = make_chart(ChartId::line1d);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        for (double x : {-0.6, 0.25, 0.9}) {
            EXPECT_NEAR(p_laplacian(line, parse(line, "x^2/2"), p, parse(line, "x"), std::vector<double>{x}), -x,
                        1e-14);
        }
    }
    const Chart s2 = make_chart(ChartId::sphere2);
    EXPECT_NEAR(p_laplacian(s2, ScalarField::constant(0), 2.0, parse(s2, "cos(theta)"),
                            std::vector<double>{pi / 2, 0.1}),
                0.0, 1e-15);
}

TEST(PLaplacian, DivergenceFormOracle) {
    // On the line Δ_{p,f}u = e^f (e^{-f} |u'|^{p-2} u')'; compare against a
    // hand-differentiated closed form for u = sin x + 2x, f = x^2/2.
    const Chart line = make_chart(ChartId::line1d);
    const auto u = parse(line, "sin(x) + 2*x");
    const auto f = parse(line, "x^2/2");
    for (double p : {2.0, 2.5, 3.0}) {
        for (double x : {-0.7, 0.1, 0.8}) {
            const double up = std::cos(x) + 2.0;
            const double upp = -std::sin(x);
            const double want = (p - 1.0) * std::pow(up, p - 2.0) * upp - x * std::pow(up, p - 1.0);
            EXPECT_NEAR(p_laplacian(line, f, p, u, std::vector<double>{x}), want, 1e-13);
        }
    }
}

TEST(Curvature, Examples) {
    const Chart s2 = make_chart(ChartId::sphere2);
    const auto c1 = curvature(s2, ScalarField::constant(0), 2.0, std::vector<double>{1.0, 0.3});
    const auto m = metric_jets(s2, std::vector<double>{1.0, 0.3});
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(c1.ric[i][j], m.g[i][j].value(), 1e-12);
    EXPECT_NEAR(c1.min_eig, 1.0, 1e-12);

    const Chart plane = make_chart(ChartId::euclidean_plane);
    const auto c2 = curvature(plane, parse(plane, "(x^2+y^2)/2"), kInfinity, std::vector<double>{0.4, -0.2});
    EXPECT_NEAR(c2.ric_f[0][0], 1, 1e-14);
    EXPECT_NEAR(c2.ric_f[0][1], 0, 1e-14);
    EXPECT_NEAR(c2.min_eig, 1, 1e-14);

    const Chart line = make_chart(ChartId::line1d);
    const auto c3 = curvature(line, parse(line, "x^2/2"), 3.0, std::vector<double>{1.0});
    EXPECT_NEAR(c3.ric_fm[0][0], 0.5, 1e-14);
}

TEST(Curvature, RejectsSmallM) {
    const Chart plane = make_chart(ChartId::euclidean_plane);
    const auto f = parse(plane, "x");
    EXPECT_THROW(curvature(plane, f, 2.0, std::vector<double>{0, 0}), Error);
    EXPECT_THROW(curvature(plane, f, 1.5, std::vector<double>{0, 0}), Error);
    EXPECT_NO_THROW(curvature(plane, ScalarField::constant(0), 2.0, std::vector<double>{0, 0}));
}

TEST(GeometryProperties, MetricCompatibility) {
    std::mt19937_64 rng(47);
    for (ChartId id : {ChartId::sphere2, ChartId::disk_polar, ChartId::hemisphere2}) {
        const Chart c = make_chart(id);
        for (int t = 0; t < 10; ++t) {
            const auto x = random_interior(c, rng);
            const auto m = metric_jets(c, x);
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        double v = m.g[i][j].d(k);
                        for (int l = 0; l < 2; ++l)
                            v -= m.gamma[l][k][i].value() * m.g[l][j].value() +
                                 m.gamma[l][k][j].value() * m.g[i][l].value();
                        EXPECT_NEAR(v, 0.0, 1e-10);
                    }
        }
    }
}

TEST(GeometryProperties, RicciSymmetryAndCatalogOracle) {
    std::mt19937_64 rng(53);
    for (ChartId id : {ChartId::euclidean_plane, ChartId::flat_torus, ChartId::disk_polar, ChartId::sphere2,
                       ChartId::hemisphere2}) {
        const Chart c = make_chart(id);
        const bool round = id == ChartId::sphere2 || id == ChartId::hemisphere2;
        for (int t = 0; t < 10; ++t) {
            const auto x = random_interior(c, rng);
            const auto cv = curvature(c, ScalarField::constant(0), kInfinity, x);
            const auto m = metric_jets(c, x);
            EXPECT_NEAR(cv.ric[0][1], cv.ric[1][0], 1e-10);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    EXPECT_NEAR(cv.ric[i][j], round ? m.g[i][j].value() : 0.0, 1e-10) << c.name();
        }
    }
}

TEST(GeometryProperties, MinEigInvariantUnderReparameterization) {
    // The plane in Cartesian and polar coordinates, with the same weight.
    const Chart cart = make_chart(ChartId::euclidean_plane);
    const Chart polar = make_chart(ChartId::disk_polar);
    const auto f_cart = parse(cart, "0.7*(x^2+y^2)/2 + 0.3*x^3 + 0.2*x*y");
    const auto f_pol = parse(polar, "0.7*r^2/2 + 0.3*(r*cos(phi))^3 + 0.2*r^2*cos(phi)*sin(phi)");
    std::mt19937_64 rng(59);
    std::uniform_real_distribution<double> R(0.1, 0.95), P(0.0, 2 * pi);
    for (int t = 0; t < 20; ++t) {
        const double r = R(rng), ph = P(rng);
        for (double m : {kInfinity, 3.0, 5.0}) {
            const auto a = curvature(cart, f_cart, m, std::vector<double>{r * std::cos(ph), r * std::sin(ph)});
            const auto b = curvature(polar, f_pol, m, std::vector<double>{r, ph});
            EXPECT_NEAR(a.min_eig, b.min_eig, 1e-8);
        }
    }
}

TEST(Boundary, UnitDisk) {
    const Chart c = make_chart(ChartId::disk_polar);
    const auto seg = c.boundary().front();
    for (double s : {0.0, 1.0, 4.0}) {
        const auto d = boundary_geometry(c, ScalarField::constant(0), seg, s);
        EXPECT_NEAR(d.ii, 1.0, 1e-13);
        EXPECT_NEAR(d.H, 1.0, 1e-13);
        EXPECT_NEAR(d.H_f, 1.0, 1e-13);
        const auto w = boundary_geometry(c, parse(c, "r^2/2"), seg, s);
        EXPECT_NEAR(w.H_f, 0.0, 1e-13);
    }
}

TEST(Boundary, HemisphereEquatorIsTotallyGeodesic) {
    const Chart c = make_chart(ChartId::hemisphere2);
    const auto d = boundary_geometry(c, ScalarField::constant(0), c.boundary().front(), 1.3);
    EXPECT_NEAR(d.ii, 0.0, 1e-14);
    EXPECT_NEAR(d.H, 0.0, 1e-14);
}

TEST(Boundary, NoBoundaryIsAnError) {
    const Chart c = make_chart(ChartId::sphere2);
    try {
        boundary_geometry(c, ScalarField::constant(0), BoundarySegment{0, 1.0, 1, false}, 0.0);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    }
}

TEST(Boundary, TangentialFieldsOnTheDisk) {
    const Chart c = make_chart(ChartId::disk_polar);
    const auto u = parse(c, "r*cos(phi)");
    for (double s : {0.2, 1.7, 3.9}) {
        const auto d = boundary_tangential(c, ScalarField::constant(0), u, c.boundary().front(), s);
        EXPECT_NEAR(d.u_n, std::cos(s), 1e-14);
        EXPECT_NEAR(d.lap_bdy_u, -std::cos(s), 1e-14);
        EXPECT_NEAR(d.lap_bdy_f_u, -std::cos(s), 1e-14);
        EXPECT_NEAR(d.grad_bdy_u, -std::sin(s), 1e-14);
        EXPECT_NEAR(d.grad_bdy_un, -std::sin(s), 1e-14);
    }
}

TEST(Boundary, TangentialFieldsOnTheHemisphere) {
    const Chart c = make_chart(ChartId::hemisphere2);
    const auto d = boundary_tangential(c, ScalarField::constant(0), parse(c, "cos(theta)"), c.boundary().front(), 0.5);
    EXPECT_NEAR(d.grad_bdy_u, 0.0, 1e-15);
    EXPECT_NEAR(d.lap_bdy_u, 0.0, 1e-15);
    EXPECT_NEAR(d.u_n, -1.0, 1e-15);
}

TEST(Boundary, ConstantFieldGivesZeros) {
    for (ChartId id : {ChartId::disk_polar, ChartId::hemisphere2, ChartId::line1d}) {
        const Chart c = make_chart(id);
        for (const auto& seg : c.boundary()) {
            const auto d = boundary_tangential(c, parse(c, c.coordinate_names()[0]), ScalarField::constant(3), seg, 0.4);
            EXPECT_EQ(d.u_n, 0.0);
            EXPECT_EQ(d.grad_bdy_u, 0.0);
            EXPECT_EQ(d.lap_bdy_f_u, 0.0);
            EXPECT_EQ(d.grad_bdy_un, 0.0);
        }
    }
}

TEST(Boundary, NormalIsUnitAndHIsTraceOfII) {
    const Chart c = make_chart(ChartId::disk_polar);
    const auto seg = c.boundary().front();
    const auto d = boundary_geometry(c, parse(c, "r*sin(phi)"), seg, 0.8);
    const auto m = metric_jets(c, std::vector<double>{d.point[0], d.point[1]});
    double nn = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) nn += m.g[i][j].value() * d.normal[i] * d.normal[j];
    EXPECT_NEAR(nn, 1.0, 1e-12);
    EXPECT_NEAR(d.H, d.ii, 1e-12);
    EXPECT_NEAR(d.H_f, d.H - std::sin(0.8), 1e-14);
}

TEST(Boundary, LineEndpoints) {
    ChartOptions o;
    o.line_lo = 0.0;
    o.line_hi = 2.0;
    const Chart c = make_chart(ChartId::line1d, o);
    const auto f = parse(c, "x^2/2");
    const auto left = boundary_geometry(c, f, c.boundary()[0], 0.0);
    const auto right = boundary_geometry(c, f, c.boundary()[1], 0.0);
    EXPECT_EQ(left.ii, 0.0);
    EXPECT_NEAR(left.H_f, 0.0, 1e-15);
    EXPECT_NEAR(right.H_f, -2.0, 1e-15);
    EXPECT_EQ(right.normal[0], 1.0);
    EXPECT_EQ(left.normal[0], -1.0);
}
