#include "plap/eigen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace {

using namespace plap;
using namespace plap::eigen;
constexpr double pi = std::numbers::pi;

// (p-1) π_p^p for p = 3, with π_3 = 4π/(3√3).
const double kPi3 = 4.0 * pi / (3.0 * std::sqrt(3.0));
const double kInterval3 = 2.0 * kPi3 * kPi3 * kPi3;

ScalarField w(const std::string& s) { return parse_weight(s); }

ModelSpace1D interval(double a, double b, const std::string& f, BoundaryCondition bc) {
    return ModelSpace1D::interval(a, b, w(f), bc);
}

double solve(const ModelSpace1D& s, double p, int N, SolverOptions opts = {}) {
    return minimize_eig(build_problem(s, p, N), opts).lambda;
}

// ---- model spaces -------------------------------------------------------

TEST(ModelSpace, Diameters) {
    EXPECT_DOUBLE_EQ(interval(0, 2, "0", BoundaryCondition::neumann).diameter(), 2.0);
    EXPECT_DOUBLE_EQ(ModelSpace1D::circle(2 * pi, w("0")).diameter(), pi);
    EXPECT_DOUBLE_EQ(ModelSpace1D::sphere(3, w("0")).diameter(), pi);
    EXPECT_DOUBLE_EQ(ModelSpace1D::ball(2, 1.5, w("0"), BoundaryCondition::dirichlet).diameter(), 3.0);
}

TEST(ModelSpace, RejectsInvalidConstructions) {
    EXPECT_THROW(ModelSpace1D::circle(2 * pi, w("x")), Error);
    EXPECT_THROW(interval(1, 0, "0", BoundaryCondition::neumann), Error);
    EXPECT_THROW(interval(0, 1, "0", BoundaryCondition::closed), Error);
    try {
        ModelSpace1D::ball(2, 1.0, w("0"), BoundaryCondition::neumann);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unsupported);
    }
}

TEST(ModelSpace, CurvatureClosedForms) {
    const auto s2 = ModelSpace1D::sphere(2, w("0"));
    EXPECT_NEAR(s2.min_curvature(1.0, 2.0), 1.0, 1e-15);
    const auto line = interval(-1, 1, "x*x/2", BoundaryCondition::neumann);
    EXPECT_NEAR(line.min_curvature(0.5, 3.0), 1.0 - 0.25 / 2.0, 1e-15);
    EXPECT_NEAR(line.min_curvature(0.5, std::numeric_limits<double>::infinity()), 1.0, 1e-15);
    EXPECT_THROW(line.validate_m(1.0), Error);
}

TEST(ModelSpace, IntervalEndpointsMeanCurvature) {
    const auto s = interval(0, 2, "x*x/2", BoundaryCondition::dirichlet);
    const auto b = s.boundary();
    ASSERT_EQ(b.size(), 2u);
    EXPECT_DOUBLE_EQ(b[0].H_f, 0.0);
    EXPECT_DOUBLE_EQ(b[1].H_f, -2.0);
    EXPECT_DOUBLE_EQ(b[1].ii, 0.0);
}

// ---- build_problem ------------------------------------------------------

TEST(BuildProblem, IntervalFlat) {
    const auto pr = build_problem(interval(0, pi, "0", BoundaryCondition::dirichlet), 2.0, 64);
    EXPECT_EQ(pr.nodes(), 65u);
    for (double r : pr.rho_mid) EXPECT_EQ(r, 1.0);
    for (double r : pr.rho_node) EXPECT_EQ(r, 1.0);
}

TEST(BuildProblem, CircleMidpointDensity) {
    const auto pr = build_problem(ModelSpace1D::circle(2 * pi, w("sin(x)")), 2.0, 64);
    EXPECT_EQ(pr.nodes(), 64u);
    for (std::size_t c = 0; c < pr.cells(); ++c)
        EXPECT_NEAR(pr.rho_mid[c], std::exp(-std::sin(pr.x_mid[c])), 1e-14);
}

TEST(BuildProblem, SphereAvoidsPoles) {
    const auto pr = build_problem(ModelSpace1D::sphere(2, w("0")), 2.0, 128);
    EXPECT_NEAR(pr.x.front(), pi * 1e-4, 1e-15);
    EXPECT_NEAR(pr.x.back(), pi - pi * 1e-4, 1e-13);
    for (double r : pr.rho_node) EXPECT_GT(r, 0.0);
}

TEST(BuildProblem, Preconditions) {
    const auto s = interval(0, 1, "0", BoundaryCondition::neumann);
    EXPECT_THROW(build_problem(s, 1.0, 64), Error);
    EXPECT_THROW(build_problem(s, 2.0, 8), Error);
    try {
        build_problem(interval(0, 1, "800*x", BoundaryCondition::neumann), 2.0, 64);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_space);
    }
}

// ---- rayleigh -----------------------------------------------------------

TEST(Rayleigh, SineOnInterval) {
    const auto pr = build_problem(interval(0, pi, "0", BoundaryCondition::dirichlet), 2.0, 512);
    std::vector<double> u;
    for (double x : pr.x) u.push_back(std::sin(x));
    EXPECT_NEAR(rayleigh(pr, u).value, 1.0, 1e-4);
}

TEST(Rayleigh, ZeroHomogeneous) {
    const auto pr = build_problem(ModelSpace1D::circle(2 * pi, w("sin(x)")), 3.0, 64);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N01;
    std::vector<double> u(pr.nodes()), u2(pr.nodes());
    for (std::size_t i = 0; i < u.size(); ++i) u2[i] = 2.0 * (u[i] = N01(rng));
    EXPECT_NEAR(rayleigh(pr, u).value, rayleigh(pr, u2).value, 1e-12 * rayleigh(pr, u).value);
}

TEST(Rayleigh, GradientMatchesFiniteDifferences) {
    for (double p : {1.7, 2.0, 3.0}) {
        const auto pr = build_problem(interval(0, 1, "0.5*x", BoundaryCondition::neumann), p, 32);
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> u(pr.nodes());
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::cos(pi * pr.x[i]) + 0.1 * U(rng);
        const auto r = rayleigh(pr, u);
        double max_diff = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double hstep = 1e-6;
            auto up = u, dn = u;
            up[i] += hstep;
            dn[i] -= hstep;
            const double fd = (rayleigh(pr, up, false).value - rayleigh(pr, dn, false).value) / (2 * hstep);
            max_diff = std::max(max_diff, std::abs(fd - r.gradient[i]));
        }
        EXPECT_LE(max_diff, 1e-6) << "p = " << p;
        // Degree-0 homogeneity: the gradient is orthogonal to u.
        double pair = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) pair += r.gradient[i] * u[i];
        EXPECT_NEAR(pair, 0.0, 1e-10);
    }
}

TEST(Rayleigh, ZeroFunctionRejected) {
    const auto pr = build_problem(interval(0, 1, "0", BoundaryCondition::neumann), 2.0, 16);
    std::vector<double> u(pr.nodes(), 0.0);
    try {
        rayleigh(pr, u);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    }
}

// ---- zero p-mean --------------------------------------------------------

TEST(ZeroPMean, PEqualsTwoIsWeightedMean) {
    const auto pr = build_problem(interval(0, 1, "x", BoundaryCondition::neumann), 2.0, 64);
    std::vector<double> u;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < pr.nodes(); ++i) {
        u.push_back(std::exp(pr.x[i]));
        num += u[i] * pr.rho_node[i] * pr.wq[i];
        den += pr.rho_node[i] * pr.wq[i];
    }
    EXPECT_NEAR(zero_pmean_shift(pr, u), num / den, 1e-14);
}

TEST(ZeroPMean, OddFunctionOnSymmetricProblem) {
    const auto pr = build_problem(interval(-1, 1, "x*x", BoundaryCondition::neumann), 3.5, 100);
    std::vector<double> u;
    for (double x : pr.x) u.push_back(x * x * x + std::sin(x));
    EXPECT_NEAR(zero_pmean_shift(pr, u), 0.0, 1e-12);
}

TEST(ZeroPMean, DenseScanOracle) {
    const auto pr = build_problem(interval(0, 1, "0", BoundaryCondition::neumann), 4.0, 200);
    const std::vector<double> u = pr.x;
    auto g = [&](double c) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = u[i] - c;
            s += d * d * d * pr.wq[i];
        }
        return s;
    };
    // Locate the sign change on a dense grid, then bisect inside that cell.
    double lo = 0.0, hi = 1.0;
    const int M = 100000;
    for (int k = 0; k < M; ++k) {
        const double a = static_cast<double>(k) / M, b = static_cast<double>(k + 1) / M;
        if (g(a) > 0.0 && g(b) <= 0.0) {
            lo = a;
            hi = b;
            break;
        }
    }
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    const double c = zero_pmean_shift(pr, u);
    EXPECT_NEAR(c, 0.5 * (lo + hi), 1e-10);
    double scale = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) scale += std::pow(std::abs(u[i]), 3.0) * pr.wq[i];
    EXPECT_LE(std::abs(pmean_moment(pr, u, c)), 1e-12 * scale);
}

TEST(ZeroPMean, ConstantRejected) {
    const auto pr = build_problem(interval(0, 1, "0", BoundaryCondition::neumann), 3.0, 32);
    std::vector<double> u(pr.nodes(), 2.0);
    EXPECT_THROW(zero_pmean_shift(pr, u), Error);
}

// ---- minimize_eig -------------------------------------------------------

TEST(MinimizeEig, IntervalDirichletAndNeumann) {
    EXPECT_NEAR(solve(interval(0, pi, "0", BoundaryCondition::dirichlet), 2.0, 1024), 1.0, 1e-5);
    EXPECT_NEAR(solve(interval(0, pi, "0", BoundaryCondition::neumann), 2.0, 1024), 1.0, 1e-5);
}

TEST(MinimizeEig, Circle) {
    EXPECT_NEAR(solve(ModelSpace1D::circle(2 * pi, w("0")), 2.0, 1024), 1.0, 1e-5);
}

TEST(MinimizeEig, IntervalPEqualsThree) {
    EXPECT_NEAR(kInterval3, 28.2887, 1e-4);
    EXPECT_NEAR(solve(interval(0, 1, "0", BoundaryCondition::neumann), 3.0, 2048), kInterval3, 0.01);
}

TEST(MinimizeEig, ResultInvariants) {
    const auto pr = build_problem(ModelSpace1D::circle(2 * pi, w("0.5*cos(x)")), 3.0, 512);
    const auto r = minimize_eig(pr);
    EXPECT_TRUE(r.converged);
    EXPECT_GT(r.lambda, 0.0);
    double mx = 0.0;
    for (double v : r.u) mx = std::max(mx, std::abs(v));
    EXPECT_NEAR(mx, 1.0, 1e-15);
    EXPECT_LE(r.pmean, 1e-8);
    EXPECT_LE(r.rayleigh_gap, 1e-12 * r.lambda);
}

TEST(MinimizeEig, DeterministicGivenSeed) {
    const auto pr = build_problem(ModelSpace1D::circle(2 * pi, w("sin(x)")), 2.0, 256);
    SolverOptions o;
    o.seed = 42;
    const auto a = minimize_eig(pr, o);
    const auto b = minimize_eig(pr, o);
    EXPECT_EQ(a.lambda, b.lambda);
    EXPECT_EQ(a.u, b.u);
}

// ---- shooting -----------------------------------------------------------

TEST(Shooting, IntervalDirichlet) {
    const auto r = shooting_eig(interval(0, pi, "0", BoundaryCondition::dirichlet), 2.0);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.lambda, 1.0, 1e-8);
}

TEST(Shooting, SphereTwo) {
    EXPECT_NEAR(shooting_eig(ModelSpace1D::sphere(2, w("0")), 2.0).lambda, 2.0, 1e-6);
}

TEST(Shooting, IntervalPEqualsThreeAgreesWithMinimizer) {
    const auto s = interval(0, 1, "0", BoundaryCondition::neumann);
    const double shoot = shooting_eig(s, 3.0).lambda;
    EXPECT_NEAR(shoot, kInterval3, 1e-6);
    EXPECT_NEAR(solve(s, 3.0, 2048) / shoot, 1.0, 1e-4);
}

TEST(Shooting, BallDirichletIsBesselZero) {
    // j_{0,1}^2 for the unit disk.
    const double j01 = 2.404825557695773;
    EXPECT_NEAR(shooting_eig(ModelSpace1D::ball(2, 1.0, w("0"), BoundaryCondition::dirichlet), 2.0).lambda,
                j01 * j01, 1e-6);
}

TEST(Shooting, AsymmetricCircleUnsupported) {
    try {
        shooting_eig(ModelSpace1D::circle(2 * pi, w("sin(x)+0.3*sin(2*x)")), 2.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unsupported);
    }
}

TEST(Shooting, BracketFailureNamesRange) {
    ShootingOptions o;
    o.lambda_hi = 0.5;
    try {
        shooting_eig(interval(0, pi, "0", BoundaryCondition::dirichlet), 2.0, o);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::bracket);
        EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos);
    }
}

// ---- identity residuals -------------------------------------------------

TEST(IdentityResiduals, ConvergedResults) {
    const auto pr1 = build_problem(interval(0, pi, "0", BoundaryCondition::dirichlet), 2.0, 1024);
    const auto r1 = minimize_eig(pr1);
    EXPECT_LE(identity_residuals(pr1, r1).eq34, 1e-6);
    const auto pr2 = build_problem(ModelSpace1D::circle(2 * pi, w("0")), 2.0, 1024);
    const auto r2 = minimize_eig(pr2);
    EXPECT_LE(identity_residuals(pr2, r2).eq34, 1e-6);
    const auto pr3 = build_problem(ModelSpace1D::sphere(2, w("0")), 3.0, 1024);
    const auto r3 = minimize_eig(pr3);
    EXPECT_LE(identity_residuals(pr3, r3).eq34, 1e-6);
    EXPECT_EQ(identity_residuals(pr3, r3).eq34, r3.weak_residual);
}

TEST(IdentityResiduals, RandomFunctionIsLarge) {
    for (double p : {2.0, 3.0}) {
        const auto pr = build_problem(ModelSpace1D::circle(2 * pi, w("0")), p, 256);
        const auto r = minimize_eig(pr);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> u(pr.nodes());
        for (double& v : u) v = U(rng);
        EXPECT_GT(eq34_residual(pr, u, r.lambda), 1e-2) << "p = " << p;
    }
}

// ---- properties ---------------------------------------------------------

TEST(Properties, ScalingLaw) {
    for (double p : {2.0, 3.0}) {
        const double l1 = solve(interval(0, 1, "0", BoundaryCondition::neumann), p, 1024);
        const double l2 = solve(interval(0, 2, "0", BoundaryCondition::neumann), p, 1024);
        EXPECT_NEAR(l1 / l2 / std::pow(2.0, p), 1.0, 1e-3) << "p = " << p;
    }
}

TEST(Properties, ConstantShiftOfWeight) {
    for (double p : {2.0, 3.0}) {
        const double a = solve(interval(0, 1, "0.7*x", BoundaryCondition::neumann), p, 256);
        const double b = solve(interval(0, 1, "0.7*x + 5", BoundaryCondition::neumann), p, 256);
        EXPECT_NEAR(a, b, 1e-10 * a) << "p = " << p;
    }
}

TEST(Properties, MeshConvergence) {
    const auto s = interval(-1, 1, "x*x/2", BoundaryCondition::neumann);
    std::vector<double> lam;
    for (int N : {256, 512, 1024, 2048}) lam.push_back(solve(s, 2.0, N));
    const double d1 = std::abs(lam[0] - lam[1]);
    const double d2 = std::abs(lam[1] - lam[2]);
    const double d3 = std::abs(lam[2] - lam[3]);
    EXPECT_GT(d1, d2);
    EXPECT_GT(d2, d3);
}

struct OracleCase {
    const char* name;
    ModelSpace1D space;
    double p;
};

TEST(Properties, OracleAgreement) {
    const std::vector<OracleCase> cases = {
        {"interval-dirichlet-weighted", interval(0, 2, "0.5*x", BoundaryCondition::dirichlet), 2.5},
        {"interval-neumann-gaussian", interval(-3, 3, "x*x/2", BoundaryCondition::neumann), 2.0},
        {"sphere2-p3", ModelSpace1D::sphere(2, w("0")), 3.0},
        {"sphere3-weighted", ModelSpace1D::sphere(3, w("0.3*cos(x)")), 2.0},
        {"ball2", ModelSpace1D::ball(2, 1.0, w("0"), BoundaryCondition::dirichlet), 2.0},
        {"circle-sin-p3", ModelSpace1D::circle(2 * pi, w("sin(x)")), 3.0},
        {"circle-cos-p2", ModelSpace1D::circle(2 * pi, w("0.5*cos(x)")), 2.0},
    };
    for (const auto& c : cases) {
        const auto pr = build_problem(c.space, c.p, 2048);
        const auto r = minimize_eig(pr);
        const double shoot = shooting_eig(c.space, c.p).lambda;
        EXPECT_NEAR(r.lambda / shoot, 1.0, 1e-4) << c.name;
        EXPECT_LE(r.weak_residual, 1e-6) << c.name;
        if (pr.constrained()) {
            EXPECT_LE(r.pmean, 1e-8) << c.name;
        }
    }
}

}  // namespace
