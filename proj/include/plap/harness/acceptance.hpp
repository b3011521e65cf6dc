#pragma once

#include "plap/bounds.hpp"
#include "plap/eigen.hpp"
#include "plap/harness/config.hpp"
#include "plap/identities.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>

namespace plap::harness {

struct Criterion {
    int number = 0;
    std::string title;
    bool pass = false;
    json detail = json::object();
    double wall_ms = 0.0;
    std::optional<double> budget_ms;
};

struct SuiteResult {
    std::vector<Criterion> criteria;
    bool pass = true;
    double wall_ms = 0.0;
};

inline json to_json(const Criterion& c) {
    json j = {{"id", "AC" + std::to_string(c.number)}, {"title", c.title}, {"pass", c.pass},
              {"detail", c.detail}, {"wall_ms", c.wall_ms}};
    j["budget_ms"] = c.budget_ms ? json(*c.budget_ms) : json(nullptr);
    return j;
}

inline json to_json(const SuiteResult& s) {
    json j = {{"schema", kSchema}, {"suite", "acceptance"}, {"pass", s.pass}, {"wall_ms", s.wall_ms}};
    j["criteria"] = json::array();
    for (const auto& c : s.criteria) j["criteria"].push_back(to_json(c));
    return j;
}

namespace acceptance {

using bounds::Theorem;
using eigen::BoundaryCondition;
using eigen::ModelSpace1D;
constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

/// Accumulates named checks for one criterion.
class Checks {
public:
    explicit Checks(json& detail) : detail_(detail) { detail_["checks"] = json::array(); }

    bool le(const std::string& name, double value, double limit) { return add(name, value, limit, value <= limit); }
    bool ge(const std::string& name, double value, double limit) { return add(name, value, limit, value >= limit); }
    bool near(const std::string& name, double value, double target, double tol) {
        json c = {{"name", name}, {"value", value}, {"target", target}, {"tol", tol}};
        const bool ok = std::abs(value - target) <= tol;
        c["pass"] = ok;
        detail_["checks"].push_back(c);
        pass_ = pass_ && ok;
        return ok;
    }
    bool flag(const std::string& name, bool ok) {
        detail_["checks"].push_back({{"name", name}, {"pass", ok}});
        pass_ = pass_ && ok;
        return ok;
    }
    bool pass() const { return pass_; }

private:
    bool add(const std::string& name, double value, double limit, bool ok) {
        detail_["checks"].push_back({{"name", name}, {"value", value}, {"limit", limit}, {"pass", ok}});
        pass_ = pass_ && ok;
        return ok;
    }

    json& detail_;
    bool pass_ = true;
};

/// eq34 residuals of every solve made by the suite, for the closing check.
struct Ledger {
    std::vector<std::pair<std::string, double>> eq34;
    int unconverged = 0;

    void record(const std::string& tag, const eigen::EigenResult& r) {
        if (r.converged) eq34.emplace_back(tag, r.weak_residual);
        else ++unconverged;
    }
};

inline ScalarField weight(const std::string& s) { return eigen::parse_weight(s); }

inline eigen::EigenResult solve(Ledger& led, const std::string& tag, const ModelSpace1D& s, double p, int N,
                                std::uint64_t seed) {
    eigen::SolverOptions o;
    o.seed = seed;
    auto r = eigen::minimize_eig(eigen::build_problem(s, p, N), o);
    led.record(tag, r);
    return r;
}

inline std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

inline std::string coef(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    return fmt("(%.6f)", U(rng));
}

inline bool ac1(Checks& c, Ledger&, std::uint64_t) {
    for (double p : {1.5, 2.0, 3.0, 5.0})
        c.le(fmt("quadrature_vs_closed p=%g", p), std::abs(bounds::pi_p(p, bounds::PiMode::quadrature) - bounds::pi_p(p)),
             1e-10);
    c.le("pi_2 - pi", std::abs(bounds::pi_p(2.0) - pi), 1e-12);
    return c.pass();
}

inline bool ac2(Checks& c, Ledger& led, std::uint64_t seed) {
    const auto dir = ModelSpace1D::interval(0, pi, weight("0"), BoundaryCondition::dirichlet);
    const auto neu = ModelSpace1D::interval(0, pi, weight("0"), BoundaryCondition::neumann);
    const auto circ = ModelSpace1D::circle(2 * pi, weight("0"));
    c.near("interval dirichlet", solve(led, "AC2 dirichlet", dir, 2, 1024, seed).lambda, 1.0, 1e-5);
    c.near("interval neumann", solve(led, "AC2 neumann", neu, 2, 1024, seed).lambda, 1.0, 1e-5);
    c.near("circle", solve(led, "AC2 circle", circ, 2, 1024, seed).lambda, 1.0, 1e-5);
    return c.pass();
}

inline bool ac3(Checks& c, Ledger& led, std::uint64_t seed) {
    struct Case {
        std::string name;
        ModelSpace1D space;
    };
    const std::vector<Case> cases = {
        {"interval dirichlet f=0.5x", ModelSpace1D::interval(0, 1, weight("0.5*x"), BoundaryCondition::dirichlet)},
        {"interval neumann f=0.5x", ModelSpace1D::interval(0, 1, weight("0.5*x"), BoundaryCondition::neumann)},
        {"sphere_2 natural", ModelSpace1D::sphere(2, weight("0"))},
        {"sphere_3 natural f=0.3cos", ModelSpace1D::sphere(3, weight("0.3*cos(x)"))},
    };
    for (const auto& k : cases) {
        for (double p : {2.0, 3.0}) {
            const std::string tag = k.name + fmt(" p=%g", p);
            const double lam = solve(led, "AC3 " + tag, k.space, p, 2048, seed).lambda;
            const double shoot = eigen::shooting_eig(k.space, p).lambda;
            c.le(tag, std::abs(lam - shoot) / shoot, 1e-4);
        }
    }
    return c.pass();
}

inline bool ac4(Checks& c, Ledger& led, std::uint64_t seed) {
    for (int n : {2, 3}) {
        const auto s = ModelSpace1D::sphere(n, weight("0"));
        const double lam = solve(led, "AC4 sphere_" + std::to_string(n), s, 2, 2048, seed).lambda;
        const auto h = bounds::hypothesis_scan(s, n, 2.0);
        const auto rep = bounds::check_bound(Theorem::t11_closed, h, lam);
        const std::string tag = "sphere_" + std::to_string(n);
        c.near(tag + " lambda", lam, n, n == 2 ? 1e-4 : 1e-3);
        c.flag(tag + " applicable", rep.applicable);
        c.near(tag + " rhs", rep.rhs, n, 1e-12);
        c.le(tag + " |margin|", std::abs(rep.margin), 1e-3);
        c.flag(tag + " bound pass", rep.pass);
    }
    return c.pass();
}

inline bool ac5(Checks& c, Ledger& led, std::uint64_t seed) {
    for (int n : {2, 3}) {
        for (double p : {2.5, 3.0}) {
            const auto s = ModelSpace1D::sphere(n, weight("0"));
            const std::string tag = "sphere_" + std::to_string(n) + fmt(" p=%g", p);
            const double lam = solve(led, "AC5 " + tag, s, p, 2048, seed).lambda;
            const auto rep = bounds::check_bound(Theorem::t11_closed, bounds::hypothesis_scan(s, n, p), lam);
            const double expected = std::pow(n, p / 2.0) / std::pow(p - 1.0, p - 1.0);
            c.flag(tag + " applicable", rep.applicable);
            c.near(tag + " rhs", rep.rhs, expected, 1e-12 * expected);
            c.ge(tag + " margin", rep.margin, std::numeric_limits<double>::min());
        }
    }
    return c.pass();
}

inline bool ac6(Checks& c, Ledger& led, std::uint64_t seed) {
    const auto s = ModelSpace1D::interval(-3, 3, weight("x*x/2"), BoundaryCondition::neumann);
    const double lam = solve(led, "AC6 gaussian", s, 2, 2048, seed).lambda;
    const auto h = bounds::hypothesis_scan(s, inf, 2.0);
    const auto rep = bounds::check_bound(Theorem::t11_neumann, h, lam);
    c.near("K_min", h.K_min, 1.0, 1e-12);
    c.flag("neumann convexity gate (II_min >= 0)", h.II_min.has_value() && *h.II_min >= 0.0);
    c.flag("applicable", rep.applicable);
    c.near("rhs", rep.rhs, 1.0, 1e-12);
    c.ge("lambda", lam, 1.0);
    return c.pass();
}

inline bool ac7(Checks& c, Ledger& led, std::uint64_t seed) {
    for (double p : {2.0, 3.0}) {
        for (double L : {1.0, 2.0}) {
            const auto s = ModelSpace1D::interval(0, L, weight("0"), BoundaryCondition::neumann);
            const std::string tag = fmt("p=%g", p) + fmt(" L=%g", L);
            const double lam = solve(led, "AC7 " + tag, s, p, 2048, seed).lambda;
            const auto rep = bounds::check_bound(Theorem::t13_neumann, bounds::hypothesis_scan(s, inf, p), lam);
            c.flag(tag + " applicable", rep.applicable && rep.pass);
            c.near(tag + " ratio / 2^p", lam / rep.rhs / std::pow(2.0, p), 1.0, 0.01);
        }
    }
    return c.pass();
}

inline bool ac8(Checks& c, Ledger& led, std::uint64_t seed) {
    const auto s = ModelSpace1D::circle(2 * pi, weight("sin(x)"));
    const double m = 3.0;
    for (double p : {2.0, 3.0}) {
        const std::string tag = fmt("p=%g", p);
        const double lam = solve(led, "AC8 " + tag, s, p, 1024, seed).lambda;
        const auto h = bounds::hypothesis_scan(s, m, p, 100000);
        const auto rep = bounds::check_bound(Theorem::t15, h, lam);
        const double K = std::max(0.0, -h.K_min);
        // Independent evaluation: log-space form of the constant.
        const double logC = std::log(2.0 / (m + 1.0)) + (p - 1.0) * (std::log(p) - std::log(p - 1.0)) - p;
        const double indep = std::exp(logC - p * std::log(h.D) - std::sqrt((m - 1.0) * K) * h.D);
        c.near(tag + " K_min", h.K_min, -1.0, 1e-9);
        c.flag(tag + " applicable", rep.applicable && rep.pass);
        c.near(tag + " rhs cross-check", rep.rhs, indep, 1e-12 * indep);
        c.ge(tag + " lambda / rhs", lam / rep.rhs, 10.0);
    }
    return c.pass();
}

inline bool ac9(Checks& c, Ledger&, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x9b0c);
    double worst = 0.0;
    int checked = 0;
    for (int t = 0; checked < 24 && t < 200; ++t) {
        const bool sphere = t % 2 == 1;
        const auto chart = geometry::make_chart(sphere ? geometry::ChartId::sphere2 : geometry::ChartId::flat_torus);
        const std::string x = sphere ? "theta" : "x", y = sphere ? "phi" : "y";
        const auto u = chart.parser().parse("2*" + x + " + " + coef(rng) + "*" + y + " + 0.3*(" + coef(rng) +
                                            "*sin(" + x + ") + " + coef(rng) + "*cos(" + y + ") + " + coef(rng) +
                                            "*sin(" + x + "+" + y + "))");
        const auto f = chart.parser().parse(coef(rng) + "*cos(" + x + ") + " + coef(rng) + "*sin(" + y + ")");
        const double p = 2.0 + (t % 3);
        std::uniform_real_distribution<double> A(sphere ? 0.2 : 0.0, sphere ? pi - 0.2 : 2 * pi), B(0.0, 2 * pi);
        const std::vector<double> pt{A(rng), B(rng)};
        if (geometry::covariant_data(chart, u, f, p, pt).w <= 0.1) continue;
        const auto r = identities::bochner_residual(chart, f, p, u, pt);
        worst = std::max({worst, r.res22, r.res23});
        ++checked;
    }
    c.ge("randomized cases", checked, 20);
    c.le("max(res22, res23)", worst, 1e-7);
    const auto plane = geometry::make_chart(geometry::ChartId::euclidean_plane);
    bool zero = true;
    for (double p : {2.0, 3.0, 4.0}) {
        const auto r = identities::bochner_residual(plane, ScalarField::constant(0.0), p,
                                                    plane.parser().parse("0.5*x - 1.5*y + 2"),
                                                    std::vector<double>{0.1, 0.2});
        zero = zero && r.lhs22 == 0.0 && r.rhs22 == 0.0 && r.lhs23 == 0.0 && r.rhs23 == 0.0;
    }
    c.flag("linear case is exactly zero", zero);
    return c.pass();
}

inline bool ac10(Checks& c, Ledger&, std::uint64_t seed) {
    const auto disk = geometry::make_chart(geometry::ChartId::disk_polar);
    const auto hemi = geometry::make_chart(geometry::ChartId::hemisphere2);
    const ScalarField zero = ScalarField::constant(0.0);
    {
        const auto r = identities::reilly_residual(disk, zero, 2.0, disk.parser().parse("r*cos(phi)"));
        c.near("disk interior", r.interior_lhs, 0.0, 1e-8);
        c.near("disk boundary", r.boundary_rhs, 0.0, 1e-8);
        c.near("disk remark form", r.remark_rhs.value_or(inf), r.boundary_rhs, 1e-8);
    }
    {
        const auto r = identities::reilly_residual(hemi, zero, 2.0, hemi.parser().parse("cos(theta)"));
        c.near("hemisphere interior", r.interior_lhs, 0.0, 1e-8);
        c.near("hemisphere boundary", r.boundary_rhs, 0.0, 1e-8);
    }
    std::mt19937_64 rng(seed ^ 0x4e11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        const double a = U(rng), b = U(rng);
        const double nrm = std::hypot(a, b);
        const std::string x = "(r*cos(phi))", y = "(r*sin(phi))";
        const std::string lin = "2*(" + fmt("%.6f", a / nrm) + "*" + x + " + " + fmt("%.6f", b / nrm) + "*" + y + ")";
        const auto u = disk.parser().parse(lin + " + 0.3*(" + coef(rng) + "*sin(" + x + ") + " + coef(rng) + "*cos(" +
                                           y + ")*" + x + ")");
        const auto f = disk.parser().parse(coef(rng) + "*r^2/2");
        const double p = t % 2 == 0 ? 2.0 : 3.0;
        const std::string tag = "random " + std::to_string(t) + fmt(" p=%g", p);
        double prev = inf;
        bool monotone = true;
        identities::ReillyResidual last;
        for (auto [ni, nb] : {std::pair{16, 64}, {32, 128}, {64, 256}}) {
            identities::ReillyOptions o;
            o.interior_nodes = ni;
            o.boundary_nodes = nb;
            last = identities::reilly_residual(disk, f, p, u, o);
            monotone = monotone && last.residual <= std::max(prev, 1e-13);
            prev = last.residual;
        }
        c.le(tag + " residual at 64x64/256", last.residual, 1e-6);
        c.flag(tag + " monotone over refinements", monotone);
        if (last.remark_rhs) c.near(tag + " remark form", *last.remark_rhs, last.boundary_rhs, 1e-8);
    }
    return c.pass();
}

inline bool ac11(Checks& c, Ledger& led, std::uint64_t seed) {
    const auto s = ModelSpace1D::circle(2 * pi, weight("0"));
    for (double p : {2.0, 3.0}) {
        const std::string tag = fmt("p=%g", p);
        const auto pr = eigen::build_problem(s, p, 1024);
        eigen::SolverOptions o;
        o.seed = seed;
        const auto res = eigen::minimize_eig(pr, o);
        led.record("AC11 " + tag, res);
        const auto g = bounds::gradient_estimate_check(s, pr, res, p);
        c.flag(tag + " applicable", g.applicable);
        c.le(tag + " maxF / bound", g.maxF / g.bound, 1.001);
        if (p == 2.0) c.near(tag + " sharp ratio", g.maxF / g.bound, 1.0, 1e-3);
    }
    return c.pass();
}

inline bool ac12(Checks& c, Ledger& led, std::uint64_t seed) {
    c.ge("converged results", static_cast<double>(led.eq34.size()), 20);
    c.le("unconverged results", led.unconverged, 0);
    double worst = 0.0;
    for (const auto& [tag, v] : led.eq34) worst = std::max(worst, v);
    c.le("max eq34 over converged results", worst, 1e-6);
    const auto s = ModelSpace1D::circle(2 * pi, weight("0"));
    for (double p : {2.0, 3.0}) {
        const auto pr = eigen::build_problem(s, p, 256);
        eigen::SolverOptions o;
        o.seed = seed;
        const auto res = eigen::minimize_eig(pr, o);
        std::mt19937_64 rng(seed ^ 0x3400);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        std::vector<double> u(pr.nodes());
        for (double& v : u) v = U(rng);
        c.ge(fmt("random control p=%g", p), eigen::eq34_residual(pr, u, res.lambda), 1e-2);
    }
    return c.pass();
}

struct Entry {
    int number;
    const char* title;
    std::optional<double> budget_ms;
    std::function<bool(Checks&, Ledger&, std::uint64_t)> run;
};

inline const std::vector<Entry>& entries() {
    static const std::vector<Entry> e = {
        {1, "pi_p closed form vs quadrature", 1000.0, ac1},
        {2, "exact eigenvalues of interval and circle", 5000.0, ac2},
        {3, "minimizer vs shooting oracle", 30000.0, ac3},
        {4, "Lichnerowicz sharpness on spheres", std::nullopt, ac4},
        {5, "curvature-dimension bound at p > 2", std::nullopt, ac5},
        {6, "curvature bound with m = infinity", std::nullopt, ac6},
        {7, "diameter bound margin law", std::nullopt, ac7},
        {8, "negative curvature bound", std::nullopt, ac8},
        {9, "Bochner residuals", 10000.0, ac9},
        {10, "Reilly residuals", std::nullopt, ac10},
        {11, "gradient estimate", std::nullopt, ac11},
        {12, "discrete integral identity", std::nullopt, ac12},
    };
    return e;
}

}  // namespace acceptance

/// Runs criteria 1 to 12 in order. `on_done` sees each criterion as it
/// finishes.
inline SuiteResult acceptance_suite(std::uint64_t seed = 0,
                                    const std::function<void(const Criterion&)>& on_done = {}) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    SuiteResult out;
    acceptance::Ledger ledger;
    for (const auto& e : acceptance::entries()) {
        Criterion c;
        c.number = e.number;
        c.title = e.title;
        c.budget_ms = e.budget_ms;
        acceptance::Checks checks(c.detail);
        const auto t = clock::now();
        try {
            c.pass = e.run(checks, ledger, seed);
        } catch (const Error& err) {
            c.pass = false;
            c.detail["error"] = {{"kind", to_string(err.kind())}, {"message", err.what()}};
        }
        c.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t).count();
        if (c.budget_ms && c.wall_ms > *c.budget_ms) {
            c.pass = false;
            c.detail["over_budget"] = true;
        }
        out.pass = out.pass && c.pass;
        if (on_done) on_done(c);
        out.criteria.push_back(std::move(c));
    }
    out.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    return out;
}

}  // namespace plap::harness
