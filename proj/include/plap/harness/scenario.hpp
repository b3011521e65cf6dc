#pragma once

#include "plap/bounds.hpp"
#include "plap/eigen.hpp"
#include "plap/harness/config.hpp"
#include "plap/identities.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <regex>

namespace plap::harness {

/// Flat summary of one scenario, one CSV row.
struct Row {
    std::string space;
    std::string bc;
    std::optional<double> p;
    std::optional<double> m;
    std::optional<double> K_min;
    std::optional<double> D;
    std::optional<double> lambda;
    std::optional<double> rhs;
    std::optional<double> margin;
    std::optional<double> residual;
    std::optional<long long> nodes;
};

struct Report {
    std::string id;
    std::string kind;
    std::uint64_t seed = 0;
    json config;
    bool pass = false;
    json results = json::object();
    std::optional<json> error;
    Row row;
    double wall_ms = 0.0;
};

/// Numbers that may be infinite are written as the string "inf".
inline json num(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

inline json to_json(const Report& r) {
    json j;
    j["schema"] = kSchema;
    j["id"] = r.id;
    j["kind"] = r.kind;
    j["seed"] = r.seed;
    j["config"] = r.config;
    j["pass"] = r.pass;
    j["results"] = r.results;
    if (r.error) j["error"] = *r.error;
    j["wall_ms"] = r.wall_ms;
    return j;
}

namespace detail {

struct Outcome {
    bool pass = true;
    json results = json::object();
    Row row;
};

using Task = std::function<Outcome()>;

/// Records a named check in `out` and folds it into the verdict.
inline void add_check(Outcome& out, const std::string& name, double value, double limit, bool ok) {
    out.results["checks"].push_back({{"name", name}, {"value", num(value)}, {"limit", num(limit)}, {"pass", ok}});
    out.pass = out.pass && ok;
}

inline void check_le(Outcome& out, const std::string& name, double value, double limit) {
    add_check(out, name, value, limit, value <= limit);
}

inline void check_ge(Outcome& out, const std::string& name, double value, double limit) {
    add_check(out, name, value, limit, value >= limit);
}

/// Runs `fn`, turning library errors into config errors at `field`.
template <class Fn>
auto validated(const Reader& r, const std::string& field, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        const std::string what = e.what();
        const std::string prefix = std::string(to_string(e.kind())) + ": ";
        if (e.kind() == ErrorKind::config && what.rfind(prefix + r.path() + ".", 0) == 0) throw;
        r.bad(field, what.rfind(prefix, 0) == 0 ? what.substr(prefix.size()) : what);
    }
}

// ---- 1-d model spaces ---------------------------------------------------

inline const std::set<std::string> kSpaceKeys = {"space", "L", "domain", "n", "R", "f", "bc"};
inline const std::set<std::string> kSolverKeys = {"N", "restarts", "tol", "max_iter", "oracle"};

inline eigen::ModelSpace1D read_space(const Reader& r) {
    using eigen::BoundaryCondition;
    using eigen::ModelSpace1D;
    std::string name = r.str("space");
    int n = r.integer("n", 2);
    static const std::regex suffixed(R"((sphere|ball)_(\d+))");
    std::smatch sm;
    if (std::regex_match(name, sm, suffixed)) {
        name = sm[1];
        n = std::stoi(sm[2]);
    }
    const std::string f_text = r.str("f", "0");
    const ScalarField f = validated(r, "f", [&] { return eigen::parse_weight(f_text); });
    auto bc = [&](const std::string& fallback) {
        const std::string s = r.str("bc", fallback);
        return validated(r, "bc", [&] { return eigen::bc_from_string(s); });
    };
    return validated(r, "space", [&]() -> ModelSpace1D {
        if (name == "interval") {
            double a = 0.0, b = 0.0;
            if (r.has("domain")) {
                const json& d = r.raw("domain");
                if (!d.is_array() || d.size() != 2) r.bad("domain", "expected [a, b]");
                a = r.to_real("domain", d[0]);
                b = r.to_real("domain", d[1]);
            } else {
                b = r.real("L");
            }
            return ModelSpace1D::interval(a, b, f, bc(""));
        }
        if (name == "circle") {
            const auto c = bc("closed");
            if (c != BoundaryCondition::closed) r.bad("bc", "a circle is closed");
            return ModelSpace1D::circle(r.real("L", 2.0 * std::numbers::pi), f);
        }
        if (name == "sphere") {
            const auto c = bc("natural");
            if (c != BoundaryCondition::natural) r.bad("bc", "sphere reductions use natural conditions");
            return ModelSpace1D::sphere(n, f);
        }
        if (name == "ball") return ModelSpace1D::ball(n, r.real("R", 1.0), f, bc("dirichlet"));
        r.bad("space", "unknown space '" + name + "' (interval, circle, sphere, ball)");
    });
}

struct SolveSpec {
    int N = 1024;
    eigen::SolverOptions opts;
    bool oracle = false;
};

inline SolveSpec read_solver(const Reader& r, std::uint64_t seed) {
    SolveSpec s;
    s.N = r.integer("N", 1024);
    r.check("N", s.N >= 16, "N must be at least 16");
    s.opts.restarts = r.integer("restarts", s.opts.restarts);
    r.check("restarts", s.opts.restarts >= 1, "restarts must be at least 1");
    s.opts.max_iter = r.integer("max_iter", s.opts.max_iter);
    r.check("max_iter", s.opts.max_iter >= 1, "max_iter must be at least 1");
    s.opts.tol = r.real("tol", s.opts.tol);
    r.check("tol", s.opts.tol > 0.0, "tol must be positive");
    s.opts.seed = seed;
    s.oracle = r.boolean("oracle", false);
    return s;
}

inline double read_p(const Reader& r) {
    const double p = r.real("p");
    r.check("p", p > 1.0, "p must exceed 1");
    return p;
}

struct Solved {
    eigen::Problem1D problem;
    eigen::EigenResult result;
};

/// Solves and records λ, the solver diagnostics and the residual checks.
inline Solved solve_into(Outcome& out, const eigen::ModelSpace1D& space, double p, const SolveSpec& spec) {
    Solved s{eigen::build_problem(space, p, spec.N), {}};
    s.result = eigen::minimize_eig(s.problem, spec.opts);
    const auto& r = s.result;
    json& e = out.results["eigen"];
    e["lambda"] = r.lambda;
    e["iterations"] = r.iterations;
    e["restarts"] = r.restarts;
    e["converged"] = r.converged;
    e["eq34"] = r.weak_residual;
    e["rayleigh_gap"] = r.rayleigh_gap;
    e["nodes"] = s.problem.nodes();
    add_check(out, "converged", r.converged ? 1.0 : 0.0, 1.0, r.converged);
    check_le(out, "eq34", r.weak_residual, 1e-6);
    if (s.problem.constrained()) {
        e["pmean"] = r.pmean;
        check_le(out, "pmean", r.pmean, 1e-8);
    }
    if (spec.oracle) {
        const auto sh = eigen::shooting_eig(space, p);
        const double rel = std::abs(r.lambda - sh.lambda) / sh.lambda;
        e["shooting"] = {{"lambda", sh.lambda}, {"steps", sh.steps}, {"converged", sh.converged}, {"rel_diff", rel}};
        check_le(out, "oracle_agreement", rel, 1e-4);
    }
    out.row.lambda = r.lambda;
    out.row.residual = r.weak_residual;
    out.row.nodes = static_cast<long long>(s.problem.nodes());
    return s;
}

inline void fill_space_row(Row& row, const eigen::ModelSpace1D& space, double p) {
    row.space = space.name();
    row.bc = eigen::to_string(space.bc());
    row.p = p;
    row.D = space.diameter();
}

// ---- kinds --------------------------------------------------------------

inline Task prepare_eigen(const Reader& r, std::uint64_t seed) {
    std::set<std::string> keys = {"kind", "id", "seed", "p", "expect_lambda", "expect_tol"};
    keys.insert(kSpaceKeys.begin(), kSpaceKeys.end());
    keys.insert(kSolverKeys.begin(), kSolverKeys.end());
    r.only(keys);
    const auto space = read_space(r);
    const double p = read_p(r);
    const auto spec = read_solver(r, seed);
    std::optional<double> expect;
    if (r.has("expect_lambda")) expect = r.real("expect_lambda");
    const double expect_tol = r.real("expect_tol", 1e-5);
    return [=] {
        Outcome out;
        fill_space_row(out.row, space, p);
        const auto s = solve_into(out, space, p, spec);
        if (expect) {
            out.results["eigen"]["expected"] = *expect;
            check_le(out, "expected_lambda", std::abs(s.result.lambda - *expect), expect_tol);
        }
        return out;
    };
}

inline json hypotheses_json(const bounds::Hypotheses& h) {
    json j = {{"K_min", h.K_min}, {"m", num(h.m)}, {"D", h.D}, {"has_boundary", h.has_boundary}, {"p", h.p}};
    j["Hf_min"] = h.Hf_min ? json(*h.Hf_min) : json(nullptr);
    j["II_min"] = h.II_min ? json(*h.II_min) : json(nullptr);
    return j;
}

inline Task prepare_bound(const Reader& r, std::uint64_t seed) {
    std::set<std::string> keys = {"kind", "id", "seed", "p", "m", "theorem", "samples", "lambda", "chart", "u"};
    keys.insert(kSpaceKeys.begin(), kSpaceKeys.end());
    keys.insert(kSolverKeys.begin(), kSolverKeys.end());
    r.only(keys);
    const auto theorem = validated(r, "theorem", [&] { return bounds::theorem_from_string(r.str("theorem")); });
    const double p = read_p(r);
    const double m = r.real_or_inf("m", bounds::kInfinity);
    const int samples = r.integer("samples", 1000);
    r.check("samples", samples >= 64, "samples must be at least 64");
    std::optional<double> lambda;
    if (r.has("lambda")) {
        lambda = r.real("lambda");
        r.check("lambda", *lambda > 0.0, "lambda must be positive");
    }
    if (r.has("chart")) {
        // Chart hypotheses come with a supplied eigenvalue.
        if (!lambda) r.bad("lambda", "required with 'chart'");
        const auto chart = validated(r, "chart", [&] {
            return geometry::make_chart(geometry::chart_id_from_string(r.str("chart")));
        });
        const auto f = validated(r, "f", [&] { return chart.parser().parse(r.str("f", "0")); });
        validated(r, "m", [&] {
            geometry::validate_m(m, chart.dim(), f.is_constant());
            return 0;
        });
        return [=] {
            Outcome out;
            const auto h = bounds::hypothesis_scan(chart, f, m, p, std::min(samples, 256));
            const auto rep = bounds::check_bound(theorem, h, *lambda);
            out.results["hypotheses"] = hypotheses_json(h);
            out.row = {chart.name(), "", p, m, h.K_min, h.D, *lambda, {}, {}, {}, {}};
            out.results["bound"] = {{"theorem", bounds::to_string(rep.theorem)}, {"applicable", rep.applicable},
                                    {"reason", rep.reason}, {"rhs", rep.rhs}, {"lambda", rep.lambda},
                                    {"margin", rep.margin}, {"pass", rep.pass}};
            if (rep.applicable) {
                out.row.rhs = rep.rhs;
                out.row.margin = rep.margin;
            }
            add_check(out, "bound", rep.margin, -bounds::kBoundTol * std::max(std::abs(rep.rhs), 1.0), rep.pass);
            return out;
        };
    }
    const auto space = read_space(r);
    validated(r, "m", [&] {
        space.validate_m(m);
        return 0;
    });
    const auto spec = read_solver(r, seed);
    return [=] {
        Outcome out;
        fill_space_row(out.row, space, p);
        out.row.m = m;
        const auto h = bounds::hypothesis_scan(space, m, p, samples);
        out.results["hypotheses"] = hypotheses_json(h);
        out.row.K_min = h.K_min;
        double lam = 0.0;
        if (lambda) {
            lam = *lambda;
            out.row.lambda = lam;
        } else {
            lam = solve_into(out, space, p, spec).result.lambda;
        }
        const auto rep = bounds::check_bound(theorem, h, lam);
        out.results["bound"] = {{"theorem", bounds::to_string(rep.theorem)}, {"applicable", rep.applicable},
                                {"reason", rep.reason}, {"rhs", rep.rhs}, {"lambda", rep.lambda},
                                {"margin", rep.margin}, {"pass", rep.pass}};
        if (rep.applicable) {
            out.row.rhs = rep.rhs;
            out.row.margin = rep.margin;
            out.results["bound"]["ratio"] = lam / rep.rhs;
        }
        add_check(out, "bound", rep.margin, -bounds::kBoundTol * std::max(std::abs(rep.rhs), 1.0), rep.pass);
        return out;
    };
}

inline Task prepare_gradient_estimate(const Reader& r, std::uint64_t seed) {
    std::set<std::string> keys = {"kind", "id", "seed", "p"};
    keys.insert(kSpaceKeys.begin(), kSpaceKeys.end());
    keys.insert(kSolverKeys.begin(), kSolverKeys.end());
    r.only(keys);
    const auto space = read_space(r);
    const double p = read_p(r);
    const auto spec = read_solver(r, seed);
    return [=] {
        Outcome out;
        fill_space_row(out.row, space, p);
        const auto s = solve_into(out, space, p, spec);
        const auto g = bounds::gradient_estimate_check(space, s.problem, s.result, p);
        out.results["gradient_estimate"] = {{"applicable", g.applicable}, {"reason", g.reason},
                                            {"maxF", g.maxF},           {"bound", g.bound},
                                            {"ratio", g.maxF / g.bound}, {"pass", g.pass}};
        if (g.applicable) {
            out.row.rhs = g.bound;
            out.row.margin = g.bound - g.maxF;
            add_check(out, "gradient_estimate", g.maxF / g.bound, 1.0 + 1e-3, g.pass);
        }
        return out;
    };
}

inline geometry::Chart read_chart(const Reader& r) {
    geometry::ChartOptions o;
    o.interior_offset = r.real("offset", o.interior_offset);
    r.check("offset", o.interior_offset > 0.0, "offset must be positive");
    if (r.has("domain")) {
        const json& d = r.raw("domain");
        if (!d.is_array() || d.size() != 2) r.bad("domain", "expected [a, b]");
        o.line_lo = r.to_real("domain", d[0]);
        o.line_hi = r.to_real("domain", d[1]);
        r.check("domain", o.line_hi > o.line_lo, "domain needs a < b");
    }
    o.circle_length = r.real("L", o.circle_length);
    r.check("L", o.circle_length > 0.0, "L must be positive");
    return validated(r, "chart", [&] { return geometry::make_chart(geometry::chart_id_from_string(r.str("chart")), o); });
}

inline Task prepare_bochner(const Reader& r, std::uint64_t seed) {
    r.only({"kind", "id", "seed", "chart", "offset", "domain", "L", "u", "f", "p", "points", "tol", "min_grad2",
            "pole_margin"});
    const auto chart = read_chart(r);
    const auto u = validated(r, "u", [&] { return chart.parser().parse(r.str("u")); });
    const auto f = validated(r, "f", [&] { return chart.parser().parse(r.str("f", "0")); });
    const double p = r.real("p");
    r.check("p", p >= 2.0, "Bochner identities are checked for p >= 2");
    const int points = r.integer("points", 20);
    r.check("points", points >= 1, "points must be positive");
    const double tol = r.real("tol", 1e-8);
    const double min_grad2 = r.real("min_grad2", 1e-2);
    const double pole_margin = r.real("pole_margin", 0.2);
    return [=] {
        Outcome out;
        out.row.space = chart.name();
        out.row.p = p;
        out.row.D = chart.diameter();
        std::mt19937_64 rng(seed);
        std::vector<std::uniform_real_distribution<double>> axes;
        for (int a = 0; a < chart.dim(); ++a) {
            auto [lo, hi] = chart.interior_range(a);
            if (chart.axis(a).singular_lo) lo = std::max(lo, chart.axis(a).lo + pole_margin);
            if (chart.axis(a).singular_hi) hi = std::min(hi, chart.axis(a).hi - pole_margin);
            axes.emplace_back(lo, hi);
        }
        double max22 = 0.0, max23 = 0.0;
        int checked = 0, rejected = 0;
        while (checked < points) {
            std::vector<double> x;
            for (auto& d : axes) x.push_back(d(rng));
            if (geometry::covariant_data(chart, u, f, p, x).w < min_grad2) {
                if (++rejected > 100 * points) fail(ErrorKind::degenerate_gradient, "too many near-critical samples");
                continue;
            }
            const auto b = identities::bochner_residual(chart, f, p, u, x);
            max22 = std::max(max22, b.res22);
            max23 = std::max(max23, b.res23);
            ++checked;
        }
        out.results["bochner"] = {{"points", checked}, {"rejected", rejected}, {"max_res22", max22},
                                  {"max_res23", max23}};
        check_le(out, "res22", max22, tol);
        check_le(out, "res23", max23, tol);
        out.row.residual = std::max(max22, max23);
        out.row.nodes = checked;
        return out;
    };
}

inline Task prepare_reilly(const Reader& r, std::uint64_t) {
    r.only({"kind", "id", "seed", "chart", "offset", "domain", "L", "u", "f", "p", "interior_nodes",
            "boundary_nodes", "region", "tol", "remark_tol", "refinements"});
    const auto chart = read_chart(r);
    r.check("chart", chart.has_boundary(), "chart has no boundary");
    const auto u = validated(r, "u", [&] { return chart.parser().parse(r.str("u")); });
    const auto f = validated(r, "f", [&] { return chart.parser().parse(r.str("f", "0")); });
    const double p = read_p(r);
    identities::ReillyOptions o;
    o.interior_nodes = r.integer("interior_nodes", o.interior_nodes);
    o.boundary_nodes = r.integer("boundary_nodes", o.boundary_nodes);
    r.check("interior_nodes", o.interior_nodes >= 2, "interior_nodes must be at least 2");
    r.check("boundary_nodes", o.boundary_nodes >= 2, "boundary_nodes must be at least 2");
    const std::string region = r.str("region", "full");
    if (region == "shrunk") o.domain = identities::ReillyDomain::shrunk;
    else if (region != "full") r.bad("region", "expected 'full' or 'shrunk'");
    const double tol = r.real("tol", 1e-6);
    const double remark_tol = r.real("remark_tol", 1e-8);
    std::vector<std::pair<int, int>> refinements;
    if (r.has("refinements")) {
        const json& a = r.raw("refinements");
        if (!a.is_array() || a.size() < 2) r.bad("refinements", "expected at least two [interior, boundary] pairs");
        for (const auto& e : a) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
                e[0].get<int>() < 2 || e[1].get<int>() < 2)
                r.bad("refinements", "each entry must be [interior >= 2, boundary >= 2]");
            refinements.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
    }
    return [=] {
        Outcome out;
        out.row.space = chart.name();
        out.row.p = p;
        out.row.D = chart.diameter();
        const auto rr = identities::reilly_residual(chart, f, p, u, o);
        json& j = out.results["reilly"];
        j = {{"interior_lhs", rr.interior_lhs}, {"boundary_rhs", rr.boundary_rhs}, {"residual", rr.residual},
             {"collar_bound", rr.collar_bound}, {"interior_nodes", rr.interior_nodes},
             {"boundary_nodes", rr.boundary_nodes}, {"min_w", rr.min_w}};
        check_le(out, "residual", rr.residual, tol);
        if (rr.remark_rhs) {
            const double diff = std::abs(*rr.remark_rhs - rr.boundary_rhs);
            j["remark_rhs"] = *rr.remark_rhs;
            check_le(out, "remark_agreement", diff, remark_tol * std::max(1.0, std::abs(rr.boundary_rhs)));
        }
        if (!refinements.empty()) {
            json seq = json::array();
            bool monotone = true;
            double prev = std::numeric_limits<double>::infinity();
            for (auto [ni, nb] : refinements) {
                identities::ReillyOptions ro = o;
                ro.interior_nodes = ni;
                ro.boundary_nodes = nb;
                const double res = identities::reilly_residual(chart, f, p, u, ro).residual;
                seq.push_back({{"interior_nodes", ni}, {"boundary_nodes", nb}, {"residual", res}});
                monotone = monotone && res <= std::max(prev, 1e-13);
                prev = res;
            }
            j["refinements"] = seq;
            add_check(out, "monotone_refinement", monotone ? 1.0 : 0.0, 1.0, monotone);
        }
        out.row.residual = rr.residual;
        out.row.nodes = rr.interior_nodes;
        return out;
    };
}

inline Task prepare(const json& cfg, std::uint64_t seed) {
    const Reader r(cfg, "config");
    const std::string kind = r.str("kind");
    if (kind == "eigen") return prepare_eigen(r, seed);
    if (kind == "bound") return prepare_bound(r, seed);
    if (kind == "gradient_estimate") return prepare_gradient_estimate(r, seed);
    if (kind == "bochner") return prepare_bochner(r, seed);
    if (kind == "reilly") return prepare_reilly(r, seed);
    if (kind == "sweep") r.bad("kind", "sweep configs run through sweep()");
    r.bad("kind", "unknown kind '" + kind + "' (bochner, reilly, eigen, bound, gradient_estimate, sweep)");
}

}  // namespace detail

/// Validates `cfg` (config errors propagate) and runs it. Runtime failures
/// become a failed report carrying the error kind and message.
inline Report run_scenario(const json& cfg, std::uint64_t global_seed = 0) {
    Report rep;
    rep.config = cfg;
    {
        const Reader r(cfg, "config");
        rep.kind = r.str("kind");
        rep.id = r.str("id", rep.kind);
        rep.seed = scenario_seed(rep.id, r.u64("seed", global_seed));
    }
    const auto task = detail::prepare(cfg, rep.seed);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        auto out = task();
        rep.pass = out.pass;
        rep.results = std::move(out.results);
        rep.row = std::move(out.row);
    } catch (const Error& e) {
        rep.pass = false;
        rep.error = json{{"kind", to_string(e.kind())}, {"message", e.what()}};
    } catch (const std::exception& e) {
        rep.pass = false;
        rep.error = json{{"kind", "internal"}, {"message", e.what()}};
    }
    rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace plap::harness
