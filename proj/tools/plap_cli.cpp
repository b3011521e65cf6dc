#include "plap/harness.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace plap;
using namespace plap::harness;

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2 };

struct OutputFlags {
    std::string out;
    std::string format = "json";
    std::uint64_t seed = 0;
    bool canonical = false;
};

void add_output_flags(CLI::App* cmd, OutputFlags& f) {
    cmd->add_option("--out", f.out, "Write output to this path instead of stdout");
    cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", f.seed, "Global seed mixed into every scenario seed");
    cmd->add_flag("--canonical", f.canonical, "Omit wall-clock timings");
}

json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) fail(ErrorKind::io, "cannot read config '" + path + "'");
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::config, "config '" + path + "' is not valid JSON: " + e.what());
    }
}

void emit(const OutputFlags& f, const std::string& content) {
    if (f.out.empty()) {
        std::cout << content;
        std::cout.flush();
    } else {
        write_file(f.out, content);
    }
}

int run_cmd(const std::string& path, const OutputFlags& f) {
    const json cfg = load_config(path);
    if (cfg.is_object() && cfg.value("kind", "") == "sweep") {
        const auto s = sweep(cfg, f.seed, 1);
        emit(f, format_from_string(f.format) == Format::csv ? to_csv(s.rows, f.canonical)
                                                            : dump_json(to_json(s), f.canonical));
        return s.pass ? kOk : kCheckFailed;
    }
    const auto r = run_scenario(cfg, f.seed);
    emit(f, format_from_string(f.format) == Format::csv ? to_csv({r}, f.canonical) : dump_json(to_json(r), f.canonical));
    if (r.error) std::cerr << "scenario " << r.id << " failed: " << (*r.error)["message"].get<std::string>() << "\n";
    return r.pass ? kOk : kCheckFailed;
}

int sweep_cmd(const std::string& path, const OutputFlags& f, unsigned jobs) {
    const json cfg = load_config(path);
    const auto s = sweep(cfg, f.seed, jobs);
    emit(f, format_from_string(f.format) == Format::csv ? to_csv(s.rows, f.canonical)
                                                        : dump_json(to_json(s), f.canonical));
    return s.pass ? kOk : kCheckFailed;
}

int suite_cmd(const OutputFlags& f) {
    const auto s = acceptance_suite(f.seed, [](const Criterion& c) {
        std::fprintf(stderr, "AC%-2d %s  %s (%.0f ms)\n", c.number, c.pass ? "PASS" : "FAIL", c.title.c_str(),
                     c.wall_ms);
    });
    if (format_from_string(f.format) == Format::csv) {
        std::vector<Report> rows;
        for (const auto& c : s.criteria) {
            Report r;
            r.id = "AC" + std::to_string(c.number);
            r.kind = "acceptance";
            r.seed = f.seed;
            r.pass = c.pass;
            r.wall_ms = c.wall_ms;
            rows.push_back(std::move(r));
        }
        emit(f, to_csv(rows, f.canonical));
    } else {
        emit(f, dump_json(to_json(s), f.canonical));
    }
    return s.pass ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification lab for weighted p-Laplacian spectral estimates"};
    app.require_subcommand(1);

    OutputFlags run_flags, sweep_flags, suite_flags;
    std::string run_path, sweep_path, suite_name;
    unsigned jobs = 1;
    double pi_p_value = 0.0;
    bool pi_p_quadrature = false;

    auto* run = app.add_subcommand("run", "Run one scenario config (a sweep config is also accepted)");
    run->add_option("config", run_path, "Scenario JSON file")->required();
    add_output_flags(run, run_flags);

    auto* sw = app.add_subcommand("sweep", "Run the Cartesian product of a sweep config");
    sw->add_option("config", sweep_path, "Sweep JSON file")->required();
    add_output_flags(sw, sweep_flags);
    sw->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    auto* suite = app.add_subcommand("suite", "Run a built-in suite");
    suite->add_option("name", suite_name, "Suite name")->required()->check(CLI::IsMember({"acceptance"}));
    add_output_flags(suite, suite_flags);

    auto* pip = app.add_subcommand("pi-p", "Print the generalized pi for one p");
    pip->add_option("--p", pi_p_value, "Exponent p > 1")->required();
    pip->add_flag("--quadrature", pi_p_quadrature, "Integrate instead of using the closed form");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) return run_cmd(run_path, run_flags);
        if (*sw) return sweep_cmd(sweep_path, sweep_flags, jobs);
        if (*suite) return suite_cmd(suite_flags);
        if (*pip) {
            const double v =
                bounds::pi_p(pi_p_value, pi_p_quadrature ? bounds::PiMode::quadrature : bounds::PiMode::closed_form);
            std::printf("%.17g\n", v);
            return kOk;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kConfigError;
}
