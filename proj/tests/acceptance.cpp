#include "plap/harness.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#ifndef PLAP_CLI_PATH
#error "PLAP_CLI_PATH must name the plap executable"
#endif

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

/// Runs the CLI suite with canonical output into `out` and returns its exit code.
int run_cli(const fs::path& out) {
    const std::string cmd = std::string("\"") + PLAP_CLI_PATH + "\" suite acceptance --canonical --out \"" +
                            out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return status == -1 ? -1 : WEXITSTATUS(status);
}

void print(int number, bool pass, const std::string& title, double ms, const std::string& note = "") {
    std::printf("AC%-2d %s  %s (%.0f ms)%s\n", number, pass ? "PASS" : "FAIL", title.c_str(), ms,
                note.empty() ? "" : ("  " + note).c_str());
    std::fflush(stdout);
}

}  // namespace

int main() {
    using namespace plap::harness;
    const auto t0 = std::chrono::steady_clock::now();

    const auto suite = acceptance_suite(0, [](const Criterion& c) {
        std::string note;
        if (!c.pass) note = c.detail.dump();
        print(c.number, c.pass, c.title, c.wall_ms, note);
    });
    bool pass = suite.pass;

    const auto t13 = std::chrono::steady_clock::now();
    const fs::path dir = fs::temp_directory_path() / ("plap_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const int code_a = run_cli(dir / "a.json");
    const int code_b = run_cli(dir / "b.json");
    const std::string a = slurp(dir / "a.json");
    const std::string b = slurp(dir / "b.json");
    fs::remove_all(dir);
    const bool same = !a.empty() && a == b;
    const bool ac13 = same && code_a == 0 && code_b == 0;
    const double ms13 = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t13).count();
    std::ostringstream note;
    if (!ac13) note << "exit codes " << code_a << "/" << code_b << ", identical=" << (same ? "yes" : "no");
    print(13, ac13, "canonical CLI output is byte-identical across runs", ms13, note.str());
    pass = pass && ac13;

    const double total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance: %s in %.1f s\n", pass ? "PASS" : "FAIL", total_s);
    return pass ? 0 : 1;
}
