#pragma once

#include "plap/harness/scenario.hpp"
#include "plap/harness/sweep.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace plap::harness {

enum class Format { json, csv };

inline Format format_from_string(const std::string& s) {
    if (s == "json") return Format::json;
    if (s == "csv") return Format::csv;
    fail(ErrorKind::config, "unknown format '" + s + "' (json, csv)");
}

/// Removes every "wall_ms" member, recursively.
inline void canonicalize(json& j) {
    if (j.is_object()) {
        j.erase("wall_ms");
        for (auto& [key, v] : j.items()) canonicalize(v);
    } else if (j.is_array()) {
        for (auto& v : j) canonicalize(v);
    }
}

inline std::string dump_json(json j, bool canonical) {
    if (canonical) canonicalize(j);
    return j.dump(2) + "\n";
}

inline constexpr const char* kCsvHeader =
    "scenario_id,kind,space,p,m,K_min,D,bc,lambda,rhs,margin,pass,residual,nodes,seed,wall_ms";

namespace detail {

inline std::string csv_num(const std::optional<double>& v) {
    if (!v) return "";
    if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", *v);
    return buf;
}

inline std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace detail

inline std::string csv_row(const Report& r, bool canonical) {
    using detail::csv_num;
    using detail::csv_text;
    const Row& w = r.row;
    std::ostringstream os;
    os << csv_text(r.id) << ',' << csv_text(r.kind) << ',' << csv_text(w.space) << ',' << csv_num(w.p) << ','
       << csv_num(w.m) << ',' << csv_num(w.K_min) << ',' << csv_num(w.D) << ',' << csv_text(w.bc) << ','
       << csv_num(w.lambda) << ',' << csv_num(w.rhs) << ',' << csv_num(w.margin) << ','
       << (r.pass ? "true" : "false") << ',' << csv_num(w.residual) << ','
       << (w.nodes ? std::to_string(*w.nodes) : "") << ',' << r.seed << ','
       << (canonical ? "" : csv_num(r.wall_ms)) << '\n';
    return os.str();
}

inline std::string to_csv(const std::vector<Report>& rows, bool canonical) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) out += csv_row(r, canonical);
    return out;
}

/// Writes `content` to `path` through a temporary sibling and a rename, so
/// a failure never leaves a partial file at `path`.
inline void write_file(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) fail(ErrorKind::io, "output directory '" + dir.string() + "' does not exist");
    const fs::path tmp = fs::path(path.string() + ".partial");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) fail(ErrorKind::io, "cannot open '" + tmp.string() + "' for writing");
        os << content;
        os.flush();
        if (!os) {
            os.close();
            fs::remove(tmp, ec);
            fail(ErrorKind::io, "write to '" + tmp.string() + "' failed");
        }
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::io, "cannot move output into '" + path.string() + "'");
    }
}

}  // namespace plap::harness
