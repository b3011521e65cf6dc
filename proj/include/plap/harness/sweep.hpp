#pragma once

#include "plap/harness/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>

namespace plap::harness {

inline constexpr std::size_t kDefaultSweepCap = 10000;

struct SweepResult {
    std::string id;
    json axes;
    std::vector<Report> rows;
    bool pass = true;
    double wall_ms = 0.0;
};

namespace detail {

inline std::string axis_value_str(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    return v.dump();
}

}  // namespace detail

/// Expands a sweep config into one scenario config per cell. Axes are taken
/// in key order (alphabetical) and the last axis varies fastest. The axis
/// K_scale multiplies the base weight f; any other axis overrides the base
/// field of the same name.
inline std::vector<json> sweep_cells(const json& cfg) {
    const Reader r(cfg, "config");
    r.only({"kind", "id", "seed", "base", "axes", "cap"});
    if (r.str("kind") != "sweep") r.bad("kind", "expected 'sweep'");
    if (!r.has("base") || !r.raw("base").is_object()) r.bad("base", "expected a scenario object");
    if (!r.has("axes") || !r.raw("axes").is_object() || r.raw("axes").empty())
        r.bad("axes", "expected a nonempty object of value lists");
    const json& base = r.raw("base");
    const json& axes = r.raw("axes");
    const Reader base_reader(base, "config.base");
    if (base_reader.str("kind") == "sweep") base_reader.bad("kind", "sweeps do not nest");
    const std::string base_id = r.str("id", base_reader.str("id", base_reader.str("kind")));
    const long long cap_ll = r.integer("cap", static_cast<int>(kDefaultSweepCap));
    r.check("cap", cap_ll >= 1, "cap must be positive");
    const auto cap = static_cast<std::size_t>(cap_ll);

    std::vector<std::string> names;
    std::vector<const json*> values;
    std::size_t total = 1;
    for (auto it = axes.begin(); it != axes.end(); ++it) {
        const std::string key = it.key();
        if (!it->is_array() || it->empty()) r.bad("axes." + key, "expected a nonempty list");
        if (key == "kind" || key == "id") r.bad("axes." + key, "axis cannot override '" + key + "'");
        if (key == "K_scale") {
            for (const auto& v : *it)
                if (!v.is_number()) r.bad("axes.K_scale", "expected numbers");
        }
        names.push_back(key);
        values.push_back(&*it);
        total *= it->size();
        if (total > cap)
            r.bad("axes", "sweep has more than " + std::to_string(cap) + " cells (raise 'cap' to allow)");
    }

    std::vector<json> cells;
    cells.reserve(total);
    std::vector<std::size_t> idx(names.size(), 0);
    for (std::size_t c = 0; c < total; ++c) {
        json cell = base;
        std::string label;
        for (std::size_t a = 0; a < names.size(); ++a) {
            const json& v = (*values[a])[idx[a]];
            if (names[a] == "K_scale") {
                cell["f"] = "(" + detail::axis_value_str(v) + ")*(" + base.value("f", std::string("0")) + ")";
            } else {
                cell[names[a]] = v;
            }
            label += (a ? "," : "") + names[a] + "=" + detail::axis_value_str(v);
        }
        cell["id"] = base_id + "[" + label + "]";
        if (cfg.contains("seed") && !base.contains("seed")) cell["seed"] = cfg["seed"];
        cells.push_back(std::move(cell));
        for (std::size_t a = names.size(); a-- > 0;) {
            if (++idx[a] < values[a]->size()) break;
            idx[a] = 0;
        }
    }
    return cells;
}

/// Validates every cell, then runs them on `jobs` threads. Rows keep the
/// cell order whatever the execution order.
inline SweepResult sweep(const json& cfg, std::uint64_t global_seed = 0, unsigned jobs = 1) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepResult out;
    const auto cells = sweep_cells(cfg);
    out.axes = cfg.at("axes");
    const Reader base(cfg.at("base"), "config.base");
    out.id = Reader(cfg, "config").str("id", base.str("id", base.str("kind")));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        try {
            detail::prepare(cells[i], 0);
        } catch (const Error& e) {
            fail(ErrorKind::config, "sweep cell " + std::to_string(i) + " (" + cells[i]["id"].get<std::string>() +
                                        "): " + e.what());
        }
    }
    out.rows.resize(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) out.rows[i] = run_scenario(cells[i], global_seed);
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& r : out.rows) out.pass = out.pass && r.pass;
    out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

inline json to_json(const SweepResult& s) {
    json j;
    j["schema"] = kSchema;
    j["id"] = s.id;
    j["kind"] = "sweep";
    j["axes"] = s.axes;
    j["pass"] = s.pass;
    j["rows"] = json::array();
    for (const auto& r : s.rows) j["rows"].push_back(to_json(r));
    j["wall_ms"] = s.wall_ms;
    return j;
}

}  // namespace plap::harness
