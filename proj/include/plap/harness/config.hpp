#pragma once

#include "plap/error.hpp"
#include "plap/field.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace plap::harness {

using json = nlohmann::json;

inline constexpr const char* kSchema = "plap-report/1";

/// Typed access to one JSON object with dotted field paths in every error.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) bad("", "expected an object");
    }

    const std::string& path() const { return path_; }
    bool has(const std::string& key) const { return obj_.contains(key) && !obj_.at(key).is_null(); }
    const json& raw(const std::string& key) const { return obj_.at(key); }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] void bad(const std::string& key, const std::string& msg) const {
        const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_) : field(key);
        fail(ErrorKind::config, where + ": " + msg);
    }

    std::string str(const std::string& key) const {
        if (!has(key)) bad(key, "required field is missing");
        if (!obj_.at(key).is_string()) bad(key, "expected a string");
        return obj_.at(key).get<std::string>();
    }
    std::string str(const std::string& key, const std::string& fallback) const {
        return has(key) ? str(key) : fallback;
    }

    /// A number, or a constant expression such as "2*pi".
    double real(const std::string& key) const {
        if (!has(key)) bad(key, "required field is missing");
        return to_real(key, obj_.at(key));
    }
    double real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

    /// Like real(), also accepting "inf" / "infinity".
    double real_or_inf(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (v.is_string() && (v == "inf" || v == "infinity")) return std::numeric_limits<double>::infinity();
        return to_real(key, v);
    }

    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) bad(key, "expected an integer");
        return v.get<int>();
    }

    std::uint64_t u64(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            bad(key, "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!obj_.at(key).is_boolean()) bad(key, "expected true or false");
        return obj_.at(key).get<bool>();
    }

    double to_real(const std::string& key, const json& v) const {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            try {
                const ScalarField c = FieldParser({}).parse(v.get<std::string>());
                const double r = c(std::vector<double>{});
                if (std::isfinite(r)) return r;
            } catch (const Error& e) {
                bad(key, e.what());
            }
        }
        bad(key, "expected a finite number or constant expression");
    }

    /// Rejects keys outside `allowed`.
    void only(const std::set<std::string>& allowed) const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!allowed.count(it.key())) bad(it.key(), "unknown field");
    }

    void check(const std::string& key, bool ok, const std::string& msg) const {
        if (!ok) bad(key, msg);
    }

private:
    const json& obj_;
    std::string path_;
};

/// 64-bit FNV-1a followed by a splitmix64 finalizer.
inline std::uint64_t scenario_seed(const std::string& id, std::uint64_t global) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : id) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::uint64_t z = h ^ (global + 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace plap::harness
