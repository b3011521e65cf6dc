#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plap {

/// Failure classes raised by the library. The harness maps these onto exit
/// codes: `config` and `io` are exit-code-2 errors, everything else is a
/// runtime failure (exit code 1).
enum class ErrorKind {
    invalid_argument,
    domain_error,
    singular_point,
    degenerate_gradient,
    invalid_space,
    unsupported,
    bracket,
    not_applicable,
    config,
    io,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::domain_error: return "domain-error";
        case ErrorKind::singular_point: return "singular-point";
        case ErrorKind::degenerate_gradient: return "degenerate-gradient";
        case ErrorKind::invalid_space: return "invalid-space";
        case ErrorKind::unsupported: return "unsupported";
        case ErrorKind::bracket: return "bracket-error";
        case ErrorKind::not_applicable: return "not-applicable";
        case ErrorKind::config: return "config-error";
        case ErrorKind::io: return "io-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) {
        fail(kind, what);
    }
}

}  // namespace plap
