#pragma once

#include "plap/error.hpp"
#include "plap/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace plap::eigen {

enum class SpaceKind { interval, circle, sphere, ball };

/// dirichlet: u = 0 on the boundary; neumann: free ends of an interval;
/// closed: no boundary (circle); natural: free ends where the volume
/// density vanishes (poles of a sphere, the center of a ball).
enum class BoundaryCondition { dirichlet, neumann, closed, natural };

inline std::string to_string(SpaceKind k) {
    switch (k) {
        case SpaceKind::interval: return "interval";
        case SpaceKind::circle: return "circle";
        case SpaceKind::sphere: return "sphere";
        case SpaceKind::ball: return "ball";
    }
    return "?";
}

inline std::string to_string(BoundaryCondition bc) {
    switch (bc) {
        case BoundaryCondition::dirichlet: return "dirichlet";
        case BoundaryCondition::neumann: return "neumann";
        case BoundaryCondition::closed: return "closed";
        case BoundaryCondition::natural: return "natural";
    }
    return "?";
}

inline BoundaryCondition bc_from_string(const std::string& s) {
    for (auto bc : {BoundaryCondition::dirichlet, BoundaryCondition::neumann, BoundaryCondition::closed,
                    BoundaryCondition::natural})
        if (to_string(bc) == s) return bc;
    fail(ErrorKind::config, "unknown boundary condition '" + s + "'");
}

/// Boundary data at one end of a 1-d model. For balls this is the sphere of
/// radius R; its second fundamental form is umbilic, so one number suffices.
struct EndpointGeometry {
    double x = 0.0;
    double ii = 0.0;
    double H = 0.0;
    double H_f = 0.0;
};

/// Radially symmetric weighted model reduced to one variable x.
///
/// interval [a, b] and circle [0, L) carry J = 1. sphere_n uses the polar
/// angle x in [0, π] with J = sin^{n-1}x; ball_n uses the radius x in [0, R]
/// with J = x^{n-1}. The weight f is a function of x alone.
class ModelSpace1D {
public:
    static ModelSpace1D interval(double a, double b, ScalarField f, BoundaryCondition bc) {
        require(b > a, ErrorKind::invalid_space, "interval needs a < b");
        require(bc == BoundaryCondition::dirichlet || bc == BoundaryCondition::neumann, ErrorKind::invalid_space,
                "interval takes dirichlet or neumann conditions");
        return ModelSpace1D(SpaceKind::interval, a, b, std::move(f), 1, bc);
    }

    static ModelSpace1D circle(double length, ScalarField f) {
        require(length > 0.0, ErrorKind::invalid_space, "circle length must be positive");
        ModelSpace1D s(SpaceKind::circle, 0.0, length, std::move(f), 1, BoundaryCondition::closed);
        s.check_periodic();
        return s;
    }

    static ModelSpace1D sphere(int n, ScalarField f) {
        require(n >= 2, ErrorKind::invalid_space, "sphere_n needs n >= 2");
        return ModelSpace1D(SpaceKind::sphere, 0.0, std::numbers::pi, std::move(f), n, BoundaryCondition::natural);
    }

    static ModelSpace1D ball(int n, double radius, ScalarField f, BoundaryCondition bc) {
        require(n >= 2, ErrorKind::invalid_space, "ball_n needs n >= 2");
        require(radius > 0.0, ErrorKind::invalid_space, "ball radius must be positive");
        require(bc == BoundaryCondition::dirichlet, ErrorKind::unsupported,
                "ball_n reduction supports dirichlet only: the first nonzero neumann mode is not radial");
        return ModelSpace1D(SpaceKind::ball, 0.0, radius, std::move(f), n, bc);
    }

    SpaceKind kind() const { return kind_; }
    std::string name() const {
        return kind_ == SpaceKind::sphere || kind_ == SpaceKind::ball ? to_string(kind_) + "_" + std::to_string(n_)
                                                                      : to_string(kind_);
    }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double length() const { return hi_ - lo_; }
    int n_ambient() const { return n_; }
    BoundaryCondition bc() const { return bc_; }
    const ScalarField& f() const { return f_; }
    bool periodic() const { return kind_ == SpaceKind::circle; }
    bool has_boundary() const { return kind_ == SpaceKind::interval || kind_ == SpaceKind::ball; }

    /// True when the volume density vanishes at that end.
    bool singular_lo() const { return kind_ == SpaceKind::sphere || kind_ == SpaceKind::ball; }
    bool singular_hi() const { return kind_ == SpaceKind::sphere; }

    /// u is pinned to zero at that end.
    bool fixed_lo() const { return bc_ == BoundaryCondition::dirichlet && kind_ == SpaceKind::interval; }
    bool fixed_hi() const { return bc_ == BoundaryCondition::dirichlet; }

    double diameter() const {
        switch (kind_) {
            case SpaceKind::interval: return length();
            case SpaceKind::circle: return length() / 2.0;
            case SpaceKind::sphere: return std::numbers::pi;
            case SpaceKind::ball: return 2.0 * hi_;
        }
        return 0.0;
    }

    double jacobian(double x) const {
        switch (kind_) {
            case SpaceKind::interval:
            case SpaceKind::circle: return 1.0;
            case SpaceKind::sphere: return std::pow(std::sin(x), n_ - 1);
            case SpaceKind::ball: return std::pow(x, n_ - 1);
        }
        return 0.0;
    }

    double density(double x) const { return jacobian(x) * std::exp(-f_({x})); }

    /// Smallest eigenvalue of Ric_f^m relative to g at coordinate x, from
    /// the closed-form curvature of each family. m = infinity drops the
    /// gradient term; m equal to n is accepted only for constant f.
    double min_curvature(double x, double m) const {
        const Jet fj = f_.jet(std::vector<double>{x});
        const double f1 = fj.d(0);
        const double f2 = fj.d(0, 0);
        const double tail = std::isinf(m) || m == n_ ? 0.0 : f1 * f1 / (m - n_);
        switch (kind_) {
            case SpaceKind::interval:
            case SpaceKind::circle: return f2 - tail;
            case SpaceKind::sphere: {
                const double radial = (n_ - 1) + f2 - tail;
                const double tangential = (n_ - 1) + f1 * std::cos(x) / std::sin(x);
                return std::min(radial, tangential);
            }
            case SpaceKind::ball: return std::min(f2 - tail, f1 / x);
        }
        return 0.0;
    }

    void validate_m(double m) const {
        if (std::isinf(m)) return;
        require(m > n_ || (m == n_ && f_.is_constant()), ErrorKind::invalid_argument,
                "m = " + std::to_string(m) + " must exceed the dimension " + std::to_string(n_) +
                    " (or equal it for constant f)");
    }

    /// Boundary pieces with outward-normal conventions. Interval ends are
    /// points, so II = H = 0 and H_f = -f'(x) n.
    std::vector<EndpointGeometry> boundary() const {
        std::vector<EndpointGeometry> out;
        auto fprime = [this](double x) { return f_.jet(std::vector<double>{x}).d(0); };
        if (kind_ == SpaceKind::interval) {
            out.push_back({lo_, 0.0, 0.0, fprime(lo_)});
            out.push_back({hi_, 0.0, 0.0, -fprime(hi_)});
        } else if (kind_ == SpaceKind::ball) {
            const double H = (n_ - 1) / hi_;
            out.push_back({hi_, 1.0 / hi_, H, H - fprime(hi_)});
        }
        return out;
    }

private:
    ModelSpace1D(SpaceKind kind, double lo, double hi, ScalarField f, int n, BoundaryCondition bc)
        : kind_(kind), lo_(lo), hi_(hi), n_(n), bc_(bc), f_(std::move(f)) {}

    void check_periodic() const {
        const Jet a = f_.jet(std::vector<double>{lo_});
        const Jet b = f_.jet(std::vector<double>{hi_});
        for (int k = 0; k <= 2; ++k) {
            const double scale = std::max({1.0, std::abs(a[k]), std::abs(b[k])});
            require(std::abs(a[k] - b[k]) <= 1e-10 * scale, ErrorKind::invalid_space,
                    "circle weight f is not periodic (jet order " + std::to_string(k) + " differs)");
        }
    }

    SpaceKind kind_;
    double lo_;
    double hi_;
    int n_;
    BoundaryCondition bc_;
    ScalarField f_;
};

/// Parses a weight expression over the coordinate x.
inline ScalarField parse_weight(const std::string& text) { return FieldParser({"x"}).parse(text); }

}  // namespace plap::eigen
