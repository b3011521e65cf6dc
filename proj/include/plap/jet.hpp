#pragma once

#include "plap/error.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace plap {

/// Multi-index α = (α_0, α_1, α_2); unused trailing slots are zero.
using MultiIndex = std::array<int, 3>;

namespace detail {

inline constexpr int kJetOrder = 3;
inline constexpr int kJetMaxDim = 3;
inline constexpr int kJetMaxCoeffs = 20;  // binomial(3 + 3, 3)
inline constexpr int kJetMaxPairs = 84;   // binomial(6 + 3, 3)

struct JetLayout {
    int dim = 0;
    int size = 0;
    std::array<MultiIndex, kJetMaxCoeffs> alpha{};
    std::array<int, kJetMaxCoeffs> degree{};
    // Truncated Cauchy product: c[out[t]] += a[lhs[t]] * b[rhs[t]].
    int pairs = 0;
    std::array<std::int8_t, kJetMaxPairs> lhs{};
    std::array<std::int8_t, kJetMaxPairs> rhs{};
    std::array<std::int8_t, kJetMaxPairs> out{};
    // raise[v][k] = index of alpha[k] + e_v, or -1 past the order.
    std::array<std::array<std::int8_t, kJetMaxCoeffs>, kJetMaxDim> raise{};

    constexpr int index_of(const MultiIndex& a) const {
        for (int k = 0; k < size; ++k) {
            if (alpha[k][0] == a[0] && alpha[k][1] == a[1] && alpha[k][2] == a[2]) {
                return k;
            }
        }
        return -1;
    }
};

constexpr JetLayout make_layout(int dim) {
    JetLayout L{};
    L.dim = dim;
    // Graded order: all multi-indices of degree 0, then 1, 2, 3; within a
    // degree, lexicographically descending in the leading variable.
    for (int deg = 0; deg <= kJetOrder; ++deg) {
        for (int a0 = deg; a0 >= 0; --a0) {
            for (int a1 = deg - a0; a1 >= 0; --a1) {
                const int a2 = deg - a0 - a1;
                if ((dim < 2 && a1 != 0) || (dim < 3 && a2 != 0)) {
                    continue;
                }
                L.alpha[L.size] = MultiIndex{a0, a1, a2};
                L.degree[L.size] = deg;
                ++L.size;
            }
        }
    }
    for (int i = 0; i < L.size; ++i) {
        for (int j = 0; j < L.size; ++j) {
            if (L.degree[i] + L.degree[j] > kJetOrder) {
                continue;
            }
            const MultiIndex s{L.alpha[i][0] + L.alpha[j][0], L.alpha[i][1] + L.alpha[j][1],
                               L.alpha[i][2] + L.alpha[j][2]};
            L.lhs[L.pairs] = static_cast<std::int8_t>(i);
            L.rhs[L.pairs] = static_cast<std::int8_t>(j);
            L.out[L.pairs] = static_cast<std::int8_t>(L.index_of(s));
            ++L.pairs;
        }
    }
    for (int v = 0; v < kJetMaxDim; ++v) {
        for (int k = 0; k < kJetMaxCoeffs; ++k) {
            L.raise[v][k] = -1;
        }
        if (v >= dim) {
            continue;
        }
        for (int k = 0; k < L.size; ++k) {
            MultiIndex a = L.alpha[k];
            a[v] += 1;
            if (L.degree[k] + 1 <= kJetOrder) {
                L.raise[v][k] = static_cast<std::int8_t>(L.index_of(a));
            }
        }
    }
    return L;
}

inline constexpr std::array<JetLayout, 3> kLayouts{make_layout(1), make_layout(2), make_layout(3)};

inline const JetLayout& layout(int dim) { return kLayouts[dim - 1]; }

constexpr double factorial(int n) {
    double r = 1.0;
    for (int k = 2; k <= n; ++k) {
        r *= k;
    }
    return r;
}

}  // namespace detail

/// Order-3 truncated Taylor expansion of a scalar in 1-3 variables.
///
/// Coefficients are Taylor coefficients (∂^α φ / α!) at the expansion point,
/// so multiplication is a plain truncated convolution. Jets produced by
/// differentiating another jet carry garbage-free zeros above their valid
/// order; callers track that validity themselves.
class Jet {
public:
    static constexpr int order = detail::kJetOrder;

    Jet() : Jet(1) {}
    explicit Jet(int dim) : dim_(dim) {
        require(dim >= 1 && dim <= detail::kJetMaxDim, ErrorKind::invalid_argument,
                "jet dimension must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
        c_.fill(0.0);
    }

    static Jet constant(double value, int dim) {
        Jet j(dim);
        j.c_[0] = value;
        return j;
    }

    /// Coordinate function x_var shifted to take `value` at the expansion point.
    static Jet seed(double value, int var, int dim) {
        Jet j(dim);
        require(var >= 0 && var < dim, ErrorKind::invalid_argument,
                "seed variable " + std::to_string(var) + " out of range for dim " + std::to_string(dim));
        j.c_[0] = value;
        MultiIndex a{0, 0, 0};
        a[var] = 1;
        j.c_[static_cast<std::size_t>(j.layout().index_of(a))] = 1.0;
        return j;
    }

    int dim() const { return dim_; }
    int size() const { return layout().size; }
    double value() const { return c_[0]; }

    double operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    double& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

    const MultiIndex& multi_index(int k) const { return layout().alpha[static_cast<std::size_t>(k)]; }

    double coeff(const MultiIndex& a) const {
        const int k = checked_index(a);
        return c_[static_cast<std::size_t>(k)];
    }

    /// ∂^α φ at the expansion point.
    double derivative(const MultiIndex& a) const {
        const int k = checked_index(a);
        return c_[static_cast<std::size_t>(k)] * detail::factorial(a[0]) * detail::factorial(a[1]) *
               detail::factorial(a[2]);
    }

    /// ∂φ/∂x_i at the expansion point.
    double d(int i) const {
        MultiIndex a{0, 0, 0};
        a[i] += 1;
        return derivative(a);
    }

    /// ∂²φ/∂x_i∂x_j at the expansion point.
    double d(int i, int j) const {
        MultiIndex a{0, 0, 0};
        a[i] += 1;
        a[j] += 1;
        return derivative(a);
    }

    /// Jet of ∂φ/∂x_var. The result is exact up to order 2; its order-3
    /// coefficients are zero.
    Jet differentiate(int var) const {
        require(var >= 0 && var < dim_, ErrorKind::invalid_argument, "differentiation variable out of range");
        const auto& L = layout();
        Jet r(dim_);
        for (int k = 0; k < L.size; ++k) {
            const int up = L.raise[static_cast<std::size_t>(var)][static_cast<std::size_t>(k)];
            if (up >= 0) {
                r.c_[static_cast<std::size_t>(k)] =
                    (L.alpha[static_cast<std::size_t>(k)][static_cast<std::size_t>(var)] + 1) *
                    c_[static_cast<std::size_t>(up)];
            }
        }
        return r;
    }

    /// Zero every coefficient of degree above `keep`.
    Jet truncated(int keep) const {
        const auto& L = layout();
        Jet r = *this;
        for (int k = 0; k < L.size; ++k) {
            if (L.degree[static_cast<std::size_t>(k)] > keep) {
                r.c_[static_cast<std::size_t>(k)] = 0.0;
            }
        }
        return r;
    }

    Jet& operator+=(const Jet& o) {
        check_dim(o);
        for (int k = 0; k < size(); ++k) c_[static_cast<std::size_t>(k)] += o.c_[static_cast<std::size_t>(k)];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        check_dim(o);
        for (int k = 0; k < size(); ++k) c_[static_cast<std::size_t>(k)] -= o.c_[static_cast<std::size_t>(k)];
        return *this;
    }
    Jet& operator*=(double s) {
        for (int k = 0; k < size(); ++k) c_[static_cast<std::size_t>(k)] *= s;
        return *this;
    }
    Jet& operator+=(double s) {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a) { return a *= -1.0; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a += -s; }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
    friend Jet operator/(Jet a, double s) { return a *= (1.0 / s); }

    friend Jet operator*(const Jet& a, const Jet& b) {
        a.check_dim(b);
        const auto& L = a.layout();
        Jet r(a.dim_);
        for (int t = 0; t < L.pairs; ++t) {
            r.c_[static_cast<std::size_t>(L.out[static_cast<std::size_t>(t)])] +=
                a.c_[static_cast<std::size_t>(L.lhs[static_cast<std::size_t>(t)])] *
                b.c_[static_cast<std::size_t>(L.rhs[static_cast<std::size_t>(t)])];
        }
        return r;
    }
    Jet& operator*=(const Jet& o) { return *this = *this * o; }

private:
    const detail::JetLayout& layout() const { return detail::layout(dim_); }

    int checked_index(const MultiIndex& a) const {
        const int k = layout().index_of(a);
        require(k >= 0, ErrorKind::invalid_argument, "multi-index outside the order-3 jet");
        return k;
    }

    void check_dim(const Jet& o) const {
        require(dim_ == o.dim_, ErrorKind::invalid_argument,
                "jet dimension mismatch (" + std::to_string(dim_) + " vs " + std::to_string(o.dim_) + ")");
    }

    int dim_;
    std::array<double, detail::kJetMaxCoeffs> c_{};
};

/// Univariate primitives that may be composed with a jet.
enum class Primitive { exp, sin, cos, log, pow, recip };

/// Taylor composition g(a) through order 3, where g is `prim` (with exponent
/// `alpha` for pow). log and pow need a strictly positive base; recip needs
/// a nonzero one.
inline Jet jet_chain(Primitive prim, const Jet& a, double alpha = 0.0) {
    const double x = a.value();
    std::array<double, 4> g{};
    switch (prim) {
        case Primitive::exp: {
            const double e = std::exp(x);
            g = {e, e, e, e};
            break;
        }
        case Primitive::sin: {
            const double s = std::sin(x), c = std::cos(x);
            g = {s, c, -s, -c};
            break;
        }
        case Primitive::cos: {
            const double s = std::sin(x), c = std::cos(x);
            g = {c, -s, -c, s};
            break;
        }
        case Primitive::log:
            require(x > 0.0, ErrorKind::domain_error, "log of nonpositive value " + std::to_string(x));
            g = {std::log(x), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)};
            break;
        case Primitive::pow: {
            require(x > 0.0, ErrorKind::domain_error, "pow of nonpositive base " + std::to_string(x));
            const double p0 = std::pow(x, alpha);
            g = {p0, alpha * p0 / x, alpha * (alpha - 1.0) * p0 / (x * x),
                 alpha * (alpha - 1.0) * (alpha - 2.0) * p0 / (x * x * x)};
            break;
        }
        case Primitive::recip:
            require(x != 0.0, ErrorKind::domain_error, "reciprocal of zero");
            g = {1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x), -6.0 / (x * x * x * x)};
            break;
    }
    Jet h = a;
    h[0] = 0.0;
    const Jet h2 = h * h;
    const Jet h3 = h2 * h;
    Jet r = Jet::constant(g[0], a.dim());
    r += h * g[1];
    r += h2 * (g[2] / 2.0);
    r += h3 * (g[3] / 6.0);
    return r;
}

inline Jet exp(const Jet& a) { return jet_chain(Primitive::exp, a); }
inline Jet sin(const Jet& a) { return jet_chain(Primitive::sin, a); }
inline Jet cos(const Jet& a) { return jet_chain(Primitive::cos, a); }
inline Jet log(const Jet& a) { return jet_chain(Primitive::log, a); }
inline Jet pow(const Jet& a, double alpha) { return jet_chain(Primitive::pow, a, alpha); }
inline Jet sqrt(const Jet& a) { return jet_chain(Primitive::pow, a, 0.5); }
inline Jet recip(const Jet& a) { return jet_chain(Primitive::recip, a); }

inline Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
inline Jet operator/(double s, const Jet& b) { return recip(b) * s; }

/// Integer power by repeated multiplication; valid for any base.
inline Jet ipow(const Jet& a, int n) {
    if (n < 0) {
        return recip(ipow(a, -n));
    }
    Jet r = Jet::constant(1.0, a.dim());
    for (int k = 0; k < n; ++k) {
        r *= a;
    }
    return r;
}

/// Seeded coordinate variable x_var taking `value` at the expansion point.
inline Jet jet_seed(double value, int var, int dim) { return Jet::seed(value, var, dim); }

/// Truncated Cauchy product.
inline Jet jet_mul(const Jet& a, const Jet& b) { return a * b; }

}  // namespace plap
