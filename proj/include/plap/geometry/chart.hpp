#pragma once

#include "plap/error.hpp"
#include "plap/field.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace plap::geometry {

inline constexpr int kMaxDim = 2;

enum class ChartId { euclidean_plane, flat_torus, sphere2, disk_polar, hemisphere2, line1d, circle1d };

inline std::string to_string(ChartId id) {
    switch (id) {
        case ChartId::euclidean_plane: return "euclidean_plane";
        case ChartId::flat_torus: return "flat_torus";
        case ChartId::sphere2: return "sphere2";
        case ChartId::disk_polar: return "disk_polar";
        case ChartId::hemisphere2: return "hemisphere2";
        case ChartId::line1d: return "line1d";
        case ChartId::circle1d: return "circle1d";
    }
    return "?";
}

struct Axis {
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
    bool periodic = false;
    // The coordinate system (not the manifold) degenerates at this end.
    bool singular_lo = false;
    bool singular_hi = false;

    double extent() const { return hi - lo; }
};

/// A boundary piece where coordinate `fixed_axis` equals `value`. In 2-d the
/// piece is parameterized by the other coordinate; in 1-d it is a point.
struct BoundarySegment {
    int fixed_axis = 0;
    double value = 0.0;
    // +1 when the outward normal points toward increasing fixed coordinate.
    int outward = 1;
    // True for the artificial inner boundary created by cutting a collar of
    // width `interior_offset` around a singular coordinate axis.
    bool collar = false;
};

struct ChartOptions {
    double interior_offset = 1e-3;
    // line1d domain and circle1d circumference.
    double line_lo = -1.0;
    double line_hi = 1.0;
    double circle_length = 2.0 * std::numbers::pi;
};

/// Catalog patch of a model manifold: metric entries as scalar fields over
/// the chart coordinates plus analytic metadata.
class Chart {
public:
    ChartId id() const { return id_; }
    std::string name() const { return to_string(id_); }
    int dim() const { return dim_; }
    const std::vector<Axis>& axes() const { return axes_; }
    const Axis& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }
    double interior_offset() const { return offset_; }
    double diameter() const { return diameter_; }

    /// g_ij as a jet-evaluable field (symmetric; only i <= j is stored).
    const ScalarField& metric(int i, int j) const {
        return i <= j ? g_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]
                      : g_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    }

    const std::vector<BoundarySegment>& boundary() const { return boundary_; }
    bool has_boundary() const { return !boundary_.empty(); }

    /// Physical boundary plus the collars cut around singular axes; the
    /// union bounds the shrunken domain that quadrature actually covers.
    std::vector<BoundarySegment> integration_boundary() const {
        std::vector<BoundarySegment> out = boundary_;
        for (int a = 0; a < dim_; ++a) {
            const Axis& ax = axis(a);
            if (ax.singular_lo) out.push_back({a, ax.lo + offset_, -1, true});
            if (ax.singular_hi) out.push_back({a, ax.hi - offset_, +1, true});
        }
        return out;
    }

    /// Coordinate names, in axis order, for the expression parser.
    std::vector<std::string> coordinate_names() const {
        std::vector<std::string> names;
        for (const auto& a : axes_) names.push_back(a.name);
        return names;
    }

    FieldParser parser() const { return FieldParser(coordinate_names()); }

    /// Interior range of axis `a` once singular ends are cut back by the offset.
    std::pair<double, double> interior_range(int a) const {
        const Axis& ax = axis(a);
        return {ax.singular_lo ? ax.lo + offset_ : ax.lo, ax.singular_hi ? ax.hi - offset_ : ax.hi};
    }

    /// True when x lies in the closed coordinate box (periodic axes are
    /// unrestricted). Singular axes are caught by the metric determinant.
    bool contains(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim_) return false;
        for (int a = 0; a < dim_; ++a) {
            const Axis& ax = axis(a);
            if (ax.periodic) continue;
            const double v = x[static_cast<std::size_t>(a)];
            if (v < ax.lo - 1e-14 || v > ax.hi + 1e-14) return false;
        }
        return true;
    }

    friend Chart make_chart(ChartId id, const ChartOptions& opts);

private:
    ChartId id_{};
    int dim_ = 0;
    std::vector<Axis> axes_;
    std::array<std::array<ScalarField, kMaxDim>, kMaxDim> g_{};
    std::vector<BoundarySegment> boundary_;
    double offset_ = 1e-3;
    double diameter_ = 0.0;
};

inline Chart make_chart(ChartId id, const ChartOptions& opts = {}) {
    constexpr double pi = std::numbers::pi;
    require(opts.interior_offset > 0.0 && opts.interior_offset < 0.1, ErrorKind::invalid_argument,
            "interior offset must lie in (0, 0.1)");
    Chart c;
    c.id_ = id;
    c.offset_ = opts.interior_offset;
    const auto one = ScalarField::constant(1.0);
    const auto zero = ScalarField::constant(0.0);
    switch (id) {
        case ChartId::euclidean_plane:
            c.dim_ = 2;
            c.axes_ = {{"x", -2.0, 2.0}, {"y", -2.0, 2.0}};
            c.g_ = {{{one, zero}, {zero, one}}};
            c.diameter_ = 4.0 * std::sqrt(2.0);
            break;
        case ChartId::flat_torus:
            c.dim_ = 2;
            c.axes_ = {{"x", 0.0, 2.0 * pi, true}, {"y", 0.0, 2.0 * pi, true}};
            c.g_ = {{{one, zero}, {zero, one}}};
            c.diameter_ = pi * std::sqrt(2.0);
            break;
        case ChartId::sphere2: {
            c.dim_ = 2;
            c.axes_ = {{"theta", 0.0, pi, false, true, true}, {"phi", 0.0, 2.0 * pi, true}};
            const auto th = ScalarField::coordinate(0, "theta");
            c.g_ = {{{one, zero}, {zero, ipow(sin(th), 2)}}};
            c.diameter_ = pi;
            break;
        }
        case ChartId::hemisphere2: {
            c.dim_ = 2;
            c.axes_ = {{"theta", 0.0, pi / 2.0, false, true, false}, {"phi", 0.0, 2.0 * pi, true}};
            const auto th = ScalarField::coordinate(0, "theta");
            c.g_ = {{{one, zero}, {zero, ipow(sin(th), 2)}}};
            c.boundary_ = {{0, pi / 2.0, +1, false}};
            c.diameter_ = pi;
            break;
        }
        case ChartId::disk_polar: {
            c.dim_ = 2;
            c.axes_ = {{"r", 0.0, 1.0, false, true, false}, {"phi", 0.0, 2.0 * pi, true}};
            const auto r = ScalarField::coordinate(0, "r");
            c.g_ = {{{one, zero}, {zero, ipow(r, 2)}}};
            c.boundary_ = {{0, 1.0, +1, false}};
            c.diameter_ = 2.0;
            break;
        }
        case ChartId::line1d:
            require(opts.line_hi > opts.line_lo, ErrorKind::invalid_argument, "line1d needs lo < hi");
            c.dim_ = 1;
            c.axes_ = {{"x", opts.line_lo, opts.line_hi}};
            c.g_[0][0] = one;
            c.boundary_ = {{0, opts.line_lo, -1, false}, {0, opts.line_hi, +1, false}};
            c.diameter_ = opts.line_hi - opts.line_lo;
            break;
        case ChartId::circle1d:
            require(opts.circle_length > 0.0, ErrorKind::invalid_argument, "circle length must be positive");
            c.dim_ = 1;
            c.axes_ = {{"x", 0.0, opts.circle_length, true}};
            c.g_[0][0] = one;
            c.diameter_ = opts.circle_length / 2.0;
            break;
    }
    return c;
}

inline ChartId chart_id_from_string(const std::string& s) {
    for (ChartId id : {ChartId::euclidean_plane, ChartId::flat_torus, ChartId::sphere2, ChartId::disk_polar,
                       ChartId::hemisphere2, ChartId::line1d, ChartId::circle1d}) {
        if (to_string(id) == s) return id;
    }
    fail(ErrorKind::config, "unknown chart id '" + s + "'");
}

}  // namespace plap::geometry
