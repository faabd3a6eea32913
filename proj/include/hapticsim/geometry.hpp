#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "hapticsim/errors.hpp"

namespace hapticsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {a.x * s, a.y * s}; }
    friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

inline Vec2 rotated(Vec2 p, double radians) {
    const double c = std::cos(radians), s = std::sin(radians);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

inline double deg2rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Wraps an angle in degrees to [-180, 180).
inline double wrap_degrees(double a) {
    double w = std::fmod(a + 180.0, 360.0);
    if (w < 0.0) w += 360.0;
    return w - 180.0;
}

/// Regular node lattice: node (i, j) sits at (x0 + i*spacing, y0 + j*spacing).
/// Row j = 0 is the bottom (minimum y) row.
struct GridSpec {
    double x0 = 0.0;
    double y0 = 0.0;
    double spacing = 1.0;
    std::size_t nx = 0;
    std::size_t ny = 0;

    /// Square grid spanning [cx - half, cx + half] x [cy - half, cy + half].
    static GridSpec centered(Vec2 center, double half_extent, double spacing) {
        if (!(spacing > 0.0) || !(half_extent >= 0.0))
            throw ConfigError("grid spacing must be positive and extent non-negative");
        const auto cells = static_cast<std::size_t>(std::llround(2.0 * half_extent / spacing));
        if (std::abs(static_cast<double>(cells) * spacing - 2.0 * half_extent) > 1e-9 * std::max(1.0, half_extent))
            throw ConfigError("grid extent is not a multiple of the spacing");
        return {center.x - half_extent, center.y - half_extent, spacing, cells + 1, cells + 1};
    }

    void validate() const {
        if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("grid spacing must be positive");
        if (nx == 0 || ny == 0) throw ConfigError("grid must have at least one node per axis");
    }

    std::size_t size() const { return nx * ny; }
    double x_max() const { return x0 + static_cast<double>(nx - 1) * spacing; }
    double y_max() const { return y0 + static_cast<double>(ny - 1) * spacing; }
    Vec2 node(std::size_t i, std::size_t j) const {
        return {x0 + static_cast<double>(i) * spacing, y0 + static_cast<double>(j) * spacing};
    }
    bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x_max() && p.y >= y0 && p.y <= y_max(); }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

/// Scalar samples on a GridSpec, stored row-major from the bottom row.
struct ScalarGrid {
    GridSpec spec;
    std::vector<double> values;

    ScalarGrid() = default;
    explicit ScalarGrid(const GridSpec& s, double fill = 0.0) : spec(s), values(s.size(), fill) { s.validate(); }

    double& at(std::size_t i, std::size_t j) { return values[j * spec.nx + i]; }
    double at(std::size_t i, std::size_t j) const { return values[j * spec.nx + i]; }

    double max_value() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
    double min_value() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }

    /// Bilinear interpolation; nullopt outside the node hull.
    std::optional<double> sample(Vec2 p) const {
        if (!spec.contains(p)) return std::nullopt;
        const double fx = (p.x - spec.x0) / spec.spacing;
        const double fy = (p.y - spec.y0) / spec.spacing;
        auto i = static_cast<std::size_t>(std::floor(fx));
        auto j = static_cast<std::size_t>(std::floor(fy));
        i = std::min(i, spec.nx > 1 ? spec.nx - 2 : 0);
        j = std::min(j, spec.ny > 1 ? spec.ny - 2 : 0);
        const double tx = spec.nx > 1 ? fx - static_cast<double>(i) : 0.0;
        const double ty = spec.ny > 1 ? fy - static_cast<double>(j) : 0.0;
        const std::size_t i1 = spec.nx > 1 ? i + 1 : i;
        const std::size_t j1 = spec.ny > 1 ? j + 1 : j;
        const double a = at(i, j) * (1.0 - tx) + at(i1, j) * tx;
        const double b = at(i, j1) * (1.0 - tx) + at(i1, j1) * tx;
        return a * (1.0 - ty) + b * ty;
    }
};

/// Bilinear resampling of `src` onto `target`; nodes outside `src` are reported in `covered` as false.
inline ScalarGrid resample(const ScalarGrid& src, const GridSpec& target, std::vector<bool>* covered = nullptr) {
    ScalarGrid out(target);
    if (covered) covered->assign(target.size(), false);
    // Tolerate round-off at the hull so that identical extents map fully.
    const double eps = 1e-9 * src.spec.spacing;
    for (std::size_t j = 0; j < target.ny; ++j) {
        for (std::size_t i = 0; i < target.nx; ++i) {
            Vec2 p = target.node(i, j);
            if (p.x < src.spec.x0 && p.x > src.spec.x0 - eps) p.x = src.spec.x0;
            if (p.y < src.spec.y0 && p.y > src.spec.y0 - eps) p.y = src.spec.y0;
            if (p.x > src.spec.x_max() && p.x < src.spec.x_max() + eps) p.x = src.spec.x_max();
            if (p.y > src.spec.y_max() && p.y < src.spec.y_max() + eps) p.y = src.spec.y_max();
            if (auto v = src.sample(p)) {
                out.at(i, j) = *v;
                if (covered) (*covered)[j * target.nx + i] = true;
            }
        }
    }
    return out;
}

inline std::string to_string(Vec2 p) {
    std::ostringstream os;
    os << '(' << p.x << ", " << p.y << ')';
    return os.str();
}

}  // namespace hapticsim
