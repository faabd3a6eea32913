#pragma once

// Voronoi diagram bounded by a disc. Each cell is built by half-plane
// clipping against the bisectors of its neighbours (nearest first, stopping
// once no further bisector can reach the part of the cell inside the disc),
// and its area is then intersected exactly with the circular boundary. The
// cells therefore tile the disc and their areas sum to pi r^2 up to round-off.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "hapticsim/errors.hpp"
#include "hapticsim/geometry.hpp"

namespace hapticsim {

using Polygon = std::vector<Vec2>;

inline double polygon_area(std::span<const Vec2> poly) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * a;
}

/// Keeps the part of a convex polygon where dot(normal, x) <= offset.
inline Polygon clip_half_plane(const Polygon& poly, Vec2 normal, double offset) {
    Polygon out;
    out.reserve(poly.size() + 1);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2 a = poly[i];
        const Vec2 b = poly[(i + 1) % poly.size()];
        const double da = dot(normal, a) - offset;
        const double db = dot(normal, b) - offset;
        if (da <= 0.0) out.push_back(a);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) out.push_back(a + (b - a) * (da / (da - db)));
    }
    return out;
}

namespace detail {

// Signed area of triangle(origin, a, b) intersected with the disc of radius r at the origin.
inline double triangle_disc_area(Vec2 a, Vec2 b, double r) {
    const Vec2 d = b - a;
    const double qa = dot(d, d);
    if (qa == 0.0) return 0.0;
    const double qb = dot(a, d);
    const double qc = dot(a, a) - r * r;
    std::array<double, 4> ts{};
    std::size_t n = 0;
    ts[n++] = 0.0;
    const double disc = qb * qb - qa * qc;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        const double t1 = (-qb - s) / qa, t2 = (-qb + s) / qa;
        if (t1 > 0.0 && t1 < 1.0) ts[n++] = t1;
        if (t2 > 0.0 && t2 < 1.0) ts[n++] = t2;
    }
    ts[n++] = 1.0;
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const Vec2 p = a + d * ts[k];
        const Vec2 q = a + d * ts[k + 1];
        const Vec2 mid = a + d * (0.5 * (ts[k] + ts[k + 1]));
        if (norm2(mid) <= r * r)
            area += 0.5 * cross(p, q);
        else
            area += 0.5 * r * r * std::atan2(cross(p, q), dot(p, q));
    }
    return area;
}

}  // namespace detail

/// Exact area of a simple polygon intersected with a disc.
inline double polygon_disc_area(std::span<const Vec2> poly, Vec2 center, double radius) {
    double a = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        a += detail::triangle_disc_area(poly[i] - center, poly[(i + 1) % poly.size()] - center, radius);
    return a;
}

/// Cell areas of the Voronoi diagram of `sites` clipped to the disc (center, radius).
/// Coincident sites are separated by a deterministic 1e-9 mm nudge.
inline std::vector<double> bounded_voronoi_areas(std::span<const Vec2> input, Vec2 center, double radius) {
    if (input.size() < 3) throw GeometryError("bounded Voronoi needs at least 3 sites");
    std::vector<Vec2> sites(input.begin(), input.end());
    const std::size_t n = sites.size();

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t bumps = 0;
        for (std::size_t j = 0; j < i; ++j)
            if (sites[j] == sites[i]) sites[i].x += 1e-9 * static_cast<double>(++bumps);
    }
    {
        bool spread = false;
        std::size_t far = 1;
        for (std::size_t k = 1; k < n; ++k)
            if (norm2(sites[k] - sites[0]) > norm2(sites[far] - sites[0])) far = k;
        const Vec2 axis = sites[far] - sites[0];
        for (std::size_t k = 1; k < n && !spread; ++k)
            spread = std::abs(cross(axis, sites[k] - sites[0])) > 1e-12 * norm2(axis);
        if (!spread) throw GeometryError("bounded Voronoi needs non-collinear sites");
    }

    const double half = 1.05 * radius;
    const Polygon box = {{center.x - half, center.y - half},
                         {center.x + half, center.y - half},
                         {center.x + half, center.y + half},
                         {center.x - half, center.y + half}};

    std::vector<double> areas(n);
    std::vector<std::size_t> order(n);
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = sites[i];
        for (std::size_t j = 0; j < n; ++j) d2[j] = norm2(sites[j] - p);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d2[a] < d2[b]; });

        Polygon cell = box;
        // Only the part of the cell inside the disc matters, and every point of it lies within `disc_reach`.
        const double disc_reach = norm(p - center) + radius;
        double reach2 = disc_reach * disc_reach;
        for (std::size_t j : order) {
            if (j == i) continue;
            if (0.25 * d2[j] >= reach2) break;
            const Vec2 q = sites[j];
            const Vec2 normal = q - p;
            cell = clip_half_plane(cell, normal, dot(normal, 0.5 * (p + q)));
            double far2 = 0.0;
            for (const auto& v : cell) far2 = std::max(far2, norm2(v - p));
            reach2 = std::min(far2, disc_reach * disc_reach);
        }
        areas[i] = polygon_disc_area(cell, center, radius);
    }
    return areas;
}

}  // namespace hapticsim
