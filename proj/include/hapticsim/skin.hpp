#pragma once

// Quasi-static skin response: thresholded pressure, spread by a unit-mass
// Gaussian point-spread kernel, scaled by a linear compliance.

#include <cmath>
#include <string>
#include <vector>

#include "hapticsim/acoustics.hpp"
#include "hapticsim/errors.hpp"
#include "hapticsim/geometry.hpp"

namespace hapticsim {

struct SkinModel {
    double compliance_mm_per_kpa = 1e-3;
    /// Broadens the 13 mm focal spot to a 19 mm indentation (20%-of-peak widths).
    double psf_sigma_mm = std::sqrt(std::pow(gaussian_sigma_for_extent(19.0), 2) -
                                    std::pow(gaussian_sigma_for_extent(13.0), 2));
    double detect_threshold_kpa = 0.0;

    void validate() const {
        if (!(compliance_mm_per_kpa > 0.0)) throw ConfigError("skin compliance must be > 0");
        if (!(psf_sigma_mm >= 0.0)) throw ConfigError("skin psf sigma must be >= 0");
        if (!(detect_threshold_kpa >= 0.0)) throw ConfigError("skin detection threshold must be >= 0");
    }
};

struct IndentationField {
    ScalarGrid grid;  // mm, positive = indented
};

namespace detail {

inline std::vector<double> gaussian_kernel(double sigma_cells, std::size_t radius) {
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double d = static_cast<double>(i) - static_cast<double>(radius);
        k[i] = std::exp(-0.5 * d * d / (sigma_cells * sigma_cells));
        sum += k[i];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// Separable convolution with zero padding.
inline ScalarGrid convolve_separable(const ScalarGrid& in, const std::vector<double>& kernel) {
    const auto r = static_cast<long>(kernel.size() / 2);
    const auto nx = static_cast<long>(in.spec.nx), ny = static_cast<long>(in.spec.ny);
    ScalarGrid tmp(in.spec), out(in.spec);
    for (long j = 0; j < ny; ++j) {
        for (long i = 0; i < nx; ++i) {
            const double v = in.values[static_cast<std::size_t>(j * nx + i)];
            if (v == 0.0) continue;
            const long lo = std::max(0L, i - r), hi = std::min(nx - 1, i + r);
            for (long t = lo; t <= hi; ++t)
                tmp.values[static_cast<std::size_t>(j * nx + t)] += v * kernel[static_cast<std::size_t>(t - i + r)];
        }
    }
    for (long j = 0; j < ny; ++j) {
        const long lo = std::max(0L, j - r), hi = std::min(ny - 1, j + r);
        for (long t = lo; t <= hi; ++t) {
            const double w = kernel[static_cast<std::size_t>(t - j + r)];
            const double* src = &tmp.values[static_cast<std::size_t>(j * nx)];
            double* dst = &out.values[static_cast<std::size_t>(t * nx)];
            for (long i = 0; i < nx; ++i) dst[i] += w * src[i];
        }
    }
    return out;
}

}  // namespace detail

inline IndentationField indent(const PressureField& pressure, const SkinModel& model) {
    model.validate();
    const auto& spec = pressure.grid.spec;
    spec.validate();
    if (pressure.grid.values.size() != spec.size()) throw GeometryError("pressure grid is inconsistent with its spec");

    ScalarGrid excess(spec);
    for (std::size_t k = 0; k < excess.values.size(); ++k)
        excess.values[k] = std::max(pressure.grid.values[k] - model.detect_threshold_kpa, 0.0);

    if (model.psf_sigma_mm > 0.0) {
        const double sigma_cells = model.psf_sigma_mm / spec.spacing;
        const auto radius = static_cast<std::size_t>(std::ceil(5.0 * sigma_cells));
        if (2 * radius + 1 > spec.nx || 2 * radius + 1 > spec.ny)
            throw GeometryError("field of " + std::to_string(spec.nx) + "x" + std::to_string(spec.ny) +
                                " nodes is too small for a spreading kernel of " + std::to_string(2 * radius + 1) +
                                " taps");
        excess = detail::convolve_separable(excess, detail::gaussian_kernel(sigma_cells, radius));
    }
    for (auto& v : excess.values) v = std::max(0.0, v * model.compliance_mm_per_kpa);
    return {std::move(excess)};
}

/// Spatial gradient of an indentation field: fourth-order central differences
/// on the nodes (second-order one node from the edge, one-sided on the edge),
/// bilinearly interpolated in between.
class SurfaceGradient {
public:
    explicit SurfaceGradient(const IndentationField& z) : gx_(z.grid.spec), gy_(z.grid.spec) {
        const auto& g = z.grid;
        const auto nx = g.spec.nx, ny = g.spec.ny;
        const double h = g.spec.spacing;
        auto diff = [h](auto&& f, std::size_t k, std::size_t n) {
            if (n < 2) return 0.0;
            if (k >= 2 && k + 2 < n) return (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2)) / (12.0 * h);
            if (k >= 1 && k + 1 < n) return (f(k + 1) - f(k - 1)) / (2.0 * h);
            if (k == 0) return (f(1) - f(0)) / h;
            return (f(n - 1) - f(n - 2)) / h;
        };
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                gx_.at(i, j) = diff([&](std::size_t t) { return g.at(t, j); }, i, nx);
                gy_.at(i, j) = diff([&](std::size_t t) { return g.at(i, t); }, j, ny);
            }
        }
    }

    const GridSpec& spec() const { return gx_.spec; }

    Vec2 gradient(Vec2 p) const {
        auto x = gx_.sample(p), y = gy_.sample(p);
        if (!x || !y) throw GeometryError("gradient requested outside the field at " + to_string(p));
        return {*x, *y};
    }

    /// How far a disc pokes out of the field (0 when fully inside).
    double overhang(Vec2 center, double radius) const {
        const auto& s = spec();
        return std::max({0.0, s.x0 - (center.x - radius), (center.x + radius) - s.x_max(), s.y0 - (center.y - radius),
                         (center.y + radius) - s.y_max()});
    }

private:
    ScalarGrid gx_, gy_;
};

}  // namespace hapticsim
