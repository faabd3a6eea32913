#pragma once

// Stimulus definitions (focal-point paths) and their time-averaged pressure
// on the sensing plane. A single focal spot is an isotropic Gaussian; a
// spatiotemporally modulated stimulus is the constant-speed dwell average of
// that spot along its path.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hapticsim/errors.hpp"
#include "hapticsim/geometry.hpp"

namespace hapticsim {

/// Gaussian sigma whose profile drops to `fraction` of its peak at diameter `extent`.
inline double gaussian_sigma_for_extent(double extent_mm, double fraction = 0.2) {
    return 0.5 * extent_mm / std::sqrt(-2.0 * std::log(fraction));
}

struct FocalSpotModel {
    double peak_pressure_kpa = 1.0;
    /// Calibrated so the unmodulated point is 13 mm wide at 20% of its peak.
    double sigma_mm = gaussian_sigma_for_extent(13.0);

    void validate() const {
        if (!(peak_pressure_kpa > 0.0)) throw ConfigError("focal spot peak pressure must be > 0");
        if (!(sigma_mm > 0.0)) throw ConfigError("focal spot sigma must be > 0");
    }
};

/// Ordered focal-point vertices. Segment i joins vertex i to i+1 (and the last
/// to the first when closed). Segments listed in `jumps` are repositioning
/// moves of the focal point: they carry no dwell and no length.
struct ParametricPath {
    std::vector<Vec2> vertices;
    bool closed = false;
    std::set<std::size_t> jumps;

    std::size_t segment_count() const {
        if (vertices.size() < 2) return 0;
        return closed ? vertices.size() : vertices.size() - 1;
    }

    void validate() const {
        if (vertices.empty()) throw ConfigError("path has no vertices");
        for (std::size_t i = 0; i < segment_count(); ++i) {
            const Vec2 a = vertices[i];
            const Vec2 b = vertices[(i + 1) % vertices.size()];
            if (a == b) throw ConfigError("path has repeated consecutive vertices at index " + std::to_string(i));
        }
        for (auto j : jumps)
            if (j >= segment_count()) throw ConfigError("path jump index out of range");
    }
};

inline double path_length(const ParametricPath& path) {
    double total = 0.0;
    for (std::size_t i = 0; i < path.segment_count(); ++i) {
        if (path.jumps.contains(i)) continue;
        total += distance(path.vertices[i], path.vertices[(i + 1) % path.vertices.size()]);
    }
    return total;
}

enum class StimulusKind { um_point, stm_path };

struct StimulusSpec {
    std::string name;
    StimulusKind kind = StimulusKind::um_point;
    ParametricPath path;
    double size_mm = 0.0;
    double stm_frequency_hz = 0.0;
    double height_cm = 20.0;  // metadata only
    double amplitude_scale = 1.0;

    void validate() const {
        path.validate();
        if (!(amplitude_scale >= 0.0 && amplitude_scale <= 1.0))
            throw ConfigError("amplitude_scale must lie in [0, 1]");
        if (kind == StimulusKind::um_point) {
            if (path.vertices.size() != 1) throw ConfigError("an unmodulated point takes exactly one vertex");
        } else {
            if (path.vertices.size() < 2 || !(path_length(path) > 0.0))
                throw ConfigError("a modulated path needs at least two distinct vertices");
            if (!(stm_frequency_hz > 0.0)) throw ConfigError("modulation frequency must be > 0");
        }
    }
};

inline constexpr std::array<std::string_view, 8> shape_names = {
    "point", "circle", "line", "triangle", "square", "small_cross", "large_cross", "rose"};

inline std::string valid_shape_list() {
    std::string s;
    for (auto n : shape_names) {
        if (!s.empty()) s += ", ";
        s += n;
    }
    return s;
}

namespace detail {

inline ParametricPath regular_polygon(std::size_t sides, double circumradius, double phase) {
    ParametricPath p;
    p.closed = true;
    for (std::size_t k = 0; k < sides; ++k) {
        const double a = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(sides);
        p.vertices.push_back({circumradius * std::cos(a), circumradius * std::sin(a)});
    }
    return p;
}

inline ParametricPath cross(double arm) {
    const double h = 0.5 * arm;
    ParametricPath p;
    p.vertices = {{-h, 0.0}, {h, 0.0}, {0.0, -h}, {0.0, h}};
    p.jumps = {1};
    return p;
}

inline ParametricPath rose(double extent) {
    // r = R |cos 2phi| reaches R along both axes, so the longest extent is 2R.
    const double radius = 0.5 * extent;
    constexpr std::size_t n = 720;
    ParametricPath p;
    p.closed = true;
    for (std::size_t k = 0; k < n; ++k) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        const double r = radius * std::abs(std::cos(2.0 * phi));
        Vec2 v{r * std::cos(phi), r * std::sin(phi)};
        // The rhodonea passes through the origin four times; skip the repeats.
        if (!p.vertices.empty() && p.vertices.back() == v) continue;
        p.vertices.push_back(v);
    }
    return p;
}

}  // namespace detail

/// Canonical stimuli. `size_mm` is the diameter (circle), side length (line,
/// triangle, square), stroke length (crosses) or longest extent (rose).
inline StimulusSpec make_shape(std::string_view name, std::optional<double> size_mm = std::nullopt) {
    if (size_mm && !(*size_mm > 0.0)) throw ConfigError("shape size must be positive");
    StimulusSpec s;
    s.name = std::string(name);
    s.kind = StimulusKind::stm_path;
    s.stm_frequency_hz = 100.0;
    s.height_cm = 15.0;
    if (name == "point") {
        s.kind = StimulusKind::um_point;
        s.stm_frequency_hz = 0.0;
        s.height_cm = 20.0;
        s.size_mm = 0.0;
        s.path.vertices = {{0.0, 0.0}};
    } else if (name == "circle") {
        s.size_mm = size_mm.value_or(20.0);
        s.stm_frequency_hz = 70.0;
        s.height_cm = 20.0;
        s.path = detail::regular_polygon(360, 0.5 * s.size_mm, 0.0);
    } else if (name == "line") {
        s.size_mm = size_mm.value_or(40.0);
        s.path.vertices = {{-0.5 * s.size_mm, 0.0}, {0.5 * s.size_mm, 0.0}};
    } else if (name == "triangle") {
        s.size_mm = size_mm.value_or(40.0);
        s.path = detail::regular_polygon(3, s.size_mm / std::sqrt(3.0), 0.5 * std::numbers::pi);
    } else if (name == "square") {
        s.size_mm = size_mm.value_or(40.0);
        s.path = detail::regular_polygon(4, s.size_mm / std::sqrt(2.0), 0.25 * std::numbers::pi);
    } else if (name == "small_cross") {
        s.size_mm = size_mm.value_or(40.0);
        s.path = detail::cross(s.size_mm);
    } else if (name == "large_cross") {
        s.size_mm = size_mm.value_or(60.0);
        s.path = detail::cross(s.size_mm);
    } else if (name == "rose") {
        s.size_mm = size_mm.value_or(60.0);
        s.path = detail::rose(s.size_mm);
    } else {
        throw ConfigError("unknown shape '" + std::string(name) + "'; valid shapes: " + valid_shape_list());
    }
    s.validate();
    return s;
}

/// Translates every vertex of the stimulus path.
inline StimulusSpec shifted(StimulusSpec s, Vec2 offset) {
    for (auto& v : s.path.vertices) v += offset;
    return s;
}

struct WeightedSpot {
    Vec2 position;
    double weight;  // dwell fraction; weights sum to 1
};

/// Dwell-weighted focal positions: each traversed segment is cut into pieces
/// no longer than `max_piece_mm` and the spot sits at every piece midpoint.
inline std::vector<WeightedSpot> dwell_spots(const ParametricPath& path, double max_piece_mm = 0.5) {
    if (path.vertices.size() == 1 || path.segment_count() == 0) return {{path.vertices.front(), 1.0}};
    const double total = path_length(path);
    std::vector<WeightedSpot> spots;
    for (std::size_t i = 0; i < path.segment_count(); ++i) {
        if (path.jumps.contains(i)) continue;
        const Vec2 a = path.vertices[i];
        const Vec2 b = path.vertices[(i + 1) % path.vertices.size()];
        const double len = distance(a, b);
        const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_piece_mm - 1e-12)));
        for (std::size_t k = 0; k < pieces; ++k) {
            const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(pieces);
            spots.push_back({a + (b - a) * t, len / static_cast<double>(pieces) / total});
        }
    }
    return spots;
}

struct PressureField {
    ScalarGrid grid;  // kPa
};

/// Time-averaged acoustic radiation pressure of `spec` on `region`.
inline PressureField time_averaged_field(const StimulusSpec& spec, const FocalSpotModel& model, const GridSpec& region) {
    spec.validate();
    model.validate();
    region.validate();
    if (region.spacing > 0.5 * model.sigma_mm)
        throw ConfigError("field spacing " + std::to_string(region.spacing) + " mm exceeds half the focal sigma (" +
                          std::to_string(0.5 * model.sigma_mm) + " mm)");

    PressureField field{ScalarGrid(region)};
    const double scale = model.peak_pressure_kpa * spec.amplitude_scale;
    if (scale == 0.0) return field;

    const double inv2s2 = 1.0 / (2.0 * model.sigma_mm * model.sigma_mm);
    // exp(-32) ~ 1e-14 relative: beyond 8 sigma a spot contributes nothing measurable.
    const double cutoff = 8.0 * model.sigma_mm;
    const auto spots = dwell_spots(spec.path);
    for (const auto& spot : spots) {
        const double w = scale * spot.weight;
        const auto lo_i = static_cast<long>(std::ceil((spot.position.x - cutoff - region.x0) / region.spacing));
        const auto hi_i = static_cast<long>(std::floor((spot.position.x + cutoff - region.x0) / region.spacing));
        const auto lo_j = static_cast<long>(std::ceil((spot.position.y - cutoff - region.y0) / region.spacing));
        const auto hi_j = static_cast<long>(std::floor((spot.position.y + cutoff - region.y0) / region.spacing));
        const long i0 = std::max(0L, lo_i), i1 = std::min(static_cast<long>(region.nx) - 1, hi_i);
        const long j0 = std::max(0L, lo_j), j1 = std::min(static_cast<long>(region.ny) - 1, hi_j);
        for (long j = j0; j <= j1; ++j) {
            const double dy = region.y0 + static_cast<double>(j) * region.spacing - spot.position.y;
            const double ey = std::exp(-dy * dy * inv2s2);
            for (long i = i0; i <= i1; ++i) {
                const double dx = region.x0 + static_cast<double>(i) * region.spacing - spot.position.x;
                field.grid.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) +=
                    w * ey * std::exp(-dx * dx * inv2s2);
            }
        }
    }
    return field;
}

}  // namespace hapticsim
