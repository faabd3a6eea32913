#pragma once

// Virtual TacTip: 127 marker-tipped pins on a 40 mm disc. Markers shear by
// -lever_gain * grad(z) under the indentation z, and the tactile signal is
// the change of each pin's bounded-Voronoi cell area.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hapticsim/errors.hpp"
#include "hapticsim/geometry.hpp"
#include "hapticsim/voronoi.hpp"

namespace hapticsim {

inline constexpr std::size_t pin_count = 127;
inline constexpr double disc_radius_mm = 20.0;
inline constexpr double pin_pitch_mm = 3.0;

/// SplitMix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return mix_seed(mix_seed(mix_seed(seed) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

struct PinArray {
    std::vector<Vec2> rest;         // sensor frame, mm
    std::vector<double> rest_area;  // bounded-Voronoi cell areas of `rest`, mm^2
    double radius = disc_radius_mm;
    std::vector<std::size_t> ring_of;  // hexagonal ring index per pin
};

/// Centered hexagonal lattice: a central pin and rings 1..6 of 6k pins, pitch 3 mm.
/// Pins are ordered ring by ring, counterclockwise from the +x axis.
inline std::shared_ptr<const PinArray> pin_lattice() {
    auto pins = std::make_shared<PinArray>();
    pins->rest.push_back({0.0, 0.0});
    pins->ring_of.push_back(0);
    for (std::size_t k = 1; k <= 6; ++k) {
        for (std::size_t side = 0; side < 6; ++side) {
            const double a0 = std::numbers::pi / 3.0 * static_cast<double>(side);
            const double a1 = std::numbers::pi / 3.0 * static_cast<double>(side + 1);
            const Vec2 c0{std::cos(a0), std::sin(a0)}, c1{std::cos(a1), std::sin(a1)};
            for (std::size_t t = 0; t < k; ++t) {
                const double f = static_cast<double>(t) / static_cast<double>(k);
                pins->rest.push_back((c0 * (1.0 - f) + c1 * f) * (pin_pitch_mm * static_cast<double>(k)));
                pins->ring_of.push_back(k);
            }
        }
    }
    pins->rest_area = bounded_voronoi_areas(pins->rest, {0.0, 0.0}, pins->radius);
    return pins;
}

/// Index of the pin that pin `i` maps to under a +60 degree rotation.
inline std::size_t rotate_pin_index(const PinArray& pins, std::size_t i) {
    const std::size_t k = pins.ring_of[i];
    if (k == 0) return i;
    const std::size_t ring_start = 1 + 3 * k * (k - 1);
    const std::size_t m = i - ring_start;
    return ring_start + (m + k) % (6 * k);
}

struct SensorModel {
    double lever_gain = 0.0;      // mm of marker shear per unit indentation slope
    double marker_noise_mm = 0.05;
    std::size_t frames_per_reading = 30;

    void validate() const {
        if (!(lever_gain > 0.0)) throw ConfigError("lever gain must be > 0");
        if (!(marker_noise_mm >= 0.0)) throw ConfigError("marker noise must be >= 0");
        if (frames_per_reading < 1) throw ConfigError("frames_per_reading must be >= 1");
    }
};

/// Anything that yields an indentation slope at world points and reports how
/// far a sensing disc would reach outside its support.
template <class F>
concept GradientField = requires(const F& f, Vec2 p, double r) {
    { f.gradient(p) } -> std::convertible_to<Vec2>;
    { f.overhang(p, r) } -> std::convertible_to<double>;
};

struct TactileFrame {
    std::shared_ptr<const PinArray> pins;
    std::vector<Vec2> deformed;  // sensor frame, mm
    Vec2 pose;                   // world position of the sensor center
};

struct VoronoiFeatures {
    std::vector<double> delta_area;  // mm^2, one per pin
    Vec2 pose;
};

inline void check_footprint(const GradientField auto& field, Vec2 pose, double radius) {
    if (const double over = field.overhang(pose, radius); over > 0.0)
        throw GeometryError("sensor at " + to_string(pose) + " overhangs the field by " + std::to_string(over) + " mm");
}

inline TactileFrame sample_markers(const GradientField auto& field, Vec2 pose, std::shared_ptr<const PinArray> pins,
                                   const SensorModel& model, std::uint64_t seed) {
    model.validate();
    check_footprint(field, pose, pins->radius);
    TactileFrame frame{pins, {}, pose};
    frame.deformed.reserve(pins->rest.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> jitter(0.0, 1.0);
    for (const Vec2 rest : pins->rest) {
        Vec2 p = rest - model.lever_gain * Vec2(field.gradient(pose + rest));
        if (model.marker_noise_mm > 0.0) {
            const double nx = jitter(rng), ny = jitter(rng);
            p += Vec2{nx, ny} * model.marker_noise_mm;
        }
        if (const double r = norm(p); r > pins->radius) p *= pins->radius / r;
        frame.deformed.push_back(p);
    }
    return frame;
}

inline VoronoiFeatures voronoi_features(const TactileFrame& frame) {
    const auto& pins = *frame.pins;
    if (frame.deformed.size() != pins.rest.size()) throw GeometryError("frame and pin array sizes differ");
    auto area = bounded_voronoi_areas(frame.deformed, {0.0, 0.0}, pins.radius);
    for (std::size_t i = 0; i < area.size(); ++i) area[i] -= pins.rest_area[i];
    return {std::move(area), frame.pose};
}

/// Mean cell-area change over `frames_per_reading` frames with independent marker jitter.
inline VoronoiFeatures read_sensor(const GradientField auto& field, Vec2 pose, std::shared_ptr<const PinArray> pins,
                                   const SensorModel& model, std::uint64_t seed) {
    model.validate();
    if (model.marker_noise_mm == 0.0) return voronoi_features(sample_markers(field, pose, pins, model, seed));

    VoronoiFeatures mean{std::vector<double>(pins->rest.size(), 0.0), pose};
    for (std::size_t f = 0; f < model.frames_per_reading; ++f) {
        const auto one = voronoi_features(sample_markers(field, pose, pins, model, derive_seed(seed, f)));
        for (std::size_t i = 0; i < one.delta_area.size(); ++i) mean.delta_area[i] += one.delta_area[i];
    }
    for (auto& v : mean.delta_area) v /= static_cast<double>(model.frames_per_reading);
    return mean;
}

/// A field with no indentation anywhere.
struct FlatField {
    Vec2 gradient(Vec2) const { return {}; }
    double overhang(Vec2, double) const { return 0.0; }
};

}  // namespace hapticsim
