#pragma once

#include <memory>

#include "hapticsim/acoustics.hpp"
#include "hapticsim/sensor.hpp"
#include "hapticsim/skin.hpp"

namespace hapticsim {

/// Lever gain that makes the centred unmodulated point read a maximum cell-area
/// change of 3.77 mm^2 with the default focal, skin and lattice models
/// (see calibrate_lever_gain).
inline constexpr double default_lever_gain = 15351.18460;

/// Everything needed to sense one stimulus: the synthesized pressure, the
/// resulting indentation and its gradient, and the sensor it is read with.
struct StimulusPipeline {
    StimulusSpec stimulus;
    FocalSpotModel focal;
    SkinModel skin;
    SensorModel sensor;
    PressureField pressure;
    IndentationField indentation;
    SurfaceGradient gradient;
    std::shared_ptr<const PinArray> pins;

    static StimulusPipeline build(StimulusSpec stimulus, const FocalSpotModel& focal, const SkinModel& skin,
                                  const SensorModel& sensor, const GridSpec& region,
                                  std::shared_ptr<const PinArray> pins = pin_lattice()) {
        auto pressure = time_averaged_field(stimulus, focal, region);
        auto indentation = indent(pressure, skin);
        SurfaceGradient gradient(indentation);
        return {std::move(stimulus), focal,       skin, sensor, std::move(pressure), std::move(indentation),
                std::move(gradient), std::move(pins)};
    }

    VoronoiFeatures read(Vec2 pose, std::uint64_t seed) const { return read_sensor(gradient, pose, pins, sensor, seed); }
};

/// Largest cell-area change of one noise-free frame at `pose` for a given lever gain.
inline double peak_delta_area(const GradientField auto& field, std::shared_ptr<const PinArray> pins, double lever_gain,
                              Vec2 pose = {}) {
    const SensorModel model{lever_gain, 0.0, 1};
    const auto f = voronoi_features(sample_markers(field, pose, std::move(pins), model, 0));
    return *std::max_element(f.delta_area.begin(), f.delta_area.end());
}

/// Lever gain at which the noise-free reading at `pose` peaks at `target_mm2`,
/// found by bracketing and bisection.
inline double calibrate_lever_gain(const GradientField auto& field, std::shared_ptr<const PinArray> pins,
                                   double target_mm2 = 3.77, Vec2 pose = {}) {
    if (!(target_mm2 > 0.0)) throw ConfigError("calibration target must be > 0");
    double lo = 0.0, hi = 1.0;
    for (int i = 0; peak_delta_area(field, pins, hi, pose) < target_mm2; ++i) {
        if (i > 80) throw NumericalError("stimulus too weak to reach the calibration target");
        lo = hi;
        hi *= 2.0;
    }
    for (int i = 0; i < 100 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (peak_delta_area(field, pins, mid, pose) < target_mm2 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Default synthesis region: a 128 mm square at 0.5 mm, enough for a 9x9 scan
/// at 10 mm plus the sensor disc.
inline GridSpec default_field_region() { return GridSpec::centered({0.0, 0.0}, 64.0, 0.5); }

}  // namespace hapticsim
