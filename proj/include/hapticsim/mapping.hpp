#pragma once

// Systematic grid scanning and GPR fusion of per-pin readings into a
// normalized world-frame haptic map.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hapticsim/errors.hpp"
#include "hapticsim/geometry.hpp"
#include "hapticsim/gpr.hpp"
#include "hapticsim/pipeline.hpp"
#include "hapticsim/sensor.hpp"

namespace hapticsim {

struct ScanSpec {
    std::size_t rows = 9;
    std::size_t cols = 9;
    double spacing_mm = 10.0;
    Vec2 origin{-40.0, 40.0};  // top-left pose, world mm

    void validate() const {
        if (rows < 1 || cols < 1) throw ConfigError("scan grid needs at least one row and column");
        if (!(spacing_mm > 0.0)) throw ConfigError("scan spacing must be > 0");
    }

    /// Row-major from the top-left: x grows along a row, y decreases row to row.
    Vec2 pose(std::size_t index) const {
        const auto r = index / cols, c = index % cols;
        return {origin.x + static_cast<double>(c) * spacing_mm, origin.y - static_cast<double>(r) * spacing_mm};
    }
    std::size_t pose_count() const { return rows * cols; }
};

struct Sample {
    std::size_t pose_index = 0;
    std::size_t pin_index = 0;
    Vec2 world;
    double delta_area = 0.0;
};

struct ScanDataset {
    std::vector<Sample> samples;
    std::vector<Vec2> poses;

    void append(std::size_t pose_index, const VoronoiFeatures& f, const PinArray& pins) {
        for (std::size_t i = 0; i < f.delta_area.size(); ++i)
            samples.push_back({pose_index, i, f.pose + pins.rest[i], f.delta_area[i]});
    }
};

/// Seed for the reading taken at a given pose (scans and explorations share it).
constexpr std::uint64_t pose_seed(std::uint64_t seed, std::size_t pose_index) {
    return derive_seed(seed, 0x5ca11ULL, pose_index);
}

inline ScanDataset grid_scan(const StimulusPipeline& pipeline, const ScanSpec& spec, std::uint64_t seed) {
    spec.validate();
    ScanDataset data;
    for (std::size_t k = 0; k < spec.pose_count(); ++k) {
        const Vec2 pose = spec.pose(k);
        if (const double over = pipeline.gradient.overhang(pose, pipeline.pins->radius); over > 0.0)
            throw GeometryError("scan pose " + std::to_string(k) + " at " + to_string(pose) +
                                " overhangs the field by " + std::to_string(over) + " mm");
    }
    data.samples.reserve(spec.pose_count() * pipeline.pins->rest.size());
    for (std::size_t k = 0; k < spec.pose_count(); ++k) {
        data.poses.push_back(spec.pose(k));
        data.append(k, pipeline.read(spec.pose(k), pose_seed(seed, k)), *pipeline.pins);
    }
    return data;
}

struct Observation {
    Vec2 position;
    double value;
};

/// Greedy merge, in sample order, of readings whose positions fall within
/// `radius` of an earlier cluster's first member; each cluster becomes one
/// observation at its mean position with its mean value.
inline std::vector<Observation> thin_samples(std::span<const Sample> samples, double radius = 1.0) {
    struct Cluster {
        Vec2 leader;
        Vec2 sum_pos;
        double sum_val;
        std::size_t count;
    };
    std::vector<Cluster> clusters;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
    auto key = [](std::int64_t i, std::int64_t j) { return (i << 32) ^ (j & 0xffffffff); };
    auto cell = [radius](double v) { return static_cast<std::int64_t>(std::floor(v / radius)); };

    for (const auto& s : samples) {
        const auto ci = cell(s.world.x), cj = cell(s.world.y);
        std::size_t found = clusters.size();
        for (std::int64_t dj = -1; dj <= 1 && found == clusters.size(); ++dj) {
            for (std::int64_t di = -1; di <= 1; ++di) {
                auto it = buckets.find(key(ci + di, cj + dj));
                if (it == buckets.end()) continue;
                for (auto idx : it->second) {
                    if (distance(clusters[idx].leader, s.world) <= radius && idx < found) found = idx;
                }
            }
        }
        if (found == clusters.size()) {
            clusters.push_back({s.world, s.world, s.delta_area, 1});
            buckets[key(ci, cj)].push_back(found);
        } else {
            auto& c = clusters[found];
            c.sum_pos += s.world;
            c.sum_val += s.delta_area;
            ++c.count;
        }
    }
    std::vector<Observation> out;
    out.reserve(clusters.size());
    for (const auto& c : clusters) {
        const auto n = static_cast<double>(c.count);
        out.push_back({c.sum_pos / n, c.sum_val / n});
    }
    return out;
}

/// Standard deviation of per-pin cell-area change of a single reading on an
/// unindented skin, by Monte Carlo over `readings` readings.
inline double estimate_reading_noise(std::shared_ptr<const PinArray> pins, const SensorModel& model,
                                     std::uint64_t seed, std::size_t readings = 8) {
    if (model.marker_noise_mm == 0.0) return 0.0;
    double s2 = 0.0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < readings; ++r) {
        const auto f = read_sensor(FlatField{}, {}, pins, model, derive_seed(seed, 0x401e, r));
        for (double v : f.delta_area) {
            s2 += v * v;
            ++n;
        }
    }
    return std::sqrt(s2 / static_cast<double>(n));
}

/// Fixed hyperparameters: length scale 5 mm, signal variance from the data,
/// noise variance from the single-reading noise (floored at 1e-4 of the
/// signal variance so noise-free runs stay well conditioned).
inline GprHyper default_hyper(std::span<const Observation> data, double reading_noise_sd, double length_scale = 5.0) {
    double mean = 0.0;
    for (const auto& o : data) mean += o.value;
    mean /= std::max<std::size_t>(1, data.size());
    double var = 0.0;
    for (const auto& o : data) var += (o.value - mean) * (o.value - mean);
    var /= std::max<std::size_t>(1, data.size());
    if (!(var > 0.0)) var = 1.0;
    return {var, length_scale, std::max(reading_noise_sd * reading_noise_sd, 1e-4 * var)};
}

inline GprModel fit_gpr(std::span<const Observation> data, const GprHyper& hyper) {
    std::vector<Vec2> x;
    std::vector<double> y;
    x.reserve(data.size());
    y.reserve(data.size());
    for (const auto& o : data) {
        x.push_back(o.position);
        y.push_back(o.value);
    }
    return GprModel(x, y, hyper);
}

struct HapticMap {
    ScalarGrid grid;       // normalized to [0, 1]
    double raw_max = 0.0;  // mm^2; 0 flags an all-zero posterior
};

/// Posterior mean on `region`, negatives clamped to zero, scaled by its maximum.
inline HapticMap predict_map(const GprModel& model, const GridSpec& region) {
    HapticMap map{model.mean(region), 0.0};
    for (auto& v : map.grid.values) v = std::max(v, 0.0);
    map.raw_max = map.grid.max_value();
    if (map.raw_max > 0.0)
        for (auto& v : map.grid.values) v = std::min(1.0, v / map.raw_max);
    return map;
}

/// Region covered by a scan's poses, at `spacing`.
inline GridSpec scan_region(const ScanSpec& spec, double spacing = 1.0) {
    const double w = static_cast<double>(spec.cols - 1) * spec.spacing_mm;
    const double h = static_cast<double>(spec.rows - 1) * spec.spacing_mm;
    GridSpec g{spec.origin.x, spec.origin.y - h, spacing, static_cast<std::size_t>(std::llround(w / spacing)) + 1,
               static_cast<std::size_t>(std::llround(h / spacing)) + 1};
    g.validate();
    return g;
}

/// Thin, fit and predict in one step.
inline HapticMap fuse_map(std::span<const Sample> samples, const GridSpec& region, double reading_noise_sd,
                          double length_scale = 5.0) {
    if (samples.empty()) return {ScalarGrid(region), 0.0};
    const auto obs = thin_samples(samples);
    return predict_map(fit_gpr(obs, default_hyper(obs, reading_noise_sd, length_scale)), region);
}

}  // namespace hapticsim
