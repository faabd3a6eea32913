#pragma once

// The four driver commands behind the hapticsim executable. Each takes a
// RunConfig built from a key-value file plus overrides, writes its outputs
// and a manifest into the output directory, and returns a process exit code.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hapticsim/acoustics.hpp"
#include "hapticsim/errors.hpp"
#include "hapticsim/explore.hpp"
#include "hapticsim/io.hpp"
#include "hapticsim/mapping.hpp"
#include "hapticsim/metrics.hpp"
#include "hapticsim/pipeline.hpp"

namespace hapticsim {

enum ExitCode : int {
    exit_ok = 0,
    exit_io_error = 1,
    exit_config_error = 2,
    exit_geometry_error = 3,
    exit_lost_stimulus = 4,
    exit_numerical_error = 5,
};

/// Start pose on the outline of a canonical shape.
inline Vec2 default_explore_start(const StimulusSpec& s) {
    if (s.name == "circle") return {0.0, 0.5 * s.size_mm};
    if (s.name == "square") return {0.0, 0.5 * s.size_mm};
    if (s.name == "triangle") return {0.0, -s.size_mm / (2.0 * std::sqrt(3.0))};
    return s.path.vertices.front();
}

struct RunConfig {
    StimulusSpec stimulus = make_shape("point");
    FocalSpotModel focal;
    SkinModel skin;
    SensorModel sensor{default_lever_gain, 0.05, 30};
    GridSpec field_region = default_field_region();
    ScanSpec scan;
    double map_spacing_mm = 1.0;
    std::optional<double> map_half_extent_mm;
    double length_scale_mm = 5.0;
    ExploreParams explore;
    std::uint64_t seed = 0;
    std::filesystem::path out = ".";
    bool snapshots = false;

    static RunConfig from(const KeyValues& kv) {
        RunConfig c;
        c.stimulus = shape_from_config(kv);
        c.focal.peak_pressure_kpa = kv.get_double("focal_peak_kpa", c.focal.peak_pressure_kpa);
        c.focal.sigma_mm = kv.get_double("focal_sigma_mm", c.focal.sigma_mm);
        c.focal.validate();
        c.skin.compliance_mm_per_kpa = kv.get_double("compliance_mm_per_kpa", c.skin.compliance_mm_per_kpa);
        c.skin.psf_sigma_mm = kv.get_double("psf_sigma_mm", c.skin.psf_sigma_mm);
        c.skin.detect_threshold_kpa = kv.get_double("detect_threshold_kpa", c.skin.detect_threshold_kpa);
        c.skin.validate();
        c.sensor.lever_gain = kv.get_double("lever_gain", c.sensor.lever_gain);
        c.sensor.marker_noise_mm = kv.get_double("marker_noise_mm", c.sensor.marker_noise_mm);
        c.sensor.frames_per_reading = kv.get_uint("frames_per_reading", c.sensor.frames_per_reading);
        c.sensor.validate();

        const double field_half = kv.get_double("field_half_extent_mm", 64.0);
        const double field_spacing = kv.get_double("field_spacing_mm", 0.5);
        c.field_region = GridSpec::centered({0.0, 0.0}, field_half, field_spacing);

        c.scan.rows = kv.get_uint("scan_rows", c.scan.rows);
        c.scan.cols = kv.get_uint("scan_cols", c.scan.cols);
        c.scan.spacing_mm = kv.get_double("scan_spacing_mm", c.scan.spacing_mm);
        const double default_ox = -0.5 * static_cast<double>(c.scan.cols - (c.scan.cols > 0)) * c.scan.spacing_mm;
        const double default_oy = 0.5 * static_cast<double>(c.scan.rows - (c.scan.rows > 0)) * c.scan.spacing_mm;
        c.scan.origin = {kv.get_double("scan_origin_x", default_ox), kv.get_double("scan_origin_y", default_oy)};
        c.scan.validate();

        c.map_spacing_mm = kv.get_double("map_spacing_mm", c.map_spacing_mm);
        if (kv.contains("map_half_extent_mm")) c.map_half_extent_mm = kv.get_double("map_half_extent_mm", 0.0);
        c.length_scale_mm = kv.get_double("gpr_length_scale_mm", c.length_scale_mm);
        if (!(c.length_scale_mm > 0.0)) throw ConfigError("gpr_length_scale_mm must be > 0");

        auto& e = c.explore;
        const Vec2 start = default_explore_start(c.stimulus);
        e.start = {kv.get_double("explore_start_x", start.x), kv.get_double("explore_start_y", start.y)};
        e.max_steps = kv.get_uint("explore_max_steps", e.max_steps);
        e.stop_radius_mm = kv.get_double("explore_stop_radius_mm", e.stop_radius_mm);
        e.chase_radius_mm = kv.get_double("explore_chase_radius_mm", e.chase_radius_mm);
        e.chase_sets_heading = kv.get_bool("explore_chase_sets_heading", e.chase_sets_heading);
        e.actions.step_mm = kv.get_double("explore_step_mm", e.actions.step_mm);
        e.perception.window_mm = kv.get_double("explore_window_mm", e.perception.window_mm);
        e.perception.threshold = kv.get_double("explore_threshold", e.perception.threshold);
        e.perception.use_history = kv.get_bool("explore_use_history", e.perception.use_history);
        e.perception.length_scale_mm = c.length_scale_mm;
        e.map_region = c.map_region();
        e.validate();

        c.seed = kv.get_uint("seed", 0);
        c.out = kv.get_string("out", ".");
        c.snapshots = kv.get_bool("snapshots", false);
        return c;
    }

    GridSpec map_region() const {
        if (map_half_extent_mm) {
            const Vec2 center{scan.origin.x + 0.5 * static_cast<double>(scan.cols - 1) * scan.spacing_mm,
                              scan.origin.y - 0.5 * static_cast<double>(scan.rows - 1) * scan.spacing_mm};
            return GridSpec::centered(center, *map_half_extent_mm, map_spacing_mm);
        }
        return scan_region(scan, map_spacing_mm);
    }

    /// Every parameter needed to reproduce a run.
    KeyValues manifest() const {
        KeyValues kv = shape_to_config(stimulus);
        kv.set("height_cm", stimulus.height_cm);
        kv.set("path_length_mm", path_length(stimulus.path));
        kv.set("focal_peak_kpa", focal.peak_pressure_kpa);
        kv.set("focal_sigma_mm", focal.sigma_mm);
        kv.set("compliance_mm_per_kpa", skin.compliance_mm_per_kpa);
        kv.set("psf_sigma_mm", skin.psf_sigma_mm);
        kv.set("detect_threshold_kpa", skin.detect_threshold_kpa);
        kv.set("lever_gain", sensor.lever_gain);
        kv.set("marker_noise_mm", sensor.marker_noise_mm);
        kv.set("frames_per_reading", std::to_string(sensor.frames_per_reading));
        kv.set("field_half_extent_mm", 0.5 * (field_region.x_max() - field_region.x0));
        kv.set("field_spacing_mm", field_region.spacing);
        kv.set("scan_rows", std::to_string(scan.rows));
        kv.set("scan_cols", std::to_string(scan.cols));
        kv.set("scan_spacing_mm", scan.spacing_mm);
        kv.set("scan_origin_x", scan.origin.x);
        kv.set("scan_origin_y", scan.origin.y);
        kv.set("map_spacing_mm", map_spacing_mm);
        if (map_half_extent_mm) kv.set("map_half_extent_mm", *map_half_extent_mm);
        kv.set("gpr_length_scale_mm", length_scale_mm);
        kv.set("explore_start_x", explore.start.x);
        kv.set("explore_start_y", explore.start.y);
        kv.set("explore_max_steps", std::to_string(explore.max_steps));
        kv.set("explore_stop_radius_mm", explore.stop_radius_mm);
        kv.set("explore_chase_radius_mm", explore.chase_radius_mm);
        kv.set("explore_chase_sets_heading", explore.chase_sets_heading ? "true" : "false");
        kv.set("explore_step_mm", explore.actions.step_mm);
        kv.set("explore_window_mm", explore.perception.window_mm);
        kv.set("explore_threshold", explore.perception.threshold);
        kv.set("explore_use_history", explore.perception.use_history ? "true" : "false");
        kv.set("seed", std::to_string(seed));
        return kv;
    }

    /// Exploration parameters with the reading noise measured for `pins`. A
    /// local maximum under four noise standard deviations counts as no signal.
    ExploreParams explore_params(const PinArray& pins) const {
        auto p = explore;
        p.perception.reading_noise_sd = reading_noise(pins);
        p.perception.min_signal_mm2 = 4.0 * p.perception.reading_noise_sd;
        p.snapshots = snapshots;
        return p;
    }

    StimulusPipeline pipeline() const { return StimulusPipeline::build(stimulus, focal, skin, sensor, field_region); }

    double reading_noise(const PinArray& pins) const {
        return estimate_reading_noise(std::make_shared<PinArray>(pins), sensor, derive_seed(seed, 0x4e01));
    }
};

namespace detail {

inline void prepare_output(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

inline void write_manifest(const std::filesystem::path& dir, const KeyValues& kv) {
    auto os = open_output(dir / "manifest.txt");
    kv.write(os);
}

}  // namespace detail

inline int cmd_synth(const RunConfig& cfg, std::ostream& log = std::cout) {
    detail::prepare_output(cfg.out);
    const auto pressure = time_averaged_field(cfg.stimulus, cfg.focal, cfg.field_region);
    const auto indentation = indent(pressure, cfg.skin);
    const auto& name = cfg.stimulus.name;
    write_grid_csv(cfg.out / (name + "_pressure.csv"), pressure.grid, pressure.grid.max_value());
    write_pgm16(cfg.out / (name + "_pressure.pgm"), pressure.grid);
    write_grid_csv(cfg.out / (name + "_indent.csv"), indentation.grid, indentation.grid.max_value());
    write_pgm16(cfg.out / (name + "_indent.pgm"), indentation.grid);

    auto kv = cfg.manifest();
    kv.set("pressure_peak_kpa", pressure.grid.max_value());
    kv.set("indent_peak_mm", indentation.grid.max_value());
    if (pressure.grid.max_value() > 0.0) kv.set("pressure_extent_mm", extent_at_fraction(pressure.grid));
    if (indentation.grid.max_value() > 0.0) kv.set("indent_extent_mm", extent_at_fraction(indentation.grid));
    detail::write_manifest(cfg.out, kv);
    log << name << ": pressure peak " << format_number(pressure.grid.max_value()) << " kPa, indentation peak "
        << format_number(indentation.grid.max_value()) << " mm\n";
    return exit_ok;
}

inline int cmd_scan(const RunConfig& cfg, std::ostream& log = std::cout) {
    detail::prepare_output(cfg.out);
    const auto pipeline = cfg.pipeline();
    const auto data = grid_scan(pipeline, cfg.scan, cfg.seed);
    const double noise = cfg.reading_noise(*pipeline.pins);
    const auto map = fuse_map(data.samples, cfg.map_region(), noise, cfg.length_scale_mm);
    const auto& name = cfg.stimulus.name;
    {
        auto os = open_output(cfg.out / (name + "_dataset.csv"));
        write_dataset_csv(os, data);
    }
    write_grid_csv(cfg.out / (name + "_map.csv"), map.grid, map.raw_max);
    write_pgm16(cfg.out / (name + "_map.pgm"), map.grid);

    auto kv = cfg.manifest();
    kv.set("poses", std::to_string(cfg.scan.pose_count()));
    kv.set("samples", std::to_string(data.samples.size()));
    kv.set("reading_noise_mm2", noise);
    kv.set("raw_max_mm2", map.raw_max);
    kv.set("all_zero", map.raw_max > 0.0 ? "false" : "true");
    detail::write_manifest(cfg.out, kv);
    log << name << ": " << cfg.scan.pose_count() << " poses, " << data.samples.size() << " samples, max dA "
        << format_number(map.raw_max) << " mm^2\n";
    return exit_ok;
}

inline int cmd_explore(const RunConfig& cfg, std::ostream& log = std::cout) {
    detail::prepare_output(cfg.out);
    const auto pipeline = cfg.pipeline();
    const auto params = cfg.explore_params(*pipeline.pins);
    const auto result = explore(pipeline, params, cfg.seed);
    const auto& name = cfg.stimulus.name;
    {
        auto os = open_output(cfg.out / (name + "_trajectory.csv"));
        write_trajectory_csv(os, result);
    }
    write_grid_csv(cfg.out / (name + "_explore_map.csv"), result.map.grid, result.map.raw_max);
    write_pgm16(cfg.out / (name + "_explore_map.pgm"), result.map.grid);
    for (std::size_t k = 0; k < result.snapshots.size(); ++k) {
        char file[64];
        std::snprintf(file, sizeof file, "_step_%03zu.pgm", k);
        write_pgm16(cfg.out / (name + file), result.snapshots[k].grid);
    }

    auto kv = cfg.manifest();
    kv.set("snapshots", cfg.snapshots ? "true" : "false");
    kv.set("reading_noise_mm2", params.perception.reading_noise_sd);
    kv.set("min_signal_mm2", params.perception.min_signal_mm2);
    kv.set("outcome", to_string(result.outcome));
    kv.set("steps", std::to_string(result.state.steps));
    kv.set("visited_poses", std::to_string(result.state.visited.size()));
    kv.set("raw_max_mm2", result.map.raw_max);
    detail::write_manifest(cfg.out, kv);
    log << name << ": " << to_string(result.outcome) << " after " << result.state.steps << " steps\n";
    return result.lost() ? exit_lost_stimulus : exit_ok;
}

/// Report rows for `maps` against an optional reference grid. Stimulus names
/// and path lengths come from a manifest.txt next to each map when present.
inline ComparisonReport compare_maps(const std::vector<std::filesystem::path>& maps,
                                     const std::optional<std::filesystem::path>& reference) {
    std::optional<ScalarGrid> ref;
    if (reference) ref = read_grid_csv(*reference).grid;
    std::vector<StimulusResult> rows;
    for (const auto& path : maps) {
        StimulusResult r;
        r.name = path.stem().string();
        const auto manifest = path.parent_path() / "manifest.txt";
        if (std::filesystem::exists(manifest)) {
            const auto kv = KeyValues::load(manifest);
            r.name = kv.get_string("shape", r.name);
            if (kv.contains("path_length_mm")) r.path_length_mm = kv.get_double("path_length_mm", 0.0);
        }
        if (std::filesystem::exists(path)) {
            const auto file = read_grid_csv(path);
            r.tactile = HapticMap{file.grid, file.raw_max};
            if (ref) {
                std::vector<bool> covered;
                resample(*ref, file.grid.spec, &covered);
                if (std::none_of(covered.begin(), covered.end(), [](bool b) { return b; }))
                    throw GeometryError(path.string() + " does not overlap the reference grid");
            }
        }
        r.reference = ref;
        rows.push_back(std::move(r));
    }
    return report(rows);
}

inline int cmd_compare(const std::vector<std::filesystem::path>& maps,
                       const std::optional<std::filesystem::path>& reference, const std::filesystem::path& out,
                       std::ostream& log = std::cout) {
    detail::prepare_output(out);
    const auto rep = compare_maps(maps, reference);
    {
        auto os = open_output(out / "report.csv");
        os << rep.to_csv();
    }
    {
        auto os = open_output(out / "report.txt");
        os << rep.to_text();
    }
    log << rep.to_text();
    return exit_ok;
}

}  // namespace hapticsim
