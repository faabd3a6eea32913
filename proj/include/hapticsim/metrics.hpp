#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hapticsim/errors.hpp"
#include "hapticsim/geometry.hpp"
#include "hapticsim/mapping.hpp"

namespace hapticsim {

namespace detail {

struct Moments {
    double mass = 0.0;
    Vec2 centroid;
    double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;

    /// Principal axis angle in radians, (-pi/2, pi/2]; 0 for isotropic mass.
    double axis() const {
        if (std::hypot(mu20 - mu02, 2.0 * mu11) <= 1e-9 * (mu20 + mu02)) return 0.0;
        return 0.5 * std::atan2(2.0 * mu11, mu20 - mu02);
    }
};

inline Moments moments_above(const ScalarGrid& g, double threshold) {
    Moments m;
    double sx = 0.0, sy = 0.0;
    for (std::size_t j = 0; j < g.spec.ny; ++j)
        for (std::size_t i = 0; i < g.spec.nx; ++i)
            if (const double v = g.at(i, j); v >= threshold) {
                const Vec2 p = g.spec.node(i, j);
                m.mass += v;
                sx += v * p.x;
                sy += v * p.y;
            }
    if (m.mass <= 0.0) return m;
    m.centroid = {sx / m.mass, sy / m.mass};
    for (std::size_t j = 0; j < g.spec.ny; ++j)
        for (std::size_t i = 0; i < g.spec.nx; ++i)
            if (const double v = g.at(i, j); v >= threshold) {
                const Vec2 d = g.spec.node(i, j) - m.centroid;
                m.mu20 += v * d.x * d.x;
                m.mu02 += v * d.y * d.y;
                m.mu11 += v * d.x * d.y;
            }
    return m;
}

// Distance along `dir` from `origin` at which the bilinear profile crosses
// `threshold`, refined by bisection between an above sample at `in` and a
// below sample at `out`.
inline double refine_crossing(const ScalarGrid& g, Vec2 origin, Vec2 dir, double in, double out, double threshold) {
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (in + out);
        const auto v = g.sample(origin + dir * mid);
        if (v && *v >= threshold)
            in = mid;
        else
            out = mid;
    }
    return 0.5 * (in + out);
}

// Largest distance along `dir` at which the profile is still above threshold.
inline double outermost_crossing(const ScalarGrid& g, Vec2 origin, Vec2 dir, double threshold) {
    const double step = 0.25 * g.spec.spacing;
    double reach = 0.0;
    while (g.spec.contains(origin + dir * (reach + step))) reach += step;
    for (double s = reach; s >= 0.0; s -= step) {
        const auto v = g.sample(origin + dir * s);
        if (v && *v >= threshold) {
            if (s >= reach) return s;
            return refine_crossing(g, origin, dir, s, s + step, threshold);
        }
    }
    return 0.0;
}

// First distance along `dir` at which the profile drops below threshold.
inline double first_crossing(const ScalarGrid& g, Vec2 origin, Vec2 dir, double threshold) {
    const double step = 0.25 * g.spec.spacing;
    for (double s = step;; s += step) {
        const auto v = g.sample(origin + dir * s);
        if (!v) return s - step;
        if (*v < threshold) return refine_crossing(g, origin, dir, s - step, s, threshold);
    }
}

}  // namespace detail

/// Width of the region above `fraction` of the global peak. Blobs are measured
/// through the centroid along the principal axis of the above-threshold mass; for
/// rings (centre below threshold) the outermost crossings through the ring
/// centre give the outer diameter.
inline double extent_at_fraction(const ScalarGrid& map, double fraction = 0.2) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("extent fraction must lie in (0, 1)");
    const auto peak_it = std::max_element(map.values.begin(), map.values.end());
    if (peak_it == map.values.end() || !(*peak_it > 0.0)) throw GeometryError("extent of an all-zero map");
    const double threshold = fraction * *peak_it;
    const auto m = detail::moments_above(map, threshold);
    const double axis = m.axis();
    const Vec2 dir{std::cos(axis), std::sin(axis)};

    const auto at_centroid = map.sample(m.centroid);
    if (at_centroid && *at_centroid < threshold) {
        return detail::outermost_crossing(map, m.centroid, dir, threshold) +
               detail::outermost_crossing(map, m.centroid, -dir, threshold);
    }
    return detail::first_crossing(map, m.centroid, dir, threshold) +
           detail::first_crossing(map, m.centroid, -dir, threshold);
}

inline double extent_at_fraction(const HapticMap& map, double fraction = 0.2) {
    return extent_at_fraction(map.grid, fraction);
}

/// Pixel-to-pixel RMSE in percent after scaling each map to [0, 1] by its own
/// maximum over the compared pixels. `b` is resampled bilinearly onto `a`'s
/// grid when the grids differ; `mask`, if given, selects pixels of `a`.
inline double rmse_percent(const ScalarGrid& a, const ScalarGrid& b, const std::vector<bool>* mask = nullptr) {
    std::vector<bool> covered(a.spec.size(), true);
    const ScalarGrid bb = (a.spec == b.spec) ? b : resample(b, a.spec, &covered);
    if (mask) {
        if (mask->size() != a.spec.size()) throw ConfigError("RMSE mask does not match the grid");
        for (std::size_t k = 0; k < covered.size(); ++k) covered[k] = covered[k] && (*mask)[k];
    }
    double max_a = 0.0, max_b = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < covered.size(); ++k) {
        if (!covered[k]) continue;
        max_a = std::max(max_a, a.values[k]);
        max_b = std::max(max_b, bb.values[k]);
        ++n;
    }
    if (n == 0) throw GeometryError("maps do not overlap");
    const double sa = max_a > 0.0 ? 1.0 / max_a : 1.0;
    const double sb = max_b > 0.0 ? 1.0 / max_b : 1.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < covered.size(); ++k) {
        if (!covered[k]) continue;
        const double d = std::max(0.0, a.values[k]) * sa - std::max(0.0, bb.values[k]) * sb;
        sum += d * d;
    }
    return 100.0 * std::sqrt(sum / static_cast<double>(n));
}

inline double rmse_percent(const HapticMap& a, const HapticMap& b) { return rmse_percent(a.grid, b.grid); }

/// Cells of `spec` within `radius` of any of `poses`, e.g. the band swept by
/// the sensor footprint along an exploration path.
inline std::vector<bool> near_poses_mask(const GridSpec& spec, std::span<const Vec2> poses, double radius) {
    std::vector<bool> mask(spec.size(), false);
    for (std::size_t j = 0; j < spec.ny; ++j)
        for (std::size_t i = 0; i < spec.nx; ++i) {
            const Vec2 p = spec.node(i, j);
            mask[j * spec.nx + i] =
                std::any_of(poses.begin(), poses.end(), [&](Vec2 q) { return distance(p, q) <= radius; });
        }
    return mask;
}

/// Inputs for one report row. Absent maps leave the row incomplete.
struct StimulusResult {
    std::string name;
    std::optional<HapticMap> tactile;
    std::optional<ScalarGrid> reference;
    std::optional<double> path_length_mm;
};

struct ReportRow {
    std::string stimulus;
    std::optional<double> peak_mm2;
    std::optional<double> extent_mm;
    std::optional<double> rmse_percent;
    std::optional<double> path_length_mm;
    std::optional<double> max_delta_area_mm2;
    bool complete = true;
};

struct ComparisonReport {
    std::vector<ReportRow> rows;

    std::string to_csv() const {
        std::ostringstream os;
        os << "stimulus,peak_mm2,extent_mm,rmse_percent,path_length_mm,max_delta_area_mm2,complete\n";
        for (const auto& r : rows) {
            os << r.stimulus << ',' << cell(r.peak_mm2, 4) << ',' << cell(r.extent_mm, 2) << ','
               << cell(r.rmse_percent, 2) << ',' << cell(r.path_length_mm, 1) << ','
               << cell(r.max_delta_area_mm2, 4) << ',' << (r.complete ? "yes" : "no") << '\n';
        }
        return os.str();
    }

    std::string to_text() const {
        const std::vector<std::string> head = {"stimulus", "peak (mm^2)", "size (mm)", "RMSE (%)", "path (mm)",
                                               "max dA (mm^2)", "complete"};
        std::vector<std::vector<std::string>> body;
        for (const auto& r : rows)
            body.push_back({r.stimulus, cell(r.peak_mm2, 4), cell(r.extent_mm, 2), cell(r.rmse_percent, 2),
                            cell(r.path_length_mm, 1), cell(r.max_delta_area_mm2, 4), r.complete ? "yes" : "no"});
        std::vector<std::size_t> width(head.size());
        for (std::size_t c = 0; c < head.size(); ++c) {
            width[c] = head[c].size();
            for (const auto& b : body) width[c] = std::max(width[c], b[c].size());
        }
        std::ostringstream os;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < cells.size(); ++c) {
                os << cells[c];
                if (c + 1 < cells.size())
                    os << std::string(width[c] - cells[c].size() + 2, ' ');
                else
                    os << '\n';
            }
        };
        line(head);
        std::size_t total = 2 * (head.size() - 1);
        for (auto w : width) total += w;
        os << std::string(total, '-') << '\n';
        for (const auto& b : body) line(b);
        os << "path lengths are in millimetres; '-' marks a value that could not be computed\n";
        return os.str();
    }

private:
    static std::string cell(const std::optional<double>& v, int digits) {
        if (!v) return "-";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", digits, *v);
        return buf;
    }
};

inline ComparisonReport report(std::span<const StimulusResult> stimuli) {
    ComparisonReport out;
    for (const auto& s : stimuli) {
        ReportRow row;
        row.stimulus = s.name;
        row.path_length_mm = s.path_length_mm;
        if (!s.tactile) {
            row.complete = false;
            out.rows.push_back(row);
            continue;
        }
        row.peak_mm2 = s.tactile->raw_max;
        row.max_delta_area_mm2 = s.tactile->raw_max;
        if (s.tactile->raw_max > 0.0)
            row.extent_mm = extent_at_fraction(*s.tactile);
        else
            row.complete = false;
        if (s.reference) {
            try {
                row.rmse_percent = rmse_percent(s.tactile->grid, *s.reference);
            } catch (const GeometryError&) {
                row.complete = false;
            }
        }
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace hapticsim
