#pragma once

// Sense-perceive-act exploration. Perception regresses the readings around
// the sensor, keeps the cells above a fraction of the local maximum and
// summarises them by image moments (centroid, orientation). Action selection
// either chases the centroid or continues along the orientation, then snaps
// the heading to one of eight grid moves.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hapticsim/errors.hpp"
#include "hapticsim/geometry.hpp"
#include "hapticsim/mapping.hpp"
#include "hapticsim/pipeline.hpp"

namespace hapticsim {

struct Percept {
    Vec2 centroid;
    double orientation_deg = 0.0;  // [-90, 90)
    double mass = 0.0;             // zeroth moment, mm^2 summed over 1 mm cells
    double local_max = 0.0;        // mm^2
    bool above_threshold = false;
};

struct PerceptionParams {
    double window_mm = 30.0;
    double threshold = 0.3;        // fraction of the local maximum
    double cell_mm = 1.0;
    double length_scale_mm = 5.0;
    double reading_noise_sd = 0.0;
    double min_signal_mm2 = 0.0;   // absolute floor on the local maximum
    bool use_history = true;       // also regress readings from earlier poses inside the window

    void validate() const {
        if (!(window_mm > 0.0) || !(cell_mm > 0.0)) throw ConfigError("perception window and cell must be > 0");
        if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("binarization threshold must lie in (0, 1)");
        if (!(min_signal_mm2 >= 0.0)) throw ConfigError("minimum signal must be >= 0");
    }
};

/// Image moments of an intensity grid. Cells below `threshold` contribute nothing.
inline Percept moments_percept(const ScalarGrid& intensity, double threshold) {
    double m00 = 0.0, m10 = 0.0, m01 = 0.0;
    for (std::size_t j = 0; j < intensity.spec.ny; ++j)
        for (std::size_t i = 0; i < intensity.spec.nx; ++i)
            if (const double v = intensity.at(i, j); v >= threshold && v > 0.0) {
                const Vec2 p = intensity.spec.node(i, j);
                m00 += v;
                m10 += p.x * v;
                m01 += p.y * v;
            }
    Percept out;
    out.local_max = intensity.max_value();
    if (!(m00 > 0.0)) return out;
    out.mass = m00;
    out.centroid = {m10 / m00, m01 / m00};
    double mu20 = 0.0, mu02 = 0.0, mu11 = 0.0;
    for (std::size_t j = 0; j < intensity.spec.ny; ++j)
        for (std::size_t i = 0; i < intensity.spec.nx; ++i)
            if (const double v = intensity.at(i, j); v >= threshold && v > 0.0) {
                const Vec2 d = intensity.spec.node(i, j) - out.centroid;
                mu20 += d.x * d.x * v;
                mu02 += d.y * d.y * v;
                mu11 += d.x * d.y * v;
            }
    double theta = rad2deg(0.5 * std::atan2(2.0 * mu11, mu20 - mu02));
    if (theta >= 90.0) theta -= 180.0;
    out.orientation_deg = theta;
    out.above_threshold = true;
    return out;
}

/// Local percept from the readings inside a square window around `center`.
inline Percept perceive(std::span<const Sample> samples, Vec2 center, const PerceptionParams& params) {
    params.validate();
    const double half = 0.5 * params.window_mm;
    std::vector<Sample> local;
    for (const auto& s : samples)
        if (std::abs(s.world.x - center.x) <= half && std::abs(s.world.y - center.y) <= half) local.push_back(s);
    if (local.empty()) return {};

    const auto obs = thin_samples(local);
    const auto model = fit_gpr(obs, default_hyper(obs, params.reading_noise_sd, params.length_scale_mm));
    const auto cells = static_cast<std::size_t>(std::floor(params.window_mm / params.cell_mm + 1e-9));
    const double span = static_cast<double>(cells) * params.cell_mm;
    GridSpec grid{center.x - 0.5 * span, center.y - 0.5 * span, params.cell_mm, cells + 1, cells + 1};
    const ScalarGrid intensity = model.mean(grid);
    const double peak = intensity.max_value();
    if (!(peak > 0.0) || peak < params.min_signal_mm2) {
        Percept none;
        none.local_max = peak;
        return none;
    }
    return moments_percept(intensity, params.threshold * peak);
}

/// The eight grid moves, counterclockwise from +x.
struct ActionSet {
    double step_mm = 10.0;

    void validate() const {
        if (!(step_mm > 0.0)) throw ConfigError("action step must be > 0");
    }
    std::array<Vec2, 8> moves() const {
        const double a = step_mm;
        return {{{a, 0.0}, {a, a}, {0.0, a}, {-a, a}, {-a, 0.0}, {-a, -a}, {0.0, -a}, {a, -a}}};
    }
    static double move_angle_deg(std::size_t k) { return 45.0 * static_cast<double>(k); }
};

enum class Branch { chase, follow };

inline const char* to_string(Branch b) { return b == Branch::chase ? "chase" : "follow"; }

struct LastAction {
    Vec2 move;
    double angle_deg;  // heading the move was chosen for
};

struct ActionChoice {
    Vec2 move;
    double heading_deg;  // continuous heading before snapping; stored as the next "last action" angle
    Branch branch;
};

/// Index of the grid move closest in angle to `heading_deg`; exact ties go to
/// the move counterclockwise of the heading.
inline std::size_t closest_move(double heading_deg) {
    std::size_t best = 0;
    double best_gap = 1e300;
    for (std::size_t k = 0; k < 8; ++k) {
        const double signed_gap = wrap_degrees(ActionSet::move_angle_deg(k) - heading_deg);
        const double gap = std::abs(signed_gap);
        if (gap < best_gap - 1e-9 || (std::abs(gap - best_gap) <= 1e-9 && signed_gap > 0.0)) {
            best = k;
            best_gap = gap;
        }
    }
    return best;
}

inline ActionChoice select_action(const Percept& percept, Vec2 sensor, const std::optional<LastAction>& last,
                                  const ActionSet& actions, double chase_radius_mm = 5.0) {
    actions.validate();
    if (!percept.above_threshold) throw LostStimulus("no stimulus above threshold near " + to_string(sensor));
    const Vec2 offset = percept.centroid - sensor;
    double heading = 0.0;
    Branch branch = Branch::follow;
    if (norm(offset) > chase_radius_mm) {
        branch = Branch::chase;
        heading = rad2deg(std::atan2(offset.y, offset.x));
    } else {
        const double forward = percept.orientation_deg;
        const double backward = forward + 180.0;
        heading = forward;
        if (last && std::abs(wrap_degrees(backward - last->angle_deg)) < std::abs(wrap_degrees(forward - last->angle_deg)))
            heading = backward;
    }
    heading = wrap_degrees(heading);
    return {actions.moves()[closest_move(heading)], heading, branch};
}

struct ExploreParams {
    Vec2 start;
    std::size_t max_steps = 40;
    double stop_radius_mm = 10.0;
    std::size_t min_steps_before_stop = 4;
    double chase_radius_mm = 5.0;
    bool chase_sets_heading = false;  // when true a chase move also replaces the remembered heading
    ActionSet actions;
    PerceptionParams perception;
    GridSpec map_region = GridSpec::centered({0.0, 0.0}, 40.0, 1.0);
    bool snapshots = false;

    void validate() const {
        if (max_steps < 1) throw ConfigError("max steps must be >= 1");
        if (!(stop_radius_mm >= 0.0)) throw ConfigError("stop radius must be >= 0");
        actions.validate();
        perception.validate();
        map_region.validate();
    }
};

struct TrajectoryEntry {
    std::size_t step = 0;
    Vec2 pose;
    Percept percept;
    std::optional<ActionChoice> action;
};

struct ExplorationState {
    Vec2 position;
    std::optional<LastAction> last;
    std::vector<Vec2> visited;
    ScanDataset data;
    std::size_t steps = 0;
};

enum class ExploreOutcome { closed_loop, max_steps, lost_stimulus };

inline const char* to_string(ExploreOutcome o) {
    switch (o) {
        case ExploreOutcome::closed_loop: return "closed_loop";
        case ExploreOutcome::max_steps: return "max_steps";
        case ExploreOutcome::lost_stimulus: return "lost_stimulus";
    }
    return "?";
}

struct ExplorationResult {
    ExplorationState state;
    ExploreOutcome outcome = ExploreOutcome::max_steps;
    std::vector<TrajectoryEntry> log;
    HapticMap map;
    std::vector<HapticMap> snapshots;  // map after each sensed pose, when requested

    bool lost() const { return outcome == ExploreOutcome::lost_stimulus; }
};

inline ExplorationResult explore(const StimulusPipeline& pipeline, const ExploreParams& params, std::uint64_t seed) {
    params.validate();
    ExplorationResult out;
    auto& st = out.state;
    st.position = params.start;
    st.visited.push_back(params.start);

    for (;;) {
        const auto reading = pipeline.read(st.position, pose_seed(seed, st.steps));
        st.data.poses.push_back(st.position);
        st.data.append(st.data.poses.size() - 1, reading, *pipeline.pins);
        if (params.snapshots)
            out.snapshots.push_back(fuse_map(st.data.samples, params.map_region, params.perception.reading_noise_sd,
                                             params.perception.length_scale_mm));

        const std::span<const Sample> all(st.data.samples);
        const auto local = params.perception.use_history ? all : all.last(reading.delta_area.size());
        TrajectoryEntry entry{st.steps, st.position, perceive(local, st.position, params.perception), {}};
        if (!entry.percept.above_threshold) {
            out.log.push_back(entry);
            out.outcome = ExploreOutcome::lost_stimulus;
            break;
        }
        if (st.steps >= params.max_steps) {
            out.log.push_back(entry);
            out.outcome = ExploreOutcome::max_steps;
            break;
        }
        const auto choice = select_action(entry.percept, st.position, st.last, params.actions, params.chase_radius_mm);
        entry.action = choice;
        out.log.push_back(entry);

        if (choice.branch == Branch::follow || params.chase_sets_heading || !st.last)
            st.last = LastAction{choice.move, choice.heading_deg};
        st.position += choice.move;
        st.visited.push_back(st.position);
        ++st.steps;
        if (st.steps >= params.min_steps_before_stop && distance(st.position, params.start) <= params.stop_radius_mm) {
            out.outcome = ExploreOutcome::closed_loop;
            break;
        }
    }
    out.map = fuse_map(st.data.samples, params.map_region, params.perception.reading_noise_sd,
                       params.perception.length_scale_mm);
    return out;
}

}  // namespace hapticsim
