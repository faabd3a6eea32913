#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hapticsim/acoustics.hpp"
#include "hapticsim/metrics.hpp"

using namespace hapticsim;

namespace {

GridSpec small_region(double half = 30.0, double spacing = 0.5) { return GridSpec::centered({0.0, 0.0}, half, spacing); }

double max_abs_diff(const ScalarGrid& a, const ScalarGrid& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) d = std::max(d, std::abs(a.values[k] - b.values[k]));
    return d;
}

}  // namespace

TEST(Shapes, CircleIsClosed20mmAt70Hz) {
    const auto s = make_shape("circle");
    EXPECT_EQ(s.kind, StimulusKind::stm_path);
    EXPECT_TRUE(s.path.closed);
    EXPECT_DOUBLE_EQ(s.stm_frequency_hz, 70.0);
    EXPECT_EQ(s.path.vertices.size(), 360u);
    for (auto v : s.path.vertices) EXPECT_NEAR(norm(v), 10.0, 1e-12);
}

TEST(Shapes, LineIsOpen40mmAt100Hz) {
    const auto s = make_shape("line");
    EXPECT_FALSE(s.path.closed);
    EXPECT_DOUBLE_EQ(s.stm_frequency_hz, 100.0);
    EXPECT_NEAR(path_length(s.path), 40.0, 1e-12);
}

TEST(Shapes, PointIsSingleVertexAtOrigin) {
    const auto s = make_shape("point");
    EXPECT_EQ(s.kind, StimulusKind::um_point);
    ASSERT_EQ(s.path.vertices.size(), 1u);
    EXPECT_EQ(s.path.vertices[0], Vec2(0.0, 0.0));
    EXPECT_EQ(path_length(s.path), 0.0);
}

TEST(Shapes, PathLengths) {
    EXPECT_NEAR(path_length(make_shape("square").path), 160.0, 1e-9);
    EXPECT_NEAR(path_length(make_shape("triangle").path), 120.0, 1e-9);
    EXPECT_NEAR(path_length(make_shape("circle").path), 20.0 * std::numbers::pi, 0.1);
    // Crosses are drawn as two strokes; the hop between them is not counted.
    EXPECT_NEAR(path_length(make_shape("small_cross").path), 80.0, 1e-12);
    EXPECT_NEAR(path_length(make_shape("large_cross").path), 120.0, 1e-12);
}

TEST(Shapes, SixShapesRunAt100Hz) {
    for (auto n : {"line", "triangle", "square", "small_cross", "large_cross", "rose"}) {
        const auto s = make_shape(n);
        EXPECT_DOUBLE_EQ(s.stm_frequency_hz, 100.0) << n;
        EXPECT_DOUBLE_EQ(s.height_cm, 15.0) << n;
    }
}

TEST(Shapes, RoseSpansSixCentimetres) {
    const auto s = make_shape("rose");
    double xmin = 1e9, xmax = -1e9;
    for (auto v : s.path.vertices) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
    }
    EXPECT_NEAR(xmax - xmin, 60.0, 1e-9);
}

TEST(Shapes, UnknownNameListsValidShapes) {
    try {
        make_shape("hexagon");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        for (auto n : shape_names) EXPECT_NE(msg.find(n), std::string::npos) << n;
    }
}

TEST(Shapes, RejectsNonPositiveSize) { EXPECT_THROW(make_shape("circle", 0.0), ConfigError); }

TEST(Field, PointExtentIs13mm) {
    const auto f = time_averaged_field(make_shape("point"), FocalSpotModel{}, small_region());
    EXPECT_NEAR(f.grid.max_value(), 1.0, 1e-12);
    EXPECT_NEAR(extent_at_fraction(f.grid), 13.0, 0.5);
}

TEST(Field, SigmaInvertsExtent) {
    const double s = gaussian_sigma_for_extent(13.0);
    EXPECT_NEAR(s, 6.5 / std::sqrt(2.0 * std::log(5.0)), 1e-12);
    EXPECT_NEAR(std::exp(-6.5 * 6.5 / (2.0 * s * s)), 0.2, 1e-12);
}

TEST(Field, RingPeakBelowPointPeak) {
    const FocalSpotModel m;
    const auto point = time_averaged_field(make_shape("point"), m, small_region());
    const auto ring = time_averaged_field(make_shape("circle"), m, small_region());
    EXPECT_LT(ring.grid.max_value(), point.grid.max_value());
    EXPECT_LE(ring.grid.max_value(), m.peak_pressure_kpa);
    EXPECT_GT(ring.grid.max_value(), 0.0);
}

TEST(Field, ZeroAmplitudeGivesZeroField) {
    auto s = make_shape("square");
    s.amplitude_scale = 0.0;
    const auto f = time_averaged_field(s, FocalSpotModel{}, small_region());
    EXPECT_EQ(f.grid.max_value(), 0.0);
    EXPECT_EQ(f.grid.min_value(), 0.0);
}

TEST(Field, LinearInAmplitude) {
    auto s = make_shape("triangle");
    const auto full = time_averaged_field(s, FocalSpotModel{}, small_region());
    s.amplitude_scale = 0.37;
    const auto part = time_averaged_field(s, FocalSpotModel{}, small_region());
    for (std::size_t k = 0; k < full.grid.values.size(); ++k)
        EXPECT_NEAR(part.grid.values[k], 0.37 * full.grid.values[k], 1e-12 * full.grid.max_value());
}

TEST(Field, TranslationEquivariant) {
    const Vec2 shift{3.5, -2.0};
    const auto region = small_region();
    auto moved_region = region;
    moved_region.x0 += shift.x;
    moved_region.y0 += shift.y;
    const auto s = make_shape("small_cross");
    const auto a = time_averaged_field(s, FocalSpotModel{}, region);
    const auto b = time_averaged_field(shifted(s, shift), FocalSpotModel{}, moved_region);
    EXPECT_LT(max_abs_diff(a.grid, b.grid), 1e-9);
}

TEST(Field, ClosedPathInvariantUnderCyclicRotation) {
    for (auto name : {"circle", "square", "triangle"}) {
        auto s = make_shape(name);
        const auto a = time_averaged_field(s, FocalSpotModel{}, small_region());
        std::rotate(s.path.vertices.begin(), s.path.vertices.begin() + 1, s.path.vertices.end());
        const auto b = time_averaged_field(s, FocalSpotModel{}, small_region());
        EXPECT_LT(max_abs_diff(a.grid, b.grid), 1e-6 * a.grid.max_value()) << name;
    }
}

TEST(Field, NonNegative) {
    const auto f = time_averaged_field(make_shape("rose"), FocalSpotModel{}, small_region(40.0));
    EXPECT_GE(f.grid.min_value(), 0.0);
}

TEST(Field, ResolutionGuard) {
    const FocalSpotModel m;
    EXPECT_THROW(time_averaged_field(make_shape("point"), m, GridSpec{-30.0, -30.0, 0.51 * m.sigma_mm, 33, 33}),
                 ConfigError);
    EXPECT_NO_THROW(time_averaged_field(make_shape("point"), m, GridSpec{-30.0, -30.0, 0.5 * m.sigma_mm, 34, 34}));
}

TEST(Field, DwellWeightsFollowArcLength) {
    ParametricPath p;
    p.vertices = {{0.0, 0.0}, {3.0, 0.0}, {3.0, 1.0}};
    const auto spots = dwell_spots(p);
    double total = 0.0, on_first = 0.0;
    for (const auto& s : spots) {
        total += s.weight;
        EXPECT_LE(s.weight * 4.0, 0.5 + 1e-12);
        if (s.position.y == 0.0) on_first += s.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_NEAR(on_first, 0.75, 1e-12);
}

TEST(Field, StraightLineMatchesErfProfile) {
    // Across a long line the averaged Gaussian is a 1D Gaussian of the same
    // sigma scaled by sqrt(2 pi) sigma / L.
    const FocalSpotModel m;
    const double len = 200.0;
    auto s = make_shape("line", len);
    const GridSpec region{-2.0, -15.0, 0.25, 17, 121};
    const auto f = time_averaged_field(s, m, region);
    const double scale = std::sqrt(2.0 * std::numbers::pi) * m.sigma_mm / len;
    for (std::size_t j = 0; j < region.ny; ++j) {
        const double y = region.node(8, j).y;
        EXPECT_NEAR(f.grid.at(8, j), scale * std::exp(-y * y / (2.0 * m.sigma_mm * m.sigma_mm)), 2e-4 * scale);
    }
}
