#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hapticsim/commands.hpp"

using namespace hapticsim;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("hapticsim_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    RunConfig config(std::initializer_list<std::pair<const char*, const char*>> entries, const fs::path& out) {
        KeyValues kv;
        for (auto [k, v] : entries) kv.set(k, std::string(v));
        kv.set("out", out.string());
        return RunConfig::from(kv);
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    fs::path dir_;
    std::ostringstream log_;
};

}  // namespace

TEST_F(Cli, SynthWritesFieldsAndManifest) {
    EXPECT_EQ(cmd_synth(config({{"shape", "point"}}, dir_), log_), exit_ok);
    for (auto f : {"point_pressure.csv", "point_pressure.pgm", "point_indent.csv", "point_indent.pgm", "manifest.txt"})
        EXPECT_TRUE(fs::exists(dir_ / f)) << f;
    const auto kv = KeyValues::load(dir_ / "manifest.txt");
    EXPECT_NEAR(kv.get_double("pressure_extent_mm", 0.0), 13.0, 0.5);
    EXPECT_NEAR(kv.get_double("indent_extent_mm", 0.0), 19.0, 1.0);
}

TEST_F(Cli, SynthIsByteIdentical) {
    ASSERT_EQ(cmd_synth(config({{"shape", "circle"}, {"seed", "5"}}, dir_ / "a"), log_), exit_ok);
    ASSERT_EQ(cmd_synth(config({{"shape", "circle"}, {"seed", "5"}}, dir_ / "b"), log_), exit_ok);
    for (auto f : {"circle_pressure.csv", "circle_indent.csv", "manifest.txt"})
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
}

TEST_F(Cli, UnknownShapeNamesValidOnes) {
    try {
        config({{"shape", "hexagon"}}, dir_);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("small_cross"), std::string::npos);
    }
}

TEST_F(Cli, BadValuesAreConfigErrors) {
    EXPECT_THROW(config({{"marker_noise_mm", "-1"}}, dir_), ConfigError);
    EXPECT_THROW(config({{"scan_rows", "0"}}, dir_), ConfigError);
    EXPECT_THROW(config({{"explore_threshold", "1.5"}}, dir_), ConfigError);
    EXPECT_THROW(config({{"seed", "abc"}}, dir_), ConfigError);
}

TEST_F(Cli, SingleScanPose) {
    const auto cfg = config({{"shape", "point"}, {"scan_rows", "1"}, {"scan_cols", "1"}}, dir_);
    ASSERT_EQ(cmd_scan(cfg, log_), exit_ok);
    std::ifstream is(dir_ / "point_dataset.csv");
    const auto data = read_dataset_csv(is);
    EXPECT_EQ(data.samples.size(), 127u);
    for (const auto& s : data.samples) EXPECT_EQ(s.pose_index, 0u);
    const auto map = read_grid_csv(dir_ / "point_map.csv");
    EXPECT_EQ(map.grid.spec.nx, 1u);
    EXPECT_EQ(KeyValues::load(dir_ / "manifest.txt").get_uint("poses", 0), 1u);
}

TEST_F(Cli, ScanOutsideFieldIsGeometryError) {
    const auto cfg = config({{"shape", "point"}, {"scan_rows", "1"}, {"scan_cols", "1"}, {"scan_origin_x", "50"}}, dir_);
    EXPECT_THROW(cmd_scan(cfg, log_), GeometryError);
}

TEST_F(Cli, ExploreZeroAmplitudeIsLost) {
    const auto cfg = config({{"shape", "circle"}, {"size_mm", "40"}, {"amplitude", "0"}}, dir_);
    EXPECT_EQ(cmd_explore(cfg, log_), exit_lost_stimulus);
    std::ifstream is(dir_ / "circle_trajectory.csv");
    std::string line;
    std::size_t rows = 0;
    std::getline(is, line);
    while (std::getline(is, line)) ++rows;
    EXPECT_EQ(rows, 1u);
    EXPECT_EQ(KeyValues::load(dir_ / "manifest.txt").get_string("outcome", ""), "lost_stimulus");
}

TEST_F(Cli, ExploreSnapshotsOnePerStep) {
    auto cfg = config({{"shape", "circle"}, {"size_mm", "40"}, {"explore_max_steps", "3"}, {"snapshots", "true"}}, dir_);
    ASSERT_EQ(cmd_explore(cfg, log_), exit_ok);
    std::size_t pgms = 0;
    for (const auto& e : fs::directory_iterator(dir_))
        if (e.path().filename().string().find("_step_") != std::string::npos) ++pgms;
    EXPECT_EQ(pgms, 4u);  // the start pose plus three moves
    EXPECT_TRUE(fs::exists(dir_ / "circle_step_000.pgm"));
    EXPECT_TRUE(fs::exists(dir_ / "circle_explore_map.csv"));
}

TEST_F(Cli, ExploreCircleWithinTwentySteps) {
    const auto cfg = config({{"shape", "circle"}, {"size_mm", "40"}}, dir_);
    ASSERT_EQ(cmd_explore(cfg, log_), exit_ok);
    const auto kv = KeyValues::load(dir_ / "manifest.txt");
    EXPECT_EQ(kv.get_string("outcome", ""), "closed_loop");
    EXPECT_LE(kv.get_uint("steps", 99), 20u);
}

TEST_F(Cli, CompareMapWithItselfIsZero) {
    ASSERT_EQ(cmd_synth(config({{"shape", "point"}}, dir_ / "synth"), log_), exit_ok);
    const auto map = dir_ / "synth" / "point_pressure.csv";
    ASSERT_EQ(cmd_compare({map}, map, dir_ / "report", log_), exit_ok);
    const auto csv = slurp(dir_ / "report" / "report.csv");
    EXPECT_NE(csv.find("\npoint,"), std::string::npos) << csv;
    EXPECT_NE(csv.find(",0.00,"), std::string::npos) << csv;
    EXPECT_TRUE(fs::exists(dir_ / "report" / "report.txt"));
}

TEST_F(Cli, CompareRejectsDisjointGrids) {
    ASSERT_EQ(cmd_synth(config({{"shape", "point"}}, dir_ / "a"), log_), exit_ok);
    {
        ScalarGrid far(GridSpec{500.0, 500.0, 1.0, 3, 3});
        write_grid_csv(dir_ / "far.csv", far, 0.0);
    }
    EXPECT_THROW(cmd_compare({dir_ / "a" / "point_pressure.csv"}, dir_ / "far.csv", dir_ / "r", log_), GeometryError);
}

TEST_F(Cli, UnwritableOutputIsIoError) {
    fs::create_directories(dir_);
    std::ofstream(dir_ / "file") << "x";
    EXPECT_THROW(cmd_synth(config({{"shape", "point"}}, dir_ / "file" / "sub"), log_), IoError);
}

TEST_F(Cli, ManifestReproducesRun) {
    const auto cfg = config({{"shape", "square"}, {"size_mm", "45"}, {"seed", "9"}}, dir_ / "a");
    ASSERT_EQ(cmd_synth(cfg, log_), exit_ok);
    auto kv = KeyValues::load(dir_ / "a" / "manifest.txt");
    kv.set("out", (dir_ / "b").string());
    ASSERT_EQ(cmd_synth(RunConfig::from(kv), log_), exit_ok);
    EXPECT_EQ(slurp(dir_ / "a" / "square_pressure.csv"), slurp(dir_ / "b" / "square_pressure.csv"));
    EXPECT_EQ(slurp(dir_ / "a" / "square_indent.csv"), slurp(dir_ / "b" / "square_indent.csv"));
}
