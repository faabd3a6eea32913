#include <gtest/gtest.h>

#include <sstream>

#include "hapticsim/io.hpp"

using namespace hapticsim;

TEST(Numbers, RoundTrip) {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 3.77e-9, 15351.1846, 1e300}) {
        const auto s = format_number(v);
        EXPECT_EQ(std::strtod(s.c_str(), nullptr), v) << s;
    }
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(40.0), "40");
}

TEST(GridCsv, RoundTrip) {
    ScalarGrid g(GridSpec{-2.0, 1.5, 0.5, 4, 3});
    for (std::size_t k = 0; k < g.values.size(); ++k) g.values[k] = 0.1 * static_cast<double>(k) - 0.3;
    std::stringstream ss;
    write_grid_csv(ss, g, 2.25);
    const auto text = ss.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "origin_x,origin_y,spacing,cols,rows,raw_max");
    const auto back = read_grid_csv(ss);
    EXPECT_EQ(back.grid.spec, g.spec);
    EXPECT_EQ(back.grid.values, g.values);
    EXPECT_DOUBLE_EQ(back.raw_max, 2.25);
}

TEST(GridCsv, TopRowFirst) {
    ScalarGrid g(GridSpec{0.0, 0.0, 1.0, 2, 2});
    g.at(0, 1) = 7.0;  // top-left
    std::stringstream ss;
    write_grid_csv(ss, g, 7.0);
    std::string line;
    std::getline(ss, line);
    std::getline(ss, line);
    std::getline(ss, line);
    EXPECT_EQ(line, "7,0");
}

TEST(GridCsv, RejectsMalformed) {
    std::stringstream a("nonsense\n");
    EXPECT_THROW(read_grid_csv(a), IoError);
    std::stringstream b("origin_x,origin_y,spacing,cols,rows,raw_max\n0,0,1,2,2,1\n1,2\n");
    EXPECT_THROW(read_grid_csv(b), IoError);
}

TEST(Pgm, SixteenBitBigEndian) {
    ScalarGrid g(GridSpec{0.0, 0.0, 1.0, 2, 1});
    g.at(0, 0) = 0.5;
    g.at(1, 0) = 2.0;
    std::stringstream ss;
    write_pgm16(ss, g);
    const auto s = ss.str();
    const std::string header = "P5\n2 1\n65535\n";
    ASSERT_EQ(s.size(), header.size() + 4);
    EXPECT_EQ(s.substr(0, header.size()), header);
    const auto px = [&](std::size_t k) {
        return (static_cast<unsigned char>(s[header.size() + 2 * k]) << 8) |
               static_cast<unsigned char>(s[header.size() + 2 * k + 1]);
    };
    EXPECT_EQ(px(0), 16384);
    EXPECT_EQ(px(1), 65535);
}

TEST(Dataset, RoundTrip) {
    ScanDataset d;
    d.samples = {{0, 3, {1.5, -2.0}, 0.125}, {1, 126, {-40.0, 40.0}, -1e-7}};
    std::stringstream ss;
    write_dataset_csv(ss, d);
    const auto back = read_dataset_csv(ss);
    ASSERT_EQ(back.samples.size(), 2u);
    EXPECT_EQ(back.samples[1].pin_index, 126u);
    EXPECT_EQ(back.samples[1].world, Vec2(-40.0, 40.0));
    EXPECT_EQ(back.samples[1].delta_area, -1e-7);
}

TEST(Frame, Csv) {
    const auto pins = pin_lattice();
    TactileFrame f{pins, pins->rest, {}};
    f.deformed[0] = {0.25, 0.0};
    std::stringstream ss;
    write_frame_csv(ss, f, voronoi_features(f));
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "pin,rest_x,rest_y,deformed_x,deformed_y,delta_area");
    std::getline(ss, line);
    EXPECT_EQ(line.substr(0, 14), "0,0,0,0.25,0,-");
    std::size_t rows = 1;
    while (std::getline(ss, line)) ++rows;
    EXPECT_EQ(rows, 127u);
}

TEST(KeyValues, ParseAndQuery) {
    std::stringstream ss("# comment\nshape = circle  # trailing\n\nsize_mm=25\nflag = yes\nn = 7\n");
    const auto kv = KeyValues::parse(ss);
    EXPECT_EQ(kv.get_string("shape", ""), "circle");
    EXPECT_DOUBLE_EQ(kv.get_double("size_mm", 0.0), 25.0);
    EXPECT_TRUE(kv.get_bool("flag", false));
    EXPECT_EQ(kv.get_uint("n", 0), 7u);
    EXPECT_EQ(kv.get_uint("missing", 3), 3u);
    EXPECT_EQ(kv.keys().size(), 4u);
}

TEST(KeyValues, Errors) {
    std::stringstream bad("just text\n");
    EXPECT_THROW(KeyValues::parse(bad), ConfigError);
    KeyValues kv;
    kv.set("x", std::string("abc"));
    kv.set("n", std::string("-3"));
    kv.set("b", std::string("maybe"));
    EXPECT_THROW(kv.get_double("x", 0.0), ConfigError);
    EXPECT_THROW(kv.get_uint("n", 0), ConfigError);
    EXPECT_THROW(kv.get_bool("b", false), ConfigError);
}

TEST(KeyValues, ShapeRoundTrip) {
    auto s = make_shape("triangle", 50.0);
    s.amplitude_scale = 0.5;
    std::stringstream ss;
    shape_to_config(s).write(ss);
    const auto back = shape_from_config(KeyValues::parse(ss));
    EXPECT_EQ(back.name, "triangle");
    EXPECT_DOUBLE_EQ(back.size_mm, 50.0);
    EXPECT_DOUBLE_EQ(back.amplitude_scale, 0.5);
    EXPECT_DOUBLE_EQ(back.stm_frequency_hz, 100.0);
    EXPECT_EQ(back.path.vertices, s.path.vertices);
}
