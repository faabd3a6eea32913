#pragma once

// File formats.
//
// Grid CSV (pressure, indentation, haptic maps):
//   line 1: origin_x,origin_y,spacing,cols,rows,raw_max
//   line 2: the six header values
//   then `rows` lines of `cols` comma-separated values, top row (max y) first.
// `origin` is the world position of the bottom-left node. For fields raw_max
// is the largest value; for haptic maps it is the maximum cell-area change
// the normalized values were divided by.
//
// PGM: binary P5, 16-bit big-endian, maxval 65535, values scaled to the grid
// maximum, top row first.
//
// Key-value files: one `key = value` per line, `#` starts a comment.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hapticsim/acoustics.hpp"
#include "hapticsim/errors.hpp"
#include "hapticsim/explore.hpp"
#include "hapticsim/geometry.hpp"
#include "hapticsim/mapping.hpp"
#include "hapticsim/sensor.hpp"

namespace hapticsim {

/// Shortest round-trippable decimal form; locale independent.
inline std::string format_number(double v) {
    char buf[32];
    for (int digits = 15; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline std::ofstream open_output(const std::filesystem::path& path, bool binary = false) {
    std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
    if (!os) throw IoError("cannot write " + path.string());
    return os;
}

inline void write_grid_csv(std::ostream& os, const ScalarGrid& g, double raw_max) {
    os << "origin_x,origin_y,spacing,cols,rows,raw_max\n";
    os << format_number(g.spec.x0) << ',' << format_number(g.spec.y0) << ',' << format_number(g.spec.spacing) << ','
       << g.spec.nx << ',' << g.spec.ny << ',' << format_number(raw_max) << '\n';
    for (std::size_t r = 0; r < g.spec.ny; ++r) {
        const std::size_t j = g.spec.ny - 1 - r;
        for (std::size_t i = 0; i < g.spec.nx; ++i) os << (i ? "," : "") << format_number(g.at(i, j));
        os << '\n';
    }
}

inline void write_grid_csv(const std::filesystem::path& path, const ScalarGrid& g, double raw_max) {
    auto os = open_output(path);
    write_grid_csv(os, g, raw_max);
}

struct GridFile {
    ScalarGrid grid;
    double raw_max = 0.0;
};

inline GridFile read_grid_csv(std::istream& is, const std::string& name = "grid") {
    std::string line;
    if (!std::getline(is, line) || line.rfind("origin_x,", 0) != 0) throw IoError(name + ": missing grid header");
    if (!std::getline(is, line)) throw IoError(name + ": missing grid geometry");
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream hs(line);
    GridSpec spec;
    double raw_max = 0.0;
    if (!(hs >> spec.x0 >> spec.y0 >> spec.spacing >> spec.nx >> spec.ny >> raw_max))
        throw IoError(name + ": malformed grid geometry");
    spec.validate();
    GridFile out{ScalarGrid(spec), raw_max};
    for (std::size_t r = 0; r < spec.ny; ++r) {
        if (!std::getline(is, line)) throw IoError(name + ": expected " + std::to_string(spec.ny) + " rows");
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream rs(line);
        const std::size_t j = spec.ny - 1 - r;
        for (std::size_t i = 0; i < spec.nx; ++i)
            if (!(rs >> out.grid.at(i, j))) throw IoError(name + ": short row " + std::to_string(r));
    }
    return out;
}

inline GridFile read_grid_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot read " + path.string());
    return read_grid_csv(is, path.string());
}

inline void write_pgm16(std::ostream& os, const ScalarGrid& g) {
    const double peak = g.max_value();
    os << "P5\n" << g.spec.nx << ' ' << g.spec.ny << "\n65535\n";
    for (std::size_t r = 0; r < g.spec.ny; ++r) {
        const std::size_t j = g.spec.ny - 1 - r;
        for (std::size_t i = 0; i < g.spec.nx; ++i) {
            const double v = peak > 0.0 ? std::clamp(g.at(i, j) / peak, 0.0, 1.0) : 0.0;
            const auto q = static_cast<std::uint16_t>(std::lround(v * 65535.0));
            os.put(static_cast<char>(q >> 8));
            os.put(static_cast<char>(q & 0xff));
        }
    }
}

inline void write_pgm16(const std::filesystem::path& path, const ScalarGrid& g) {
    auto os = open_output(path, true);
    write_pgm16(os, g);
}

inline void write_frame_csv(std::ostream& os, const TactileFrame& frame, const VoronoiFeatures& features) {
    os << "pin,rest_x,rest_y,deformed_x,deformed_y,delta_area\n";
    for (std::size_t i = 0; i < frame.deformed.size(); ++i) {
        const Vec2 r = frame.pins->rest[i], d = frame.deformed[i];
        os << i << ',' << format_number(r.x) << ',' << format_number(r.y) << ',' << format_number(d.x) << ','
           << format_number(d.y) << ',' << format_number(features.delta_area[i]) << '\n';
    }
}

inline void write_dataset_csv(std::ostream& os, const ScanDataset& data) {
    os << "pose,pin,world_x,world_y,delta_area\n";
    for (const auto& s : data.samples)
        os << s.pose_index << ',' << s.pin_index << ',' << format_number(s.world.x) << ',' << format_number(s.world.y)
           << ',' << format_number(s.delta_area) << '\n';
}

inline ScanDataset read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("pose,pin,", 0) != 0) throw IoError("dataset: missing header");
    ScanDataset data;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        Sample s;
        if (!(ls >> s.pose_index >> s.pin_index >> s.world.x >> s.world.y >> s.delta_area))
            throw IoError("dataset: malformed row '" + line + "'");
        data.samples.push_back(s);
    }
    return data;
}

inline void write_trajectory_csv(std::ostream& os, const ExplorationResult& result) {
    os << "step,pose_x,pose_y,centroid_x,centroid_y,theta_deg,above_threshold,action_x,action_y,heading_deg,branch\n";
    for (const auto& e : result.log) {
        os << e.step << ',' << format_number(e.pose.x) << ',' << format_number(e.pose.y) << ',';
        if (e.percept.above_threshold)
            os << format_number(e.percept.centroid.x) << ',' << format_number(e.percept.centroid.y) << ','
               << format_number(e.percept.orientation_deg) << ",1,";
        else
            os << ",,,0,";
        if (e.action)
            os << format_number(e.action->move.x) << ',' << format_number(e.action->move.y) << ','
               << format_number(e.action->heading_deg) << ',' << to_string(e.action->branch) << '\n';
        else
            os << ",,,none\n";
    }
}

/// Ordered `key = value` store.
class KeyValues {
public:
    static KeyValues parse(std::istream& is, const std::string& name = "config") {
        KeyValues kv;
        std::string line;
        for (std::size_t n = 1; std::getline(is, line); ++n) {
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (trim(line).empty()) continue;
            if (eq == std::string::npos) throw ConfigError(name + ":" + std::to_string(n) + ": expected key = value");
            auto key = trim(line.substr(0, eq));
            if (key.empty()) throw ConfigError(name + ":" + std::to_string(n) + ": empty key");
            kv.set(key, trim(line.substr(eq + 1)));
        }
        return kv;
    }

    static KeyValues load(const std::filesystem::path& path) {
        std::ifstream is(path);
        if (!is) throw ConfigError("cannot read config " + path.string());
        return parse(is, path.string());
    }

    void set(const std::string& key, std::string value) {
        if (!values_.contains(key)) order_.push_back(key);
        values_[key] = std::move(value);
    }
    void set(const std::string& key, double value) { set(key, format_number(value)); }

    bool contains(const std::string& key) const { return values_.contains(key); }
    const std::string* find(const std::string& key) const {
        auto it = values_.find(key);
        return it == values_.end() ? nullptr : &it->second;
    }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        const auto* v = find(key);
        return v ? *v : fallback;
    }
    double get_double(const std::string& key, double fallback) const {
        const auto* v = find(key);
        if (!v) return fallback;
        return parse_double(key, *v);
    }
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const {
        const auto* v = find(key);
        if (!v) return fallback;
        try {
            std::size_t used = 0;
            if (!v->empty() && (*v)[0] == '-') throw std::invalid_argument("negative");
            const auto r = std::stoull(*v, &used, 10);
            if (used != v->size()) throw std::invalid_argument("trailing");
            return r;
        } catch (const std::exception&) {
            throw ConfigError("'" + key + "' expects a non-negative integer, got '" + *v + "'");
        }
    }
    bool get_bool(const std::string& key, bool fallback) const {
        const auto* v = find(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "1" || *v == "yes") return true;
        if (*v == "false" || *v == "0" || *v == "no") return false;
        throw ConfigError("'" + key + "' expects true or false, got '" + *v + "'");
    }

    const std::vector<std::string>& keys() const { return order_; }

    void write(std::ostream& os) const {
        for (const auto& k : order_) os << k << " = " << values_.at(k) << '\n';
    }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }
    static double parse_double(const std::string& key, const std::string& v) {
        char* end = nullptr;
        const double r = std::strtod(v.c_str(), &end);
        if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(r))
            throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
        return r;
    }

    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

/// Shape spec as key-value pairs: shape, size_mm, stm_hz, amplitude.
inline KeyValues shape_to_config(const StimulusSpec& s) {
    KeyValues kv;
    kv.set("shape", s.name);
    kv.set("size_mm", s.size_mm);
    kv.set("stm_hz", s.stm_frequency_hz);
    kv.set("amplitude", s.amplitude_scale);
    return kv;
}

inline StimulusSpec shape_from_config(const KeyValues& kv) {
    const auto name = kv.get_string("shape", "point");
    std::optional<double> size;
    if (kv.contains("size_mm") && name != "point") size = kv.get_double("size_mm", 0.0);
    auto s = make_shape(name, size);
    s.stm_frequency_hz = kv.get_double("stm_hz", s.stm_frequency_hz);
    s.amplitude_scale = kv.get_double("amplitude", s.amplitude_scale);
    s.validate();
    return s;
}

}  // namespace hapticsim
