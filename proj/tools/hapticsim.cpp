// hapticsim: synthesize stimuli, run scans and explorations, compare maps.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hapticsim/commands.hpp"

namespace hs = hapticsim;

namespace {

struct RunOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool snapshots = false;
    std::vector<std::string> overrides;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("--config", o.config, "key = value run configuration")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "random seed (default 0)");
    cmd->add_option("--out", o.out, "output directory (default .)");
    cmd->add_option("--set", o.overrides, "override a config entry, key=value (repeatable)");
}

hs::RunConfig load_config(const RunOptions& o) {
    auto kv = o.config.empty() ? hs::KeyValues{} : hs::KeyValues::load(o.config);
    for (const auto& item : o.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw hs::ConfigError("--set expects key=value, got '" + item + "'");
        kv.set(item.substr(0, eq), item.substr(eq + 1));
    }
    if (o.seed) kv.set("seed", std::to_string(*o.seed));
    if (o.out) kv.set("out", *o.out);
    if (o.snapshots) kv.set("snapshots", "true");
    return hs::RunConfig::from(kv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulated tactile evaluation of mid-air haptic stimuli"};
    app.require_subcommand(1);

    RunOptions synth_opts, scan_opts, explore_opts;
    auto* synth = app.add_subcommand("synth", "write pressure and indentation fields");
    add_run_options(synth, synth_opts);
    auto* scan = app.add_subcommand("scan", "systematic grid scan and fused haptic map");
    add_run_options(scan, scan_opts);
    auto* explore = app.add_subcommand("explore", "autonomous contour exploration");
    add_run_options(explore, explore_opts);
    explore->add_flag("--snapshots", explore_opts.snapshots, "write the map after every step as PGM");

    std::vector<std::string> maps;
    std::string reference;
    std::string compare_out = ".";
    auto* compare = app.add_subcommand("compare", "peak, size and RMSE report for map CSV files");
    compare->add_option("maps", maps, "map CSV files")->required()->check(CLI::ExistingFile);
    compare->add_option("--reference", reference, "reference grid CSV for RMSE")->check(CLI::ExistingFile);
    compare->add_option("--out", compare_out, "output directory (default .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? hs::exit_ok : hs::exit_config_error;
    }

    try {
        if (*synth) return hs::cmd_synth(load_config(synth_opts));
        if (*scan) return hs::cmd_scan(load_config(scan_opts));
        if (*explore) return hs::cmd_explore(load_config(explore_opts));
        std::vector<std::filesystem::path> paths(maps.begin(), maps.end());
        std::optional<std::filesystem::path> ref;
        if (!reference.empty()) ref = reference;
        return hs::cmd_compare(paths, ref, compare_out);
    } catch (const hs::LostStimulus& e) {
        std::cerr << "lost stimulus: " << e.what() << '\n';
        return hs::exit_lost_stimulus;
    } catch (const hs::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return hs::exit_io_error;
    } catch (const hs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return hs::exit_config_error;
    } catch (const hs::GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << '\n';
        return hs::exit_geometry_error;
    } catch (const hs::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return hs::exit_numerical_error;
    }
}
