// dimap: deterministic desk-scale simulator of an ISAC-enabled UAV network
// with dual-domain identity mapping. Subcommands: run, sweep, validate.

#include "dimap/config.hpp"
#include "dimap/metrics.hpp"
#include "dimap/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using dimap::scenarios::ConfigError;
using dimap::scenarios::ScenarioConfig;

struct VarySpec {
    std::string key;
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;
};

VarySpec parse_vary(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos)
        throw ConfigError("--vary: expected key=start:stop:steps, got '" + arg + "'");
    VarySpec v;
    v.key = arg.substr(0, eq);
    const std::string range = arg.substr(eq + 1);
    const auto c1 = range.find(':');
    const auto c2 = range.find(':', c1 == std::string::npos ? 0 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("--vary: expected key=start:stop:steps, got '" + arg + "'");
    try {
        v.start = std::stod(range.substr(0, c1));
        v.stop = std::stod(range.substr(c1 + 1, c2 - c1 - 1));
        v.steps = std::stoi(range.substr(c2 + 1));
    } catch (const std::exception&) {
        throw ConfigError("--vary: malformed range in '" + arg + "'");
    }
    if (v.steps < 1) throw ConfigError("--vary: steps must be >= 1");
    return v;
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == '.' || c == '/' || c == '\\') c = '_';
    return out;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
    ScenarioConfig cfg = dimap::scenarios::load_config(config_path);
    if (seed) cfg.seed = *seed;
    const auto result = dimap::scenarios::run_scenario(cfg);
    dimap::scenarios::write_run(result, cfg, out_dir);
    std::cout << "wrote " << out_dir << "/summary.csv (" << result.metrics.values.size()
              << " metrics)\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, int seeds, const std::string& vary_arg,
              const std::string& out_dir) {
    const ScenarioConfig base = dimap::scenarios::load_config(config_path);
    const VarySpec vary = parse_vary(vary_arg);

    std::filesystem::create_directories(out_dir);
    std::ofstream agg(std::filesystem::path(out_dir) / "sweep_summary.csv", std::ios::binary);
    if (!agg) throw std::runtime_error("cannot write sweep_summary.csv under " + out_dir);
    agg << "scenario,seed," << vary.key << ",metric,value\n";

    for (int step = 0; step < vary.steps; ++step) {
        const double value =
            vary.steps == 1
                ? vary.start
                : vary.start + (vary.stop - vary.start) * static_cast<double>(step) /
                                   static_cast<double>(vary.steps - 1);
        for (int s = 0; s < seeds; ++s) {
            ScenarioConfig cfg = base;
            dimap::scenarios::set_numeric_field(cfg, vary.key, value);
            cfg.seed = static_cast<std::uint64_t>(s);
            cfg.validate();
            const auto result = dimap::scenarios::run_scenario(cfg);

            const auto run_dir = std::filesystem::path(out_dir) /
                                 (sanitize(vary.key) + "_" + dimap::scenarios::format_double(value)) /
                                 ("seed_" + std::to_string(s));
            dimap::scenarios::write_run(result, cfg, run_dir);
            for (const auto& metric : result.metrics.values)
                agg << to_string(cfg.kind) << "," << s << ","
                    << dimap::scenarios::format_double(value) << "," << metric.name << ","
                    << dimap::scenarios::format_double(metric.value) << "\n";
        }
    }
    std::cout << "swept " << vary.key << " over " << vary.steps << " step(s) x " << seeds
              << " seed(s) into " << out_dir << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const ScenarioConfig cfg = dimap::scenarios::load_config(config_path);
    std::cout << "config ok: kind=" << to_string(cfg.kind) << " nodes=" << cfg.nodes.size()
              << " duration_s=" << cfg.duration_s << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ISAC dual-identity UAV network simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, vary_arg;
    std::optional<std::uint64_t> seed;
    int seeds = 1;

    auto* run = app.add_subcommand("run", "run one scenario and write its report");
    run->add_option("--config", config_path, "scenario config file")->required();
    run->add_option("--seed", seed, "override the config seed");
    run->add_option("--out", out_dir, "output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "run a seed sweep over one varied parameter");
    sweep->add_option("--config", config_path, "scenario config file")->required();
    sweep->add_option("--seeds", seeds, "number of seeds (0..n-1)")->required();
    sweep->add_option("--vary", vary_arg, "key=start:stop:steps, e.g. attack.claim_offset_m=10:40:4")
        ->required();
    sweep->add_option("--out", out_dir, "output directory")->required();

    auto* validate = app.add_subcommand("validate", "parse and validate a config file");
    validate->add_option("--config", config_path, "scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, seed, out_dir);
        if (sweep->parsed()) return cmd_sweep(config_path, seeds, vary_arg, out_dir);
        if (validate->parsed()) return cmd_validate(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
