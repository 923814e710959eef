#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wienerlab/config.hpp"
#include "wienerlab/errors.hpp"
#include "wienerlab/scenarios.hpp"

namespace {

int cmd_list() {
    for (const auto& s : wienerlab::scenario_catalog())
        std::printf("%-26s %s  [%s]\n", s.name.c_str(), s.description.c_str(),
                    s.anchor.c_str());
    return 0;
}

int cmd_run(const std::string& config_file, std::optional<std::uint64_t> seed,
            std::optional<int> paths, std::optional<int> threads,
            std::optional<std::string> out) {
    wienerlab::ScenarioConfig cfg = wienerlab::load_config(config_file);
    if (seed) cfg.seed = *seed;
    if (paths) cfg.n_paths = *paths;
    if (threads) cfg.threads = *threads;
    if (out) cfg.out_dir = *out;
    cfg.validate();

    const wienerlab::RunReport rep = wienerlab::run_scenario(cfg);
    std::printf("scenario   %s  [%s]\n", rep.scenario.c_str(),
                rep.anchor.c_str());
    std::printf("config     %s\n", rep.config_hash.c_str());
    std::printf("wall       %.2fs\n", rep.wall_seconds);
    for (const auto& c : rep.checks)
        std::printf("  %-34s %s  (value %.6g, tol %.6g)\n", c.name.c_str(),
                    c.passed ? "pass" : "FAIL", c.value, c.tolerance);
    for (const auto& a : rep.artifacts) std::printf("artifact   %s\n", a.c_str());
    std::printf("overall    %s\n", rep.passed() ? "pass" : "FAIL");
    return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wiener-space differentiability laboratory"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "list built-in scenarios");
    auto* run = app.add_subcommand("run", "run a scenario from a config file");
    std::string config_file;
    run->add_option("config-file", config_file, "scenario configuration")
        ->required();
    std::optional<std::uint64_t> seed;
    std::optional<int> paths, threads;
    std::optional<std::string> out;
    run->add_option("--seed", seed, "override the Monte Carlo seed");
    run->add_option("--paths", paths, "override the path count");
    run->add_option("--threads", threads, "cap worker threads (0 = hardware)");
    run->add_option("--out", out, "override the artifact directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (list->parsed()) return cmd_list();
        return cmd_run(config_file, seed, paths, threads, out);
    } catch (const wienerlab::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const wienerlab::InvalidArgument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const wienerlab::ContractViolation& e) {
        std::fprintf(stderr, "contract violation: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
