#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wienerlab {

struct DirectionSpec {
    std::string kind = "constant";  // "constant" | "bump"
    double value = 1.0;             // constant density level
    std::optional<double> until;    // constant support cutoff
    int node = 0;                   // bump: right endpoint node
    int width = 4;                  // bump: width in grid cells
};

// One scenario per file; sections [run], [grid], [montecarlo], [harness],
// [direction]. Unknown sections or keys are parse errors with the offending
// line, and serialize() emits the canonical form the parser round-trips.
struct ScenarioConfig {
    std::string scenario;
    std::string out_dir = ".";
    int threads = 0;  // 0: hardware default

    double T = 1.0;
    int n_steps = 50;
    int d = 1;

    int n_paths = 10000;
    std::uint64_t seed = 42;

    std::vector<double> eps_schedule;  // empty: module default
    double p = 1.5;
    double q = 1.0;
    int basis_degree = 3;
    int bump_width = 4;

    DirectionSpec direction;

    void validate() const;
    std::string serialize() const;
    std::string hash() const;  // FNV-1a of the canonical serialization
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

}  // namespace wienerlab
