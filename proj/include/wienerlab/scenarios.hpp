#pragma once

#include <string>
#include <vector>

#include "wienerlab/config.hpp"

namespace wienerlab {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      // the measured quantity
    double tolerance = 0.0;  // the bound it was held to
};

struct RunReport {
    std::string scenario;
    std::string anchor;  // the result the scenario exercises
    std::string config_hash;
    double wall_seconds = 0.0;  // console only; never serialized, so artifacts
                                // stay byte-identical across runs
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts;

    bool passed() const;
    std::string to_json() const;
};

struct ScenarioInfo {
    std::string name;
    std::string description;
    std::string anchor;
};

const std::vector<ScenarioInfo>& scenario_catalog();

// Executes the named scenario's check suite and writes its CSV/JSON artifacts
// into cfg.out_dir. Throws InvalidArgument for unknown scenarios.
RunReport run_scenario(const ScenarioConfig& cfg);

}  // namespace wienerlab
