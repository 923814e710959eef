// Acceptance gate: one line per criterion, exit nonzero on any failure.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "wienerlab/scenarios.hpp"

namespace fs = std::filesystem;
using namespace wienerlab;

namespace {

int failures = 0;

void report(int idx, const std::string& label, bool ok, const std::string& note) {
    std::printf("[%2d] %-42s %s%s%s\n", idx, label.c_str(), ok ? "PASS" : "FAIL",
                note.empty() ? "" : "  -- ", note.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

fs::path out_root() {
    static fs::path root = [] {
        fs::path p = fs::temp_directory_path() / "wienerlab_acceptance";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

ScenarioConfig base_config(const std::string& scenario) {
    ScenarioConfig c;
    c.scenario = scenario;
    c.out_dir = (out_root() / scenario).string();
    return c;
}

std::string failing_checks(const RunReport& rep) {
    std::string s;
    for (const auto& ch : rep.checks)
        if (!ch.passed) s += (s.empty() ? "" : ", ") + ch.name;
    return s;
}

void run_criterion(int idx, const std::string& label, const ScenarioConfig& cfg) {
    try {
        const RunReport rep = run_scenario(cfg);
        report(idx, label, rep.passed(), failing_checks(rep));
    } catch (const std::exception& err) {
        report(idx, label, false, err.what());
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism_criterion(int idx) {
    try {
        ScenarioConfig c = base_config("cameron-martin");
        c.n_paths = 5000;
        c.out_dir = (out_root() / "det_a").string();
        const RunReport a = run_scenario(c);
        c.out_dir = (out_root() / "det_b").string();
        c.threads = 1;  // placement and parallelism must not leak into artifacts
        const RunReport b = run_scenario(c);
        bool ok = a.passed() && b.passed();
        std::string note;
        for (const auto& entry : fs::directory_iterator(out_root() / "det_a")) {
            const fs::path other = out_root() / "det_b" / entry.path().filename();
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
                ok = false;
                note = "artifact mismatch: " + entry.path().filename().string();
            }
        }
        report(idx, "byte-identical artifacts across runs", ok, note);
    } catch (const std::exception& err) {
        report(idx, "byte-identical artifacts across runs", false, err.what());
    }
}

}  // namespace

int main() {
    {
        ScenarioConfig c = base_config("shift-identities");
        c.n_steps = 64;
        c.n_paths = 1000;
        run_criterion(1, "exact shift algebra on the grid", c);
    }
    {
        ScenarioConfig c = base_config("cameron-martin");
        c.n_paths = 100000;
        run_criterion(2, "cameron-martin change of measure", c);
    }
    {
        ScenarioConfig c = base_config("theorem-4.1-cylindrical");
        c.n_paths = 20000;
        run_criterion(3, "cylindrical quotient convergence", c);
    }
    {
        ScenarioConfig c = base_config("skorohod-duality");
        c.n_paths = 100000;
        run_criterion(4, "skorohod duality pairing", c);
    }
    {
        ScenarioConfig c = base_config("forward-tangent");
        c.n_steps = 128;
        c.n_paths = 10000;
        run_criterion(5, "forward tangent remainder", c);
    }
    {
        ScenarioConfig c = base_config("affine");
        c.n_steps = 50;
        c.n_paths = 100000;
        c.basis_degree = 3;
        run_criterion(6, "affine solver vs explicit kernel", c);
    }
    {
        ScenarioConfig c = base_config("theorem-5.1-lipschitz");
        c.n_paths = 100000;
        c.p = 1.5;
        run_criterion(7, "lipschitz quotient convergence", c);
    }
    {
        ScenarioConfig c = base_config("theorem-7.2-quadratic");
        c.n_paths = 100000;
        run_criterion(8, "quadratic driver convergence", c);
    }
    {
        ScenarioConfig c = base_config("markovian-identity");
        c.n_paths = 100000;
        run_criterion(9, "markovian diagonal identity", c);
    }
    determinism_criterion(10);

    std::printf("%s (%d/10)\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                10 - failures);
    return failures == 0 ? 0 : 1;
}
