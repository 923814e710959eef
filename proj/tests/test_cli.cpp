#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "wienerlab/errors.hpp"
#include "wienerlab/scenarios.hpp"

using namespace wienerlab;

TEST_CASE("config round-trips through its canonical serialization") {
    ScenarioConfig c;
    c.scenario = "cameron-martin";
    c.out_dir = "out";
    c.threads = 2;
    c.T = 2.0;
    c.n_steps = 40;
    c.n_paths = 1234;
    c.seed = 77;
    c.eps_schedule = {0.25, 0.125, 0.0625, 0.03125};
    c.p = 1.25;
    c.q = 2.0;
    c.basis_degree = 4;
    c.direction.kind = "constant";
    c.direction.value = 0.5;
    c.direction.until = 1.0;
    ScenarioConfig r = parse_config(c.serialize());
    CHECK(r.serialize() == c.serialize());
    CHECK(r.scenario == "cameron-martin");
    CHECK(r.eps_schedule == c.eps_schedule);
    CHECK(r.direction.until.has_value());
    // bump form round-trips too
    c.direction.kind = "bump";
    c.direction.node = 10;
    c.direction.width = 3;
    CHECK(parse_config(c.serialize()).serialize() == c.serialize());
}

TEST_CASE("config parser reports the offending line") {
    const std::string bad =
        "[run]\nscenario = affine\n[grid]\nn_steps = soon\n";
    try {
        parse_config(bad);
        FAIL("expected a parse error");
    } catch (const InvalidArgument& err) {
        CHECK(std::string(err.what()).find("line 4") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("[grid]\nwhat = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[nope]\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("key = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("[run]\nscenario affine\n"), InvalidArgument);
}

TEST_CASE("config validation") {
    ScenarioConfig c;
    c.scenario = "affine";
    c.validate();
    c.n_steps = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.n_steps = 50;
    c.eps_schedule = {0.1, 0.2};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.eps_schedule = {0.2, -0.1};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.eps_schedule.clear();
    c.p = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.p = 1.5;
    c.direction.kind = "triangle";
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.direction.kind = "bump";
    c.direction.node = 2;
    c.direction.width = 4;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("config hash covers science, not placement") {
    ScenarioConfig a;
    a.scenario = "affine";
    ScenarioConfig b = a;
    b.out_dir = "/somewhere/else";
    b.threads = 7;
    CHECK(a.hash() == b.hash());
    b.seed = a.seed + 1;
    CHECK(a.hash() != b.hash());
    ScenarioConfig c = a;
    c.n_paths = a.n_paths + 1;
    CHECK(a.hash() != c.hash());
}

TEST_CASE("scenario catalog exposes the registry") {
    const auto& cat = scenario_catalog();
    std::vector<std::string> need = {
        "shift-identities",      "cameron-martin",      "theorem-4.1-cylindrical",
        "skorohod-duality",      "forward-tangent",     "affine",
        "theorem-5.1-lipschitz", "theorem-7.2-quadratic", "markovian-identity"};
    for (const auto& name : need) {
        bool found = false;
        for (const auto& s : cat)
            if (s.name == name) {
                found = true;
                CHECK_FALSE(s.description.empty());
                CHECK_FALSE(s.anchor.empty());
            }
        CHECK_MESSAGE(found, name);
    }
    ScenarioConfig c;
    c.scenario = "no-such-scenario";
    CHECK_THROWS_AS(run_scenario(c), InvalidArgument);
}

TEST_CASE("run_scenario writes its artifacts and a versioned summary") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "wlab_test_run";
    fs::remove_all(dir);
    ScenarioConfig c;
    c.scenario = "shift-identities";
    c.out_dir = dir.string();
    c.n_steps = 16;
    c.n_paths = 200;
    RunReport rep = run_scenario(c);
    CHECK(rep.passed());
    CHECK(rep.scenario == "shift-identities");
    CHECK(rep.config_hash == c.hash());
    CHECK_FALSE(rep.checks.empty());
    CHECK(fs::exists(dir / "shift-identities.summary.json"));
    std::ifstream in(dir / "shift-identities.summary.json");
    std::string js((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
    CHECK(js.find("\"schema_version\"") != std::string::npos);
    CHECK(js.find(rep.config_hash) != std::string::npos);
    for (const auto& a : rep.artifacts) CHECK(fs::exists(dir / a));
    fs::remove_all(dir);
}

TEST_CASE("command line exit codes") {
    namespace fs = std::filesystem;
    if (!fs::exists("wienerlab")) {
        MESSAGE("cli binary not found next to the test runner; skipping");
        return;
    }
    auto run = [](const std::string& cmd) {
        const int st = std::system((cmd + " > cli_test.log 2>&1").c_str());
        return WEXITSTATUS(st);
    };
    CHECK(run("./wienerlab list") == 0);
    CHECK(run("./wienerlab run missing-file.cfg") == 2);
    {
        std::ofstream f("bad_scenario.cfg");
        f << "[run]\nscenario = no-such-scenario\n";
    }
    CHECK(run("./wienerlab run bad_scenario.cfg") == 2);
    {
        std::ofstream f("ok_scenario.cfg");
        f << "[run]\nscenario = shift-identities\nout_dir = cli_test_out\n"
          << "[grid]\nn_steps = 16\n[montecarlo]\nn_paths = 200\n";
    }
    CHECK(run("./wienerlab run ok_scenario.cfg") == 0);
    CHECK(run("./wienerlab run ok_scenario.cfg --paths 100 --seed 9 "
              "--out cli_test_out2 --threads 1") == 0);
    CHECK(fs::exists("cli_test_out2/shift-identities.summary.json"));
    fs::remove_all("cli_test_out");
    fs::remove_all("cli_test_out2");
    fs::remove("bad_scenario.cfg");
    fs::remove("ok_scenario.cfg");
    fs::remove("cli_test.log");
}
