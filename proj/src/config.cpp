#include "wienerlab/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wienerlab/errors.hpp"

namespace wienerlab {

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw InvalidArgument("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) fail(line, "trailing characters in number '" + v + "'");
        return d;
    } catch (const InvalidArgument&) {
        throw;
    } catch (...) {
        fail(line, "not a number: '" + v + "'");
    }
}

long long to_int(const std::string& v, int line) {
    try {
        size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) fail(line, "trailing characters in integer '" + v + "'");
        return d;
    } catch (const InvalidArgument&) {
        throw;
    } catch (...) {
        fail(line, "not an integer: '" + v + "'");
    }
}

}  // namespace

void ScenarioConfig::validate() const {
    if (scenario.empty()) throw InvalidArgument("config: scenario name required");
    if (!(T > 0.0)) throw InvalidArgument("config: T must be positive");
    if (n_steps <= 0) throw InvalidArgument("config: n_steps must be positive");
    if (d < 1) throw InvalidArgument("config: d must be >= 1");
    if (n_paths <= 0) throw InvalidArgument("config: n_paths must be positive");
    if (!(p > 1.0)) throw InvalidArgument("config: p must be > 1");
    if (!(q >= 1.0)) throw InvalidArgument("config: q must be >= 1");
    if (basis_degree < 0) throw InvalidArgument("config: basis_degree must be >= 0");
    if (bump_width < 1) throw InvalidArgument("config: bump_width must be >= 1");
    if (threads < 0) throw InvalidArgument("config: threads must be >= 0");
    for (size_t i = 0; i < eps_schedule.size(); ++i) {
        if (!(eps_schedule[i] > 0.0))
            throw InvalidArgument("config: eps_schedule entries must be positive");
        if (i > 0 && !(eps_schedule[i] < eps_schedule[i - 1]))
            throw InvalidArgument(
                "config: eps_schedule must be strictly decreasing");
    }
    if (direction.kind != "constant" && direction.kind != "bump")
        throw InvalidArgument("config: direction kind must be constant or bump");
    if (direction.kind == "bump") {
        if (direction.width < 1)
            throw InvalidArgument("config: direction width must be >= 1");
        if (direction.node < direction.width || direction.node > n_steps)
            throw InvalidArgument("config: bump does not fit on the grid");
    }
}

std::string ScenarioConfig::serialize() const {
    std::ostringstream out;
    out << "[run]\n";
    out << "scenario = " << scenario << "\n";
    out << "out_dir = " << out_dir << "\n";
    out << "threads = " << threads << "\n";
    out << "\n[grid]\n";
    out << "T = " << fmt_num(T) << "\n";
    out << "n_steps = " << n_steps << "\n";
    out << "d = " << d << "\n";
    out << "\n[montecarlo]\n";
    out << "n_paths = " << n_paths << "\n";
    out << "seed = " << seed << "\n";
    out << "\n[harness]\n";
    if (!eps_schedule.empty()) {
        out << "eps_schedule = ";
        for (size_t i = 0; i < eps_schedule.size(); ++i)
            out << (i ? "," : "") << fmt_num(eps_schedule[i]);
        out << "\n";
    }
    out << "p = " << fmt_num(p) << "\n";
    out << "q = " << fmt_num(q) << "\n";
    out << "basis_degree = " << basis_degree << "\n";
    out << "bump_width = " << bump_width << "\n";
    out << "\n[direction]\n";
    out << "kind = " << direction.kind << "\n";
    if (direction.kind == "constant") {
        out << "value = " << fmt_num(direction.value) << "\n";
        if (direction.until) out << "until = " << fmt_num(*direction.until) << "\n";
    } else {
        out << "node = " << direction.node << "\n";
        out << "width = " << direction.width << "\n";
    }
    return out.str();
}

std::string ScenarioConfig::hash() const {
    // hash the scientific content only: where artifacts land and how many
    // workers ran must not change the reported identity of the experiment
    ScenarioConfig c = *this;
    c.out_dir = ".";
    c.threads = 0;
    const std::string s = c.serialize();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "run" && section != "grid" && section != "montecarlo" &&
                section != "harness" && section != "direction")
                fail(line, "unknown section [" + section + "]");
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty()) fail(line, "key outside any section");
        if (section == "run") {
            if (key == "scenario") c.scenario = val;
            else if (key == "out_dir") c.out_dir = val;
            else if (key == "threads") c.threads = static_cast<int>(to_int(val, line));
            else fail(line, "unknown key '" + key + "' in [run]");
        } else if (section == "grid") {
            if (key == "T") c.T = to_double(val, line);
            else if (key == "n_steps") c.n_steps = static_cast<int>(to_int(val, line));
            else if (key == "d") c.d = static_cast<int>(to_int(val, line));
            else fail(line, "unknown key '" + key + "' in [grid]");
        } else if (section == "montecarlo") {
            if (key == "n_paths") c.n_paths = static_cast<int>(to_int(val, line));
            else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_int(val, line));
            else fail(line, "unknown key '" + key + "' in [montecarlo]");
        } else if (section == "harness") {
            if (key == "eps_schedule") {
                c.eps_schedule.clear();
                std::istringstream es(val);
                std::string tok;
                while (std::getline(es, tok, ','))
                    c.eps_schedule.push_back(to_double(trim(tok), line));
            } else if (key == "p") c.p = to_double(val, line);
            else if (key == "q") c.q = to_double(val, line);
            else if (key == "basis_degree") c.basis_degree = static_cast<int>(to_int(val, line));
            else if (key == "bump_width") c.bump_width = static_cast<int>(to_int(val, line));
            else fail(line, "unknown key '" + key + "' in [harness]");
        } else {  // direction
            if (key == "kind") c.direction.kind = val;
            else if (key == "value") c.direction.value = to_double(val, line);
            else if (key == "until") c.direction.until = to_double(val, line);
            else if (key == "node") c.direction.node = static_cast<int>(to_int(val, line));
            else if (key == "width") c.direction.width = static_cast<int>(to_int(val, line));
            else fail(line, "unknown key '" + key + "' in [direction]");
        }
    }
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace wienerlab
