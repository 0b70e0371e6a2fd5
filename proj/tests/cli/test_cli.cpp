#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "lqineq/cli.hpp"
#include "lqineq/errors.hpp"

namespace fs = std::filesystem;
using lqineq::cli::json;

namespace {

const fs::path kRoot = fs::temp_directory_path() / ("lqineq_cli_" + std::to_string(::getpid()));

struct Cleanup {
    ~Cleanup() {
        std::error_code ec;
        fs::remove_all(kRoot, ec);
    }
} cleanup;

std::string config(const std::string& name) { return std::string(LQINEQ_CONFIG_DIR) + "/" + name; }

fs::path fresh(const std::string& name) {
    fs::path p = kRoot / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

// runs the tool; stdout and stderr land in files next to the output directory
int tool(const std::string& args, const fs::path& out, const std::string& env = "") {
    std::string cmd = env + " '" + std::string(LQINEQ_BIN) + "' " + args + " --out '" + out.string() + "' >'" +
                      out.string() + ".stdout' 2>'" + out.string() + ".stderr'";
    int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("hash and number formatting") {
    CHECK(lqineq::cli::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(lqineq::cli::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(lqineq::cli::hex64(0xabcull) == "0000000000000abc");
    CHECK(lqineq::cli::num(INFINITY) == "inf");
    CHECK(lqineq::cli::num(-INFINITY) == "-inf");
    CHECK(lqineq::cli::num(NAN) == "nan");
    CHECK(lqineq::cli::num(0.1) == "0.10000000000000001");
}

TEST_CASE("schema validation") {
    json ok = json::parse(slurp(config("analyze_heavy_tail6.json")));
    CHECK(lqineq::cli::validate("analyze", ok).empty());
    json bad = ok;
    bad["q"] = {1.2};
    bad["colour"] = "red";
    auto errs = lqineq::cli::validate("analyze", bad);
    CHECK(errs.size() >= 2);
    json nomeasure = ok;
    nomeasure.erase("measure");
    CHECK_FALSE(lqineq::cli::validate("analyze", nomeasure).empty());
    json wrongtype = ok;
    wrongtype["measure"]["params"] = "six";
    CHECK_FALSE(lqineq::cli::validate("analyze", wrongtype).empty());
    for (const char* f : {"analyze_gaussian.json", "analyze_heavy_tail2.json", "hardy_bertrand.json",
                          "capacity_gaussian.json", "simulate_ou.json", "simulate_pme_uniform.json",
                          "simulate_newton_failure.json", "sweep_heavy_tail.json", "hardy_tabulated.json"}) {
        json doc = json::parse(slurp(config(f)));
        CHECK_MESSAGE(lqineq::cli::validate(doc["command"].get<std::string>(), doc).empty(), f);
    }
}

TEST_CASE("thread resolution") {
    ::setenv("LQINEQ_THREADS", "3", 1);
    CHECK(lqineq::cli::resolve_threads(0) == 3);
    CHECK(lqineq::cli::resolve_threads(5) == 5);
    ::setenv("LQINEQ_THREADS", "many", 1);
    CHECK(lqineq::cli::resolve_threads(0) >= 1);
    ::unsetenv("LQINEQ_THREADS");
}

TEST_CASE("analyze exits 0 and reruns are byte-identical") {
    auto a = fresh("analyze_a"), b = fresh("analyze_b");
    REQUIRE(tool("analyze --config '" + config("analyze_heavy_tail6.json") + "'", a, "LQINEQ_THREADS=1") == 0);
    REQUIRE(tool("analyze --config '" + config("analyze_heavy_tail6.json") + "'", b, "LQINEQ_THREADS=4") == 0);
    for (const char* f : {"constants.json", "rates.csv"}) {
        REQUIRE(fs::exists(a / f));
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    }
    json rep = json::parse(slurp(a / "constants.json"));
    json cfg = lqineq::cli::load_config(config("analyze_heavy_tail6.json"), "analyze");
    CHECK(rep["config_hash"] == lqineq::cli::config_hash(cfg));
    CHECK(rep["version"] == "0.1.0");
    std::string csv = slurp(a / "rates.csv");
    CHECK(first_line(csv) == "# lqineq 0.1.0 analyze config " + lqineq::cli::config_hash(cfg));
    CHECK(csv.find("s,beta_WP,beta_WP_raw,h_WLS,h_WLS_raw") != std::string::npos);
    // a different seed is a different configuration
    auto c = fresh("analyze_c");
    REQUIRE(tool("analyze --seed 7 --config '" + config("analyze_heavy_tail6.json") + "'", c) == 0);
    CHECK(json::parse(slurp(c / "constants.json"))["config_hash"] != rep["config_hash"]);
}

TEST_CASE("divergence exits 3") {
    auto d = fresh("divergent");
    CHECK(tool("analyze --config '" + config("analyze_heavy_tail2.json") + "'", d) == 3);
    json rep = json::parse(slurp(d / "constants.json"));
    CHECK(rep["divergence_only"] == true);
}

TEST_CASE("configuration errors exit 2 and write nothing") {
    auto d = fresh("malformed");
    write(kRoot / "malformed.json", "{\"command\": \"analyze\", \"measure\": ");
    CHECK(tool("analyze --config '" + (kRoot / "malformed.json").string() + "'", d) == 2);
    CHECK(fs::is_empty(d));
    write(kRoot / "invalid.json", R"({"command": "analyze", "measure": {"family": "heavy_tail", "params": [6]}, "q": [1.5]})");
    CHECK(tool("analyze --config '" + (kRoot / "invalid.json").string() + "'", d) == 2);
    CHECK(fs::is_empty(d));
    CHECK(slurp(d.string() + ".stderr").find("q") != std::string::npos);
    write(kRoot / "badparams.json", R"({"command": "analyze", "measure": {"family": "gaussian", "params": [-1]}, "q": [0.5]})");
    CHECK(tool("analyze --config '" + (kRoot / "badparams.json").string() + "'", d) == 2);
    CHECK(fs::is_empty(d));
    CHECK(tool("analyze --config '" + (kRoot / "missing.json").string() + "'", d) == 2);
    CHECK(tool("analyze", d) == 2);
    CHECK(tool("frobnicate --config x", d) == 2);
    // a config for another command
    CHECK(tool("hardy --config '" + config("analyze_heavy_tail6.json") + "'", d) == 2);
    CHECK(fs::is_empty(d));
}

TEST_CASE("simulate") {
    auto d = fresh("ou");
    REQUIRE(tool("simulate --config '" + config("simulate_ou.json") + "'", d) == 0);
    json v = json::parse(slurp(d / "verdict.json"));
    CHECK(v["pass"] == true);
    std::string trace = slurp(d / "trace.csv");
    CHECK(count_lines(trace) == 2 + 201);
    CHECK(trace.find("t,mass,variance,entropy,dissipation,envelope_var,envelope_ent") != std::string::npos);

    auto f = fresh("newton");
    CHECK(tool("simulate --config '" + config("simulate_newton_failure.json") + "'", f) == 4);
    json e = json::parse(slurp(f / "verdict.json"));
    CHECK(e.contains("error"));
}

TEST_CASE("hardy and capacity commands") {
    auto h = fresh("hardy");
    CHECK(tool("hardy --config '" + config("hardy_bertrand.json") + "'", h) == 0);
    CHECK(fs::exists(h / "hardy.json"));
    auto c = fresh("capacity");
    CHECK(tool("capacity --config '" + config("capacity_gaussian.json") + "'", c) == 0);
    json rep = json::parse(slurp(c / "capacity.json"));
    CHECK(rep.contains("variational"));
    REQUIRE(fs::exists(c / "profiles.csv"));
    for (const char* f : {"phi_right.csv", "phi_left.csv", "psi_right.csv", "psi_left.csv"}) {
        std::string csv = slurp(c / f);
        CHECK_MESSAGE(csv.find("\nt,value\n") != std::string::npos, f);
        CHECK_MESSAGE(count_lines(csv) > 2, f);
    }
}

TEST_CASE("sweep resumes from its cell files") {
    auto d = fresh("sweep");
    std::string args = "sweep --config '" + config("sweep_heavy_tail.json") + "'";
    REQUIRE(tool(args, d) == 0);
    std::string first = slurp(d / "sweep.csv");
    CHECK(count_lines(first) == 2 + 6);
    CHECK(slurp(d.string() + ".stderr").find("6 computed") != std::string::npos);

    REQUIRE(tool(args, d) == 0);
    CHECK(slurp(d.string() + ".stderr").find("0 computed, 6 reused") != std::string::npos);
    CHECK(slurp(d / "sweep.csv") == first);

    // lose one cell, as after an interrupted run
    fs::path cells;
    for (const auto& e : fs::directory_iterator(d))
        if (e.is_directory()) cells = e.path();
    REQUIRE(fs::exists(cells / "cell_000003.csv"));
    fs::remove(cells / "cell_000003.csv");
    REQUIRE(tool(args, d, "LQINEQ_THREADS=2") == 0);
    CHECK(slurp(d.string() + ".stderr").find("1 computed, 5 reused") != std::string::npos);
    CHECK(slurp(d / "sweep.csv") == first);
}

TEST_CASE("empty sweep writes the header only") {
    auto d = fresh("sweep_empty");
    write(kRoot / "empty.json", R"({"command": "sweep", "sweep": {"family": "heavy_tail", "params": [], "q": [0.5]}})");
    REQUIRE(tool("sweep --config '" + (kRoot / "empty.json").string() + "'", d) == 0);
    std::string csv = slurp(d / "sweep.csv");
    CHECK(count_lines(csv) == 2);
    CHECK(csv.rfind("# lqineq 0.1.0 sweep config ", 0) == 0);
}

TEST_CASE("measure parameters by name and tabulated densities from CSV") {
    auto a = fresh("named_list"), b = fresh("named_keys");
    write(kRoot / "list.json", R"({"command": "hardy", "measure": {"family": "bertrand", "params": [2, 3.5]}, "q": [0.5]})");
    write(kRoot / "keys.json",
          R"({"command": "hardy", "measure": {"family": "bertrand", "alpha": 2, "beta": 3.5, "truncate": 1e6}, "q": [0.5]})");
    REQUIRE(tool("hardy --config '" + (kRoot / "list.json").string() + "'", a) == 0);
    REQUIRE(tool("hardy --config '" + (kRoot / "keys.json").string() + "'", b) == 0);
    json ra = json::parse(slurp(a / "hardy.json")), rb = json::parse(slurp(b / "hardy.json"));
    CHECK(ra["reports"] == rb["reports"]);
    CHECK(ra["measure"] == rb["measure"]);

    auto d = fresh("named_bad");
    write(kRoot / "both.json", R"({"command": "hardy", "measure": {"family": "heavy_tail", "alpha": 3, "params": [3]}, "q": [0.5]})");
    CHECK(tool("hardy --config '" + (kRoot / "both.json").string() + "'", d) == 2);
    write(kRoot / "foreign.json", R"({"command": "hardy", "measure": {"family": "heavy_tail", "sigma": 3}, "q": [0.5]})");
    CHECK(tool("hardy --config '" + (kRoot / "foreign.json").string() + "'", d) == 2);
    CHECK(fs::is_empty(d));

    auto t = fresh("tabulated");
    REQUIRE(tool("hardy --config '" + config("hardy_tabulated.json") + "'", t) == 0);
    json cfg = lqineq::cli::load_config(config("hardy_tabulated.json"), "hardy");
    CHECK(cfg["measure"]["x"].size() == 3);
    CHECK_FALSE(cfg["measure"].contains("csv"));
    write(kRoot / "nocsv.json", R"({"command": "hardy", "measure": {"family": "custom_tabulated", "csv": "absent.csv"}, "q": [0.5]})");
    CHECK(tool("hardy --config '" + (kRoot / "nocsv.json").string() + "'", d) == 2);
}

TEST_CASE("version") {
    auto d = fresh("version");
    CHECK(tool("--version", d) == 0);
    CHECK(slurp(d.string() + ".stdout").find("0.1.0") != std::string::npos);
}
