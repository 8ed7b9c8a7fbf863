#include "coxsim/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using coxsim::cli::run;

namespace {

int cli(std::initializer_list<std::string> args) {
    std::vector<std::string> store{"coxsim"};
    store.insert(store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : store) argv.push_back(s.data());
    return run(int(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("coxsim_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("sample writes index,value rows and is deterministic") {
    const auto dir = scratch("sample");
    const auto a = (dir / "a.csv").string(), b = (dir / "b.csv").string(), c = (dir / "c.csv").string();
    CHECK(cli({"sample", "stable", "--alpha", "2", "--theta", "0", "-n", "1000", "--seed", "7", "-o", a}) == 0);
    const auto rows = lines(slurp(a));
    CHECK(rows.size() == 1001);
    CHECK(rows[0] == "index,value");
    CHECK(rows[1].rfind("0,", 0) == 0);
    CHECK(cli({"sample", "gig", "--nu", "-0.5", "--mu", "1", "--lambda", "1", "-n", "500", "--seed", "3", "-o", a}) == 0);
    CHECK(cli({"sample", "gig", "--nu", "-0.5", "--mu", "1", "--lambda", "1", "-n", "500", "--seed", "3", "--workers",
               "4", "-o", b}) == 0);
    CHECK(cli({"sample", "gig", "--nu", "-0.5", "--mu", "1", "--lambda", "1", "-n", "500", "--seed", "4", "-o", c}) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
    for (auto fam : {"gg", "gvg"})
        CHECK(cli({"sample", fam, "--nu", "0.5", "--kappa", "1", "--delta", "1", "-n", "10", "-o", c}) == 0);
    CHECK(cli({"sample", "gh", "--a", "1", "--nu", "-0.5", "--mu", "1", "--lambda", "1", "-n", "10", "-o", c}) == 0);
    CHECK(cli({"sample", "nvmm", "--mixing", "degenerate", "--value", "4", "-n", "10", "-o", c}) == 0);
    CHECK(cli({"sample", "weibull", "--nu", "0.5", "-n", "10", "-o", c}) == 0);
}

TEST_CASE("invalid parameters exit with 2") {
    CHECK(cli({"sample", "stable", "--alpha", "3"}) == 2);
    CHECK(cli({"sample", "banana"}) == 2);
    CHECK(cli({"sample", "gig", "--nu", "1"}) == 2);
    CHECK(cli({"cdf", "stable", "--alpha", "1"}) == 2);
    CHECK(cli({"cdf", "stable", "--alpha", "1", "--grid", "0,1"}) == 2);
    CHECK(cli({"frobnicate"}) == 2);
    CHECK(cli({}) == 2);
    CHECK(cli({"experiment", "no-such-experiment"}) == 2);
    CHECK(cli({"experiment", "lemma3", "--preset", "nope", "--out", scratch("bad").string()}) == 2);
    CHECK(cli({"experiment", "lemma3", "--set", "unknown=1", "--out", scratch("bad").string()}) == 2);
    CHECK(cli({"experiment", "lemma3", "--set", "eps=\"x\"", "--out", scratch("bad").string()}) == 2);
}

TEST_CASE("numerical failures exit with 3") {
    const auto dir = scratch("numeric");
    CHECK(cli({"simulate-path", "--clock", "deterministic", "--slope", "1e30", "--cells", "1", "-o",
               (dir / "p.csv").string()}) == 3);
}

TEST_CASE("cdf and density tables") {
    const auto dir = scratch("cdf");
    const auto f = (dir / "f.csv").string();
    CHECK(cli({"cdf", "stable", "--alpha", "1", "--theta", "0", "--x", "1", "-o", f}) == 0);
    auto rows = lines(slurp(f));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "x,value");
    CHECK(std::stod(rows[1].substr(2)) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(cli({"cdf", "nvmm", "--a", "0", "--nu", "-0.5", "--mu", "1", "--lambda", "1", "--x", "0", "-o", f}) == 0);
    CHECK(std::stod(lines(slurp(f))[1].substr(2)) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(cli({"density", "gg", "--nu", "1", "--kappa", "1", "--delta", "2", "--x", "0.0", "-o", f}) == 0);
    CHECK(lines(slurp(f))[1] == "0,0.5");
    CHECK(cli({"cdf", "gh", "--a", "1", "--nu", "-0.5", "--mu", "1", "--lambda", "1", "--grid", "-3,3,13", "-o", f}) == 0);
    rows = lines(slurp(f));
    REQUIRE(rows.size() == 14);
    double prev = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double v = std::stod(rows[i].substr(rows[i].find(',') + 1));
        CHECK(v >= prev);
        prev = v;
    }
    CHECK(cli({"density", "stable", "--alpha", "1.3", "--x", "0", "-o", f}) == 2);
}

TEST_CASE("simulate-path writes t,value on the grid") {
    const auto dir = scratch("path");
    const auto f = (dir / "p.csv").string();
    CHECK(cli({"simulate-path", "--process", "subordinator", "--clock", "gamma", "--shape", "2", "--rate", "1", "--cells",
               "8", "-o", f}) == 0);
    const auto rows = lines(slurp(f));
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == "t,value");
    CHECK(rows[1] == "0,0");
    CHECK(rows[9].rfind("1,", 0) == 0);
}

TEST_CASE("experiment reports are reproducible and worker independent") {
    const auto a = scratch("exp_a"), b = scratch("exp_b"), c = scratch("exp_c");
    CHECK(cli({"experiment", "lemma4", "--kn", "16,64", "-n", "20000", "--out", a.string()}) == 0);
    CHECK(cli({"experiment", "lemma4", "--kn", "16,64", "-n", "20000", "--workers", "4", "--out", b.string()}) == 0);
    CHECK(cli({"experiment", "lemma4", "--kn", "16,64", "-n", "20000", "--seed", "43", "--out", c.string()}) == 0);
    CHECK(slurp(a / "lemma4.json") == slurp(b / "lemma4.json"));
    CHECK(slurp(a / "lemma4.csv") == slurp(b / "lemma4.csv"));
    CHECK(slurp(a / "lemma4.json") != slurp(c / "lemma4.json"));
    CHECK(fs::exists(a / "lemma4.meta.json"));
    CHECK(slurp(a / "lemma4.json").find("timestamp") == std::string::npos);
    CHECK(slurp(a / "lemma4.json").find("workers") == std::string::npos);
    CHECK(lines(slurp(a / "lemma4.csv"))[0] == "kn,ks,dkw_99");
}

TEST_CASE("config files with flag overrides") {
    const auto dir = scratch("config");
    const auto cfg = dir / "run.json";
    std::ofstream(cfg) << R"({"seed": 5, "workers": 2, "output_dir": ")" << (dir / "first").string()
                       << R"(", "experiment": {"name": "lemma3", "n_samples": 20000, "t": [0.5]}})";
    CHECK(cli({"experiment", "--config", cfg.string()}) == 0);
    const auto first = slurp(dir / "first" / "lemma3.json");
    CHECK(first.find("\"seed\": 5") != std::string::npos);
    CHECK(cli({"experiment", "--config", cfg.string(), "--seed", "6", "--out", (dir / "second").string()}) == 0);
    const auto second = slurp(dir / "second" / "lemma3.json");
    CHECK(second.find("\"seed\": 6") != std::string::npos);
    std::ofstream(dir / "bad.json") << R"({"seed": 5, "colour": "red", "experiment": {"name": "lemma3"}})";
    CHECK(cli({"experiment", "--config", (dir / "bad.json").string()}) == 2);
    std::ofstream(dir / "broken.json") << "{";
    CHECK(cli({"experiment", "--config", (dir / "broken.json").string()}) == 2);
}

TEST_CASE("verdicts map to exit codes") {
    const auto dir = scratch("verdict");
    CHECK(cli({"experiment", "cond18-negative-control", "--out", dir.string()}) == 0);
    CHECK(slurp(dir / "cond18-negative-control.json").find("\"verdict\": \"FAIL\"") != std::string::npos);
    CHECK(cli({"experiment", "cond24-negative-control", "--out", dir.string()}) == 0);
    CHECK(cli({"experiment", "cond24", "--set", "a=2", "--preset", "drifted-rademacher", "--set", "rel_tol=1e-9",
               "--out", dir.string()}) == 0);
    CHECK(cli({"experiment", "clt-normal", "--kn", "16,64", "-n", "20000", "--tolerance", "0.0001", "--out",
               dir.string()}) == 1);
}

TEST_CASE("registry") {
    CHECK(cli({"list-experiments"}) == 0);
    CHECK(coxsim::cli::experiments().size() >= 18);
    CHECK(coxsim::cli::find_experiment("cond18-negative-control").negative_control);
    CHECK_THROWS_AS(coxsim::cli::find_experiment("x"), coxsim::cli::UsageError);
    const auto p = coxsim::cli::resolve_params("cor3-gvg", {{"nu", 1.0}});
    CHECK(p["nu"] == 1.0);
    CHECK(p["jumps"] == "laplace");
}
