#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "membrane/scenario.hpp"

using namespace membrane;
using namespace membrane::cli;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "membrane_sojourn");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("membrane_sojourn_test_" + name);
}

}  // namespace

TEST_CASE("closed-form distribution as CSV") {
    const auto r = run({"dist", "--model", "line", "--p", "1/2", "--receptors", "0", "--starts", "0", "--n", "4",
                        "--method", "closed", "--format", "csv"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "k,probability\n0,3/8\n1,3/8\n2,1/4\n3,0/1\n4,0/1\n");
}

TEST_CASE("torus of period two is a unit mass") {
    const auto r = run({"dist", "--model", "torus", "--N", "2", "--p", "0.3", "--receptors", "0", "--starts", "0",
                        "--n", "4", "--method", "gf", "--format", "json"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["field"] == "float");
    CHECK(j["meta"]["order"] == "64");
    const auto pmf = j["pmf"].get<std::vector<double>>();
    CHECK(pmf[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pmf[0] + pmf[1] + pmf[3] + pmf[4] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("gf and dp agree through the CLI") {
    const std::vector<std::string> base{"dist", "--p", "0.3", "--receptors", "0,2,5", "--starts", "3", "--n", "12",
                                        "--format", "json"};
    auto gf = base, dp = base;
    gf.insert(gf.end(), {"--method", "gf"});
    dp.insert(dp.end(), {"--method", "dp"});
    const auto a = json::parse(run(gf).out)["pmf"].get<std::vector<double>>();
    const auto b = json::parse(run(dp).out)["pmf"].get<std::vector<double>>();
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::fabs(a[k] - b[k]) <= 1e-10);
}

TEST_CASE("float CSV uses 17 significant digits") {
    const auto r = run({"dist", "--p", "0.3", "--receptors", "0", "--starts", "0", "--n", "2", "--method", "dp"});
    CHECK(r.out == "k,probability\n0,0.57999999999999996\n1,0.41999999999999998\n2,0\n");
}

TEST_CASE("every method is reachable") {
    for (const char* method : {"gf", "dp", "qconv", "mc"}) {
        const auto r = run({"dist", "--p", "2/5", "--receptors", "0,3", "--starts", "1", "--n", "6", "--method",
                            method, "--samples", "1000", "--seed", "3"});
        CHECK(r.code == kExitOk);
        CHECK(r.out.rfind("k,probability\n", 0) == 0);
    }
    const auto two = run({"dist", "--p", "1/2", "--receptors", "0", "--starts", "0,0", "--n", "2", "--method", "dp"});
    CHECK(two.out == "k,probability\n0,1/4\n1,3/4\n2,0/1\n");
}

TEST_CASE("monte carlo output is reproducible") {
    const std::vector<std::string> args{"dist",     "--p",    "0.5", "--receptors", "0",      "--starts", "0",
                                        "--n",      "10",     "--method", "mc",     "--samples", "20000",
                                        "--seed",   "77",     "--format", "json"};
    const auto a = run(args), b = run(args);
    CHECK(a.code == kExitOk);
    CHECK(json::parse(a.out)["pmf"] == json::parse(b.out)["pmf"]);
    CHECK(json::parse(a.out)["meta"]["seed"] == 77);
}

TEST_CASE("moments print both routes") {
    const auto r = run({"moments", "--p", "1/2", "--receptors", "0", "--starts", "0,0", "--n", "2"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "quantity,identity,pmf\nmean,3/4,3/4\nsecond,3/4,3/4\nvariance,3/16,3/16\n");
}

TEST_CASE("hitting laws") {
    const auto one = run({"hitting", "--p", "3/10", "--from", "1", "--levels", "0", "--max-j", "3"});
    CHECK(one.out == "j,probability\n1,7/10\n2,0/1\n3,147/1000\n");

    const auto two = run({"hitting", "--p", "1/2", "--from", "2", "--levels", "0,4", "--max-j", "4"});
    CHECK(two.out == "j,minus,plus,total\n1,0/1,0/1,0/1\n2,1/4,1/4,1/2\n3,0/1,0/1,0/1\n4,1/8,1/8,1/4\n");

    const auto spec = run({"hitting", "--p", "0.3", "--from", "1", "--levels", "0,3", "--max-j", "2", "--spectral",
                           "--format", "json"});
    REQUIRE(spec.code == kExitOk);
    const auto j = json::parse(spec.out);
    CHECK(j["pmf"]["plus"][1].get<double>() == doctest::Approx(0.09));

    const auto three = run({"hitting", "--p", "1/2", "--from", "0", "--levels", "-2,0,2", "--max-j", "2"});
    CHECK(three.out == "j,probability\n1,0/1\n2,1/2\n");

    const auto bad = run({"hitting", "--p", "1/2", "--from", "9", "--levels", "0,4", "--max-j", "2"});
    CHECK(bad.code == kExitDomain);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"dist", "--bogus"}).code == kExitUsage);
    CHECK(run({"dist", "--p", "0.5", "--n", "2", "--method", "nope"}).code == kExitUsage);
    CHECK(run({"dist", "--p", "abc", "--n", "2"}).code == kExitUsage);
    CHECK(run({"dist", "--p", "0.5", "--n", "2", "--format", "xml"}).code == kExitUsage);
    const auto bad_p = run({"dist", "--p", "3/2", "--n", "2"});
    CHECK(bad_p.code == kExitDomain);
    CHECK(bad_p.err.find("domain error") != std::string::npos);
    CHECK(run({"dist", "--p", "0.5", "--receptors", "0", "--starts", "1", "--n", "2", "--method", "closed"}).code ==
          kExitDomain);
    CHECK(run({"dist", "--p", "0.5", "--starts", "0,0", "--n", "2", "--method", "gf"}).code == kExitDomain);
    CHECK(run({"dist", "--p", "0.5", "--n", "8", "--order", "4"}).code == kExitDomain);
    CHECK(run({"dist", "--model", "torus", "--p", "0.5", "--n", "2"}).code == kExitUsage);
    CHECK(run({"dist", "--p", "0.5", "--receptors", "0", "--starts", "0,0,0,0", "--n", "300", "--method", "dp"})
              .code == kExitDomain);
    CHECK(run({"verify", "--preset", "nope"}).code == kExitDomain);
    CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("scenario JSON round-trips") {
    Scenario s;
    s.model = "torus";
    s.p = "3/7";
    s.receptors = {0, 4};
    s.starts = {2};
    s.n = 9;
    s.period = 11;
    s.method = "dp";
    s.order = 80;
    s.samples = 77;
    s.seed = 18446744073709551615ULL;
    s.format = "json";
    CHECK(scenario_from_json(json::parse(to_json(s).dump())) == s);
    CHECK_THROWS_AS(scenario_from_json(json{{"colour", "red"}}), DomainError);
    CHECK_THROWS_AS(scenario_from_json(json{{"n", "many"}}), DomainError);
}

TEST_CASE("JSON output re-runs to the same result") {
    const auto first = run({"dist", "--model", "torus", "--N", "7", "--p", "2/9", "--receptors", "0,3", "--starts",
                            "5", "--n", "10", "--method", "gf", "--format", "json"});
    REQUIRE(first.code == kExitOk);
    const auto j = json::parse(first.out);
    const auto path = temp_file("rerun.json");
    std::ofstream(path) << j["scenario"].dump();
    const auto second = run({"dist", "--scenario", path.string()});
    CHECK(json::parse(second.out) == j);
    std::filesystem::remove(path);
}

TEST_CASE("flags override the scenario file and --out writes a file") {
    const auto path = temp_file("scenario.json");
    std::ofstream(path) << R"({"p": "1/2", "receptors": [0], "starts": [0], "n": 4, "method": "closed"})";
    const auto out_path = temp_file("out.csv");
    const auto r = run({"dist", "--scenario", path.string(), "--n", "2", "--out", out_path.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.empty());
    std::ifstream in(out_path);
    std::stringstream body;
    body << in.rdbuf();
    CHECK(body.str() == "k,probability\n0,1/2\n1,1/2\n2,0/1\n");
    std::filesystem::remove(path);
    std::filesystem::remove(out_path);

    CHECK(run({"dist", "--scenario", "/nonexistent/scenario.json"}).code == kExitUsage);
}
