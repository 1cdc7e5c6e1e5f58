#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "lienard/config.hpp"
#include "support.hpp"

using namespace lienard;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(LIENARD_CONFIG_DIR) + "/" + name; }

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("lienard_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("parse_config reads the worked example")
{
    const RunConfig cfg = parse_config(config("example4.json"));
    REQUIRE(cfg.has_system());
    const LienardSystem sys = cfg.system();
    const LienardSystem expected = testing::example_system(0.01);
    CHECK(sys.n == 4);
    CHECK(sys.m == 2);
    CHECK(sys.f == expected.f);
    CHECK(sys.g == expected.g);
    CHECK(sys.epsilon == 0.01);
    REQUIRE(cfg.scan);
    CHECK(cfg.scan->count == 200);
    CHECK(cfg.match_tol.value_or(0) == 0.1);
}

TEST_CASE("parse_config errors name the offending field")
{
    SUBCASE("missing g")
    {
        try {
            parse_config_text(R"({"n": 1, "m": 1, "f": [0, 1]})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("g") != std::string::npos);
        }
    }
    SUBCASE("length mismatch")
    {
        try {
            parse_config_text(R"({"n": 2, "m": 1, "f": [0, 1], "g": [1, 1]})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("length mismatch") != std::string::npos);
        }
    }
    SUBCASE("unknown key")
    {
        try {
            parse_config_text(R"({"n": 1, "m": 1, "f": [0, 1], "g": [1, 1], "colour": 3})");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("colour") != std::string::npos);
        }
    }
    SUBCASE("syntax error reports a position")
    {
        try {
            parse_config_text("{\n  \"n\": 1,\n  \"m\": ,\n}");
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            const std::string what = e.what();
            CHECK(what.find("line 3") != std::string::npos);
            CHECK(what.find("column") != std::string::npos);
        }
    }
    CHECK_THROWS_AS(parse_config("/nonexistent/lienard.json"), ConfigError);
}

TEST_CASE("coefficient spellings")
{
    CHECK(parse_coefficient(nlohmann::json(2), "f[0]") == PiExt{Rational(2)});
    CHECK(parse_coefficient(nlohmann::json("-3/4"), "f[0]") == PiExt{Rational(-3, 4)});
    CHECK(parse_coefficient(nlohmann::json("8/225/pi"), "f[0]") == PiExt::over_pi(Rational(8, 225)));
    CHECK(parse_coefficient(nlohmann::json{{"rat", "1/2"}, {"pi_inv", "3"}}, "f[0]") ==
          PiExt{Rational(1, 2), Rational(3)});
    CHECK_THROWS_AS(parse_coefficient(nlohmann::json("x"), "f[0]"), ConfigError);
    CHECK_THROWS_AS(parse_coefficient(nlohmann::json::array(), "f[0]"), ConfigError);
}

TEST_CASE("json rendering keeps exact rationals")
{
    const auto j = to_json(PiExt::over_pi(Rational(-476, 225)));
    CHECK(j["rat"] == "0/1");
    CHECK(j["pi_inv"] == "-476/225");
    const auto sys = to_json(testing::example_system(0.01), true);
    CHECK(sys["n"] == 4);
    CHECK(sys["g"][0]["rat"] == "4/15");
}

TEST_CASE("bound")
{
    Run r = run({"bound", "--n", "4", "--m", "2"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == "4\n");
    r = run({"bound", "--config", config("example4.json")});
    CHECK(r.code == cli::kOk);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["descartes_bound"] == 4);
    CHECK(doc["predicted_cycle_count"] == 4);
}

TEST_CASE("average prints the exact quintic")
{
    const Run r = run({"average", "--config", config("example4.json")});
    CHECK(r.code == cli::kOk);
    CHECK(r.out.find("-238/225") != std::string::npos);
    CHECK(r.out.find("1/450") != std::string::npos);
}

TEST_CASE("roots")
{
    const Run r = run({"roots", "--config", config("example4.json"), "--tol", "1e-12"});
    REQUIRE(r.code == cli::kOk);
    const auto doc = nlohmann::json::parse(r.out);
    REQUIRE(doc.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(doc[i]["value"].get<double>() == doctest::Approx(i + 1.0).epsilon(1e-11));
        CHECK(doc[i]["degree_sign"] == (i % 2 == 0 ? -1 : 1));
    }
}

TEST_CASE("design output feeds back into the other commands")
{
    const fs::path dir = scratch("design");
    const std::string file = (dir / "designed.json").string();
    Run r = run({"design", "--n", "4", "--m", "2", "--targets", "1,2,3,4", "--pin", "b2=1", "--zero", "a1",
                 "--zero", "a3", "--zero", "b1", "--out", file});
    REQUIRE(r.code == cli::kOk);
    const RunConfig cfg = parse_config(file);
    CHECK(cfg.system().f == testing::example_system().f);
    CHECK(cfg.system().g == testing::example_system().g);

    r = run({"design", "--config", config("design4.json")});
    REQUIRE(r.code == cli::kOk);
    CHECK(nlohmann::json::parse(r.out)["f"][0]["pi_inv"] == "-476/225");

    r = run({"roots", "--config", file});
    CHECK(r.code == cli::kOk);
    CHECK(nlohmann::json::parse(r.out).size() == 4);

    r = run({"design", "--n", "4", "--m", "2", "--targets", "1,1,3,4"});
    CHECK(r.code == cli::kComputationError);
    CHECK(nlohmann::json::parse(r.err)["error"] == "DesignError");
    fs::remove_all(dir);
}

TEST_CASE("simulate and poincare emit CSV")
{
    Run r = run({"simulate", "--config", config("example4.json"), "--x0", "2", "--transits", "2"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.rfind("t,x,y\n", 0) == 0);

    r = run({"poincare", "--config", config("example4.json"), "--scan", "0.5:4.5:9"});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.rfind("x0,P,D\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 10);
}

TEST_CASE("verify")
{
    const fs::path dir = scratch("verify");
    Run r = run({"verify", "--config", config("example4.json"), "--out", dir.string()});
    REQUIRE(r.code == cli::kOk);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.is_object());
    CHECK(fs::exists(dir / "manifest.json"));
    CHECK(fs::exists(dir / "cycles.csv"));

    r = run({"verify", "--config", config("example4.json"), "--match-tol", "1e-9", "--scan", "0.5:4.5:40", "--out",
             dir.string()});
    CHECK(r.code == cli::kUnmatched);

    r = run({"verify", "--config", config("example4.json"), "--epsilon", "0", "--out", dir.string()});
    CHECK(r.code == cli::kComputationError);
    fs::remove_all(dir);
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == cli::kUsageError);
    CHECK(run({"frobnicate"}).code == cli::kUsageError);
    CHECK(run({"bound"}).code == cli::kUsageError);
    CHECK(run({"simulate", "--config", config("example4.json")}).code == cli::kUsageError);
    const Run bad = run({"average", "--config", "/nonexistent.json"});
    CHECK(bad.code == cli::kUsageError);
    CHECK(nlohmann::json::parse(bad.err)["error"] == "ConfigError");
}
