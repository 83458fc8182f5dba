#include <doctest.h>

#include "cli.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using pap::cli::run;
using Json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(const std::vector<std::string>& args)
{
    std::ostringstream o, e;
    int c = run(args, o, e);
    return {c, o.str(), e.str()};
}

}  // namespace

TEST_CASE("usage and invalid configurations")
{
    auto r = call({});
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(call({"--help"}).code == 0);
    CHECK(call({"frobnicate"}).code == 2);
    CHECK(call({"psd", "--D", "3"}).code == 2);
    CHECK(call({"psd", "--T", "-1"}).code == 2);
    CHECK(call({"psd", "--setting", "cubic"}).code == 2);
    CHECK(call({"verify", "--suite", "nope"}).code == 2);
    CHECK(call({"verify", "--suite", "oracle", "--setting", "boolean", "--n", "5"}).code == 2);
    auto b = call({"norms", "--n", "8", "--trials", "2", "--work-budget", "10"});
    CHECK(b.code == 2);
    CHECK(b.err.find("budget") != std::string::npos);
    CHECK(call({"report", "/nonexistent/file.json"}).code == 2);
}

TEST_CASE("budget cap from the environment")
{
    setenv("PAP_WORK_BUDGET", "10", 1);
    auto r = call({"norms", "--n", "8", "--trials", "2"});
    unsetenv("PAP_WORK_BUDGET");
    CHECK(r.code == 2);
    CHECK(call({"norms", "--n", "8", "--trials", "2"}).code == 0);
}

TEST_CASE("verify example")
{
    auto r = call({"verify", "--n", "4", "--m", "2", "--setting", "boolean", "--T", "3"});
    REQUIRE(r.code == 0);
    auto j = Json::parse(r.out);
    CHECK(j["pass"] == true);
    CHECK(j["oracle"]["mismatches"] == 0);
    CHECK(j["oracle"]["coefficients_checked"].get<int>() > 100);
    CHECK(j["booleanity"]["pass"] == true);
}

TEST_CASE("deterministic outputs and assertion failures")
{
    std::vector<std::string> a{"psd", "--n", "6", "--m", "4", "--trials", "3"};
    auto x = call(a), y = call(a);
    CHECK(x.code == 0);
    CHECK(x.out == y.out);
    auto j = Json::parse(x.out);
    CHECK(j["trials"].size() == 3);
    CHECK(j["trials"][0]["seed"] != j["trials"][1]["seed"]);

    std::vector<std::string> f{"psd", "--n", "6", "--m", "4", "--trials", "3", "--min-psd", "4"};
    auto z = call(f);
    CHECK(z.code == 1);
    CHECK(z.err.find("assertion failed") != std::string::npos);

    auto s = call({"sample", "--n", "3", "--m", "2", "--seed", "9"});
    REQUIRE(s.code == 0);
    auto sj = Json::parse(s.out);
    CHECK(sj["data"].size() == 2);
    CHECK(sj["data"][0].size() == 3);
    CHECK(s.out == call({"sample", "--n", "3", "--m", "2", "--seed", "9"}).out);
}

TEST_CASE("files and report")
{
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "pap_cli_test";
    fs::remove_all(dir);
    CHECK(call({"sample", "--n", "4", "--m", "2", "--out", dir.string()}).code == 0);
    CHECK(fs::exists(dir / "instance.csv"));
    CHECK(call({"pseudocalibrate", "--instance", (dir / "instance").string(), "--D", "2", "--T", "2", "--out",
                dir.string()})
              .code == 0);
    CHECK(fs::exists(dir / "pe.json"));
    CHECK(call({"project", "--out", dir.string()}).code == 0);
    auto r = call({"report", (dir / "project.json").string(), (dir / "sample.json").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("## project.json (project)") != std::string::npos);
    CHECK(r.out.find("### annihilation") != std::string::npos);
    CHECK(r.out.find("| config.n | 8 |") != std::string::npos);
    fs::remove_all(dir);
}
