#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qdef/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using qdef::cli::run;

namespace {

fs::path scratch(const std::string& tag) {
    fs::path p = fs::temp_directory_path() / ("qdef_cli_test_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "qdef");
    return run(args);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("grid parsing and number formatting") {
    auto g = qdef::cli::parse_grid("0:1:0.25");
    CHECK(g.values().size() == 5);
    CHECK_THROWS(qdef::cli::parse_grid("0:1"));
    CHECK_THROWS(qdef::cli::parse_grid("0:1:-1"));
    CHECK(qdef::cli::fmt(0.1) == "0.10000000000000001");
}

TEST_CASE("classify writes bands and a manifest") {
    auto dir = scratch("classify");
    CHECK(invoke({"classify", "--s", "1.013", "--c-range", "0.2:2:0.4", "--out", dir.string()}) == 0);
    std::string csv = slurp(dir / "classify.csv");
    CHECK(csv.find("Discrete3") != std::string::npos);
    CHECK(csv.find("Continuous1") != std::string::npos);
    CHECK(fs::exists(dir / "classify.manifest.json"));
}

TEST_CASE("exit codes") {
    auto dir = scratch("exit");
    CHECK(invoke({"classify", "--s", "0", "--c", "1", "--out", dir.string()}) == qdef::cli::ArgError);
    CHECK(invoke({"classify", "--c", "1", "--out", dir.string()}) == qdef::cli::ArgError);
    CHECK(invoke({"potential", "--s", "abc", "--m", "1", "--out", dir.string()}) == qdef::cli::ArgError);
    // c = 0.5 is not unitary on m = -3..3 at s = 1
    CHECK(invoke({"rep", "--s", "1.0", "--c", "0.5", "--basis", "-3:3:1", "--verify", "--out", dir.string()}) ==
          qdef::cli::VerifyFailure);
    CHECK(invoke({"rep", "--s", "1.0", "--c", "1", "--basis", "-0.5,0.5", "--verify", "--out", dir.string()}) ==
          qdef::cli::Ok);
}

TEST_CASE("replay regenerates identical files") {
    auto dir = scratch("replay");
    CHECK(invoke({"potential", "--s", "1.1", "--m", "1", "--grid", "-1:1:0.01", "--out", dir.string()}) == 0);
    CHECK(invoke({"replay", (dir / "potential.manifest.json").string()}) == 0);
    CHECK(slurp(dir / "potential.csv") == slurp(dir / "replay" / "potential.csv"));

    // a manifest whose recorded digest no longer matches is reported
    std::string man = slurp(dir / "potential.manifest.json");
    auto at = man.find("potential.csv\"");
    REQUIRE(at != std::string::npos);
    auto q = man.find('"', man.find(':', at) + 1);
    man[q + 1] = man[q + 1] == '0' ? '1' : '0';
    std::ofstream(dir / "potential.manifest.json") << man;
    CHECK(invoke({"replay", (dir / "potential.manifest.json").string(), "--out", (dir / "r2").string()}) ==
          qdef::cli::VerifyFailure);
}

TEST_CASE("config file supplies defaults, command line wins") {
    auto dir = scratch("config");
    std::ofstream(dir / "run.cfg") << "# defaults\nm = 2\ngrid = -0.5:0.5:0.05\ns = 0.3\n";
    CHECK(invoke({"potential", "--s", "1.1", "--config", (dir / "run.cfg").string(), "--out", dir.string()}) == 0);
    std::string man = slurp(dir / "potential.manifest.json");
    CHECK(man.find("\"1.1\"") != std::string::npos);
    CHECK(man.find("-0.5:0.5:0.05") != std::string::npos);
}

TEST_CASE("QDEF_OUTPUT_DIR sets the default output directory") {
    auto dir = scratch("env");
    setenv("QDEF_OUTPUT_DIR", dir.string().c_str(), 1);
    CHECK(invoke({"flow", "--m-max", "1", "--s-grid", "0.1:3:0.1"}) == 0);
    unsetenv("QDEF_OUTPUT_DIR");
    CHECK(fs::exists(dir / "flow.csv"));
    CHECK(fs::exists(dir / "flow.crossings.csv"));
}

TEST_CASE("the installed binary runs") {
    const char* bin = std::getenv("QDEF_BIN");
    if (!bin) return;
    auto dir = scratch("bin");
    std::string cmd = std::string(bin) + " hopf --verify --out " + dir.string() + " > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "hopf.csv"));
}
