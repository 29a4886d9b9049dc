#include <adcons/cli.hpp>

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unistd.h>

using namespace adcons;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path dir;
    TempDir()
    {
        dir = fs::temp_directory_path() / ("adcons_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string write(const std::string& name, const std::string& content) const
    {
        std::ofstream(dir / name) << content;
        return (dir / name).string();
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* constbeta05_psi2 =
    R"({"radial": {"kind": "constant", "beta": 0.5}, "potential": {"expr": "psi^2"}})";

} // namespace

TEST_CASE("check consistency writes a report")
{
    TempDir t;
    std::string model = t.write("m.json", constbeta05_psi2);
    std::string out = t.path("report.json");
    Result r = run({"check", "consistency", "--model", model, "--out", out});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    auto j = nlohmann::ordered_json::parse(slurp(out));
    CHECK(j["verdict"] == "consistent");
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it)
        keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"version", "config", "verdict", "necessary", "sufficient",
                                           "caveats", "timings"});
    CHECK(j["timings"].empty());
    CHECK_FALSE(fs::exists(out + ".tmp"));
}

TEST_CASE("reports are deterministic")
{
    TempDir t;
    std::string model = t.write(
        "m.json", R"({"radial": {"kind": "general", "beta1": 0, "beta2": 1, "s": 2}, "potential": {"expr": "psi"}})");
    Result a = run({"check", "consistency", "--model", model});
    Result b = run({"check", "consistency", "--model", model});
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto j = nlohmann::json::parse(a.out);
    CHECK(j["verdict"] == "inconsistent");
    CHECK(j["necessary"]["radial"]["rn"]["witness"]["type"] == "radial");
    CHECK(j["necessary"]["radial"]["rn"]["witness"]["n"] == 2);

    Result c = run({"check", "consistency", "--model", model, "--format", "csv"});
    REQUIRE(c.code == 0);
    CHECK(c.out.rfind("check,order,status", 0) == 0);
    CHECK(c.out.find("verdict,,inconsistent") != std::string::npos);
}

TEST_CASE("input errors exit with 2 and leave no report")
{
    TempDir t;
    std::string out = t.path("report.json");
    auto bad = [&](const std::string& text) {
        std::string model = t.write("bad.json", text);
        Result r = run({"check", "consistency", "--model", model, "--out", out});
        INFO(text);
        CHECK(r.code == 2);
        CHECK_FALSE(r.err.empty());
        CHECK_FALSE(fs::exists(out));
    };
    bad(R"({"radial": {"kind": "constant", "beta": 0.5}, "potential": {"expr": "psi^2"})");
    bad(R"({"radial": {"kind": "constant", "beta": 0.5}, "potential": {"expr": "psi^2"}, "extra": 1})");
    bad(R"({"radial": {"kind": "constant", "beta": 0.5, "s": 1}, "potential": {"expr": "psi^2"}})");
    bad(R"({"radial": {"kind": "constant", "beta": "half"}, "potential": {"expr": "psi^2"}})");
    bad(R"({"radial": {"kind": "constant", "beta": 1.5}, "potential": {"expr": "psi^2"}})");
    bad(R"({"radial": {"kind": "spline"}, "potential": {"expr": "psi^2"}})");
    bad(R"({"radial": {"kind": "constant", "beta": 0.5}, "potential": {"expr": "psi^"}})");
    bad(R"({"potential": {"expr": "psi^2"}})");

    CHECK(run({"check", "consistency", "--model", t.path("missing.json")}).code == 2);
    std::string model = t.write("m.json", constbeta05_psi2);
    CHECK(run({"check", "consistency", "--model", model, "--tol-abs", "-1"}).code == 2);
    CHECK(run({"check", "consistency", "--model", model, "--grid", "1:2"}).code == 2);
    CHECK(run({"check", "consistency", "--model", model, "--bogus"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("eval subcommands")
{
    Result r = run({"eval", "ml", "--lam", "0", "--p", "0.7", "--b", "0.4", "--z", "-3"});
    REQUIRE(r.code == 0);
    CHECK(std::stod(r.out) == Catch::Approx(1.0 / std::tgamma(0.4)).epsilon(1e-15));

    Result e = run({"eval", "ml", "--lam", "1", "--p", "1", "--b", "1", "--z", "-2"});
    CHECK(std::stod(e.out) == Catch::Approx(std::exp(-2.0)).epsilon(1e-14));

    Result d = run({"eval", "frd", "--expr", "x^0.5", "--order", "0.5", "--x", "1"});
    REQUIRE(d.code == 0);
    CHECK(std::stod(d.out) == Catch::Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-14));
    Result i = run({"eval", "rli", "--expr", "1", "--order", "1", "--x", "2"});
    CHECK(std::stod(i.out) == Catch::Approx(2.0).epsilon(1e-15));

    CHECK(run({"eval", "frd", "--expr", "x^^2", "--order", "0.5", "--x", "1"}).code == 2);
    CHECK(run({"eval", "ml", "--lam", "1", "--p", "0", "--b", "1", "--z", "1"}).code == 2);
    // x^{-1.5} is not integrable at the terminal
    CHECK(run({"eval", "rli", "--expr", "x^-1.5", "--order", "0.5", "--x", "1"}).code == 3);
}

TEST_CASE("check cm")
{
    Result r = run({"check", "cm", "--expr", "exp(-x)", "--order", "6"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["cm"]["status"] == "pass");
    Result f = run({"check", "cm", "--expr", "x^0.5", "--order", "3", "--format", "csv"});
    REQUIRE(f.code == 0);
    CHECK(f.out.find("\nfail,") != std::string::npos);
}

TEST_CASE("invert and moments")
{
    TempDir t;
    std::string model = t.write("m.json", constbeta05_psi2);
    Result r = run({"invert", "--model", model, "--grid", "0.1:0.9:9:linear"});
    REQUIRE(r.code == 0);
    std::istringstream csv(r.out);
    std::string line;
    std::getline(csv, line);
    CHECK(line == "E,g");
    int rows = 0;
    while (std::getline(csv, line)) {
        double E = std::stod(line.substr(0, line.find(',')));
        double g = std::stod(line.substr(line.find(',') + 1));
        CHECK(g == Catch::Approx(E / (std::numbers::pi * std::numbers::pi)).epsilon(1e-13));
        ++rows;
    }
    CHECK(rows == 9);
    CHECK(run({"invert", "--model", model, "--grid", "0.5:2:4:linear"}).code == 2);

    Result m = run({"moments", "--model", model, "--mu-list", "0,1", "--at", "0.8,1.5"});
    REQUIRE(m.code == 0);
    CHECK(m.out.rfind("mu,F\n", 0) == 0);
    CHECK(run({"moments", "--model", model, "--mu-list", "0,a", "--at", "0.8,1.5"}).code == 2);
    CHECK(run({"moments", "--model", model, "--mu-list", "0", "--at", "0.8"}).code == 2);
}
