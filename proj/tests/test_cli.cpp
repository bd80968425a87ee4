#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("mtlab_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    std::string file(const std::string& name, const std::string& content = "") const {
        const auto p = (dir / name).string();
        if (!content.empty()) std::ofstream(p) << content;
        return p;
    }
};

int run(const std::string& args) {
    const std::string cmd = std::string("\"") + MTLAB_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("successful runs write reproducible files") {
    Scratch s;
    const auto cfg = s.file("fock.ini", "[state]\nfamily=fock\n[sweep]\nparam=n\nstart=0\nstop=5\nsteps=6\n");
    const auto a = s.file("a.csv"), b = s.file("b.csv");
    CHECK(run("gamma-sweep --config " + cfg + " --out " + a) == 0);
    CHECK(run("gamma-sweep --config " + cfg + " --out " + b) == 0);
    const auto text = slurp(a);
    CHECK(text == slurp(b));
    CHECK(text.rfind("# schema_version=1\n", 0) == 0);
    CHECK(text.find("# experiment=gamma-sweep\n") != std::string::npos);
    CHECK(text.find("\n0,family=fock n=0,") != std::string::npos);
}

TEST_CASE("json output and overrides") {
    Scratch s;
    const auto cfg = s.file("df.ini", "[state]\nfamily=displaced_fock\nm=1\nalpha=0.5\n");
    const auto out = s.file("df.json");
    REQUIRE(run("crb -c " + cfg + " --set state.m=2 --set state.alpha=1 -f json -o " + out) == 0);
    const auto j = nlohmann::json::parse(slurp(out));
    CHECK(j["meta"]["config.state.m"] == "2");
    REQUIRE(j["rows"].size() == 1);
    CHECK(j["rows"][0]["h2_het"].get<double>() == doctest::Approx(66.0));
    CHECK(j["rows"][0]["h2_hom"].get<double>() == doctest::Approx(117.276714294));
}

TEST_CASE("mc-verify is seed deterministic") {
    Scratch s;
    const auto cfg = s.file("mc.ini", "[state]\nfamily=squeezed\nlambda=3\n[mc]\nn=2000\ntrials=8\nn_theta=6\n");
    const auto a = s.file("a.csv"), b = s.file("b.csv"), c = s.file("c.csv");
    CHECK(run("mc-verify --config " + cfg + " --seed 9 --out " + a) == 0);
    CHECK(run("mc-verify --config " + cfg + " --seed 9 --out " + b) == 0);
    CHECK(run("mc-verify --config " + cfg + " --seed 10 --out " + c) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
    CHECK(slurp(a).find("# seed=9\n") != std::string::npos);
}

TEST_CASE("exit codes") {
    Scratch s;
    const auto out = s.file("never.csv");
    const auto empty = s.file("empty.ini", "[state]\nfamily=fock\n[sweep]\nparam=n\nstart=0\nstop=3\nsteps=0\n");
    CHECK(run("gamma-sweep --config " + empty + " --out " + out) == 2);
    CHECK_FALSE(fs::exists(out));

    const auto bad_family = s.file("bad.ini", "[state]\nfamily=unicorn\n");
    CHECK(run("crb --config " + bad_family) == 2);
    const auto fock = s.file("fock.ini", "[state]\nfamily=fock\n");
    CHECK(run("crossover --config " + fock) == 2);
    CHECK(run("crb --config " + fock + " --set typo=1") == 2);
    CHECK(run("crb --config " + fock + " --format xml") == 2);
    CHECK(run("crb --config " + s.file("missing.ini")) == 4);
    CHECK(run("nonsense --config " + fock) == 2);
    CHECK(run("crb") == 2);

    const auto even = s.file("even.ini", "[state]\nfamily=even_coherent\n[search]\nhi=0.5\n");
    CHECK(run("crossover --config " + even) == 3);

    CHECK(run("crb --config " + fock + " --out /nonexistent-dir/out.csv") == 4);
    CHECK(run("--help") == 0);
}
