#include "mtlab/crb.hpp"
#include "mtlab/error.hpp"
#include "mtlab/experiments.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace mtlab;
using doctest::Approx;

namespace {

Config config_from(const std::string& text) {
    std::istringstream in(text);
    return Config::parse(in, "test");
}

std::string csv_of(const ExperimentReport& r) {
    std::ostringstream out;
    write_report_csv(out, r);
    return out.str();
}

double number(const ExperimentReport& r, std::size_t row, const std::string& col) {
    return std::get<double>(r.rows.at(row).at(r.column(col)));
}

} // namespace

TEST_CASE("config sections, comments and overrides") {
    auto c = config_from("# comment\nseed = 5\n[state]\nfamily = fock\n; other comment\nn=3\n[sweep]\nparam=n\n");
    CHECK(c.get("seed", "") == "5");
    CHECK(c.get("state.family", "") == "fock");
    CHECK(c.get_int("state.n", 0) == 3);
    c.set("state.n=7");
    CHECK(c.get_int("state.n", 0) == 7);
    const auto sec = c.section("state");
    CHECK(sec.at("family") == "fock");
    CHECK(c.unused_keys() == std::vector<std::string>{"sweep.param"});
    CHECK_THROWS_AS(c.reject_unused(), ConfigError);

    CHECK_THROWS_AS(config_from("[state\nfamily=fock\n"), ConfigError);
    CHECK_THROWS_AS(config_from("novalue\n"), ConfigError);
    CHECK_THROWS_AS(config_from("a=1\na=2\n"), ConfigError);
    CHECK_THROWS_AS(c.set("noequals"), ConfigError);
}

TEST_CASE("typed accessors") {
    auto c = config_from("x=1.5\nn=1e6\nbad=abc\nlist=1, 2.5,3\nseed=18446744073709551615\n");
    CHECK(c.get_double("x", 0) == 1.5);
    CHECK(c.get_int("n", 0) == 1000000);
    CHECK(c.get_u64("seed", 0) == 18446744073709551615ULL);
    CHECK(c.get_list("list", {}) == std::vector<double>{1, 2.5, 3});
    CHECK_THROWS_AS(c.get_double("bad", 0), ConfigError);
    CHECK_THROWS_AS(c.get_int("x", 0), ConfigError);
    CHECK(c.get_double("missing", 4.0) == 4.0);
    CHECK_THROWS_AS(c.require("missing"), ConfigError);
}

TEST_CASE("sweep grids") {
    CHECK(linspace(0, 1, 5) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK(linspace(2, 3, 1) == std::vector<double>{2});
    CHECK_THROWS_AS(linspace(0, 1, 0), ConfigError);
    const auto s = read_sweep(config_from("[sweep]\nparam=m\nvalues=0,2,5\n"), "sweep");
    CHECK(s.param == "m");
    CHECK(s.values == std::vector<double>{0, 2, 5});
    CHECK_THROWS_AS(read_sweep(config_from("[sweep]\nparam=m\nvalues=0.5\n"), "sweep"), ConfigError);
    CHECK_THROWS_AS(read_sweep(config_from("[sweep]\nparam=alpha\nstart=0\n"), "sweep"), ConfigError);
    CHECK(read_sweep(config_from(""), "sweep").param.empty());
}

TEST_CASE("fig4 emits the Fock gamma2 sequence") {
    const auto r = run_experiment("fig4", Config{});
    REQUIRE(r.rows.size() == 31);
    CHECK(std::get<std::int64_t>(r.rows[0][0]) == 0);
    CHECK(std::get<std::int64_t>(r.rows[30][0]) == 30);
    CHECK(number(r, 0, "gamma2") == Approx(1.2));
    CHECK(number(r, 1, "gamma2") == Approx(16.0 / 15));
    for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(number(r, i, "gamma2") < number(r, i - 1, "gamma2"));
    CHECK(number(r, 30, "gamma2") == Approx(2.0 * 31 * 33 / (5.0 * 931)));
    CHECK(number(r, 30, "gamma2") > 0.4);
    CHECK(r.meta.front().first == "schema_version");
}

TEST_CASE("coherent crossover") {
    const auto r = run_experiment("crossover", config_from("[state]\nfamily=coherent\n"));
    REQUIRE(r.rows.size() == 1);
    CHECK(number(r, 0, "alpha0") == Approx(0.39528).epsilon(1e-5));
    CHECK(number(r, 0, "h2_het") == Approx(7.875));
    CHECK(number(r, 0, "h2_hom") == Approx(7.875));

    const auto df = run_experiment("crossover", config_from("[state]\nfamily=displaced_fock\n[sweep]\nparam=m\nvalues=1,2\n"));
    REQUIRE(df.rows.size() == 2);
    CHECK(std::get<std::int64_t>(df.rows[0][df.column("always_below_unity")]) == 0);
    CHECK(std::get<std::int64_t>(df.rows[1][df.column("always_below_unity")]) == 1);
    CHECK(std::isnan(number(df, 1, "alpha0")));
}

TEST_CASE("unsupported pairings and bad configs are config errors") {
    CHECK_THROWS_AS(run_experiment("crossover", config_from("[state]\nfamily=fock\n")), ConfigError);
    CHECK_THROWS_AS(run_experiment("gamma2-min", config_from("[state]\nfamily=gaussian\n")), ConfigError);
    CHECK_THROWS_AS(run_experiment("gamma-sweep", config_from("[state]\nfamily=fock\n")), ConfigError);
    CHECK_THROWS_AS(run_experiment("fig4", config_from("[n]\nsteps=0\n")), ConfigError);
    CHECK_THROWS_AS(run_experiment("fig4", config_from("typo=1\n")), ConfigError);
    CHECK_THROWS_AS(run_experiment("nope", Config{}), ConfigError);
    CHECK_THROWS_AS(run_experiment("fig4", config_from("experiment=fig5\n")), ConfigError);
    CHECK_THROWS_AS(run_experiment("crb", config_from("[state]\nfamily=photon_added\nm=1\n[fisher]\nmethod=closed_form\n")),
                    ConfigError);
    CHECK_THROWS_AS(run_experiment("mc-verify", config_from("[state]\nfamily=fock\n[mc]\ntrials=0\n")), ConfigError);
}

TEST_CASE("gamma sweeps keep grid order") {
    const auto r = run_experiment(
        "gamma-sweep", config_from("[state]\nfamily=even_coherent\n[sweep]\nparam=alpha\nstart=0\nstop=2\nsteps=9\n"));
    REQUIRE(r.rows.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
        const double a = number(r, i, "alpha");
        CHECK(a == Approx(0.25 * i));
        CHECK(number(r, i, "gamma2") == Approx(gamma2(CatState{a, Parity::even})));
    }
    const auto single = run_experiment("crb", config_from("[state]\nfamily=fock\nn=1\n"));
    REQUIRE(single.rows.size() == 1);
    CHECK(number(single, 0, "h2_hom") == Approx(15.0));
    CHECK(std::get<std::string>(single.rows[0][single.column("h2_hom_method")]) == "closed_form");
}

TEST_CASE("gamma2 minima and the fig5/fig6 datasets") {
    const auto even = run_experiment("gamma2-min", config_from("[state]\nfamily=even_coherent\n"));
    CHECK(number(even, 0, "gamma2_min") == Approx(0.77096).epsilon(1e-5));

    const auto f5 = run_experiment("fig5", config_from("[alpha]\nstart=0\nstop=3\nsteps=31\n"));
    CHECK(f5.rows.size() == 62);
    CHECK(number(f5, 0, "gamma2") == Approx(1.2));
    CHECK(number(f5, 31, "gamma2") == Approx(16.0 / 15));

    const auto f6 = run_experiment("fig6", config_from("families=displaced_fock\n[m]\nstart=0\nstop=12\nsteps=13\n"));
    REQUIRE(f6.rows.size() == 13);
    CHECK(number(f6, 0, "gamma2_min") == Approx(3 * (6 - std::sqrt(21.0)) / 5).epsilon(1e-8));
    for (std::size_t i = 1; i < f6.rows.size(); ++i)
        CHECK(number(f6, i, "gamma2_min") < number(f6, i - 1, "gamma2_min"));
}

TEST_CASE("fig2 and fig3 grids") {
    const auto f2 = run_experiment("fig2", config_from("[mu]\nsteps=3\n[lambda]\nsteps=2\n"));
    CHECK(f2.rows.size() == 5 * 3 * 2);
    CHECK(number(f2, 0, "gamma2") == Approx(1.2));
    const auto f3 = run_experiment("fig3", config_from("[mu]\nvalues=1\n[x0]\nvalues=0\n[p0]\nvalues=0,1\n"));
    REQUIRE(f3.rows.size() == 2);
    CHECK(number(f3, 0, "gamma2") == Approx(1.2));
}

TEST_CASE("mc-verify vacuum heterodyne second moments") {
    const auto r = run_experiment(
        "mc-verify", config_from("[state]\nfamily=vacuum\n[mc]\nscheme=het\norder=second\nn=100000\ntrials=100\n"));
    REQUIRE(r.rows.size() == 1);
    CHECK(number(r, 0, "scrb") == Approx(6.0));
    CHECK(number(r, 0, "ratio") >= 0.9);
    CHECK(number(r, 0, "ratio") <= 1.1);
    bool seed_meta = false;
    for (const auto& [k, v] : r.meta) seed_meta |= (k == "seed" && v == "1");
    CHECK(seed_meta);
}

TEST_CASE("identical configs give byte-identical reports") {
    const auto c = config_from("seed=4\n[state]\nfamily=odd_coherent\nalpha=0.8\n[mc]\nn=5000\ntrials=12\n");
    CHECK(csv_of(run_experiment("mc-verify", c)) == csv_of(run_experiment("mc-verify", c)));
    auto d = c;
    d.set("seed", "5");
    CHECK(csv_of(run_experiment("mc-verify", c)) != csv_of(run_experiment("mc-verify", d)));
}
