#include "mtlab/error.hpp"
#include "mtlab/experiments.hpp"
#include "mtlab/report.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

std::string experiment_list() {
    std::string s;
    for (const auto& name : mtlab::experiment_names()) s += (s.empty() ? "" : ", ") + name;
    return s;
}

int run(const std::string& experiment, const std::string& config_path, const std::vector<std::string>& sets,
        const std::string& seed, const std::string& out_flag, const std::string& format_flag) {
    mtlab::Config cfg = config_path.empty() ? mtlab::Config{} : mtlab::Config::load(config_path);
    for (const auto& s : sets) cfg.set(s);
    if (!seed.empty()) cfg.set("seed", seed);

    const std::string out = out_flag.empty() ? cfg.get("out", "") : out_flag;
    const auto format = mtlab::parse_format(format_flag.empty() ? cfg.get("format", "csv") : format_flag);
    const mtlab::ExperimentReport report = mtlab::run_experiment(experiment, cfg);
    mtlab::emit_report(report, format, out);
    return mtlab::exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Moment tomography lab: Cramer-Rao bounds and Monte-Carlo checks for homodyne and heterodyne "
                 "moment estimation"};
    std::string experiment;
    std::string config_path;
    std::vector<std::string> sets;
    std::string seed;
    std::string out;
    std::string format;
    app.add_option("experiment", experiment, "One of: " + experiment_list())->required();
    app.add_option("--config,-c", config_path, "key=value config file with [section] headers");
    app.add_option("--set", sets, "Override a config entry, e.g. --set state.n=3")->take_all();
    app.add_option("--seed", seed, "Master seed of sampling experiments");
    app.add_option("--out,-o", out, "Output path (stdout when omitted or '-')");
    app.add_option("--format,-f", format, "csv or json (default csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? mtlab::exit_ok : mtlab::exit_config;
    }

    try {
        return run(experiment, config_path, sets, seed, out, format);
    } catch (const mtlab::ConfigError& e) {
        std::cerr << "mtlab: config error: " << e.what() << '\n';
        return mtlab::exit_config;
    } catch (const std::invalid_argument& e) {
        std::cerr << "mtlab: invalid input: " << e.what() << '\n';
        return mtlab::exit_config;
    } catch (const mtlab::NumericalError& e) {
        std::cerr << "mtlab: numerical failure: " << e.what() << '\n';
        return mtlab::exit_numerical;
    } catch (const mtlab::IoError& e) {
        std::cerr << "mtlab: i/o error: " << e.what() << '\n';
        return mtlab::exit_io;
    } catch (const std::exception& e) {
        std::cerr << "mtlab: " << e.what() << '\n';
        return mtlab::exit_failure;
    }
}
