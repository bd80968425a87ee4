#pragma once

#include "mtlab/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mtlab {

// Flat key=value configuration. Lines after a "[name]" header get the key
// prefix "name."; '#' and ';' start comments. Every key must be consumed by
// the experiment, otherwise the run is rejected as a likely typo.
class Config {
public:
    static Config parse(std::istream& in, const std::string& source = "<config>");
    static Config load(const std::string& path);

    // "key=value", as given to --set.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    // Entries under "prefix." with the prefix stripped; marks them consumed.
    std::map<std::string, std::string> section(const std::string& prefix) const;

    void mark_used(const std::string& key) const;
    std::vector<std::string> unused_keys() const;
    // Throws ConfigError naming the first key nobody read.
    void reject_unused() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> used_;
};

// Linear grid: `steps` points from start to stop inclusive, or an explicit
// comma-separated `values` list.
struct Sweep {
    std::string param;
    std::vector<double> values;
};

// Reads <prefix>.param with <prefix>.start/.stop/.steps or <prefix>.values.
// Returns an empty param when no sweep is configured. Throws ConfigError on an
// empty or malformed range.
Sweep read_sweep(const Config& cfg, const std::string& prefix);
std::vector<double> linspace(double start, double stop, long long steps);

const std::vector<std::string>& experiment_names();

// Runs one experiment. Config errors are detected before any heavy work; the
// report content depends only on the config (including its seed).
ExperimentReport run_experiment(const std::string& experiment, const Config& cfg);

// Exit codes of the command-line front end.
enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_numerical = 3, exit_io = 4 };

} // namespace mtlab
