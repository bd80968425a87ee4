#include "mtlab/experiments.hpp"

#include "mtlab/crb.hpp"
#include "mtlab/error.hpp"
#include "mtlab/monte_carlo.hpp"
#include "mtlab/state_models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>

namespace mtlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool is_integer_param(const std::string& name) { return name == "n" || name == "m"; }

} // namespace

Config Config::parse(std::istream& in, const std::string& source) {
    Config cfg;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const std::string where = source + ":" + std::to_string(lineno);
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) throw ConfigError(where + ": malformed section header '" + t + "'");
            section = trim(t.substr(1, t.size() - 2));
            if (section.find_first_of(" =.[]") != std::string::npos)
                throw ConfigError(where + ": invalid section name '" + section + "'");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key=value, got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.entries_.count(full)) throw ConfigError(where + ": duplicate key '" + full + "'");
        cfg.entries_[full] = trim(t.substr(eq + 1));
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    return parse(in, path);
}

void Config::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
    if (key.empty() || key.find_first_of(" =\n") != std::string::npos) throw ConfigError("invalid key '" + key + "'");
    if (value.find('\n') != std::string::npos) throw ConfigError("value of '" + key + "' spans lines");
    entries_[key] = value;
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

void Config::mark_used(const std::string& key) const { used_.insert(key); }

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    used_.insert(key);
    return it->second;
}

std::string Config::require(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'");
    used_.insert(key);
    return it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key, "");
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size() || !std::isfinite(d)) throw ConfigError("'" + key + "' is not a number: '" + v + "'");
    return d;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key, "");
    std::size_t used = 0;
    long long n = 0;
    try {
        n = std::stoll(v, &used);
    } catch (const std::exception&) {
        // 1e6 style is accepted when it denotes an integer
        const double d = get_double(key, 0.0);
        if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError("'" + key + "' is not an integer: '" + v + "'");
        return static_cast<long long>(d);
    }
    if (used != v.size()) {
        const double d = get_double(key, 0.0);
        if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError("'" + key + "' is not an integer: '" + v + "'");
        return static_cast<long long>(d);
    }
    return n;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key, "");
    std::size_t used = 0;
    unsigned long long n = 0;
    try {
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        n = std::stoull(v, &used, 0);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw ConfigError("'" + key + "' is not an unsigned integer: '" + v + "'");
    return n;
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key, "");
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::size_t used = 0;
        double d = 0.0;
        try {
            d = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw ConfigError("'" + key + "' has a non-numeric entry '" + item + "'");
        out.push_back(d);
    }
    return out;
}

std::map<std::string, std::string> Config::section(const std::string& prefix) const {
    std::map<std::string, std::string> out;
    const std::string p = prefix + ".";
    for (const auto& [k, v] : entries_) {
        if (k.rfind(p, 0) == 0) {
            out[k.substr(p.size())] = v;
            used_.insert(k);
        }
    }
    return out;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

void Config::reject_unused() const {
    const auto unused = unused_keys();
    if (!unused.empty()) throw ConfigError("unknown or unsupported key '" + unused.front() + "' for this experiment");
}

std::vector<double> linspace(double start, double stop, long long steps) {
    if (steps < 1) throw ConfigError("empty sweep: steps must be >= 1");
    if (steps == 1) return {start};
    std::vector<double> v(static_cast<std::size_t>(steps));
    for (long long i = 0; i < steps; ++i)
        v[static_cast<std::size_t>(i)] = i == steps - 1 ? stop : start + (stop - start) * static_cast<double>(i) / (steps - 1);
    return v;
}

namespace {

std::vector<double> read_axis(const Config& cfg, const std::string& name, double start, double stop, long long steps,
                              const std::vector<double>& default_values = {}) {
    std::vector<double> v;
    const bool ranged = cfg.has(name + ".start") || cfg.has(name + ".stop") || cfg.has(name + ".steps");
    if (!default_values.empty() && !ranged) {
        v = cfg.get_list(name + ".values", default_values);
    } else if (cfg.has(name + ".values")) {
        if (cfg.has(name + ".start") || cfg.has(name + ".stop") || cfg.has(name + ".steps"))
            throw ConfigError("'" + name + "' has both a value list and a range");
        v = cfg.get_list(name + ".values", {});
    } else {
        v = linspace(cfg.get_double(name + ".start", start), cfg.get_double(name + ".stop", stop),
                     cfg.get_int(name + ".steps", steps));
    }
    if (v.empty()) throw ConfigError("empty sweep for '" + name + "'");
    if (is_integer_param(name)) {
        for (double x : v)
            if (x != std::round(x) || x < 0) throw ConfigError("'" + name + "' must take non-negative integer values");
    }
    return v;
}

Cell param_cell(const std::string& param, double v) {
    if (is_integer_param(param)) return static_cast<std::int64_t>(std::llround(v));
    return v;
}

// Row-parallel evaluation with rows stored by index, so order never depends on
// scheduling. The first failing row's exception is rethrown.
void for_each_row(std::size_t n, const std::function<void(std::size_t)>& f) {
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

const std::vector<std::string> kCrbColumns = {"h1_hom", "h1_het", "h2_hom", "h2_het", "gamma1", "gamma2"};

void append_crb(std::vector<Cell>& row, const CrbReport& c) {
    row.insert(row.end(), {c.h1_hom, c.h1_het, c.h2_hom, c.h2_het, c.gamma1, c.gamma2});
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::optional<FisherMethod> read_fisher_method(const Config& cfg) {
    const std::string m = cfg.get("fisher.method", "auto");
    if (m == "auto") return std::nullopt;
    if (m == "closed_form") return FisherMethod::closed_form;
    if (m == "quadrature") return FisherMethod::quadrature;
    throw ConfigError("fisher.method must be auto, closed_form or quadrature (got '" + m + "')");
}

CrbReport checked_crb(const StateModel& s, std::optional<FisherMethod> method) {
    if (method == FisherMethod::closed_form && !has_closed_form_hom_second(s))
        throw ConfigError("fisher.method=closed_form is unsupported for family " + family_name(s));
    return crb_report(s, method);
}

StateModel state_with(std::map<std::string, std::string> keys, const std::string& param, double v) {
    keys[param] = is_integer_param(param) ? std::to_string(std::llround(v)) : fmt17(v);
    return state_from_keys(keys);
}

// crb and gamma-sweep: one row per sweep point of any numeric state key.
void run_crb_table(const Config& cfg, ExperimentReport& r, bool sweep_required) {
    const auto keys = cfg.section("state");
    const Sweep sweep = read_sweep(cfg, "sweep");
    const auto method = read_fisher_method(cfg);
    if (sweep_required && sweep.param.empty()) throw ConfigError("gamma-sweep needs a [sweep] section");
    cfg.reject_unused();

    std::vector<double> values = sweep.param.empty() ? std::vector<double>{0.0} : sweep.values;
    std::vector<StateModel> states;
    for (double v : values) states.push_back(sweep.param.empty() ? state_from_keys(keys) : state_with(keys, sweep.param, v));

    r.columns = concat(sweep.param.empty() ? std::vector<std::string>{} : std::vector<std::string>{sweep.param},
                       concat({"state"}, concat(kCrbColumns, {"h2_hom_method"})));
    std::vector<std::vector<Cell>> rows(states.size());
    for_each_row(states.size(), [&](std::size_t i) {
        const CrbReport c = checked_crb(states[i], method);
        std::vector<Cell> row;
        if (!sweep.param.empty()) row.push_back(param_cell(sweep.param, values[i]));
        row.push_back(format_state(states[i]));
        append_crb(row, c);
        row.push_back(to_string(c.h2_hom_method));
        rows[i] = std::move(row);
    });
    for (auto& row : rows) r.add_row(std::move(row));
}

struct FamilyM {
    FreeFamily family;
    std::vector<double> ms;
};

FamilyM read_family_m(const Config& cfg, const std::string& experiment) {
    const std::string fam = cfg.require("state.family");
    FreeFamily f;
    try {
        f = parse_free_family(fam);
    } catch (const ConfigError&) {
        throw ConfigError(experiment + " does not support family '" + fam +
                          "' (use coherent, even_coherent, odd_coherent, displaced_fock or photon_added)");
    }
    const Sweep sweep = read_sweep(cfg, "sweep");
    std::vector<double> ms;
    if (!sweep.param.empty()) {
        if (sweep.param != "m") throw ConfigError(experiment + " can only sweep m");
        if (cfg.has("state.m")) throw ConfigError("state.m conflicts with a sweep over m");
        ms = sweep.values;
    } else {
        ms = {static_cast<double>(cfg.get_int("state.m", 0))};
    }
    const bool uses_m = f == FreeFamily::displaced_fock || f == FreeFamily::photon_added;
    for (double m : ms) {
        if (m < 0 || m > 10000) throw ConfigError("m must lie in [0, 10000]");
        if (!uses_m && m != 0) throw ConfigError("family '" + fam + "' has no m parameter");
    }
    return {f, ms};
}

void run_crossover(const Config& cfg, ExperimentReport& r) {
    const FamilyM fm = read_family_m(cfg, "crossover");
    const double lo = cfg.get_double("search.lo", 0.0);
    const double hi = cfg.get_double("search.hi", 20.0);
    const double tol = cfg.get_double("search.tol", 1e-10);
    if (!(lo >= 0.0 && hi > lo && tol > 0.0)) throw ConfigError("crossover search needs 0 <= lo < hi and tol > 0");
    cfg.reject_unused();

    r.columns = {"family", "m", "alpha0", "h2_hom", "h2_het", "always_below_unity"};
    std::vector<std::vector<Cell>> rows(fm.ms.size());
    for_each_row(fm.ms.size(), [&](std::size_t i) {
        const int m = static_cast<int>(fm.ms[i]);
        const Crossover c = find_crossover(fm.family, m, lo, hi, tol);
        const double nan = std::nan("");
        double h2_hom = nan, h2_het = nan, alpha0 = nan;
        if (!c.always_below_unity) {
            const StateModel s = make_free_state(fm.family, c.alpha0, m);
            alpha0 = c.alpha0;
            h2_hom = scrb_hom_second(s);
            h2_het = c.h2;
        }
        rows[i] = {to_string(fm.family), static_cast<std::int64_t>(m), alpha0, h2_hom, h2_het,
                   static_cast<std::int64_t>(c.always_below_unity)};
    });
    for (auto& row : rows) r.add_row(std::move(row));
}

void run_gamma2_min(const Config& cfg, ExperimentReport& r) {
    const FamilyM fm = read_family_m(cfg, "gamma2-min");
    std::optional<double> hi;
    if (cfg.has("search.hi")) hi = cfg.get_double("search.hi", 0.0);
    if (hi && !(*hi > 0.0)) throw ConfigError("search.hi must be positive");
    const double tol = cfg.get_double("search.tol", 1e-9);
    if (!(tol > 0.0)) throw ConfigError("search.tol must be positive");
    cfg.reject_unused();

    r.columns = {"family", "m", "alpha0_min", "gamma2_min", "h2_hom", "h2_het"};
    std::vector<std::vector<Cell>> rows(fm.ms.size());
    for_each_row(fm.ms.size(), [&](std::size_t i) {
        const int m = static_cast<int>(fm.ms[i]);
        const Gamma2Minimum g = minimize_gamma2(fm.family, m, hi, tol);
        const StateModel s = make_free_state(fm.family, g.alpha0, m);
        rows[i] = {to_string(fm.family), static_cast<std::int64_t>(m), g.alpha0, g.gamma2, scrb_hom_second(s),
                   scrb_het_second(s)};
    });
    for (auto& row : rows) r.add_row(std::move(row));
}

std::vector<Scheme> read_schemes(const Config& cfg) {
    const std::string s = cfg.get("mc.scheme", "both");
    if (s == "both") return {Scheme::hom, Scheme::het};
    return {parse_scheme(s)};
}

std::vector<MomentOrder> read_orders(const Config& cfg) {
    const std::string s = cfg.get("mc.order", "both");
    if (s == "both") return {MomentOrder::first, MomentOrder::second};
    if (s == "first") return {MomentOrder::first};
    if (s == "second") return {MomentOrder::second};
    throw ConfigError("mc.order must be first, second or both (got '" + s + "')");
}

void run_mc_verify(const Config& cfg, ExperimentReport& r) {
    const StateModel s = state_from_keys(cfg.section("state"));
    const auto schemes = read_schemes(cfg);
    const auto orders = read_orders(cfg);
    McConfig base;
    const long long n = cfg.get_int("mc.n", 100000);
    const long long trials = cfg.get_int("mc.trials", 100);
    const long long n_theta = cfg.get_int("mc.n_theta", 24);
    base.seed = cfg.get_u64("seed", 1);
    if (n < 1 || trials < 2 || trials > 10000000) throw ConfigError("mc.n must be positive and mc.trials >= 2");
    if (n_theta < 3 || n_theta > 100000) throw ConfigError("mc.n_theta must be >= 3");
    base.n = static_cast<std::size_t>(n);
    base.trials = static_cast<int>(trials);
    base.n_theta = static_cast<int>(n_theta);
    if (base.n < static_cast<std::size_t>(base.n_theta) && std::count(schemes.begin(), schemes.end(), Scheme::hom))
        throw ConfigError("mc.n must be at least mc.n_theta for homodyne sampling");
    cfg.reject_unused();

    r.add_meta("seed", std::to_string(base.seed));
    r.columns = {"state",     "scheme",     "estimator", "order", "n",     "n_theta", "trials", "completed_trials",
                 "failed_trials", "scaled_mse", "std_error", "scrb", "ratio"};
    const std::string state_text = format_state(s);
    for (Scheme scheme : schemes) {
        McConfig c = base;
        c.scheme = scheme;
        const McReport rep = run_monte_carlo(s, c);
        for (MomentOrder order : orders) {
            for (const auto& e : rep.entries) {
                if (e.order != order) continue;
                r.add_row({state_text, to_string(scheme), e.estimator,
                           std::string(order == MomentOrder::first ? "first" : "second"),
                           static_cast<std::int64_t>(c.n),
                           static_cast<std::int64_t>(scheme == Scheme::hom ? c.n_theta : 0),
                           static_cast<std::int64_t>(c.trials), static_cast<std::int64_t>(rep.completed_trials),
                           static_cast<std::int64_t>(rep.failed_trials), e.scaled_mse, e.std_error, e.scrb, e.ratio()});
            }
        }
    }
}

StateModel displaced_gaussian(double x0, double p0, double mu, double lambda, double phi) {
    std::map<std::string, std::string> keys{{"family", "gaussian"}, {"x0", fmt17(x0)},     {"p0", fmt17(p0)},
                                            {"mu", fmt17(mu)},      {"lambda", fmt17(lambda)}, {"phi", fmt17(phi)}};
    return state_from_keys(keys);
}

// gamma2 surfaces over (mu, lambda) for displacements alpha0 along x.
void run_fig2(const Config& cfg, ExperimentReport& r) {
    const auto alphas = read_axis(cfg, "alpha", 0.0, 1.0, 5, {0.0, 0.2, std::sqrt(5.0 / 32.0), 0.6, 1.0});
    const auto mus = read_axis(cfg, "mu", 1.0, 10.0, 19);
    const auto lambdas = read_axis(cfg, "lambda", 1.0, 10.0, 19);
    const double phi = cfg.get_double("phi", 0.0);
    cfg.reject_unused();

    struct Point {
        double alpha, mu, lambda;
    };
    std::vector<Point> grid;
    for (double a : alphas)
        for (double mu : mus)
            for (double l : lambdas) grid.push_back({a, mu, l});
    std::vector<StateModel> states;
    for (const Point& p : grid) states.push_back(displaced_gaussian(std::sqrt(2.0) * p.alpha, 0.0, p.mu, p.lambda, phi));

    r.columns = concat({"alpha0", "mu", "lambda"}, kCrbColumns);
    std::vector<std::vector<Cell>> rows(grid.size());
    for_each_row(grid.size(), [&](std::size_t i) {
        std::vector<Cell> row{grid[i].alpha, grid[i].mu, grid[i].lambda};
        append_crb(row, crb_report(states[i]));
        rows[i] = std::move(row);
    });
    for (auto& row : rows) r.add_row(std::move(row));
}

// gamma2 over the displacement plane for mu = lambda.
void run_fig3(const Config& cfg, ExperimentReport& r) {
    const auto mus = read_axis(cfg, "mu", 1.0, 10.0, 4, {1.0, 2.0, 5.0, 10.0});
    const auto xs = read_axis(cfg, "x0", -3.0, 3.0, 25);
    const auto ps = read_axis(cfg, "p0", -3.0, 3.0, 25);
    const double phi = cfg.get_double("phi", 0.0);
    cfg.reject_unused();

    struct Point {
        double mu, x0, p0;
    };
    std::vector<Point> grid;
    for (double mu : mus)
        for (double x : xs)
            for (double p : ps) grid.push_back({mu, x, p});
    std::vector<StateModel> states;
    for (const Point& p : grid) states.push_back(displaced_gaussian(p.x0, p.p0, p.mu, p.mu, phi));

    r.columns = concat({"mu", "x0", "p0"}, kCrbColumns);
    std::vector<std::vector<Cell>> rows(grid.size());
    for_each_row(grid.size(), [&](std::size_t i) {
        std::vector<Cell> row{grid[i].mu, grid[i].x0, grid[i].p0};
        append_crb(row, crb_report(states[i]));
        rows[i] = std::move(row);
    });
    for (auto& row : rows) r.add_row(std::move(row));
}

void run_fig4(const Config& cfg, ExperimentReport& r) {
    const auto ns = read_axis(cfg, "n", 0.0, 30.0, 31);
    cfg.reject_unused();
    r.columns = concat({"n"}, kCrbColumns);
    std::vector<std::vector<Cell>> rows(ns.size());
    for_each_row(ns.size(), [&](std::size_t i) {
        const int n = static_cast<int>(ns[i]);
        std::vector<Cell> row{static_cast<std::int64_t>(n)};
        append_crb(row, crb_report(FockState{n}));
        rows[i] = std::move(row);
    });
    for (auto& row : rows) r.add_row(std::move(row));
}

void run_fig5(const Config& cfg, ExperimentReport& r) {
    const auto alphas = read_axis(cfg, "alpha", 0.0, 3.0, 61);
    cfg.reject_unused();
    for (double a : alphas)
        if (a < 0) throw ConfigError("alpha must be non-negative");
    r.columns = concat({"family", "alpha0"}, kCrbColumns);
    const std::vector<Parity> parities{Parity::even, Parity::odd};
    const std::size_t total = parities.size() * alphas.size();
    std::vector<std::vector<Cell>> rows(total);
    for_each_row(total, [&](std::size_t i) {
        const CatState s{alphas[i % alphas.size()], parities[i / alphas.size()]};
        std::vector<Cell> row{family_name(s), alphas[i % alphas.size()]};
        append_crb(row, crb_report(s));
        rows[i] = std::move(row);
    });
    for (auto& row : rows) r.add_row(std::move(row));
}

std::vector<FreeFamily> read_fig6_families(const Config& cfg) {
    const std::string text = cfg.get("families", "displaced_fock,photon_added");
    std::vector<FreeFamily> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const FreeFamily f = parse_free_family(trim(item));
        if (f != FreeFamily::displaced_fock && f != FreeFamily::photon_added)
            throw ConfigError("fig6 supports displaced_fock and photon_added only");
        out.push_back(f);
    }
    if (out.empty()) throw ConfigError("fig6 needs at least one family");
    return out;
}

// Minimum of gamma2 over alpha0 against m, with the large-m fits.
void run_fig6(const Config& cfg, ExperimentReport& r) {
    const auto families = read_fig6_families(cfg);
    const auto ms = read_axis(cfg, "m", 0.0, 40.0, 41);
    cfg.reject_unused();
    r.columns = {"family", "m", "alpha0_min", "gamma2_min", "alpha0_model", "gamma2_model"};
    const std::size_t total = families.size() * ms.size();
    std::vector<std::vector<Cell>> rows(total);
    for_each_row(total, [&](std::size_t i) {
        const FreeFamily f = families[i / ms.size()];
        const int m = static_cast<int>(ms[i % ms.size()]);
        const Gamma2Minimum g = minimize_gamma2(f, m);
        double a_model = std::nan(""), g_model = std::nan("");
        if (m > 0) {
            const double md = m;
            if (f == FreeFamily::displaced_fock) {
                a_model = 0.3993 * std::sqrt(md) + 2.8174 / std::sqrt(md);
                g_model = 0.3693 + 0.6565 / md;
            } else {
                a_model = 1.5 / md;
                g_model = 0.4 + 1.2 / md;
            }
        }
        rows[i] = {to_string(f), static_cast<std::int64_t>(m), g.alpha0, g.gamma2, a_model, g_model};
    });
    for (auto& row : rows) r.add_row(std::move(row));
}

using Runner = void (*)(const Config&, ExperimentReport&);

const std::vector<std::pair<std::string, Runner>>& registry() {
    static const std::vector<std::pair<std::string, Runner>> table = {
        {"crb", [](const Config& c, ExperimentReport& r) { run_crb_table(c, r, false); }},
        {"gamma-sweep", [](const Config& c, ExperimentReport& r) { run_crb_table(c, r, true); }},
        {"crossover", run_crossover},
        {"gamma2-min", run_gamma2_min},
        {"mc-verify", run_mc_verify},
        {"fig2", run_fig2},
        {"fig3", run_fig3},
        {"fig4", run_fig4},
        {"fig5", run_fig5},
        {"fig6", run_fig6},
    };
    return table;
}

} // namespace

Sweep read_sweep(const Config& cfg, const std::string& prefix) {
    Sweep s;
    if (!cfg.has(prefix + ".param")) return s;
    s.param = cfg.get(prefix + ".param", "");
    if (s.param.empty() || s.param == "family") throw ConfigError("cannot sweep '" + s.param + "'");
    if (!cfg.has(prefix + ".values") && !(cfg.has(prefix + ".start") && cfg.has(prefix + ".stop")))
        throw ConfigError("sweep over '" + s.param + "' needs start and stop, or values");
    std::vector<double> v;
    if (cfg.has(prefix + ".values")) {
        if (cfg.has(prefix + ".start") || cfg.has(prefix + ".stop") || cfg.has(prefix + ".steps"))
            throw ConfigError("sweep has both a value list and a range");
        v = cfg.get_list(prefix + ".values", {});
    } else {
        v = linspace(cfg.get_double(prefix + ".start", 0.0), cfg.get_double(prefix + ".stop", 0.0),
                     cfg.get_int(prefix + ".steps", 11));
    }
    if (v.empty()) throw ConfigError("empty sweep over '" + s.param + "'");
    if (is_integer_param(s.param)) {
        for (double x : v)
            if (x != std::round(x) || x < 0) throw ConfigError("'" + s.param + "' must take non-negative integer values");
    }
    s.values = std::move(v);
    return s;
}

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, fn] : registry()) n.push_back(name);
        return n;
    }();
    return names;
}

ExperimentReport run_experiment(const std::string& experiment, const Config& cfg) {
    const auto& table = registry();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == experiment; });
    if (it == table.end()) throw ConfigError("unknown experiment '" + experiment + "'");
    if (cfg.has("experiment") && cfg.get("experiment", "") != experiment)
        throw ConfigError("config is for experiment '" + cfg.get("experiment", "") + "', not '" + experiment + "'");
    // Front-end keys; the seed only matters to sampling experiments.
    for (const char* k : {"out", "format", "seed"}) cfg.mark_used(k);

    ExperimentReport r;
    r.experiment = experiment;
    r.add_meta("schema_version", std::to_string(kSchemaVersion));
    r.add_meta("tool", std::string("mtlab ") + kToolVersion);
    r.add_meta("experiment", experiment);
    it->second(cfg, r);
    for (const auto& [k, v] : cfg.entries()) {
        if (k == "out" || k == "format") continue;
        r.add_meta("config." + k, v);
    }
    return r;
}

} // namespace mtlab
