#include "mtlab/monte_carlo.hpp"

#include "mtlab/error.hpp"
#include "mtlab/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace mtlab {

std::string to_string(Scheme s) { return s == Scheme::hom ? "hom" : "het"; }

Scheme parse_scheme(const std::string& s) {
    if (s == "hom") return Scheme::hom;
    if (s == "het") return Scheme::het;
    throw ConfigError("scheme must be 'hom' or 'het', got '" + s + "'");
}

const McEstimatorStats& McReport::find(const std::string& estimator, MomentOrder order) const {
    for (const auto& e : entries)
        if (e.estimator == estimator && e.order == order) return e;
    throw std::out_of_range("no Monte-Carlo entry for " + estimator);
}

TrialKernel::TrialKernel(const StateModel& s, const McConfig& cfg)
    : cfg_(cfg), r_(first_moments(s)), g2_(second_moment_matrix(s)) {
    if (cfg.trials < 2) throw std::invalid_argument("Monte-Carlo needs at least 2 trials");
    if (cfg.scheme == Scheme::hom) {
        if (cfg.n_theta < 3) throw std::invalid_argument("n_theta must be >= 3");
        if (cfg.n < static_cast<std::size_t>(cfg.n_theta)) throw std::invalid_argument("N must be >= n_theta");
        hom_.emplace(s, cfg.n_theta);
        counts_ = phase_allocation(cfg.n, cfg.n_theta);
    } else {
        if (cfg.n == 0) throw std::invalid_argument("N must be >= 1");
        het_.emplace(s);
    }
}

TrialErrors TrialKernel::run(int trial, std::vector<double>& buffer) const {
    const std::uint64_t key = derive_stream(cfg_.seed, static_cast<std::uint64_t>(trial));
    const double n = static_cast<double>(cfg_.n);
    TrialErrors out;
    try {
        if (hom_) {
            ProcessedMoments p;
            p.phases = hom_->phases();
            p.counts = counts_;
            p.m.resize(p.phases.size());
            for (std::size_t k = 0; k < p.phases.size(); ++k) {
                CounterRng rng(derive_stream(key, k));
                buffer.resize(counts_[k]);
                hom_->phase(static_cast<int>(k)).fill(rng, buffer);
                p.m[k] = phase_moments(buffer);
            }
            out.first = n * squared_error(optimal_first_estimator(p).r_hat, r_);
            out.first_linear = n * squared_error(linear_first_estimator(p).r_hat, r_);
            out.second = n * squared_error(optimal_second_estimator(p).g2_hat, g2_);
        } else {
            CounterRng rng(derive_stream(key, 0));
            HeterodyneSums sums;
            for (std::size_t i = 0; i < cfg_.n; ++i) {
                const auto [x, p] = het_->draw(rng);
                sums.add(x, p);
            }
            out.first = n * squared_error(het_first_estimator(sums).r_hat, r_);
            out.second = n * squared_error(het_second_estimator(sums).g2_hat, g2_);
        }
    } catch (const NumericalError&) {
        out.ok = false;
    }
    return out;
}

namespace {

McEstimatorStats summarize(const std::vector<TrialErrors>& t, double TrialErrors::*field, std::string name,
                           MomentOrder order, double scrb) {
    CompensatedSum sum, sum_sq;
    std::size_t n = 0;
    for (const auto& e : t) {
        if (!e.ok) continue;
        sum.add(e.*field);
        ++n;
    }
    const double mean = sum.value() / n;
    for (const auto& e : t)
        if (e.ok) sum_sq.add((e.*field - mean) * (e.*field - mean));
    const double sd = std::sqrt(sum_sq.value() / (n - 1));
    return {std::move(name), order, mean, sd / std::sqrt(static_cast<double>(n)), scrb};
}

McReport assemble(const StateModel& s, const McConfig& cfg, const std::vector<TrialErrors>& t) {
    McReport r;
    r.state = format_state(s);
    r.config = cfg;
    for (const auto& e : t) (e.ok ? r.completed_trials : r.failed_trials)++;
    if (r.failed_trials * 100 > cfg.trials || r.completed_trials < 2) {
        throw NumericalError("Monte-Carlo: " + std::to_string(r.failed_trials) + " of " + std::to_string(cfg.trials) +
                             " trials failed (limit 1%)");
    }
    if (cfg.scheme == Scheme::hom) {
        r.entries.push_back(
            summarize(t, &TrialErrors::first, "hom_optimal", MomentOrder::first, scrb_hom_first(s)));
        r.entries.push_back(
            summarize(t, &TrialErrors::first_linear, "hom_linear", MomentOrder::first, scrb_hom_first(s)));
        r.entries.push_back(
            summarize(t, &TrialErrors::second, "hom_optimal", MomentOrder::second, scrb_hom_second(s)));
    } else {
        r.entries.push_back(summarize(t, &TrialErrors::first, "het", MomentOrder::first, scrb_het_first(s)));
        r.entries.push_back(summarize(t, &TrialErrors::second, "het", MomentOrder::second, scrb_het_second(s)));
    }
    return r;
}

} // namespace

McReport run_monte_carlo(const StateModel& s, const McConfig& cfg) {
    const TrialKernel kernel(s, cfg);
    std::vector<TrialErrors> results(cfg.trials);
#pragma omp parallel
    {
        std::vector<double> buffer;
#pragma omp for schedule(dynamic)
        for (int t = 0; t < cfg.trials; ++t) results[t] = kernel.run(t, buffer);
    }
    return assemble(s, cfg, results);
}

McReport run_monte_carlo_serial(const StateModel& s, const McConfig& cfg) {
    const TrialKernel kernel(s, cfg);
    std::vector<TrialErrors> results(cfg.trials);
    std::vector<double> buffer;
    for (int t = 0; t < cfg.trials; ++t) results[t] = kernel.run(t, buffer);
    return assemble(s, cfg, results);
}

std::pair<double, double> monte_carlo_mse(const StateModel& s, Scheme scheme, MomentOrder order, std::size_t n,
                                          int trials, int n_theta, std::uint64_t seed) {
    const McReport r = run_monte_carlo(s, {scheme, n, trials, n_theta, seed});
    const auto& e = r.find(scheme == Scheme::hom ? "hom_optimal" : "het", order);
    return {e.scaled_mse, e.std_error};
}

} // namespace mtlab
