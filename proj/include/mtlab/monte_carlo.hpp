#pragma once

#include "mtlab/estimators.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mtlab {

enum class Scheme { hom, het };
std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct McConfig {
    Scheme scheme = Scheme::hom;
    std::size_t n = 1000000;
    int trials = 100;
    int n_theta = 24;
    std::uint64_t seed = 1;
};

struct McEstimatorStats {
    std::string estimator; // hom_optimal, hom_linear or het
    MomentOrder order = MomentOrder::first;
    double scaled_mse = 0.0; // mean over trials of N * squared error
    double std_error = 0.0;
    double scrb = 0.0;
    double ratio() const { return scaled_mse / scrb; }
};

struct McReport {
    std::string state;
    McConfig config;
    int completed_trials = 0;
    int failed_trials = 0;
    std::vector<McEstimatorStats> entries;

    const McEstimatorStats& find(const std::string& estimator, MomentOrder order) const;
};

// Squared errors of one trial; `ok` is false when an estimator failed.
struct TrialErrors {
    double first = 0.0;
    double first_linear = 0.0;
    double second = 0.0;
    bool ok = true;
};

// Samplers and ground truth for one (state, config), shared read-only by all
// trials. Trial t draws from substream derive_stream(seed, t).
class TrialKernel {
public:
    TrialKernel(const StateModel& s, const McConfig& cfg);

    TrialErrors run(int trial, std::vector<double>& buffer) const;
    const McConfig& config() const { return cfg_; }

private:
    McConfig cfg_;
    FirstMoments r_;
    CovarianceMatrix g2_;
    std::optional<HomodyneSampler> hom_;
    std::optional<HusimiSampler> het_;
    std::vector<std::size_t> counts_;
};

// OpenMP over trials. Results are identical to the serial reference for any
// thread count: per-trial errors are stored by index and reduced in order.
McReport run_monte_carlo(const StateModel& s, const McConfig& cfg);
McReport run_monte_carlo_serial(const StateModel& s, const McConfig& cfg);

// (scaled MSE, standard error) of the optimal estimator for one scheme/order.
std::pair<double, double> monte_carlo_mse(const StateModel& s, Scheme scheme, MomentOrder order, std::size_t n,
                                          int trials, int n_theta, std::uint64_t seed);

} // namespace mtlab
