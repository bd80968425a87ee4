#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

namespace mtlab {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Mean over equally spaced nodes theta_j = j pi / n of a pi-periodic matrix
// valued integrand, i.e. (1/pi) * integral over [0, pi) by the trapezoid rule.
Eigen::MatrixXd periodic_mean(const std::function<Eigen::MatrixXd(double)>& f, int n);

struct PeriodicMeanResult {
    Eigen::MatrixXd value;
    int nodes = 0;
    double error_estimate = 0.0;
};

// Doubles the node count from n_start until two successive trapezoid sums
// agree to abs_tol (relative to max(1, |value|)); the coarse sum reuses no
// nodes so the check is a genuine Richardson-style comparison.
PeriodicMeanResult adaptive_periodic_mean(const std::function<Eigen::MatrixXd(double)>& f, double abs_tol,
                                          int n_start = 256, int n_max = 1 << 16);

// Composite Simpson over [lo, hi] with `nodes` points (odd).
double simpson(const std::function<double(double)>& f, double lo, double hi, int nodes);

// Bisection for a sign change of f on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol);

struct Minimum {
    double x = 0.0;
    double value = 0.0;
};

// Golden-section search on [lo, hi]; assumes a unimodal bracket.
Minimum golden_section(const std::function<double(double)>& f, double lo, double hi, double x_tol);

// Grid scan followed by golden-section refinement around the best node.
Minimum global_minimize_1d(const std::function<double(double)>& f, double lo, double hi, int grid,
                           double x_tol);

} // namespace mtlab
