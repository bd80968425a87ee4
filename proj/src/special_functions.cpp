#include "mtlab/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mtlab {

namespace {

bool is_nonneg_integer(double v) {
    return v >= 0.0 && std::floor(v) == v;
}

// Ascending series with term-ratio termination; only used where all terms
// share a sign (a > 0, b > 0, z >= 0) or the series terminates.
double series(double a, double b, double z) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < 100000; ++k) {
        const double ratio = (a + k) * z / ((b + k) * (k + 1));
        term *= ratio;
        sum += term;
        if (term == 0.0) return sum;
        if (std::abs(term) <= 1e-17 * std::abs(sum) && (a + k) * z < (b + k) * (k + 1)) return sum;
    }
    throw std::runtime_error("hyp1f1: series did not converge");
}

// exp(-z) 1F1(b - n; b; ...) Kummer polynomial: sum_k n!/(n-k)! z^k / ((b)_k k!).
double kummer_polynomial(int n, double b, double z) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < n; ++k) {
        term *= static_cast<double>(n - k) * z / ((b + k) * (k + 1));
        sum += term;
    }
    return sum;
}

// exp(-z) * series for large z, accumulated in log space.
double scaled_series_large(double a, double b, double z) {
    // Terms t_k = (a)_k z^k / ((b)_k k!); find log of the largest to rescale.
    double log_term = 0.0;
    double log_max = 0.0;
    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>(4.0 * z + 200.0));
    logs.push_back(0.0);
    for (int k = 0; k < 10000000; ++k) {
        log_term += std::log((a + k) * z / ((b + k) * (k + 1)));
        logs.push_back(log_term);
        log_max = std::max(log_max, log_term);
        if ((a + k) * z < (b + k) * (k + 1) && log_term < log_max - 40.0) break;
    }
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - log_max);
    return std::exp(log_max - z) * sum;
}

} // namespace

double hyp1f1(double a, double b, double z) {
    if (!(b > 0.0)) throw std::invalid_argument("hyp1f1: b must be positive");
    if (z == 0.0) return 1.0;
    if (z < 0.0) {
        // 1F1(a; b; z) = e^z 1F1(b - a; b; -z)
        return std::exp(z) * hyp1f1(b - a, b, -z);
    }
    if (a <= 0.0 && std::floor(a) == a) {
        // Terminating polynomial.
        double term = 1.0;
        double sum = 1.0;
        for (int k = 0; k < static_cast<int>(-a); ++k) {
            term *= (a + k) * z / ((b + k) * (k + 1));
            sum += term;
        }
        return sum;
    }
    if (z > 30.0) return std::exp(z) * hyp1f1_scaled(a, b, z);
    return series(a, b, z);
}

double hyp1f1_scaled(double a, double b, double z) {
    if (!(b > 0.0)) throw std::invalid_argument("hyp1f1: b must be positive");
    if (z < 0.0) return std::exp(-z) * hyp1f1(a, b, z);
    if (is_nonneg_integer(a - b)) {
        return kummer_polynomial(static_cast<int>(a - b), b, z);
    }
    if (z <= 30.0) return std::exp(-z) * series(a, b, z);
    return scaled_series_large(a, b, z);
}

double laguerre(int n, double x) {
    if (n < 0) throw std::invalid_argument("laguerre: negative order");
    if (n == 0) return 1.0;
    double prev = 1.0;
    double cur = 1.0 - x;
    for (int k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

void hermite_functions(double x, std::span<double> out) {
    if (out.empty()) return;
    static const double norm0 = std::pow(std::numbers::pi, -0.25);
    out[0] = norm0 * std::exp(-0.5 * x * x);
    if (out.size() == 1) return;
    out[1] = std::numbers::sqrt2 * x * out[0];
    for (std::size_t n = 1; n + 1 < out.size(); ++n) {
        const double nd = static_cast<double>(n);
        out[n + 1] = std::sqrt(2.0 / (nd + 1.0)) * x * out[n] - std::sqrt(nd / (nd + 1.0)) * out[n - 1];
    }
}

std::vector<double> hermite_functions(int n_max, double x) {
    std::vector<double> out(static_cast<std::size_t>(n_max + 1));
    hermite_functions(x, out);
    return out;
}

double log_factorial(int n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

} // namespace mtlab
