#include "mtlab/numerics.hpp"
#include "mtlab/special_functions.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mtlab;
using doctest::Approx;

namespace {

// Direct partial sums, an independent route for moderate arguments.
double series_1f1(double a, double b, double z) {
    double term = 1.0, sum = 1.0;
    for (int k = 0; k < 500; ++k) {
        term *= (a + k) / (b + k) * z / (k + 1);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

} // namespace

TEST_CASE("1F1 special values") {
    for (double x : {0.0, 0.5, 1.0, 3.0, 10.0}) {
        CHECK(hyp1f1(1, 1, x) == Approx(std::exp(x)).epsilon(1e-14));
        CHECK(hyp1f1(2, 2, x) == Approx(std::exp(x)).epsilon(1e-14));
        // 1F1(2; 1; x) = (1 + x) e^x
        CHECK(hyp1f1(2, 1, x) == Approx((1 + x) * std::exp(x)).epsilon(1e-13));
        CHECK(hyp1f1_scaled(3, 1, x) == Approx(std::exp(-x) * series_1f1(3, 1, x)).epsilon(1e-12));
    }
    CHECK(hyp1f1(0.5, 1.5, 0.0) == 1.0);
}

TEST_CASE("1F1 agrees with the direct series and Kummer's transformation") {
    for (double a : {0.5, 1.0, 4.0, 7.5})
        for (double b : {1.0, 2.0, 3.5})
            for (double z : {0.1, 2.0, 6.0}) {
                CHECK(hyp1f1(a, b, z) == Approx(series_1f1(a, b, z)).epsilon(1e-12));
                CHECK(hyp1f1(a, b, -z) == Approx(std::exp(-z) * series_1f1(b - a, b, z)).epsilon(1e-10));
            }
}

TEST_CASE("scaled 1F1 stays finite for large arguments") {
    const double v = hyp1f1_scaled(41, 1, 2500.0);
    CHECK(std::isfinite(v));
    CHECK(v > 0);
    // 1F1(a; b; z) ~ Gamma(b)/Gamma(a) e^z z^(a-b), so this ratio tends to 1/11.
    const double r = hyp1f1_scaled(12, 2, 4e4) / hyp1f1_scaled(11, 1, 4e4);
    CHECK(r * 11.0 == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("Laguerre polynomials") {
    CHECK(laguerre(0, 1.3) == 1.0);
    CHECK(laguerre(1, 1.3) == Approx(1 - 1.3));
    CHECK(laguerre(2, 1.3) == Approx(0.5 * (1.3 * 1.3 - 4 * 1.3 + 2)));
    CHECK(laguerre(3, 2.0) == Approx((-8.0 + 9 * 4 - 18 * 2 + 6) / 6.0));
    // L_n(0) = 1 and the Kummer relation L_n(x) = 1F1(-n; 1; x).
    for (int n = 0; n < 12; ++n) {
        CHECK(laguerre(n, 0.0) == Approx(1.0));
        CHECK(laguerre(n, 0.7) == Approx(series_1f1(-n, 1, 0.7)).epsilon(1e-12));
    }
}

TEST_CASE("Hermite functions are orthonormal") {
    const int n_max = 12;
    for (int j = 0; j <= n_max; j += 3)
        for (int k = j; k <= n_max; k += 2) {
            const double overlap = simpson(
                [&](double x) {
                    const auto h = hermite_functions(n_max, x);
                    return h[j] * h[k];
                },
                -12.0, 12.0, 4001);
            CHECK(overlap == Approx(j == k ? 1.0 : 0.0).epsilon(1e-10));
        }
    const auto h = hermite_functions(2, 0.0);
    CHECK(h[0] == Approx(std::pow(std::numbers::pi, -0.25)));
    CHECK(h[1] == Approx(0.0));
}

TEST_CASE("log factorial") {
    CHECK(log_factorial(0) == 0.0);
    CHECK(log_factorial(1) == 0.0);
    CHECK(log_factorial(5) == Approx(std::log(120.0)));
    CHECK(log_factorial(170) == Approx(std::lgamma(171.0)).epsilon(1e-14));
}

TEST_CASE("numerical helpers") {
    CHECK(simpson([](double x) { return x * x; }, 0.0, 3.0, 11) == Approx(9.0));
    CHECK(bisect([](double x) { return x * x - 2; }, 0.0, 2.0, 1e-13) == Approx(std::sqrt(2.0)));
    const auto m = global_minimize_1d([](double x) { return std::cos(3 * x) + 0.1 * x; }, 0.0, 4.0, 200, 1e-10);
    CHECK(m.x == Approx((std::numbers::pi - std::asin(1.0 / 30)) / 3).epsilon(1e-7));
    CompensatedSum s;
    s.add(1.0);
    for (int i = 0; i < 1000; ++i) s.add(1e-16);
    CHECK(s.value() - 1.0 == Approx(1e-13).epsilon(1e-6));
}
