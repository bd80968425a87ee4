#include "mtlab/numerics.hpp"

#include "mtlab/error.hpp"

#include <string>

namespace mtlab {

Eigen::MatrixXd periodic_mean(const std::function<Eigen::MatrixXd(double)>& f, int n) {
    Eigen::MatrixXd acc = f(0.0);
    for (int j = 1; j < n; ++j) acc += f(std::numbers::pi * j / n);
    return acc / static_cast<double>(n);
}

PeriodicMeanResult adaptive_periodic_mean(const std::function<Eigen::MatrixXd(double)>& f, double abs_tol,
                                          int n_start, int n_max) {
    int n = n_start;
    // Coarse sum on the even nodes; refinement adds the odd nodes.
    Eigen::MatrixXd coarse = periodic_mean(f, n / 2);
    while (true) {
        Eigen::MatrixXd odd = f(std::numbers::pi / n);
        for (int j = 3; j < n; j += 2) odd += f(std::numbers::pi * j / n);
        Eigen::MatrixXd fine = 0.5 * coarse + odd / static_cast<double>(n);
        const double err = (fine - coarse).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
        if (err <= abs_tol * scale) return {fine, n, err};
        if (n >= n_max) {
            throw NumericalError("periodic quadrature did not converge (error " + std::to_string(err) + " at " +
                                 std::to_string(n) + " nodes)");
        }
        coarse = fine;
        n *= 2;
    }
}

double simpson(const std::function<double(double)>& f, double lo, double hi, int nodes) {
    if (nodes < 3 || nodes % 2 == 0) throw std::invalid_argument("simpson: node count must be odd and >= 3");
    const int intervals = nodes - 1;
    const double h = (hi - lo) / intervals;
    double sum = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
    return sum * h / 3.0;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double x_tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw NumericalError("bisect: no sign change in bracket");
    while (hi - lo > x_tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Minimum golden_section(const std::function<double(double)>& f, double lo, double hi, double x_tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > x_tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

Minimum global_minimize_1d(const std::function<double(double)>& f, double lo, double hi, int grid,
                           double x_tol) {
    const double step = (hi - lo) / grid;
    int best = 0;
    double best_val = f(lo);
    for (int i = 1; i <= grid; ++i) {
        const double v = f(lo + i * step);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = std::max(lo, lo + (best - 1) * step);
    const double b = std::min(hi, lo + (best + 1) * step);
    Minimum m = golden_section(f, a, b, x_tol);
    if (best_val < m.value) return {lo + best * step, best_val};
    return m;
}

} // namespace mtlab
