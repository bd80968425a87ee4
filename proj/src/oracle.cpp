#include "mtlab/oracle.hpp"

#include "mtlab/error.hpp"
#include "mtlab/numerics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mtlab::oracle {

namespace {

using cd = std::complex<double>;

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// sum_s s! C(m,s)^2 w^(m-s) = m! L_m(-w)
cd laguerre_sum(int m, cd w) {
    cd sum = 0.0;
    for (int s = 0; s <= m; ++s) sum += factorial(s) * binom(m, s) * binom(m, s) * std::pow(w, m - s);
    return sum;
}

// Rms scale of the quadratures, used for the integration range and FD steps.
double rms_scale(const StateModel& s) {
    const CovarianceMatrix g2 = second_moment_matrix(s);
    return std::sqrt(std::max(g2.xx, g2.pp));
}

double simpson_1d(const std::function<double(double)>& f, double lo, double hi, int nodes) {
    return simpson(f, lo, hi, nodes);
}

double simpson_2d(const std::function<double(double, double)>& f, double xlo, double xhi, double plo, double phi,
                  int nodes) {
    const double hx = (xhi - xlo) / (nodes - 1);
    const double hp = (phi - plo) / (nodes - 1);
    auto w = [nodes](int i) { return (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
    CompensatedSum sum;
    for (int i = 0; i < nodes; ++i) {
        const double x = xlo + i * hx;
        double row = 0.0;
        for (int j = 0; j < nodes; ++j) row += w(j) * f(x, plo + j * hp);
        sum.add(w(i) * row);
    }
    return sum.value() * hx * hp / 9.0;
}

// Central-difference weights for the order-m derivative on nodes
// (m/2 - i) h, i = 0..m; second-order accurate.
std::vector<std::pair<double, double>> stencil(int m) {
    std::vector<std::pair<double, double>> out;
    for (int i = 0; i <= m; ++i) out.push_back({0.5 * m - i, ((i % 2) ? -1.0 : 1.0) * binom(m, i)});
    return out;
}

// Richardson extrapolation of D(h), D(h/2), ... with even-power error terms.
OracleValue richardson(const std::function<double(double)>& d, double h, int levels) {
    std::vector<std::vector<double>> t(levels);
    for (int i = 0; i < levels; ++i) {
        t[i].push_back(d(h / std::pow(2.0, i)));
        for (int j = 1; j <= i; ++j) {
            const double f = std::pow(4.0, j);
            t[i].push_back((f * t[i][j - 1] - t[i - 1][j - 1]) / (f - 1.0));
        }
    }
    const double best = t[levels - 1][levels - 1];
    const double prev = levels > 1 ? t[levels - 1][levels - 2] : t[0][0];
    return {best, std::abs(best - prev)};
}

} // namespace

void OracleConfig::validate() const {
    if (nodes_1d < 3 || nodes_1d % 2 == 0) throw std::invalid_argument("oracle: nodes_1d must be odd and >= 3");
    if (!(grid_extent > 5.0)) throw std::invalid_argument("oracle: grid_extent must exceed 5");
    if (!(fd_step > 0.0) || richardson_levels < 1) throw std::invalid_argument("oracle: bad finite-difference setup");
}

OracleValue numeric_quadrature_moment(const StateModel& s, double theta, int m, const OracleConfig& cfg) {
    cfg.validate();
    if (m < 0 || m > 6) throw std::invalid_argument("oracle: moment order must be in [0, 6]");
    std::optional<PhaseDensity> density;
    if (std::holds_alternative<GaussianState>(s)) {
        density.emplace(s, theta);
    } else {
        density.emplace(fock_expansion(s), theta);
    }
    const FirstMoments r = first_moments(s);
    const double center = std::cos(theta) * r.x + std::sin(theta) * r.p;
    const double half = cfg.grid_extent * rms_scale(s) + std::abs(center);
    auto f = [&](double x) { return std::pow(x, m) * (*density)(x); };
    auto fa = [&](double x) { return std::pow(std::abs(x), m) * (*density)(x); };
    int nodes = cfg.nodes_1d;
    double prev = simpson_1d(f, -half, half, nodes);
    double err = INFINITY;
    for (int round = 0; round < 6; ++round) {
        nodes = 2 * nodes - 1;
        const double cur = simpson_1d(f, -half, half, nodes);
        const double scale = std::max(1e-300, simpson_1d(fa, -half, half, nodes));
        err = std::abs(cur - prev) / scale;
        prev = cur;
        if (err < 1e-10) break;
    }
    if (err > 1e-6) throw NumericalError("numeric_quadrature_moment did not converge");
    return {prev, err};
}

OracleValue numeric_husimi_moment(const StateModel& s, int kx, int kp, const OracleConfig& cfg) {
    cfg.validate();
    if (kx < 0 || kp < 0 || kx + kp > 4) throw std::invalid_argument("oracle: Husimi degree must be <= 4");
    const HusimiDensity q(s);
    const FirstMoments r = first_moments(s);
    const double scale = std::sqrt(rms_scale(s) * rms_scale(s) + 0.5);
    const double hx = cfg.grid_extent * scale + std::abs(r.x);
    const double hp = cfg.grid_extent * scale + std::abs(r.p);
    auto f = [&](double x, double p) { return std::pow(x, kx) * std::pow(p, kp) * q(x, p); };
    auto fa = [&](double x, double p) { return std::pow(std::abs(x), kx) * std::pow(std::abs(p), kp) * q(x, p); };
    int nodes = 129;
    double prev = simpson_2d(f, -hx, hx, -hp, hp, nodes);
    double err = INFINITY;
    for (int round = 0; round < 4; ++round) {
        nodes = 2 * nodes - 1;
        const double cur = simpson_2d(f, -hx, hx, -hp, hp, nodes);
        const double abs_scale = std::max(1e-300, simpson_2d(fa, -hx, hx, -hp, hp, nodes));
        err = std::abs(cur - prev) / abs_scale;
        prev = cur;
        if (err < 1e-10) break;
    }
    if (err > 1e-6) throw NumericalError("numeric_husimi_moment did not converge");
    return {prev, err};
}

cd symmetric_generating_function(const StateModel& s, cd z1, cd z2) {
    const cd bch = std::exp(0.5 * z1 * z2);
    if (const auto* g = std::get_if<GaussianState>(&s)) {
        // z1 a^+ + z2 a = u x + v p with u = (z1 + z2)/sqrt2, v = -i (z1 - z2)/sqrt2.
        const cd u = (z1 + z2) / std::numbers::sqrt2;
        const cd v = cd(0.0, -1.0) * (z1 - z2) / std::numbers::sqrt2;
        const cd quad = u * u * g->g.xx + 2.0 * u * v * g->g.xp + v * v * g->g.pp;
        return std::exp(u * g->r0.x + v * g->r0.p + 0.5 * quad);
    }
    // <n| e^{z1 a^+} e^{z2 a} |n> = L_n(-z1 z2)
    auto fock = [&](int n) { return laguerre_sum(n, z1 * z2) / factorial(n); };
    if (const auto* f = std::get_if<FockState>(&s)) return bch * fock(f->n);
    if (const auto* d = std::get_if<DisplacedFockState>(&s)) {
        const cd a = d->alpha0;
        return bch * std::exp(z1 * std::conj(a) + z2 * a) * fock(d->m);
    }
    if (const auto* p = std::get_if<PhotonAddedState>(&s)) {
        const cd a = p->alpha0;
        const cd shifted = (std::conj(a) + z2) * (a + z1);
        return bch * std::exp(z1 * std::conj(a) + z2 * a) * laguerre_sum(p->m, shifted) /
               laguerre_sum(p->m, std::norm(a));
    }
    const auto& c = std::get<CatState>(s);
    const cd a = c.alpha0;
    const double x = std::norm(a);
    const double sign = c.parity == Parity::even ? 1.0 : -1.0;
    if (c.parity == Parity::odd && x < 1e-6) return bch * fock(1);
    // sum over |s1 a> <s2 a| with <b|e^{z1 a^+} e^{z2 a}|c> = e^{z1 b* + z2 c} <b|c>
    cd sum = 0.0;
    for (int s1 : {1, -1})
        for (int s2 : {1, -1}) {
            const double weight = (s1 == s2) ? 1.0 : sign;
            const double overlap = (s1 == s2) ? 1.0 : std::exp(-2.0 * x);
            sum += weight * overlap * std::exp(z1 * std::conj(double(s1) * a) + z2 * (double(s2) * a));
        }
    const double norm2 = c.parity == Parity::even ? 2.0 + 2.0 * std::exp(-2.0 * x) : -2.0 * std::expm1(-2.0 * x);
    return bch * sum / norm2;
}

double quadrature_mgf(const StateModel& s, double theta, double k) {
    const cd z1 = std::polar(k / std::numbers::sqrt2, theta);
    return symmetric_generating_function(s, z1, std::conj(z1)).real();
}

double husimi_mgf(const StateModel& s, double u, double v) {
    // E_Q[e^{ux+vp}] = <e^{z2 a} e^{z1 a^+}> = e^{z1 z2 / 2} <e^{z1 a^+ + z2 a}>
    const cd z1 = cd(u, v) / std::numbers::sqrt2;
    const cd z2 = std::conj(z1);
    return (std::exp(0.5 * z1 * z2) * symmetric_generating_function(s, z1, z2)).real();
}

OracleValue cf_quadrature_moment(const StateModel& s, double theta, int m, const OracleConfig& cfg) {
    cfg.validate();
    if (m < 0 || m > 4) throw std::invalid_argument("oracle: finite-difference order must be <= 4");
    if (m == 0) return {quadrature_mgf(s, theta, 0.0), 0.0};
    const auto st = stencil(m);
    auto d = [&](double h) {
        double sum = 0.0;
        for (const auto& [node, w] : st) sum += w * quadrature_mgf(s, theta, node * h);
        return sum / std::pow(h, m);
    };
    const double h = std::pow(cfg.fd_step, 1.0 / m) / rms_scale(s);
    return richardson(d, h, cfg.richardson_levels);
}

OracleValue cf_husimi_moment(const StateModel& s, int kx, int kp, const OracleConfig& cfg) {
    cfg.validate();
    if (kx < 0 || kp < 0 || kx + kp > 4) throw std::invalid_argument("oracle: Husimi degree must be <= 4");
    if (kx + kp == 0) return {husimi_mgf(s, 0.0, 0.0), 0.0};
    const auto sx = stencil(kx);
    const auto sp = stencil(kp);
    auto d = [&](double h) {
        double sum = 0.0;
        for (const auto& [nx, wx] : sx)
            for (const auto& [np, wp] : sp) sum += wx * wp * husimi_mgf(s, nx * h, np * h);
        return sum / std::pow(h, kx + kp);
    };
    const double scale = std::sqrt(rms_scale(s) * rms_scale(s) + 0.5);
    const double h = std::pow(cfg.fd_step, 1.0 / (kx + kp)) / scale;
    return richardson(d, h, cfg.richardson_levels);
}

ScaledFisher numeric_fisher(const StateModel& s, MomentOrder order) {
    const QuadratureMomentModel model(s);
    const int dim = order == MomentOrder::first ? 2 : 3;
    auto integrate = [&](int nodes) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
        const double h = std::numbers::pi / (nodes - 1);
        for (int i = 0; i < nodes; ++i) {
            const double th = i * h;
            const double w = (i == 0 || i == nodes - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const QuadratureMomentTable t = model.at(th);
            const double c = std::cos(th), sn = std::sin(th);
            Eigen::VectorXd v(dim);
            double var;
            if (order == MomentOrder::first) {
                v << c, sn;
                var = t.variance();
            } else {
                v << c * c, std::numbers::sqrt2 * c * sn, sn * sn;
                var = t.second_moment_variance();
            }
            if (!(var > 0.0)) throw NumericalError("numeric_fisher: vanishing variance");
            acc += (w / var) * v * v.transpose();
        }
        return Eigen::MatrixXd(acc * h / (3.0 * std::numbers::pi));
    };
    int nodes = 129;
    Eigen::MatrixXd prev = integrate(nodes);
    for (int round = 0; round < 10; ++round) {
        nodes = 2 * nodes - 1;
        Eigen::MatrixXd cur = integrate(nodes);
        const double change = (cur - prev).cwiseAbs().maxCoeff() / cur.cwiseAbs().maxCoeff();
        prev = cur;
        if (change < 1e-13) return {order, FisherMethod::quadrature, prev};
    }
    throw NumericalError("numeric_fisher did not converge");
}

} // namespace mtlab::oracle
