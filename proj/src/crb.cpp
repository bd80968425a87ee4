#include "mtlab/crb.hpp"

#include "mtlab/error.hpp"
#include "mtlab/numerics.hpp"
#include "mtlab/special_functions.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace mtlab {

namespace {

using cd = std::complex<double>;

// f(t) = a + b cos t + c sin t with a > sqrt(b^2 + c^2), t = 2 theta.
struct TrigFactor {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double root() const {
        const double d = a * a - b * b - c * c;
        if (!(a > 0.0) || !(d > 0.0)) throw NumericalError("quadrature variance vanishes at some LO phase");
        return std::sqrt(d);
    }
};

// 1/f(t) = sum_n A_n e^{int}, A_n = beta^n / s for n >= 0, A_{-n} = conj(A_n).
struct InverseSeries {
    double inv_s = 0.0;
    cd beta;

    cd coefficient(int n) const {
        if (n >= 0) return inv_s * std::pow(beta, n);
        return inv_s * std::pow(std::conj(beta), -n);
    }
};

InverseSeries inverse_series(const TrigFactor& f) {
    const double s = f.root();
    return {1.0 / s, -cd(f.b, -f.c) / (f.a + s)};
}

// mean over t of e^{-ikt} / f(t) for k = 0, 1, 2.
std::array<cd, 3> fourier_of_inverse(const TrigFactor& f) {
    const InverseSeries in = inverse_series(f);
    return {in.coefficient(0), in.coefficient(1), in.coefficient(2)};
}

// Same for 1 / (f(t) g(t)), by Cauchy products of the two geometric series.
std::array<cd, 3> fourier_of_inverse_product(const TrigFactor& f, const TrigFactor& g) {
    const InverseSeries x = inverse_series(f);
    const InverseSeries y = inverse_series(g);
    const cd a = x.beta;
    const cd b = y.beta;
    std::array<cd, 3> out{};
    for (int k = 0; k <= 2; ++k) {
        // n < 0: sum_{j>=1} conj(a)^j b^{k+j}
        cd sum = std::pow(b, k) * (std::conj(a) * b) / (1.0 - std::conj(a) * b);
        // 0 <= n <= k
        for (int n = 0; n <= k; ++n) sum += std::pow(a, n) * std::pow(b, k - n);
        // n > k: sum_{j>=1} a^{k+j} conj(b)^j
        sum += std::pow(a, k) * (a * std::conj(b)) / (1.0 - a * std::conj(b));
        out[k] = sum * x.inv_s * y.inv_s;
    }
    return out;
}

// Fisher matrices from the harmonics C_k = mean(e^{-ikt} g(t)) of the inverse
// variance g, using mean(cos kt g) = Re C_k and mean(sin kt g) = -Im C_k.
Eigen::MatrixXd first_from_harmonics(const std::array<cd, 3>& c) {
    const double r0 = c[0].real(), r1 = c[1].real(), s1 = -c[1].imag();
    Eigen::MatrixXd f(2, 2);
    f << 0.5 * (r0 + r1), 0.5 * s1, 0.5 * s1, 0.5 * (r0 - r1);
    return f;
}

Eigen::MatrixXd second_from_harmonics(const std::array<cd, 3>& c) {
    const double r0 = c[0].real(), r1 = c[1].real(), r2 = c[2].real();
    const double s1 = -c[1].imag(), s2 = -c[2].imag();
    const double rt2 = std::numbers::sqrt2;
    Eigen::MatrixXd f(3, 3);
    const double f11 = (3.0 * r0 + 4.0 * r1 + r2) / 8.0;
    const double f33 = (3.0 * r0 - 4.0 * r1 + r2) / 8.0;
    const double f13 = (r0 - r2) / 8.0;
    const double f22 = 2.0 * (r0 - r2) / 8.0;
    const double f12 = rt2 * (2.0 * s1 + s2) / 8.0;
    const double f23 = rt2 * (2.0 * s1 - s2) / 8.0;
    f << f11, f12, f13, f12, f22, f23, f13, f23, f33;
    return f;
}

Eigen::Vector2d u_theta(double theta) { return {std::cos(theta), std::sin(theta)}; }

Eigen::Vector3d v_theta(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * c, std::numbers::sqrt2 * c * s, s * s};
}

// Variance of X_theta as a first-degree polynomial in (cos 2theta, sin 2theta).
TrigFactor first_order_factor(const CovarianceMatrix& g) {
    return {0.5 * g.trace(), 0.5 * (g.xx - g.pp), g.xp};
}

struct PhaseSplit {
    double x; // |alpha0|^2
    double phi;
};

PhaseSplit split(cd alpha) { return {std::norm(alpha), alpha == cd(0.0) ? 0.0 : std::arg(alpha)}; }

// var(X_theta^2) = m + l cos(2 theta - 2 phi) for the single-factor families.
TrigFactor rotated_factor(double m, double l, double phi) {
    return {m, l * std::cos(2.0 * phi), l * std::sin(2.0 * phi)};
}

double x_over_sinh(double x) { return x == 0.0 ? 1.0 : x / std::sinh(x); }
double x_coth(double x) { return x == 0.0 ? 1.0 : x / std::tanh(x); }

std::optional<TrigFactor> second_order_single_factor(const StateModel& s) {
    if (const auto* f = std::get_if<FockState>(&s)) {
        const double n = f->n;
        return TrigFactor{0.5 * (n * n + n + 1.0), 0.0, 0.0};
    }
    if (const auto* c = std::get_if<CatState>(&s)) {
        const auto [x, phi] = split(c->alpha0);
        double m;
        if (c->parity == Parity::even) {
            const double r = x / std::cosh(x);
            m = 0.5 + 2.0 * x * std::tanh(x) + r * r;
        } else {
            const double r = x_over_sinh(x);
            m = 0.5 + 2.0 * x_coth(x) - r * r;
        }
        return rotated_factor(m, 2.0 * x, phi);
    }
    if (const auto* d = std::get_if<DisplacedFockState>(&s)) {
        const auto [x, phi] = split(d->alpha0);
        const double mm = d->m;
        const double m0 = 0.5 * (mm * mm + mm + 1.0 + x * (8.0 * mm + 4.0));
        return rotated_factor(m0, 2.0 * x * (2.0 * mm + 1.0), phi);
    }
    return std::nullopt;
}

// Contour-integration closed form for the Gaussian second-order Fisher
// matrix. Returns nothing when the pole configuration is too close to
// degenerate for the partial-fraction formula.
std::optional<Eigen::MatrixXd> gaussian_contour_fisher(const GaussianState& g) {
    const double a = 0.5 * g.g.trace();
    const double b = 0.5 * (g.g.xx - g.g.pp);
    const double c = g.g.xp;
    const double x0 = g.r0.x, p0 = g.r0.p;
    const double w1 = a + g.r0.norm_squared();
    const double w2 = b + x0 * x0 - p0 * p0;
    const double w3 = c + 2.0 * x0 * p0;
    const cd d1(b, -c);
    const cd d2(w2, -w3);
    if (std::abs(d1) < 1e-6 * a || std::abs(d2) < 1e-6 * w1) return std::nullopt;

    const cd i(0.0, 1.0);
    const cd q1 = std::sqrt(cd(-a * a + b * b + c * c, 0.0));
    const cd q2 = std::sqrt(cd(-w1 * w1 + w2 * w2 + w3 * w3, 0.0));
    const cd z1p = (-a + i * q1) / d1;
    const cd z1m = (-a - i * q1) / d1;
    const cd z2p = (-w1 + i * q2) / d2;
    const cd z2m = (-w1 - i * q2) / d2;
    if (std::abs(z1m - z2m) < 1e-3) return std::nullopt;

    const double rt2 = std::numbers::sqrt2;
    auto mz = [&](cd z) {
        Eigen::Matrix3cd m;
        const cd zp = z + 1.0, zm = z - 1.0;
        const cd sq = (z * z - 1.0) * (z * z - 1.0);
        m(0, 0) = std::pow(zp, 4);
        m(0, 1) = -i * rt2 * zm * std::pow(zp, 3);
        m(0, 2) = -sq;
        m(1, 1) = -2.0 * sq;
        m(1, 2) = i * rt2 * zp * std::pow(zm, 3);
        m(2, 2) = std::pow(zm, 4);
        m(1, 0) = m(0, 1);
        m(2, 0) = m(0, 2);
        m(2, 1) = m(1, 2);
        return Eigen::Matrix3cd(m / 16.0);
    };
    const Eigen::Matrix3cd sum = mz(0.0) / (z1p * z1m * z2p * z2m) +
                                 mz(z1m) / (z1m * (z1m - z1p) * (z1m - z2p) * (z1m - z2m)) +
                                 mz(z2m) / (z2m * (z2m - z1m) * (z2m - z1p) * (z2m - z2p));
    const cd pre = -2.0 / ((c + i * b) * (w3 + i * w2));
    return Eigen::MatrixXd((pre * sum).real());
}

Eigen::MatrixXd gaussian_fourier_fisher(const GaussianState& g) {
    const TrigFactor s2 = first_order_factor(g.g);
    const double x0 = g.r0.x, p0 = g.r0.p;
    // var(X^2) = 2 s^2 (s^2 + 2 mu^2)
    const TrigFactor shifted{s2.a + g.r0.norm_squared(), s2.b + x0 * x0 - p0 * p0, s2.c + 2.0 * x0 * p0};
    std::array<cd, 3> h = fourier_of_inverse_product(s2, shifted);
    for (cd& v : h) v *= 0.5;
    return second_from_harmonics(h);
}

Eigen::MatrixXd quadrature_fisher(const StateModel& s, MomentOrder order) {
    const QuadratureMomentModel model(s);
    auto integrand = [&](double theta) -> Eigen::MatrixXd {
        const QuadratureMomentTable t = model.at(theta);
        if (order == MomentOrder::first) {
            const double var = t.variance();
            if (!(var > 0.0)) throw NumericalError("quadrature variance vanishes at theta = " + std::to_string(theta));
            const Eigen::Vector2d u = u_theta(theta);
            return u * u.transpose() / var;
        }
        const double var = t.second_moment_variance();
        if (!(var > 0.0))
            throw NumericalError("fourth-moment variance vanishes at theta = " + std::to_string(theta));
        const Eigen::Vector3d v = v_theta(theta);
        return v * v.transpose() / var;
    };
    return adaptive_periodic_mean(integrand, kFisherQuadratureTol).value;
}

double trace_inverse(const Eigen::MatrixXd& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw NumericalError("Fisher matrix is not positive definite");
    return llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols())).trace();
}

// Closed-form trace of the inverse of the single-factor Fisher matrix.
double single_factor_h2(const TrigFactor& f) { return 6.0 * f.a + 4.0 * f.root(); }

} // namespace

std::string to_string(FisherMethod m) { return m == FisherMethod::closed_form ? "closed_form" : "quadrature"; }

double ScaledFisher::trace_inverse() const { return mtlab::trace_inverse(matrix); }

ScaledFisher fisher_hom_first(const StateModel& s, FisherMethod method) {
    ScaledFisher out{MomentOrder::first, method, {}};
    if (method == FisherMethod::quadrature) {
        out.matrix = quadrature_fisher(s, MomentOrder::first);
    } else {
        out.matrix = first_from_harmonics(fourier_of_inverse(first_order_factor(covariance(s))));
    }
    return out;
}

bool has_closed_form_hom_second(const StateModel& s) { return !std::holds_alternative<PhotonAddedState>(s); }

ScaledFisher fisher_hom_second(const StateModel& s, FisherMethod method) {
    ScaledFisher out{MomentOrder::second, method, {}};
    if (method == FisherMethod::quadrature) {
        out.matrix = quadrature_fisher(s, MomentOrder::second);
        return out;
    }
    if (const auto* g = std::get_if<GaussianState>(&s)) {
        auto contour = gaussian_contour_fisher(*g);
        out.matrix = contour ? *contour : gaussian_fourier_fisher(*g);
        return out;
    }
    const auto factor = second_order_single_factor(s);
    if (!factor) throw std::invalid_argument("no closed-form second-order Fisher matrix for " + family_name(s));
    out.matrix = second_from_harmonics(fourier_of_inverse(*factor));
    return out;
}

double scrb_hom_first(const StateModel& s) {
    const CovarianceMatrix g = covariance(s);
    return g.trace() + 2.0 * std::sqrt(g.det());
}

double scrb_het_first(const StateModel& s) { return covariance(s).trace() + 1.0; }

double scrb_hom_second(const StateModel& s, std::optional<FisherMethod> method) {
    const FisherMethod m =
        method.value_or(has_closed_form_hom_second(s) ? FisherMethod::closed_form : FisherMethod::quadrature);
    if (m == FisherMethod::closed_form) {
        if (auto f = scrb_hom_second_family(s)) return *f;
    }
    return fisher_hom_second(s, m).trace_inverse();
}

double scrb_het_second(const StateModel& s) {
    const HusimiMomentSet h = husimi_moments(s);
    return h.var_x2() + h.var_p2() + 2.0 * h.var_xp();
}

std::optional<double> scrb_het_first_family(const StateModel& s) {
    if (const auto* f = std::get_if<FockState>(&s)) return 2.0 * (f->n + 1.0);
    if (const auto* p = std::get_if<PhotonAddedState>(&s)) {
        const double x = std::norm(p->alpha0);
        const int m = p->m;
        const double f11 = hyp1f1_scaled(m + 1, 1, x);
        const double f22 = hyp1f1_scaled(m + 2, 2, x);
        const double f33 = hyp1f1_scaled(m + 3, 3, x);
        const double a = -x * (m + 1) / (2.0 * f11 * f11) * (2.0 * (m + 1) * f22 * f22 - (m + 2) * f11 * f33);
        return 2.0 * (a + (m + 1) * f22 / f11);
    }
    if (std::holds_alternative<GaussianState>(s)) return covariance(s).trace() + 1.0;
    return std::nullopt;
}

std::optional<double> scrb_hom_second_family(const StateModel& s) {
    if (auto f = second_order_single_factor(s)) return single_factor_h2(*f);
    if (std::holds_alternative<GaussianState>(s)) return fisher_hom_second(s, FisherMethod::closed_form).trace_inverse();
    return std::nullopt;
}

std::optional<double> scrb_het_second_family(const StateModel& s) {
    if (const auto* g = std::get_if<GaussianState>(&s)) {
        const CovarianceMatrix c = het_shift(g->g);
        const double x0 = g->r0.x, p0 = g->r0.p;
        const double vx2 = 2.0 * c.xx * c.xx + 4.0 * x0 * x0 * c.xx;
        const double vp2 = 2.0 * c.pp * c.pp + 4.0 * p0 * p0 * c.pp;
        const double vxp = c.xx * c.pp + c.xp * c.xp + x0 * x0 * c.pp + p0 * p0 * c.xx + 2.0 * x0 * p0 * c.xp;
        return vx2 + vp2 + 2.0 * vxp;
    }
    if (const auto* f = std::get_if<FockState>(&s)) return 2.0 * (f->n + 1.0) * (f->n + 3.0);
    if (const auto* d = std::get_if<DisplacedFockState>(&s)) {
        const double m = d->m;
        return 2.0 * (m + 1.0) * (m + 3.0 + 6.0 * std::norm(d->alpha0));
    }
    if (const auto* c = std::get_if<CatState>(&s)) {
        const double x = std::norm(c->alpha0);
        if (c->parity == Parity::even) {
            const double r = x / std::cosh(x);
            return 6.0 + 12.0 * x * std::tanh(x) + 2.0 * r * r;
        }
        const double r = x_over_sinh(x);
        return 6.0 + 12.0 * x_coth(x) - 2.0 * r * r;
    }
    if (const auto* p = std::get_if<PhotonAddedState>(&s)) {
        const double x = std::norm(p->alpha0);
        const double m = p->m;
        const double f11 = hyp1f1_scaled(m + 1, 1, x);
        const double f12 = hyp1f1_scaled(m + 1, 2, x);
        const double r = f12 / f11;
        return 2.0 * (3.0 + 4.0 * m + 2.0 * x * (m + 3.0) -
                      m * r * (2.0 * (x * x - 3.0 * x - m) + m * (2.0 * x * x - 2.0 * x + 1.0) * r));
    }
    return std::nullopt;
}

double gamma1(const StateModel& s) { return scrb_het_first(s) / scrb_hom_first(s); }

double gamma2(const StateModel& s) { return scrb_het_second(s) / scrb_hom_second(s); }

CrbReport crb_report(const StateModel& s, std::optional<FisherMethod> h2_hom_method) {
    CrbReport r;
    r.h1_hom = scrb_hom_first(s);
    r.h1_het = scrb_het_first(s);
    r.h2_hom_method = h2_hom_method.value_or(has_closed_form_hom_second(s) ? FisherMethod::closed_form
                                                                           : FisherMethod::quadrature);
    r.h2_hom = scrb_hom_second(s, r.h2_hom_method);
    r.h2_het = scrb_het_second(s);
    r.gamma1 = r.h1_het / r.h1_hom;
    r.gamma2 = r.h2_het / r.h2_hom;
    return r;
}

FreeFamily parse_free_family(const std::string& name) {
    if (name == "coherent") return FreeFamily::coherent;
    if (name == "even_coherent") return FreeFamily::even_coherent;
    if (name == "odd_coherent") return FreeFamily::odd_coherent;
    if (name == "displaced_fock") return FreeFamily::displaced_fock;
    if (name == "photon_added") return FreeFamily::photon_added;
    throw ConfigError("family '" + name + "' has no free displacement parameter");
}

std::string to_string(FreeFamily f) {
    switch (f) {
    case FreeFamily::coherent: return "coherent";
    case FreeFamily::even_coherent: return "even_coherent";
    case FreeFamily::odd_coherent: return "odd_coherent";
    case FreeFamily::displaced_fock: return "displaced_fock";
    case FreeFamily::photon_added: return "photon_added";
    }
    return "?";
}

StateModel make_free_state(FreeFamily f, double alpha0, int m) {
    if (m < 0) throw std::invalid_argument("m must be non-negative");
    const cd a(alpha0, 0.0);
    switch (f) {
    case FreeFamily::coherent: return DisplacedFockState{a, 0};
    case FreeFamily::even_coherent: return CatState{a, Parity::even};
    case FreeFamily::odd_coherent: return CatState{a, Parity::odd};
    case FreeFamily::displaced_fock: return DisplacedFockState{a, m};
    case FreeFamily::photon_added: return PhotonAddedState{a, m};
    }
    throw std::invalid_argument("unknown family");
}

Crossover find_crossover(FreeFamily f, int m, double lo, double hi, double x_tol) {
    auto excess = [&](double a) { return gamma2(make_free_state(f, a, m)) - 1.0; };
    Crossover out;
    double prev = excess(lo);
    if (prev <= 0.0) {
        out.always_below_unity = true;
        return out;
    }
    const int steps = 2000;
    const double h = (hi - lo) / steps;
    for (int i = 1; i <= steps; ++i) {
        const double b = lo + i * h;
        const double cur = excess(b);
        if (cur <= 0.0) {
            out.alpha0 = bisect(excess, b - h, b, x_tol);
            out.h2 = scrb_het_second(make_free_state(f, out.alpha0, m));
            return out;
        }
        prev = cur;
    }
    throw NumericalError("gamma2 does not cross unity for alpha0 in [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
}

double default_minimum_bracket(int m) { return std::max(5.0, 3.0 * std::sqrt(static_cast<double>(m))); }

Gamma2Minimum minimize_gamma2(FreeFamily f, int m, std::optional<double> hi, double x_tol) {
    if (f == FreeFamily::coherent) f = FreeFamily::displaced_fock, m = 0;
    const double upper = hi.value_or(default_minimum_bracket(m));
    const Minimum best = global_minimize_1d([&](double a) { return gamma2(make_free_state(f, a, m)); }, 0.0, upper,
                                            1000, x_tol);
    return {best.x, best.value};
}

} // namespace mtlab
