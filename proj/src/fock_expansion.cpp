#include "mtlab/error.hpp"
#include "mtlab/special_functions.hpp"
#include "mtlab/state_models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mtlab {

namespace {

using cd = std::complex<double>;

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

std::vector<cd> coherent_coefficients(cd alpha, int cutoff) {
    std::vector<cd> c(cutoff + 1, 0.0);
    const double a = std::abs(alpha);
    if (a == 0.0) {
        c[0] = 1.0;
        return c;
    }
    const double phi = std::arg(alpha);
    const double log_a = std::log(a);
    for (int n = 0; n <= cutoff; ++n) {
        const double log_mag = -0.5 * a * a + n * log_a - 0.5 * log_factorial(n);
        c[n] = std::polar(std::exp(log_mag), n * phi);
    }
    return c;
}

double log_photon_added_norm(double x, int m) {
    // log sum_s s! C(m,s)^2 x^(m-s), summed relative to the largest term
    std::vector<double> terms(m + 1);
    double top = -INFINITY;
    for (int s = 0; s <= m; ++s) {
        const double lc = log_factorial(m) - log_factorial(s) - log_factorial(m - s);
        const double lx = (m - s == 0) ? 0.0 : (x > 0.0 ? (m - s) * std::log(x) : -INFINITY);
        terms[s] = log_factorial(s) + 2.0 * lc + lx;
        top = std::max(top, terms[s]);
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - top);
    return top + std::log(sum);
}

int photon_index(const StateModel& s) {
    return std::visit(
        [](const auto& st) -> int {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, FockState>) return st.n;
            else if constexpr (std::is_same_v<T, CatState>) return 1;
            else if constexpr (std::is_same_v<T, GaussianState>) return 0;
            else return st.m;
        },
        s);
}

double amplitude_sq(const StateModel& s) {
    return std::visit(
        [](const auto& st) -> double {
            using T = std::decay_t<decltype(st)>;
            if constexpr (std::is_same_v<T, FockState> || std::is_same_v<T, GaussianState>) return 0.0;
            else return std::norm(st.alpha0);
        },
        s);
}

} // namespace

int default_fock_cutoff(const StateModel& s) {
    const double x = amplitude_sq(s);
    const int m = photon_index(s);
    return static_cast<int>(std::ceil(x + m + 10.0 * std::sqrt(x + m + 1.0) + 20.0));
}

FockExpansion fock_expansion(const StateModel& s, int cutoff, double eps_trunc) {
    if (std::holds_alternative<GaussianState>(s))
        throw std::invalid_argument("fock_expansion: gaussian states have no finite expansion here");
    if (cutoff < 0) cutoff = default_fock_cutoff(s);
    FockExpansion out;
    out.cutoff = cutoff;
    std::vector<cd>& c = out.coefficients;

    if (const auto* f = std::get_if<FockState>(&s)) {
        c.assign(cutoff + 1, 0.0);
        if (f->n <= cutoff) c[f->n] = 1.0;
    } else if (const auto* cat = std::get_if<CatState>(&s)) {
        const double x = std::norm(cat->alpha0);
        c = coherent_coefficients(cat->alpha0, cutoff);
        if (cat->parity == Parity::odd && x == 0.0) {
            c.assign(cutoff + 1, 0.0);
            if (cutoff >= 1) c[1] = 1.0;
        } else {
            const double sign = cat->parity == Parity::even ? 1.0 : -1.0;
            const double norm2 = cat->parity == Parity::even ? 2.0 + 2.0 * std::exp(-2.0 * x)
                                                             : -2.0 * std::expm1(-2.0 * x);
            const double scale = 1.0 / std::sqrt(norm2);
            for (int n = 0; n <= cutoff; ++n) {
                const double parity_factor = 1.0 + sign * ((n % 2) ? -1.0 : 1.0);
                c[n] *= parity_factor * scale;
            }
        }
    } else if (const auto* d = std::get_if<DisplacedFockState>(&s)) {
        // D(alpha)|m> = (a^+ - alpha*)^m |alpha> / sqrt(m!)
        c = coherent_coefficients(d->alpha0, cutoff);
        const cd ac = std::conj(d->alpha0);
        for (int step = 1; step <= d->m; ++step) {
            std::vector<cd> next(cutoff + 1, 0.0);
            const double inv = 1.0 / std::sqrt(static_cast<double>(step));
            for (int n = 0; n <= cutoff; ++n) {
                cd v = -ac * c[n];
                if (n > 0) v += std::sqrt(static_cast<double>(n)) * c[n - 1];
                next[n] = v * inv;
            }
            c.swap(next);
        }
    } else if (const auto* p = std::get_if<PhotonAddedState>(&s)) {
        const double x = std::norm(p->alpha0);
        const std::vector<cd> coh = coherent_coefficients(p->alpha0, cutoff);
        const double log_norm = log_photon_added_norm(x, p->m);
        c.assign(cutoff + 1, 0.0);
        for (int n = 0; n + p->m <= cutoff; ++n) {
            const double lf = 0.5 * (log_factorial(n + p->m) - log_factorial(n) - log_norm);
            c[n + p->m] = coh[n] * std::exp(lf);
        }
    }

    double total = 0.0;
    for (const cd& v : c) total += std::norm(v);
    out.captured_norm = total;
    if (total < 1.0 - eps_trunc) {
        throw NumericalError("fock_expansion: captured norm " + std::to_string(total) + " below 1 - " +
                             std::to_string(eps_trunc) + " at cutoff " + std::to_string(cutoff));
    }
    return out;
}

PhaseDensity::PhaseDensity(const StateModel& s, double theta) {
    if (const auto* g = std::get_if<GaussianState>(&s)) {
        gaussian_ = true;
        mean_ = std::cos(theta) * g->r0.x + std::sin(theta) * g->r0.p;
        variance_ = quadrature_variance(g->g, theta);
        return;
    }
    *this = PhaseDensity(fock_expansion(s), theta);
}

PhaseDensity::PhaseDensity(const FockExpansion& e, double theta) {
    std::size_t n = e.coefficients.size();
    double peak = 0.0;
    for (const cd& v : e.coefficients) peak = std::max(peak, std::norm(v));
    while (n > 1 && std::norm(e.coefficients[n - 1]) < 1e-34 * peak) --n;
    re_.resize(n);
    im_.resize(n);
    rec_a_.assign(n, 0.0);
    rec_b_.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const cd v = e.coefficients[k] * std::polar(1.0, -static_cast<double>(k) * theta);
        re_[k] = v.real();
        im_[k] = v.imag();
        if (k > 0) {
            rec_a_[k] = std::sqrt(2.0 / k);
            rec_b_[k] = std::sqrt((k - 1.0) / k);
        }
    }
}

double PhaseDensity::operator()(double x) const {
    if (gaussian_) {
        const double d = x - mean_;
        return std::exp(-0.5 * d * d / variance_) / std::sqrt(2.0 * std::numbers::pi * variance_);
    }
    // Hermite functions by the normalized recurrence, accumulated on the fly.
    double prev = 0.0;
    double cur = std::exp(-0.5 * x * x) * 0.75112554446494248; // pi^{-1/4}
    double sr = re_[0] * cur;
    double si = im_[0] * cur;
    for (std::size_t k = 1; k < re_.size(); ++k) {
        const double next = rec_a_[k] * x * cur - rec_b_[k] * prev;
        prev = cur;
        cur = next;
        sr += re_[k] * cur;
        si += im_[k] * cur;
    }
    return sr * sr + si * si;
}

double quadrature_pdf(const StateModel& s, double theta, double x) { return PhaseDensity(s, theta)(x); }

HusimiDensity::HusimiDensity(const StateModel& s) : state_(s) {
    if (const auto* g = std::get_if<GaussianState>(&s)) {
        det_ = het_shift(g->g).det();
    } else if (const auto* pa = std::get_if<PhotonAddedState>(&s)) {
        log_norm_ = log_photon_added_norm(std::norm(pa->alpha0), pa->m);
    } else if (const auto* cat = std::get_if<CatState>(&s)) {
        const double x2 = std::norm(cat->alpha0);
        if (cat->parity == Parity::odd && x2 < 1e-4) {
            expansion_ = fock_expansion(s);
        } else {
            inv_norm2_ = 1.0 / (cat->parity == Parity::even ? 2.0 + 2.0 * std::exp(-2.0 * x2)
                                                            : -2.0 * std::expm1(-2.0 * x2));
        }
    }
}

double HusimiDensity::operator()(double x, double p) const {
    const cd beta(x / std::numbers::sqrt2, p / std::numbers::sqrt2);
    if (const auto* g = std::get_if<GaussianState>(&state_)) {
        const CovarianceMatrix c = het_shift(g->g);
        const double dx = x - g->r0.x, dp = p - g->r0.p;
        const double q = (c.pp * dx * dx - 2.0 * c.xp * dx * dp + c.xx * dp * dp) / det_;
        return kInvTwoPi * std::exp(-0.5 * q) / std::sqrt(det_);
    }
    auto fock_q = [](double b2, int n) {
        if (n == 0) return kInvTwoPi * std::exp(-b2);
        if (b2 == 0.0) return 0.0;
        return kInvTwoPi * std::exp(-b2 + n * std::log(b2) - log_factorial(n));
    };
    if (const auto* f = std::get_if<FockState>(&state_)) return fock_q(std::norm(beta), f->n);
    if (const auto* d = std::get_if<DisplacedFockState>(&state_)) return fock_q(std::norm(beta - d->alpha0), d->m);
    if (const auto* pa = std::get_if<PhotonAddedState>(&state_)) {
        const double b2 = std::norm(beta);
        const double lb = pa->m == 0 ? 0.0 : (b2 > 0.0 ? pa->m * std::log(b2) : -INFINITY);
        return kInvTwoPi * std::exp(lb - std::norm(beta - pa->alpha0) - log_norm_);
    }
    if (expansion_) return husimi_pdf(*expansion_, x, p);
    const auto& cat = std::get<CatState>(state_);
    const cd a = cat.alpha0;
    const double sign = cat.parity == Parity::even ? 1.0 : -1.0;
    const double cross =
        2.0 * std::exp(-std::norm(beta) - std::norm(a)) * std::cos(2.0 * std::imag(std::conj(beta) * a));
    const double amp = std::exp(-std::norm(beta - a)) + std::exp(-std::norm(beta + a)) + sign * cross;
    return kInvTwoPi * amp * inv_norm2_;
}

double husimi_pdf(const StateModel& s, double x, double p) { return HusimiDensity(s)(x, p); }

double husimi_pdf(const FockExpansion& e, double x, double p) {
    const cd bc(x / std::numbers::sqrt2, -p / std::numbers::sqrt2);
    cd term = std::exp(-0.5 * std::norm(bc));
    cd sum = e.coefficients[0] * term;
    for (std::size_t n = 1; n < e.coefficients.size(); ++n) {
        term *= bc / std::sqrt(static_cast<double>(n));
        sum += e.coefficients[n] * term;
    }
    return kInvTwoPi * std::norm(sum);
}

} // namespace mtlab
