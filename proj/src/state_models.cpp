#include "mtlab/state_models.hpp"

#include "mtlab/error.hpp"
#include "mtlab/special_functions.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mtlab {

namespace {

using cd = std::complex<double>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// n! / (n - k)!
double falling(int n, int k) {
    if (k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= (n - i);
    return r;
}

// <alpha| a^B (a^dagger)^C |alpha> for real alpha, normal ordered through
// a^B a^+C = sum_s s! C(B,s) C(C,s) a^+(C-s) a^(B-s).
double coherent_antinormal(double a, int b, int c) {
    double sum = 0.0;
    for (int s = 0; s <= std::min(b, c); ++s)
        sum += factorial(s) * binom(b, s) * binom(c, s) * std::pow(a, (c - s) + (b - s));
    return sum;
}

// <alpha| a^m (a^dagger)^m |alpha> = m! L_m(-|alpha|^2).
double photon_added_norm(double x, int m) {
    double sum = 0.0;
    for (int s = 0; s <= m; ++s) sum += factorial(s) * binom(m, s) * binom(m, s) * std::pow(x, m - s);
    return sum;
}

NormalMoments rotate_moments(NormalMoments n, double phi) {
    if (phi == 0.0) return n;
    for (int j = 0; j <= 4; ++j)
        for (int k = 0; j + k <= 4; ++k) n.value[j][k] *= std::polar(1.0, phi * (k - j));
    return n;
}

NormalMoments fock_moments(int n) {
    NormalMoments out;
    for (int j = 0; j <= 2; ++j) out.value[j][j] = falling(n, j);
    return out;
}

NormalMoments displaced_moments(double a, int m) {
    NormalMoments out;
    for (int j = 0; j <= 4; ++j)
        for (int k = 0; j + k <= 4; ++k) {
            double sum = 0.0;
            for (int p = 0; p <= std::min({j, k, m}); ++p)
                sum += binom(j, p) * binom(k, p) * std::pow(a, j + k - 2 * p) * falling(m, p);
            out.value[j][k] = sum;
        }
    return out;
}

// x / tanh(x), continuous at 0.
double x_coth_x(double x) { return x == 0.0 ? 1.0 : x / std::tanh(x); }

NormalMoments cat_moments(double a, Parity parity) {
    NormalMoments out;
    const double x = a * a;
    for (int j = 0; j <= 4; ++j)
        for (int k = 0; j + k <= 4; ++k) {
            if ((j + k) % 2 == 1) continue;
            if (j % 2 == 0) {
                out.value[j][k] = std::pow(a, j + k);
            } else if (parity == Parity::even) {
                out.value[j][k] = std::pow(a, j + k) * std::tanh(x);
            } else {
                // a^(j+k) coth(a^2) = a^(j+k-2) * x coth x
                out.value[j][k] = std::pow(a, j + k - 2) * x_coth_x(x);
            }
        }
    return out;
}

NormalMoments photon_added_moments(double a, int m) {
    // <alpha| a^m a^+j a^k a^+m |alpha> with both inner products normal ordered.
    NormalMoments out;
    const double norm = photon_added_norm(a * a, m);
    for (int j = 0; j <= 4; ++j)
        for (int k = 0; j + k <= 4; ++k) {
            double sum = 0.0;
            for (int l = 0; l <= std::min(m, j); ++l) {
                const double cl = factorial(l) * binom(m, l) * binom(j, l);
                for (int i = 0; i <= std::min(k, m); ++i) {
                    const double ci = factorial(i) * binom(k, i) * binom(m, i);
                    // a^+(j-l) a^(m-l) a^+(m-i) a^(k-i)
                    sum += cl * ci * std::pow(a, (j - l) + (k - i)) * coherent_antinormal(a, m - l, m - i);
                }
            }
            out.value[j][k] = sum / norm;
        }
    return out;
}

// Central moments E[xi^i eta^j] of a zero-mean bivariate normal, i + j <= 4.
double gaussian_central(const CovarianceMatrix& c, int i, int j) {
    if ((i + j) % 2 == 1) return 0.0;
    const double a = c.xx, b = c.pp, r = c.xp;
    switch (i * 10 + j) {
    case 0: return 1.0;
    case 20: return a;
    case 11: return r;
    case 2: return b;
    case 40: return 3.0 * a * a;
    case 31: return 3.0 * a * r;
    case 22: return a * b + 2.0 * r * r;
    case 13: return 3.0 * b * r;
    case 4: return 3.0 * b * b;
    default: throw std::logic_error("gaussian_central: order out of range");
    }
}

double gaussian_raw(const FirstMoments& mean, const CovarianceMatrix& c, int k, int l) {
    double sum = 0.0;
    for (int i = 0; i <= k; ++i)
        for (int j = 0; j <= l; ++j)
            sum += binom(k, i) * binom(l, j) * std::pow(mean.x, k - i) * std::pow(mean.p, l - j) *
                   gaussian_central(c, i, j);
    return sum;
}

// Anti-normally ordered <a^k (a^dagger)^j> from normal moments.
cd antinormal(const NormalMoments& n, int k, int j) {
    cd sum = 0.0;
    for (int i = 0; i <= std::min(j, k); ++i) sum += factorial(i) * binom(k, i) * binom(j, i) * n(j - i, k - i);
    return sum;
}

// Husimi average of x^kx p^kp, with x = (alpha + alpha*)/sqrt2 and
// p = (alpha - alpha*)/(i sqrt2).
double husimi_monomial(const NormalMoments& n, int kx, int kp) {
    cd sum = 0.0;
    for (int a1 = 0; a1 <= kx; ++a1)
        for (int b1 = 0; b1 <= kp; ++b1) {
            const double c = binom(kx, a1) * binom(kp, b1) * (((kp - b1) % 2) ? -1.0 : 1.0);
            sum += c * antinormal(n, a1 + b1, (kx - a1) + (kp - b1));
        }
    const cd scale = std::pow(std::numbers::sqrt2, -kx) * std::pow(cd(0.0, std::numbers::sqrt2), -kp);
    return (sum * scale).real();
}

struct AmplitudeParts {
    double magnitude;
    double phase;
};

AmplitudeParts split(cd alpha) { return {std::abs(alpha), alpha == cd(0.0) ? 0.0 : std::arg(alpha)}; }

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::map<std::string, std::string>& keys, const std::string& name, double fallback) {
    auto it = keys.find(name);
    if (it == keys.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("state key '" + name + "' is not a number: '" + it->second + "'");
    }
}

int parse_int(const std::map<std::string, std::string>& keys, const std::string& name, int fallback) {
    const double v = parse_double(keys, name, fallback);
    if (std::floor(v) != v || v < 0 || v > 100000) {
        throw ConfigError("state key '" + name + "' must be a non-negative integer");
    }
    return static_cast<int>(v);
}

cd parse_alpha(const std::map<std::string, std::string>& keys) {
    if (keys.count("alpha") && (keys.count("alpha_re") || keys.count("alpha_im"))) {
        throw ConfigError("state: give either alpha or alpha_re/alpha_im, not both");
    }
    if (keys.count("alpha")) return {parse_double(keys, "alpha", 0.0), 0.0};
    return {parse_double(keys, "alpha_re", 0.0), parse_double(keys, "alpha_im", 0.0)};
}

} // namespace

StateModel make_vacuum() { return FockState{0}; }

StateModel make_coherent(std::complex<double> alpha0) { return DisplacedFockState{alpha0, 0}; }

StateModel make_gaussian(const FirstMoments& r0, const GaussianShape& shape) {
    return GaussianState{r0, gaussian_cov_from_shape(shape)};
}

void validate(const StateModel& s) {
    auto finite_alpha = [](cd a) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw std::invalid_argument("state amplitude must be finite");
    };
    std::visit(overloaded{
                   [](const GaussianState& g) {
                       if (!std::isfinite(g.r0.x) || !std::isfinite(g.r0.p))
                           throw std::invalid_argument("gaussian first moments must be finite");
                       if (!g.g.is_physical())
                           throw std::invalid_argument("gaussian covariance must satisfy det G >= 1/4 (det = " +
                                                       std::to_string(g.g.det()) + ")");
                   },
                   [](const FockState& f) {
                       if (f.n < 0) throw std::invalid_argument("fock photon number must be >= 0");
                   },
                   [&](const CatState& c) { finite_alpha(c.alpha0); },
                   [&](const DisplacedFockState& d) {
                       finite_alpha(d.alpha0);
                       if (d.m < 0) throw std::invalid_argument("displaced fock m must be >= 0");
                   },
                   [&](const PhotonAddedState& p) {
                       finite_alpha(p.alpha0);
                       if (p.m < 0) throw std::invalid_argument("photon-added m must be >= 0");
                   },
               },
               s);
}

std::string family_name(const StateModel& s) {
    return std::visit(overloaded{
                          [](const GaussianState&) { return std::string("gaussian"); },
                          [](const FockState&) { return std::string("fock"); },
                          [](const CatState& c) {
                              return std::string(c.parity == Parity::even ? "even_coherent" : "odd_coherent");
                          },
                          [](const DisplacedFockState&) { return std::string("displaced_fock"); },
                          [](const PhotonAddedState&) { return std::string("photon_added"); },
                      },
                      s);
}

std::string format_state(const StateModel& s) {
    auto alpha = [](cd a) { return "alpha_re=" + fmt_double(a.real()) + " alpha_im=" + fmt_double(a.imag()); };
    return std::visit(overloaded{
                          [](const GaussianState& g) {
                              return "family=gaussian x0=" + fmt_double(g.r0.x) + " p0=" + fmt_double(g.r0.p) +
                                     " gxx=" + fmt_double(g.g.xx) + " gxp=" + fmt_double(g.g.xp) +
                                     " gpp=" + fmt_double(g.g.pp);
                          },
                          [](const FockState& f) { return "family=fock n=" + std::to_string(f.n); },
                          [&](const CatState& c) { return "family=" + family_name(c) + " " + alpha(c.alpha0); },
                          [&](const DisplacedFockState& d) {
                              return "family=displaced_fock m=" + std::to_string(d.m) + " " + alpha(d.alpha0);
                          },
                          [&](const PhotonAddedState& p) {
                              return "family=photon_added m=" + std::to_string(p.m) + " " + alpha(p.alpha0);
                          },
                      },
                      s);
}

StateModel state_from_keys(const std::map<std::string, std::string>& keys) {
    auto it = keys.find("family");
    if (it == keys.end()) throw ConfigError("state descriptor is missing 'family'");
    const std::string& fam = it->second;
    StateModel s;
    if (fam == "vacuum") {
        s = make_vacuum();
    } else if (fam == "fock") {
        s = FockState{parse_int(keys, "n", 0)};
    } else if (fam == "coherent") {
        s = make_coherent(parse_alpha(keys));
    } else if (fam == "even_coherent" || fam == "odd_coherent") {
        s = CatState{parse_alpha(keys), fam == "even_coherent" ? Parity::even : Parity::odd};
    } else if (fam == "displaced_fock") {
        s = DisplacedFockState{parse_alpha(keys), parse_int(keys, "m", 0)};
    } else if (fam == "photon_added") {
        s = PhotonAddedState{parse_alpha(keys), parse_int(keys, "m", 0)};
    } else if (fam == "gaussian" || fam == "thermal" || fam == "squeezed") {
        const FirstMoments r0{parse_double(keys, "x0", 0.0), parse_double(keys, "p0", 0.0)};
        const bool explicit_g = keys.count("gxx") || keys.count("gxp") || keys.count("gpp");
        if (explicit_g) {
            s = GaussianState{r0, {parse_double(keys, "gxx", 0.5), parse_double(keys, "gxp", 0.0),
                                   parse_double(keys, "gpp", 0.5)}};
        } else {
            const GaussianShape shape{parse_double(keys, "mu", 1.0), parse_double(keys, "lambda", 1.0),
                                      parse_double(keys, "phi", 0.0)};
            try {
                s = make_gaussian(r0, shape);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    } else {
        throw ConfigError("unknown state family '" + fam + "'");
    }
    try {
        validate(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

StateModel parse_state(const std::string& text) {
    std::map<std::string, std::string> keys;
    std::istringstream in(text);
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("malformed state token '" + token + "'");
        keys[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return state_from_keys(keys);
}

NormalMoments normal_moments(const StateModel& s) {
    return std::visit(overloaded{
                          [](const GaussianState&) -> NormalMoments {
                              throw std::invalid_argument("normal_moments: gaussian states use (r0, G) directly");
                          },
                          [](const FockState& f) { return fock_moments(f.n); },
                          [](const CatState& c) {
                              const auto [a, phi] = split(c.alpha0);
                              return rotate_moments(cat_moments(a, c.parity), phi);
                          },
                          [](const DisplacedFockState& d) {
                              const auto [a, phi] = split(d.alpha0);
                              return rotate_moments(displaced_moments(a, d.m), phi);
                          },
                          [](const PhotonAddedState& p) {
                              const auto [a, phi] = split(p.alpha0);
                              return rotate_moments(photon_added_moments(a, p.m), phi);
                          },
                      },
                      s);
}

QuadratureMomentModel::QuadratureMomentModel(const StateModel& s) {
    if (const auto* g = std::get_if<GaussianState>(&s)) {
        gaussian_ = true;
        r0_ = g->r0;
        g_ = g->g;
    } else {
        normal_ = normal_moments(s);
    }
}

QuadratureMomentTable QuadratureMomentModel::at(double theta) const {
    QuadratureMomentTable t;
    t.theta = theta;
    if (gaussian_) {
        const double mu = std::cos(theta) * r0_.x + std::sin(theta) * r0_.p;
        const double var = quadrature_variance(g_, theta);
        t.m1 = mu;
        t.m2 = mu * mu + var;
        t.m3 = mu * mu * mu + 3.0 * mu * var;
        t.m4 = mu * mu * mu * mu + 6.0 * mu * mu * var + 3.0 * var * var;
        return t;
    }
    // (b + b^+)^m = sum_k m!/(k! 2^k (m-2k)!) :(b + b^+)^(m-2k):, b = a e^{-i theta}.
    std::array<double, 5> moment{};
    for (int m = 1; m <= 4; ++m) {
        cd sum = 0.0;
        for (int k = 0; 2 * k <= m; ++k) {
            const int r = m - 2 * k;
            const double c = factorial(m) / (factorial(k) * std::pow(2.0, k) * factorial(r));
            cd inner = 0.0;
            for (int j = 0; j <= r; ++j) inner += binom(r, j) * normal_(j, r - j) * std::polar(1.0, theta * (2 * j - r));
            sum += c * inner;
        }
        moment[m] = sum.real() * std::pow(2.0, -0.5 * m);
    }
    t.m1 = moment[1];
    t.m2 = moment[2];
    t.m3 = moment[3];
    t.m4 = moment[4];
    return t;
}

QuadratureMomentTable quadrature_moments(const StateModel& s, double theta) {
    return QuadratureMomentModel(s).at(theta);
}

HusimiMomentSet husimi_moments(const StateModel& s) {
    HusimiMomentSet h;
    if (const auto* g = std::get_if<GaussianState>(&s)) {
        const CovarianceMatrix c = het_shift(g->g);
        auto raw = [&](int k, int l) { return gaussian_raw(g->r0, c, k, l); };
        h.mx = raw(1, 0);
        h.mp = raw(0, 1);
        h.mxx = raw(2, 0);
        h.mxp = raw(1, 1);
        h.mpp = raw(0, 2);
        h.mx4 = raw(4, 0);
        h.mx3p = raw(3, 1);
        h.mx2p2 = raw(2, 2);
        h.mxp3 = raw(1, 3);
        h.mp4 = raw(0, 4);
        return h;
    }
    const NormalMoments n = normal_moments(s);
    h.mx = husimi_monomial(n, 1, 0);
    h.mp = husimi_monomial(n, 0, 1);
    h.mxx = husimi_monomial(n, 2, 0);
    h.mxp = husimi_monomial(n, 1, 1);
    h.mpp = husimi_monomial(n, 0, 2);
    h.mx4 = husimi_monomial(n, 4, 0);
    h.mx3p = husimi_monomial(n, 3, 1);
    h.mx2p2 = husimi_monomial(n, 2, 2);
    h.mxp3 = husimi_monomial(n, 1, 3);
    h.mp4 = husimi_monomial(n, 0, 4);
    return h;
}

FirstMoments first_moments(const StateModel& s) {
    const QuadratureMomentModel model(s);
    return {model.at(0.0).m1, model.at(std::numbers::pi / 2.0).m1};
}

CovarianceMatrix second_moment_matrix(const StateModel& s) {
    if (const auto* g = std::get_if<GaussianState>(&s)) return g->g + outer(g->r0);
    const QuadratureMomentModel model(s);
    const double xx = model.at(0.0).m2;
    const double pp = model.at(std::numbers::pi / 2.0).m2;
    // <X_{pi/4}^2> = (<X^2> + <P^2> + <{X,P}>)/2
    const double diag = model.at(std::numbers::pi / 4.0).m2;
    return {xx, diag - 0.5 * (xx + pp), pp};
}

CovarianceMatrix covariance(const StateModel& s) {
    if (const auto* g = std::get_if<GaussianState>(&s)) return g->g;
    return second_moment_matrix(s) - outer(first_moments(s));
}

std::pair<double, double> second_moment_eigenvalues_closed_form(const StateModel& s) {
    auto sorted = [](double a, double b) { return a <= b ? std::pair{a, b} : std::pair{b, a}; };
    return std::visit(
        overloaded{
            [&](const GaussianState& g) {
                const cd alpha0(g.r0.x / std::numbers::sqrt2, g.r0.p / std::numbers::sqrt2);
                const double base = std::norm(alpha0) + 0.5 * g.g.trace();
                const double half_gap = std::abs(alpha0 * alpha0 + cd(0.5 * (g.g.xx - g.g.pp), g.g.xp));
                return sorted(base - half_gap, base + half_gap);
            },
            [&](const FockState& f) { return std::pair{f.n + 0.5, f.n + 0.5}; },
            [&](const CatState& c) {
                const double x = std::norm(c.alpha0);
                // x tanh(x)^{+-1}
                const double xt = c.parity == Parity::even ? x * std::tanh(x) : x_coth_x(x);
                return sorted(0.5 + xt - x, 0.5 + xt + x);
            },
            [&](const DisplacedFockState& d) {
                return sorted(d.m + 0.5, d.m + 2.0 * std::norm(d.alpha0) + 0.5);
            },
            [&](const PhotonAddedState& p) {
                const double x = std::norm(p.alpha0);
                const int m = p.m;
                const double base = hyp1f1_scaled(m + 1, 1, x);
                const double l1 = (m + 1) * hyp1f1_scaled(m + 2, 2, x) / base - 0.5;
                const double l2 = 2.0 * m + 2.0 * x + 0.5 + m * (2.0 * x - 1.0) * hyp1f1_scaled(m + 1, 2, x) / base;
                return sorted(l1, l2);
            },
        },
        s);
}

double mean_photon_number(const StateModel& s) {
    if (std::holds_alternative<GaussianState>(s)) return 0.5 * (second_moment_matrix(s).trace() - 1.0);
    return normal_moments(s)(1, 1).real();
}

} // namespace mtlab
