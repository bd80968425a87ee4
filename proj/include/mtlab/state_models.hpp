#pragma once

#include "mtlab/phase_space.hpp"

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mtlab {

// Conventions: alpha = (x + i p) / sqrt(2), hbar = 1, [X, P] = i,
// X_theta = X cos(theta) + P sin(theta).

enum class Parity { even, odd };

struct GaussianState {
    FirstMoments r0;
    CovarianceMatrix g{0.5, 0.0, 0.5};
};

struct FockState {
    int n = 0;
};

// (|alpha0> +- |-alpha0>) normalized.
struct CatState {
    std::complex<double> alpha0;
    Parity parity = Parity::even;
};

// D(alpha0)|m>.
struct DisplacedFockState {
    std::complex<double> alpha0;
    int m = 0;
};

// (A^dagger)^m |alpha0> normalized.
struct PhotonAddedState {
    std::complex<double> alpha0;
    int m = 0;
};

using StateModel = std::variant<GaussianState, FockState, CatState, DisplacedFockState, PhotonAddedState>;

StateModel make_vacuum();
StateModel make_coherent(std::complex<double> alpha0);
StateModel make_gaussian(const FirstMoments& r0, const GaussianShape& shape);

// Throws std::invalid_argument for unphysical or malformed parameters.
void validate(const StateModel& s);

// Short family tag: gaussian, fock, even_coherent, odd_coherent,
// displaced_fock, photon_added.
std::string family_name(const StateModel& s);

// Canonical key=value serialization, e.g. "family=fock n=3". Gaussian states
// are written with explicit r0 and G entries; everything round-trips through
// parse_state().
std::string format_state(const StateModel& s);
StateModel parse_state(const std::string& text);
StateModel state_from_keys(const std::map<std::string, std::string>& keys);

struct QuadratureMomentTable {
    double theta = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    double variance() const { return m2 - m1 * m1; }
    double second_moment_variance() const { return m4 - m2 * m2; }
};

// Husimi averages of x^k p^l up to total degree 4.
struct HusimiMomentSet {
    double mx = 0.0, mp = 0.0;
    double mxx = 0.0, mxp = 0.0, mpp = 0.0;
    double mx4 = 0.0, mx2p2 = 0.0, mp4 = 0.0;
    double mx3p = 0.0, mxp3 = 0.0;

    double var_x() const { return mxx - mx * mx; }
    double var_p() const { return mpp - mp * mp; }
    double var_x2() const { return mx4 - mxx * mxx; }
    double var_p2() const { return mp4 - mpp * mpp; }
    double var_xp() const { return mx2p2 - mxp * mxp; }
    // Degree-2 central block; equals het_shift(covariance(state)).
    CovarianceMatrix central_block() const { return {var_x(), mxp - mx * mp, var_p()}; }
    CovarianceMatrix second_moment_block() const { return {mxx, mxp, mpp}; }
};

// Normally ordered moments <(a^dagger)^j a^k> for j + k <= 4.
struct NormalMoments {
    std::array<std::array<std::complex<double>, 5>, 5> value{};

    std::complex<double> operator()(int j, int k) const { return value[j][k]; }
};

// Closed-form normally ordered moments of a non-Gaussian family. Throws for
// Gaussian states, whose moments are handled directly from (r0, G).
NormalMoments normal_moments(const StateModel& s);

// Evaluates quadrature moments at arbitrary LO phases; the per-state closed
// forms are prepared once at construction.
class QuadratureMomentModel {
public:
    explicit QuadratureMomentModel(const StateModel& s);

    QuadratureMomentTable at(double theta) const;

private:
    bool gaussian_ = false;
    FirstMoments r0_;
    CovarianceMatrix g_;
    NormalMoments normal_;
};

QuadratureMomentTable quadrature_moments(const StateModel& s, double theta);
HusimiMomentSet husimi_moments(const StateModel& s);

FirstMoments first_moments(const StateModel& s);
// G2 = Re<R R^T> = G + r r^T.
CovarianceMatrix second_moment_matrix(const StateModel& s);
// G = G2 - r r^T.
CovarianceMatrix covariance(const StateModel& s);

// Per-family closed forms for the eigenvalues of G2 (ascending).
std::pair<double, double> second_moment_eigenvalues_closed_form(const StateModel& s);

// Mean photon number <A^dagger A>.
double mean_photon_number(const StateModel& s);

// ---------------------------------------------------------------------------
// Fock-basis expansion of the pure non-Gaussian families.

struct FockExpansion {
    std::vector<std::complex<double>> coefficients; // c_0 .. c_cutoff
    int cutoff = 0;
    double captured_norm = 0.0; // sum |c_n|^2
};

constexpr double kDefaultTruncation = 1e-10;

// ceil(|alpha0|^2 + m + 10 sqrt(|alpha0|^2 + m + 1) + 20), with m the photon
// index of the family (n for Fock, 1 for cat states).
int default_fock_cutoff(const StateModel& s);

// Throws NumericalError when the captured norm falls below 1 - eps_trunc and
// std::invalid_argument for Gaussian states.
FockExpansion fock_expansion(const StateModel& s, int cutoff = -1, double eps_trunc = kDefaultTruncation);

// Quadrature density p(x | theta) for a fixed LO phase.
class PhaseDensity {
public:
    PhaseDensity(const StateModel& s, double theta);
    PhaseDensity(const FockExpansion& e, double theta);

    double operator()(double x) const;

private:
    bool gaussian_ = false;
    double mean_ = 0.0;
    double variance_ = 0.0;
    std::vector<double> re_;
    std::vector<double> im_;
    // psi_k = a_k x psi_{k-1} - b_k psi_{k-2}
    std::vector<double> rec_a_;
    std::vector<double> rec_b_;
};

double quadrature_pdf(const StateModel& s, double theta, double x);

// Husimi density with the per-state normalization prepared once.
class HusimiDensity {
public:
    explicit HusimiDensity(const StateModel& s);

    double operator()(double x, double p) const;

private:
    StateModel state_;
    double log_norm_ = 0.0; // photon-added: log <alpha|a^m a^+m|alpha>
    double inv_norm2_ = 0.0; // cat states: 1 / (2 +- 2 exp(-2|alpha|^2))
    double det_ = 0.0;       // gaussian: det(G + 1/2)
    std::optional<FockExpansion> expansion_;
};

// Husimi density in (x, p) measure: |<beta|psi>|^2 / (2 pi) for pure states,
// a normal density with covariance G + 1/2 for Gaussian states.
double husimi_pdf(const StateModel& s, double x, double p);

// Same density from a Fock expansion (independent route used for checks).
double husimi_pdf(const FockExpansion& e, double x, double p);

} // namespace mtlab
