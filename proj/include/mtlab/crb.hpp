#pragma once

#include "mtlab/state_models.hpp"

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace mtlab {

enum class MomentOrder { first, second };
enum class FisherMethod { quadrature, closed_form };

std::string to_string(FisherMethod m);

// Scaled homodyne Fisher matrix: 2x2 over (x, p) for the first order, 3x3 over
// vec(G2) = (<X^2>, sqrt2 <{X,P}>/2, <P^2>) for the second order.
struct ScaledFisher {
    MomentOrder order = MomentOrder::first;
    FisherMethod method = FisherMethod::closed_form;
    Eigen::MatrixXd matrix;

    double trace_inverse() const;
};

// Absolute tolerance of the adaptive theta quadrature.
constexpr double kFisherQuadratureTol = 1e-12;

ScaledFisher fisher_hom_first(const StateModel& s, FisherMethod method = FisherMethod::closed_form);

// Closed forms exist for Gaussian, Fock, even/odd coherent and displaced Fock
// states; photon-added states throw std::invalid_argument for closed_form.
ScaledFisher fisher_hom_second(const StateModel& s, FisherMethod method);
bool has_closed_form_hom_second(const StateModel& s);

// Tr G + 2 sqrt(det G).
double scrb_hom_first(const StateModel& s);
// Tr G + 1.
double scrb_het_first(const StateModel& s);
// Tr F^-1 of the second-order homodyne Fisher matrix. Without an explicit
// method the closed form is used when available.
double scrb_hom_second(const StateModel& s, std::optional<FisherMethod> method = std::nullopt);
// var_Q(x^2) + var_Q(p^2) + 2 var_Q(xp) from the Husimi moments.
double scrb_het_second(const StateModel& s);

// Per-family closed expressions, empty when the family has none. Used as
// cross-checks of the generic routes above.
std::optional<double> scrb_het_first_family(const StateModel& s);
std::optional<double> scrb_hom_second_family(const StateModel& s);
std::optional<double> scrb_het_second_family(const StateModel& s);

double gamma1(const StateModel& s);
double gamma2(const StateModel& s);

struct CrbReport {
    double h1_hom = 0.0;
    double h1_het = 0.0;
    double h2_hom = 0.0;
    double h2_het = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    FisherMethod h1_hom_method = FisherMethod::closed_form;
    FisherMethod h1_het_method = FisherMethod::closed_form;
    FisherMethod h2_hom_method = FisherMethod::closed_form;
    FisherMethod h2_het_method = FisherMethod::closed_form;
};

CrbReport crb_report(const StateModel& s, std::optional<FisherMethod> h2_hom_method = std::nullopt);

// Families with a free displacement magnitude alpha0 >= 0 (real).
enum class FreeFamily { coherent, even_coherent, odd_coherent, displaced_fock, photon_added };

FreeFamily parse_free_family(const std::string& name);
std::string to_string(FreeFamily f);
StateModel make_free_state(FreeFamily f, double alpha0, int m);

struct Crossover {
    bool always_below_unity = false;
    double alpha0 = 0.0;
    double h2 = 0.0; // common value of both second-moment sCRBs at the crossover
};

// First root of gamma2(alpha0) = 1 in [lo, hi], refined by bisection to x_tol.
// Throws NumericalError when gamma2 never crosses unity in the bracket.
Crossover find_crossover(FreeFamily f, int m, double lo = 0.0, double hi = 20.0, double x_tol = 1e-9);

struct Gamma2Minimum {
    double alpha0 = 0.0;
    double gamma2 = 0.0;
};

double default_minimum_bracket(int m);
Gamma2Minimum minimize_gamma2(FreeFamily f, int m, std::optional<double> hi = std::nullopt,
                              double x_tol = 1e-9);

} // namespace mtlab
