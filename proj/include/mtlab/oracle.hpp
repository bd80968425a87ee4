#pragma once

#include "mtlab/crb.hpp"
#include "mtlab/state_models.hpp"

#include <complex>

namespace mtlab::oracle {

struct OracleConfig {
    double grid_extent = 10.0; // half-width in units of the rms quadrature
    int nodes_1d = 2049;       // odd, Simpson
    double fd_step = 1e-3;
    int richardson_levels = 3;

    void validate() const; // throws std::invalid_argument
};

struct OracleValue {
    double value = 0.0;
    double error_estimate = 0.0;
};

// Integral of x^m against the Fock-expansion quadrature density by composite
// Simpson, doubling the nodes until successive values agree to 1e-10 of the
// absolute moment. NumericalError if the final estimate exceeds 1e-6.
OracleValue numeric_quadrature_moment(const StateModel& s, double theta, int m, const OracleConfig& cfg = {});

// Tensor-product Simpson of x^kx p^kp against the Husimi density.
OracleValue numeric_husimi_moment(const StateModel& s, int kx, int kp, const OracleConfig& cfg = {});

// <exp(z1 a^dagger + z2 a)> for independent complex z1, z2, from per-family
// closed forms. Quadrature MGF: z1 = k e^{i theta}/sqrt2, z2 = conj.
std::complex<double> symmetric_generating_function(const StateModel& s, std::complex<double> z1,
                                                   std::complex<double> z2);

// E[exp(k X_theta)] and E_Q[exp(u x + v p)].
double quadrature_mgf(const StateModel& s, double theta, double k);
double husimi_mgf(const StateModel& s, double u, double v);

// Moments by central differences of the generating functions with
// Richardson extrapolation over `richardson_levels` halvings of the step.
OracleValue cf_quadrature_moment(const StateModel& s, double theta, int m, const OracleConfig& cfg = {});
OracleValue cf_husimi_moment(const StateModel& s, int kx, int kp, const OracleConfig& cfg = {});

// Homodyne Fisher matrices by composite Simpson over theta in [0, pi],
// refined until entries change by less than 1e-13 relative.
ScaledFisher numeric_fisher(const StateModel& s, MomentOrder order);

} // namespace mtlab::oracle
