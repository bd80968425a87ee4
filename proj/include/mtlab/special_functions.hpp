#pragma once

#include <span>
#include <vector>

namespace mtlab {

// Confluent hypergeometric 1F1(a; b; z) for real b > 0. Ascending series for
// z >= 0; negative arguments go through Kummer's transformation.
double hyp1f1(double a, double b, double z);

// exp(-z) 1F1(a; b; z), finite for large z. When a - b is a non-negative
// integer this is the terminating Kummer polynomial, which has only positive
// terms for z >= 0.
double hyp1f1_scaled(double a, double b, double z);

// Laguerre polynomial L_n(x) by the three-term recurrence.
double laguerre(int n, double x);

// Normalized oscillator eigenfunctions psi_0..psi_{n_max}(x) with
// psi_0(x) = pi^{-1/4} exp(-x^2/2), i.e. vacuum quadrature variance 1/2.
void hermite_functions(double x, std::span<double> out);
std::vector<double> hermite_functions(int n_max, double x);

double log_factorial(int n);

} // namespace mtlab
