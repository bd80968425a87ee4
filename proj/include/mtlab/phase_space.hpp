#pragma once

#include <array>
#include <cmath>

namespace mtlab {

// 2x2 real symmetric matrix in the (X, P) quadrature basis, hbar = 1.
// Used for the covariance matrix G and, with the same layout, for the
// second-moment matrix G2 and the Husimi covariance G_het.
struct CovarianceMatrix {
    double xx = 0.0;
    double xp = 0.0;
    double pp = 0.0;

    double trace() const { return xx + pp; }
    double det() const { return xx * pp - xp * xp; }

    bool is_positive_definite() const { return xx > 0.0 && pp > 0.0 && det() > 0.0; }

    // Heisenberg-Robertson-Schroedinger bound det G >= 1/4, with slack for
    // rounding.
    bool is_physical(double slack = 1e-10) const {
        return is_positive_definite() && det() >= 0.25 - slack;
    }

    static CovarianceMatrix identity(double scale = 1.0) { return {scale, 0.0, scale}; }

    friend CovarianceMatrix operator+(CovarianceMatrix a, const CovarianceMatrix& b) {
        return {a.xx + b.xx, a.xp + b.xp, a.pp + b.pp};
    }
    friend CovarianceMatrix operator-(CovarianceMatrix a, const CovarianceMatrix& b) {
        return {a.xx - b.xx, a.xp - b.xp, a.pp - b.pp};
    }
    friend CovarianceMatrix operator*(double s, CovarianceMatrix a) {
        return {s * a.xx, s * a.xp, s * a.pp};
    }
    friend bool operator==(const CovarianceMatrix&, const CovarianceMatrix&) = default;
};

struct FirstMoments {
    double x = 0.0;
    double p = 0.0;

    double norm_squared() const { return x * x + p * p; }
    friend bool operator==(const FirstMoments&, const FirstMoments&) = default;
};

// (y1, sqrt(2) y2, y3) for the symmetric matrix [[y1, y2], [y2, y3]], so that
// dot(vec(A), vec(B)) = Tr(A B).
struct SymmetricVec3 {
    std::array<double, 3> v{};

    double operator[](std::size_t i) const { return v[i]; }
    double& operator[](std::size_t i) { return v[i]; }
    double dot(const SymmetricVec3& o) const { return v[0] * o.v[0] + v[1] * o.v[1] + v[2] * o.v[2]; }
};

// Temperature mu >= 1, squeezing lambda >= 1, orientation phi.
struct GaussianShape {
    double mu = 1.0;
    double lambda = 1.0;
    double phi = 0.0;
};

struct SpectralDecomposition {
    double eig_lo = 0.0;
    double eig_hi = 0.0;
    double phi = 0.0; // (cos phi, sin phi) is the eig_lo eigenvector
};

SymmetricVec3 vec(const CovarianceMatrix& m);
CovarianceMatrix unvec(const SymmetricVec3& v);

double trace_product(const CovarianceMatrix& a, const CovarianceMatrix& b);

// R(phi) diag(mu / (2 lambda), mu lambda / 2) R(phi)^T.
CovarianceMatrix gaussian_cov_from_shape(const GaussianShape& s);

// G_het = G + 1/2.
CovarianceMatrix het_shift(const CovarianceMatrix& g);

// eig_lo <= eig_hi, phi in (-pi/2, pi/2]; phi = 0 when the eigenvalues tie.
SpectralDecomposition spectral(const CovarianceMatrix& g);

// R(phi) g R(phi)^T with R(phi) = [[cos, -sin], [sin, cos]].
CovarianceMatrix rotate(const CovarianceMatrix& g, double phi);
FirstMoments rotate(const FirstMoments& r, double phi);

// r r^T.
CovarianceMatrix outer(const FirstMoments& r);

// u_theta^T g u_theta with u_theta = (cos theta, sin theta).
inline double quadrature_variance(const CovarianceMatrix& g, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return c * c * g.xx + 2.0 * c * s * g.xp + s * s * g.pp;
}

} // namespace mtlab
