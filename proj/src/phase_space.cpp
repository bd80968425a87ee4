#include "mtlab/phase_space.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace mtlab {

SymmetricVec3 vec(const CovarianceMatrix& m) {
    return SymmetricVec3{{m.xx, std::numbers::sqrt2 * m.xp, m.pp}};
}

CovarianceMatrix unvec(const SymmetricVec3& v) {
    return {v[0], v[1] / std::numbers::sqrt2, v[2]};
}

double trace_product(const CovarianceMatrix& a, const CovarianceMatrix& b) {
    return a.xx * b.xx + 2.0 * a.xp * b.xp + a.pp * b.pp;
}

CovarianceMatrix rotate(const CovarianceMatrix& g, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    // R g R^T, expanded.
    return {c * c * g.xx - 2.0 * c * s * g.xp + s * s * g.pp,
            c * s * (g.xx - g.pp) + (c * c - s * s) * g.xp,
            s * s * g.xx + 2.0 * c * s * g.xp + c * c * g.pp};
}

FirstMoments rotate(const FirstMoments& r, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {c * r.x - s * r.p, s * r.x + c * r.p};
}

CovarianceMatrix outer(const FirstMoments& r) {
    return {r.x * r.x, r.x * r.p, r.p * r.p};
}

CovarianceMatrix gaussian_cov_from_shape(const GaussianShape& s) {
    if (!(s.mu >= 1.0) || !(s.lambda >= 1.0) || !std::isfinite(s.mu) || !std::isfinite(s.lambda) ||
        !std::isfinite(s.phi)) {
        throw std::invalid_argument("gaussian shape requires mu >= 1 and lambda >= 1 (got mu=" +
                                    std::to_string(s.mu) + ", lambda=" + std::to_string(s.lambda) + ")");
    }
    const CovarianceMatrix diag{s.mu / (2.0 * s.lambda), 0.0, s.mu * s.lambda / 2.0};
    return rotate(diag, s.phi);
}

CovarianceMatrix het_shift(const CovarianceMatrix& g) {
    return g + CovarianceMatrix::identity(0.5);
}

SpectralDecomposition spectral(const CovarianceMatrix& g) {
    const double mean = 0.5 * (g.xx + g.pp);
    const double half_diff = 0.5 * (g.xx - g.pp);
    const double radius = std::hypot(half_diff, g.xp);
    SpectralDecomposition out;
    out.eig_lo = mean - radius;
    out.eig_hi = mean + radius;
    if (radius <= 1e-15 * std::max(1.0, std::abs(mean))) {
        out.phi = 0.0;
        return out;
    }
    // Eigenvector of the larger eigenvalue sits at angle atan2(xp, half_diff)/2;
    // the smaller one is perpendicular to it.
    double phi = 0.5 * std::atan2(g.xp, half_diff) + std::numbers::pi / 2.0;
    while (phi > std::numbers::pi / 2.0) phi -= std::numbers::pi;
    while (phi <= -std::numbers::pi / 2.0) phi += std::numbers::pi;
    out.phi = phi;
    return out;
}

} // namespace mtlab
