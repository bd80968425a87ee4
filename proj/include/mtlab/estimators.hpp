#pragma once

#include "mtlab/crb.hpp"
#include "mtlab/phase_space.hpp"
#include "mtlab/sampler.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mtlab {

constexpr double kDefaultVarianceFloor = 1e-9;

// Per-phase sample averages of x^1 .. x^4, normalized by the phase count N_k.
struct ProcessedMoments {
    std::vector<double> phases;
    std::vector<std::size_t> counts;
    std::vector<std::array<double, 4>> m; // m[k][j] = (1/N_k) sum x^(j+1)

    std::size_t size() const { return phases.size(); }
    std::size_t total() const;
    double variance(std::size_t k) const { return m[k][1] - m[k][0] * m[k][0]; }
    double second_variance(std::size_t k) const { return m[k][3] - m[k][1] * m[k][1]; }
};

// Averages of x, x^2, x^3, x^4 over one phase bin. Throws for an empty bin.
std::array<double, 4> phase_moments(std::span<const double> xs);
ProcessedMoments processed_moments(const HomodyneDataset& d);

enum class EstimatorScheme { hom_linear, hom_optimal, het };
std::string to_string(EstimatorScheme s);

struct MomentEstimate {
    EstimatorScheme scheme = EstimatorScheme::hom_optimal;
    MomentOrder order = MomentOrder::first;
    FirstMoments r_hat;
    CovarianceMatrix g2_hat;     // second order: estimate of G2
    CovarianceMatrix g2_het_hat; // heterodyne second order: estimate of G2 + 1/2
    std::size_t n = 0;
    std::uint64_t seed = 0;
    int excluded_phases = 0; // phases dropped by the variance floor
};

// Pseudoinverse of the design matrix with rows u_k^T applied to the per-phase
// means. Throws NumericalError for fewer than two distinct directions.
MomentEstimate linear_first_estimator(const ProcessedMoments& p);

// Inverse-variance weighted estimators with plug-in variances. Phases whose
// variance estimate is below var_floor are excluded; NumericalError when the
// remaining frame matrix is singular.
MomentEstimate optimal_first_estimator(const ProcessedMoments& p, double var_floor = kDefaultVarianceFloor);
MomentEstimate optimal_second_estimator(const ProcessedMoments& p, double var_floor = kDefaultVarianceFloor);

// Running sums of x, p, x^2, xp, p^2 over heterodyne outcomes.
struct HeterodyneSums {
    std::size_t n = 0;
    double x = 0.0, p = 0.0, xx = 0.0, xp = 0.0, pp = 0.0;

    void add(double xv, double pv) {
        ++n;
        x += xv;
        p += pv;
        xx += xv * xv;
        xp += xv * pv;
        pp += pv * pv;
    }
};

HeterodyneSums heterodyne_sums(const HeterodyneDataset& d);
MomentEstimate het_first_estimator(const HeterodyneSums& s);
MomentEstimate het_second_estimator(const HeterodyneSums& s);
MomentEstimate het_first_estimator(const HeterodyneDataset& d);
MomentEstimate het_second_estimator(const HeterodyneDataset& d);

// Squared errors in the coordinates of the sCRBs: |r_hat - r|^2 and
// |vec(G2_hat - G2)|^2 (off-diagonal counted twice).
double squared_error(const FirstMoments& est, const FirstMoments& truth);
double squared_error(const CovarianceMatrix& est, const CovarianceMatrix& truth);

} // namespace mtlab
