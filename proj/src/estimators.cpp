#include "mtlab/estimators.hpp"

#include "mtlab/error.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mtlab {

std::size_t ProcessedMoments::total() const {
    std::size_t n = 0;
    for (std::size_t c : counts) n += c;
    return n;
}

std::array<double, 4> phase_moments(std::span<const double> xs) {
    if (xs.empty()) throw std::invalid_argument("empty phase bin");
    // Four independent accumulators per power keep the sums short.
    double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double x : xs) {
        const double x2 = x * x;
        s1 += x;
        s2 += x2;
        s3 += x2 * x;
        s4 += x2 * x2;
    }
    const double inv = 1.0 / static_cast<double>(xs.size());
    return {s1 * inv, s2 * inv, s3 * inv, s4 * inv};
}

ProcessedMoments processed_moments(const HomodyneDataset& d) {
    if (d.phases.empty()) throw std::invalid_argument("dataset has no phases");
    ProcessedMoments p;
    p.phases = d.phases;
    for (const auto& s : d.samples) {
        p.counts.push_back(s.size());
        p.m.push_back(phase_moments(s));
    }
    return p;
}

std::string to_string(EstimatorScheme s) {
    switch (s) {
    case EstimatorScheme::hom_linear: return "hom_linear";
    case EstimatorScheme::hom_optimal: return "hom_optimal";
    case EstimatorScheme::het: return "het";
    }
    return "?";
}

MomentEstimate linear_first_estimator(const ProcessedMoments& p) {
    const Eigen::Index n = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd design(n, 2);
    Eigen::VectorXd means(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        design(k, 0) = std::cos(p.phases[k]);
        design(k, 1) = std::sin(p.phases[k]);
        means(k) = p.m[k][0];
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
    if (cod.rank() < 2) throw NumericalError("linear estimator: design matrix is rank deficient");
    const Eigen::Vector2d r = cod.solve(means);
    MomentEstimate e;
    e.scheme = EstimatorScheme::hom_linear;
    e.order = MomentOrder::first;
    e.r_hat = {r(0), r(1)};
    e.n = p.total();
    return e;
}

MomentEstimate optimal_first_estimator(const ProcessedMoments& p, double var_floor) {
    Eigen::Matrix2d w = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    int excluded = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double var = p.variance(k);
        if (!(var > var_floor)) {
            ++excluded;
            continue;
        }
        const Eigen::Vector2d u(std::cos(p.phases[k]), std::sin(p.phases[k]));
        const double weight = static_cast<double>(p.counts[k]) / var;
        w += weight * u * u.transpose();
        b += weight * p.m[k][0] * u;
    }
    Eigen::FullPivLU<Eigen::Matrix2d> lu(w);
    if (excluded == static_cast<int>(p.size()) || lu.rank() < 2)
        throw NumericalError("optimal first-moment estimator: singular frame matrix");
    const Eigen::Vector2d r = lu.solve(b);
    MomentEstimate e;
    e.scheme = EstimatorScheme::hom_optimal;
    e.order = MomentOrder::first;
    e.r_hat = {r(0), r(1)};
    e.n = p.total();
    e.excluded_phases = excluded;
    return e;
}

MomentEstimate optimal_second_estimator(const ProcessedMoments& p, double var_floor) {
    Eigen::Matrix3d w = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    int excluded = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double var = p.second_variance(k);
        if (!(var > var_floor)) {
            ++excluded;
            continue;
        }
        const double c = std::cos(p.phases[k]), s = std::sin(p.phases[k]);
        const Eigen::Vector3d v(c * c, std::numbers::sqrt2 * c * s, s * s);
        const double weight = static_cast<double>(p.counts[k]) / var;
        w += weight * v * v.transpose();
        b += weight * p.m[k][1] * v;
    }
    Eigen::FullPivLU<Eigen::Matrix3d> lu(w);
    if (excluded == static_cast<int>(p.size()) || lu.rank() < 3)
        throw NumericalError("optimal second-moment estimator: singular frame matrix");
    const Eigen::Vector3d g = lu.solve(b);
    MomentEstimate e;
    e.scheme = EstimatorScheme::hom_optimal;
    e.order = MomentOrder::second;
    e.g2_hat = unvec(SymmetricVec3{{g(0), g(1), g(2)}});
    e.g2_het_hat = het_shift(e.g2_hat);
    e.n = p.total();
    e.excluded_phases = excluded;
    return e;
}

HeterodyneSums heterodyne_sums(const HeterodyneDataset& d) {
    HeterodyneSums s;
    for (std::size_t i = 0; i < d.size(); ++i) s.add(d.x[i], d.p[i]);
    return s;
}

MomentEstimate het_first_estimator(const HeterodyneSums& s) {
    if (s.n == 0) throw std::invalid_argument("heterodyne estimator needs at least one point");
    const double inv = 1.0 / static_cast<double>(s.n);
    MomentEstimate e;
    e.scheme = EstimatorScheme::het;
    e.order = MomentOrder::first;
    e.r_hat = {s.x * inv, s.p * inv};
    e.n = s.n;
    return e;
}

MomentEstimate het_second_estimator(const HeterodyneSums& s) {
    if (s.n == 0) throw std::invalid_argument("heterodyne estimator needs at least one point");
    const double inv = 1.0 / static_cast<double>(s.n);
    MomentEstimate e;
    e.scheme = EstimatorScheme::het;
    e.order = MomentOrder::second;
    e.g2_het_hat = {s.xx * inv, s.xp * inv, s.pp * inv};
    e.g2_hat = e.g2_het_hat - CovarianceMatrix::identity(0.5);
    e.n = s.n;
    return e;
}

MomentEstimate het_first_estimator(const HeterodyneDataset& d) {
    MomentEstimate e = het_first_estimator(heterodyne_sums(d));
    e.seed = d.seed;
    return e;
}

MomentEstimate het_second_estimator(const HeterodyneDataset& d) {
    MomentEstimate e = het_second_estimator(heterodyne_sums(d));
    e.seed = d.seed;
    return e;
}

double squared_error(const FirstMoments& est, const FirstMoments& truth) {
    const double dx = est.x - truth.x, dp = est.p - truth.p;
    return dx * dx + dp * dp;
}

double squared_error(const CovarianceMatrix& est, const CovarianceMatrix& truth) {
    const CovarianceMatrix d = est - truth;
    return d.xx * d.xx + 2.0 * d.xp * d.xp + d.pp * d.pp;
}

} // namespace mtlab
