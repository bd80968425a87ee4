#pragma once

#include "mtlab/rng.hpp"
#include "mtlab/state_models.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mtlab {

struct HomodyneDataset {
    std::string state; // format_state() descriptor
    std::uint64_t seed = 0;
    std::vector<double> phases;               // strictly increasing in [0, pi)
    std::vector<std::vector<double>> samples; // samples[k] drawn at phases[k]

    std::size_t total() const;
};

struct HeterodyneDataset {
    std::string state;
    std::uint64_t seed = 0;
    std::vector<double> x;
    std::vector<double> p;

    std::size_t size() const { return x.size(); }
};

// theta_k = k pi / n_theta.
std::vector<double> equally_spaced_phases(int n_theta);
// N / n_theta per phase, remainder to the lowest phases.
std::vector<std::size_t> phase_allocation(std::size_t n_total, int n_theta);

// Vose alias table over non-negative weights.
class AliasTable {
public:
    AliasTable() = default;
    explicit AliasTable(std::span<const double> weights);

    std::size_t sample(CounterRng& rng) const;
    std::size_t size() const { return prob_.size(); }

private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

// Draws X_theta for one LO phase. Gaussian states use the exact transform;
// the other families use a piecewise-constant envelope on 8192 cells with
// per-cell squeeze bounds, evaluating the exact density only when the
// squeeze test is inconclusive.
class QuadratureSampler {
public:
    static constexpr int kCells = 8192;

    QuadratureSampler(const StateModel& s, double theta);

    double draw(CounterRng& rng) const;
    void fill(CounterRng& rng, std::span<double> out) const;

    // Envelope mass relative to the target density (>= 1).
    double envelope_ratio() const { return envelope_ratio_; }
    // Largest (density - envelope) / envelope over `probes` random points per
    // cell; non-positive when the envelope dominates. Zero for exact samplers.
    double max_envelope_violation(int probes, std::uint64_t seed) const;

private:
    bool gaussian_ = false;
    double mean_ = 0.0;
    double sd_ = 0.0;
    double lo_ = 0.0;
    double width_ = 0.0;
    std::vector<double> upper_;
    std::vector<double> lower_;
    AliasTable cells_;
    PhaseDensity density_;
    double envelope_ratio_ = 1.0;
};

// Draws Husimi-distributed points (x, p). Exact transforms for Gaussian,
// Fock and displaced Fock states (Gamma-distributed radius); a 512 x 512
// cell envelope with squeeze bounds for cat and photon-added states.
class HusimiSampler {
public:
    static constexpr int kCellsPerAxis = 512;

    explicit HusimiSampler(const StateModel& s);

    std::pair<double, double> draw(CounterRng& rng) const;
    void fill(CounterRng& rng, std::span<double> x, std::span<double> p) const;

    double envelope_ratio() const { return envelope_ratio_; }
    double max_envelope_violation(int probes, std::uint64_t seed) const;

private:
    enum class Kind { gaussian, radial, table };
    Kind kind_ = Kind::gaussian;
    HusimiDensity density_;
    double cx_ = 0.0, cp_ = 0.0;
    // Cholesky factor of G + 1/2 (gaussian).
    double l11_ = 0.0, l21_ = 0.0, l22_ = 0.0;
    int shape_ = 0; // radial: Gamma(shape + 1) for |beta|^2
    double x0_ = 0.0, p0_ = 0.0, hx_ = 0.0, hp_ = 0.0;
    std::vector<double> upper_;
    std::vector<double> lower_;
    AliasTable cells_;
    double envelope_ratio_ = 1.0;
};

// One QuadratureSampler per phase; phase k draws from substream
// derive_stream(seed, k).
class HomodyneSampler {
public:
    HomodyneSampler(const StateModel& s, int n_theta);

    int n_theta() const { return static_cast<int>(phases_.size()); }
    const std::vector<double>& phases() const { return phases_; }
    const QuadratureSampler& phase(int k) const { return samplers_[k]; }

    HomodyneDataset draw(std::size_t n_total, std::uint64_t seed) const;

private:
    std::string state_;
    std::vector<double> phases_;
    std::vector<QuadratureSampler> samplers_;
};

// Throws std::invalid_argument for n_theta < 3 or N < n_theta.
HomodyneDataset sample_homodyne(const StateModel& s, int n_theta, std::size_t n_total, std::uint64_t seed);
// Throws std::invalid_argument for N = 0.
HeterodyneDataset sample_heterodyne(const StateModel& s, std::size_t n_total, std::uint64_t seed);

// CSV with '#' metadata lines (state, N, seed) and a header row.
void write_csv(std::ostream& out, const HomodyneDataset& d);
void write_csv(std::ostream& out, const HeterodyneDataset& d);
HomodyneDataset read_homodyne_csv(std::istream& in);
HeterodyneDataset read_heterodyne_csv(std::istream& in);

} // namespace mtlab
