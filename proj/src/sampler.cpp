#include "mtlab/sampler.hpp"

#include "mtlab/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mtlab {

std::size_t HomodyneDataset::total() const {
    std::size_t n = 0;
    for (const auto& s : samples) n += s.size();
    return n;
}

std::vector<double> equally_spaced_phases(int n_theta) {
    if (n_theta < 1) throw std::invalid_argument("n_theta must be positive");
    std::vector<double> out(n_theta);
    for (int k = 0; k < n_theta; ++k) out[k] = std::numbers::pi * k / n_theta;
    return out;
}

std::vector<std::size_t> phase_allocation(std::size_t n_total, int n_theta) {
    if (n_theta < 1) throw std::invalid_argument("n_theta must be positive");
    std::vector<std::size_t> out(n_theta, n_total / n_theta);
    for (std::size_t k = 0; k < n_total % n_theta; ++k) ++out[k];
    return out;
}

AliasTable::AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::invalid_argument("alias table needs at least one weight");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("alias weights must be finite and >= 0");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("alias weights sum to zero");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
        scaled[i] = weights[i] * n / total;
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        prob_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if (scaled[l] < 1.0) {
            large.pop_back();
            small.push_back(l);
        }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0, alias_[i] = i;
    for (std::uint32_t i : small) prob_[i] = 1.0, alias_[i] = i;
}

std::size_t AliasTable::sample(CounterRng& rng) const {
    const std::uint64_t u = rng.next_u64();
    // High bits pick the column, low 53 bits the coin.
    const std::size_t col = static_cast<std::size_t>((u >> 32) * prob_.size() >> 32);
    const double coin = static_cast<double>(u & ((1ULL << 32) - 1)) * 0x1.0p-32;
    return coin < prob_[col] ? col : alias_[col];
}

namespace {

// Upper and lower bounds of a smooth function over a cell from its values on
// a sub-grid. The quarter-spread margin exceeds the curvature error of the
// sub-grid near extrema and the slope error elsewhere.
std::pair<double, double> cell_bounds(double vmin, double vmax) {
    const double margin = 0.25 * (vmax - vmin) + 1e-12 * vmax;
    return {vmax + margin + 1e-300, std::max(0.0, vmin - margin)};
}

} // namespace

QuadratureSampler::QuadratureSampler(const StateModel& s, double theta) : density_(s, theta) {
    const QuadratureMomentTable t = quadrature_moments(s, theta);
    if (std::holds_alternative<GaussianState>(s)) {
        gaussian_ = true;
        mean_ = t.m1;
        sd_ = std::sqrt(t.variance());
        return;
    }
    const double sd = std::sqrt(t.variance());
    const double half = 8.0 * sd;
    lo_ = t.m1 - half;
    width_ = 2.0 * half / kCells;
    constexpr int sub = 4;
    const int nodes = kCells * sub + 1;
    std::vector<double> f(nodes);
    for (int i = 0; i < nodes; ++i) f[i] = density_(lo_ + i * (width_ / sub));
    upper_.resize(kCells);
    lower_.resize(kCells);
    double envelope = 0.0, target = 0.0;
    for (int c = 0; c < kCells; ++c) {
        const auto [mn, mx] = std::minmax_element(f.begin() + c * sub, f.begin() + (c + 1) * sub + 1);
        std::tie(upper_[c], lower_[c]) = cell_bounds(*mn, *mx);
        envelope += upper_[c] * width_;
        for (int j = 0; j < sub; ++j) target += 0.5 * (f[c * sub + j] + f[c * sub + j + 1]) * (width_ / sub);
    }
    if (!(target > 0.0) || !std::isfinite(envelope))
        throw NumericalError("quadrature envelope construction failed for " + format_state(s));
    envelope_ratio_ = envelope / target;
    cells_ = AliasTable(upper_);
}

double QuadratureSampler::draw(CounterRng& rng) const {
    if (gaussian_) return mean_ + sd_ * rng.normal();
    while (true) {
        const std::size_t c = cells_.sample(rng);
        const double x = lo_ + (c + rng.uniform()) * width_;
        const double y = rng.uniform() * upper_[c];
        if (y < lower_[c] || y < density_(x)) return x;
    }
}

void QuadratureSampler::fill(CounterRng& rng, std::span<double> out) const {
    if (gaussian_) {
        for (double& v : out) v = mean_ + sd_ * rng.normal();
        return;
    }
    for (double& v : out) v = draw(rng);
}

double QuadratureSampler::max_envelope_violation(int probes, std::uint64_t seed) const {
    if (gaussian_) return 0.0;
    CounterRng rng(seed);
    double worst = -INFINITY;
    for (int c = 0; c < kCells; ++c)
        for (int i = 0; i < probes; ++i) {
            const double x = lo_ + (c + rng.uniform()) * width_;
            worst = std::max(worst, (density_(x) - upper_[c]) / upper_[c]);
        }
    return worst;
}

HusimiSampler::HusimiSampler(const StateModel& s) : density_(s) {
    if (const auto* g = std::get_if<GaussianState>(&s)) {
        kind_ = Kind::gaussian;
        const CovarianceMatrix c = het_shift(g->g);
        cx_ = g->r0.x;
        cp_ = g->r0.p;
        l11_ = std::sqrt(c.xx);
        l21_ = c.xp / l11_;
        l22_ = std::sqrt(c.pp - l21_ * l21_);
        return;
    }
    if (const auto* f = std::get_if<FockState>(&s)) {
        kind_ = Kind::radial;
        shape_ = f->n;
        return;
    }
    if (const auto* d = std::get_if<DisplacedFockState>(&s)) {
        kind_ = Kind::radial;
        shape_ = d->m;
        cx_ = std::numbers::sqrt2 * d->alpha0.real();
        cp_ = std::numbers::sqrt2 * d->alpha0.imag();
        return;
    }
    kind_ = Kind::table;
    const HusimiMomentSet h = husimi_moments(s);
    const int n = kCellsPerAxis;
    const double half_x = 8.0 * std::sqrt(h.var_x());
    const double half_p = 8.0 * std::sqrt(h.var_p());
    x0_ = h.mx - half_x;
    p0_ = h.mp - half_p;
    hx_ = 2.0 * half_x / n;
    hp_ = 2.0 * half_p / n;
    constexpr int sub = 4;
    const int nodes = n * sub + 1;
    std::vector<double> f(static_cast<std::size_t>(nodes) * nodes);
    for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j)
            f[static_cast<std::size_t>(i) * nodes + j] = density_(x0_ + i * (hx_ / sub), p0_ + j * (hp_ / sub));
    upper_.resize(static_cast<std::size_t>(n) * n);
    lower_.resize(upper_.size());
    double envelope = 0.0, target = 0.0;
    const double area = hx_ * hp_;
    for (int ci = 0; ci < n; ++ci)
        for (int cj = 0; cj < n; ++cj) {
            double mn = INFINITY, mx = 0.0, avg = 0.0;
            for (int a = 0; a <= sub; ++a)
                for (int b = 0; b <= sub; ++b) {
                    const double v = f[static_cast<std::size_t>(ci * sub + a) * nodes + cj * sub + b];
                    mn = std::min(mn, v);
                    mx = std::max(mx, v);
                    avg += v;
                }
            const std::size_t c = static_cast<std::size_t>(ci) * n + cj;
            std::tie(upper_[c], lower_[c]) = cell_bounds(mn, mx);
            envelope += upper_[c] * area;
            target += avg / ((sub + 1) * (sub + 1)) * area;
        }
    if (!(target > 0.0) || !std::isfinite(envelope))
        throw NumericalError("Husimi envelope construction failed for " + format_state(s));
    envelope_ratio_ = envelope / target;
    cells_ = AliasTable(upper_);
}

std::pair<double, double> HusimiSampler::draw(CounterRng& rng) const {
    switch (kind_) {
    case Kind::gaussian: {
        const double a = rng.normal();
        const double b = rng.normal();
        return {cx_ + l11_ * a, cp_ + l21_ * a + l22_ * b};
    }
    case Kind::radial: {
        // (x^2 + p^2)/2 ~ Gamma(shape + 1): a standard normal pair supplies the
        // direction and one Exp(1) term, the other `shape` terms come from
        // -log of a product of uniforms.
        const double a = rng.normal();
        const double b = rng.normal();
        if (shape_ == 0) return {cx_ + a, cp_ + b};
        double prod = 1.0;
        double log_sum = 0.0;
        for (int i = 0; i < shape_; ++i) {
            prod *= rng.uniform_open();
            if (prod < 1e-280) {
                log_sum += std::log(prod);
                prod = 1.0;
            }
        }
        const double extra = -2.0 * (log_sum + std::log(prod));
        const double r2 = a * a + b * b;
        const double scale = std::sqrt(1.0 + extra / r2);
        return {cx_ + a * scale, cp_ + b * scale};
    }
    case Kind::table:
        break;
    }
    const std::size_t n = kCellsPerAxis;
    while (true) {
        const std::size_t c = cells_.sample(rng);
        const double x = x0_ + (c / n + rng.uniform()) * hx_;
        const double p = p0_ + (c % n + rng.uniform()) * hp_;
        const double y = rng.uniform() * upper_[c];
        if (y < lower_[c] || y < density_(x, p)) return {x, p};
    }
}

double HusimiSampler::max_envelope_violation(int probes, std::uint64_t seed) const {
    if (kind_ != Kind::table) return 0.0;
    CounterRng rng(seed);
    const std::size_t n = kCellsPerAxis;
    double worst = -INFINITY;
    for (std::size_t c = 0; c < upper_.size(); ++c)
        for (int i = 0; i < probes; ++i) {
            const double x = x0_ + (c / n + rng.uniform()) * hx_;
            const double p = p0_ + (c % n + rng.uniform()) * hp_;
            worst = std::max(worst, (density_(x, p) - upper_[c]) / upper_[c]);
        }
    return worst;
}

void HusimiSampler::fill(CounterRng& rng, std::span<double> x, std::span<double> p) const {
    if (x.size() != p.size()) throw std::invalid_argument("fill: x and p sizes differ");
    for (std::size_t i = 0; i < x.size(); ++i) std::tie(x[i], p[i]) = draw(rng);
}

HomodyneSampler::HomodyneSampler(const StateModel& s, int n_theta)
    : state_(format_state(s)), phases_(equally_spaced_phases(n_theta)) {
    samplers_.reserve(n_theta);
    for (double th : phases_) samplers_.emplace_back(s, th);
}

HomodyneDataset HomodyneSampler::draw(std::size_t n_total, std::uint64_t seed) const {
    HomodyneDataset d;
    d.state = state_;
    d.seed = seed;
    d.phases = phases_;
    const auto counts = phase_allocation(n_total, n_theta());
    d.samples.resize(phases_.size());
    for (std::size_t k = 0; k < phases_.size(); ++k) {
        CounterRng rng(derive_stream(seed, k));
        d.samples[k].resize(counts[k]);
        samplers_[k].fill(rng, d.samples[k]);
    }
    return d;
}

HomodyneDataset sample_homodyne(const StateModel& s, int n_theta, std::size_t n_total, std::uint64_t seed) {
    if (n_theta < 3) throw std::invalid_argument("sample_homodyne: n_theta must be >= 3");
    if (n_total < static_cast<std::size_t>(n_theta))
        throw std::invalid_argument("sample_homodyne: N must be >= n_theta");
    return HomodyneSampler(s, n_theta).draw(n_total, seed);
}

HeterodyneDataset sample_heterodyne(const StateModel& s, std::size_t n_total, std::uint64_t seed) {
    if (n_total == 0) throw std::invalid_argument("sample_heterodyne: N must be >= 1");
    HeterodyneDataset d;
    d.state = format_state(s);
    d.seed = seed;
    d.x.resize(n_total);
    d.p.resize(n_total);
    CounterRng rng(derive_stream(seed, 0));
    HusimiSampler(s).fill(rng, d.x, d.p);
    return d;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvMeta {
    std::string state;
    std::uint64_t seed = 0;
    std::size_t n = 0;
};

// Reads '#' metadata lines and the header; returns the header columns.
std::string read_preamble(std::istream& in, CsvMeta& meta) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] != '#') return line;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        const std::string value = line.substr(eq + 1);
        if (key == "state") meta.state = value;
        else if (key == "seed") meta.seed = std::stoull(value);
        else if (key == "N") meta.n = std::stoull(value);
    }
    throw ConfigError("CSV dataset has no header row");
}

std::pair<double, double> parse_pair(const std::string& line, std::size_t row) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("CSV row " + std::to_string(row) + " has one column");
    try {
        return {std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError("CSV row " + std::to_string(row) + " is not numeric: '" + line + "'");
    }
}

} // namespace

void write_csv(std::ostream& out, const HomodyneDataset& d) {
    out << "# state=" << d.state << "\n# N=" << d.total() << "\n# seed=" << d.seed << "\ntheta,x\n";
    for (std::size_t k = 0; k < d.phases.size(); ++k) {
        const std::string th = num(d.phases[k]);
        for (double v : d.samples[k]) out << th << ',' << num(v) << '\n';
    }
}

void write_csv(std::ostream& out, const HeterodyneDataset& d) {
    out << "# state=" << d.state << "\n# N=" << d.size() << "\n# seed=" << d.seed << "\nx,p\n";
    for (std::size_t i = 0; i < d.size(); ++i) out << num(d.x[i]) << ',' << num(d.p[i]) << '\n';
}

HomodyneDataset read_homodyne_csv(std::istream& in) {
    CsvMeta meta;
    if (read_preamble(in, meta) != "theta,x") throw ConfigError("homodyne CSV header must be 'theta,x'");
    HomodyneDataset d;
    d.state = meta.state;
    d.seed = meta.seed;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto [th, x] = parse_pair(line, ++row);
        if (d.phases.empty() || th != d.phases.back()) {
            if (!d.phases.empty() && th < d.phases.back()) throw ConfigError("homodyne CSV phases must increase");
            d.phases.push_back(th);
            d.samples.emplace_back();
        }
        d.samples.back().push_back(x);
    }
    if (meta.n != 0 && meta.n != d.total()) throw ConfigError("homodyne CSV row count differs from '# N='");
    return d;
}

HeterodyneDataset read_heterodyne_csv(std::istream& in) {
    CsvMeta meta;
    if (read_preamble(in, meta) != "x,p") throw ConfigError("heterodyne CSV header must be 'x,p'");
    HeterodyneDataset d;
    d.state = meta.state;
    d.seed = meta.seed;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto [x, p] = parse_pair(line, ++row);
        d.x.push_back(x);
        d.p.push_back(p);
    }
    if (meta.n != 0 && meta.n != d.size()) throw ConfigError("heterodyne CSV row count differs from '# N='");
    return d;
}

} // namespace mtlab
