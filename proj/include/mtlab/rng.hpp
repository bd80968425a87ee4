#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <array>
#include <utility>

namespace mtlab {

// SplitMix64 run in counter mode: output n of stream `key` is
// mix(key + (n + 1) * gamma). Streams are addressed by key, so independent
// workers never share state and results do not depend on scheduling.
inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kSplitMixGamma = 0x9e3779b97f4a7c15ULL;

// Key of substream `index` below `parent`: mix(parent ^ mix(index + gamma)).
inline constexpr std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index) {
    return splitmix64_mix(parent ^ splitmix64_mix(index + kSplitMixGamma));
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

    std::uint64_t next_u64() { return splitmix64_mix(key_ + (++counter_) * kSplitMixGamma); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1), safe for logarithms.
    double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    // Two independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair() {
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double t = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(t), r * std::sin(t)};
    }

    // Standard normal by the 128-layer ziggurat (Marsaglia-Tsang, with
    // Doornik's layer construction); one 64-bit draw per accepted value in
    // about 99% of calls.
    double normal();

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

namespace detail {

struct ZigguratTables {
    static constexpr int kLayers = 128;
    static constexpr double kR = 3.442619855899;
    static constexpr double kV = 9.91256303526217e-3;
    std::array<double, kLayers + 1> x{};
    std::array<double, kLayers> ratio{};

    ZigguratTables() {
        double f = std::exp(-0.5 * kR * kR);
        x[0] = kV / f;
        x[1] = kR;
        x[kLayers] = 0.0;
        for (int i = 2; i < kLayers; ++i) {
            x[i] = std::sqrt(-2.0 * std::log(kV / x[i - 1] + f));
            f = std::exp(-0.5 * x[i] * x[i]);
        }
        for (int i = 0; i < kLayers; ++i) ratio[i] = x[i + 1] / x[i];
    }
};

inline const ZigguratTables kZiggurat{};

} // namespace detail

inline double CounterRng::normal() {
    const auto& z = detail::kZiggurat;
    while (true) {
        const std::uint64_t bits = next_u64();
        const int i = static_cast<int>(bits & 127);
        const double u = 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
        if (std::abs(u) < z.ratio[i]) return u * z.x[i];
        if (i == 0) {
            // Tail beyond R.
            double x, y;
            do {
                x = std::log(uniform_open()) / detail::ZigguratTables::kR;
                y = std::log(uniform_open());
            } while (-2.0 * y < x * x);
            return u < 0.0 ? x - detail::ZigguratTables::kR : detail::ZigguratTables::kR - x;
        }
        const double x = u * z.x[i];
        const double f0 = std::exp(-0.5 * (z.x[i] * z.x[i] - x * x));
        const double f1 = std::exp(-0.5 * (z.x[i + 1] * z.x[i + 1] - x * x));
        if (f1 + uniform() * (f0 - f1) < 1.0) return x;
    }
}

} // namespace mtlab
