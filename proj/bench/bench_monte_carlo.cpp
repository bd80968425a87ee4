// Serial reference vs OpenMP Monte-Carlo kernel: wall time and bit identity.
#include "mtlab/monte_carlo.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

using namespace mtlab;

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool identical(const McReport& a, const McReport& b) {
    if (a.entries.size() != b.entries.size() || a.failed_trials != b.failed_trials) return false;
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        if (a.entries[i].scaled_mse != b.entries[i].scaled_mse || a.entries[i].std_error != b.entries[i].std_error)
            return false;
    return true;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo kernel benchmark"};
    std::size_t n = 100000;
    int trials = 64;
    int threads = omp_get_max_threads();
    app.add_option("--n", n, "samples per trial");
    app.add_option("--trials", trials, "trials per state")->check(CLI::PositiveNumber);
    app.add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    omp_set_num_threads(threads);

    const std::vector<StateModel> states = {
        make_vacuum(),
        GaussianState{{0.0, 0.0}, gaussian_cov_from_shape({1.0, 3.0, 0.0})},
        FockState{3},
        CatState{1.0, Parity::even},
        DisplacedFockState{1.0, 2},
        PhotonAddedState{0.8, 2},
    };

    std::printf("threads=%d n=%zu trials=%d\n", threads, n, trials);
    std::printf("%-66s %-4s %10s %10s %8s %s\n", "state", "mode", "serial_s", "omp_s", "speedup", "identical");
    bool all_same = true;
    for (const auto& s : states) {
        for (auto scheme : {Scheme::hom, Scheme::het}) {
            McConfig cfg;
            cfg.scheme = scheme;
            cfg.n = n;
            cfg.trials = trials;
            cfg.seed = 99;
            McReport serial, parallel;
            const double ts = seconds([&] { serial = run_monte_carlo_serial(s, cfg); });
            const double tp = seconds([&] { parallel = run_monte_carlo(s, cfg); });
            const bool same = identical(serial, parallel);
            all_same = all_same && same;
            std::printf("%-66s %-4s %10.3f %10.3f %8.2f %s\n", format_state(s).c_str(), to_string(scheme).c_str(), ts,
                        tp, ts / tp, same ? "yes" : "NO");
        }
    }
    return all_same ? 0 : 1;
}
