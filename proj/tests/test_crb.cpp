#include "mtlab/crb.hpp"
#include "mtlab/error.hpp"
#include "mtlab/numerics.hpp"
#include "mtlab/oracle.hpp"
#include "mtlab/special_functions.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mtlab;
using doctest::Approx;

namespace {

void check_matrix(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double rel) {
    REQUIRE(a.rows() == b.rows());
    REQUIRE(a.cols() == b.cols());
    const double scale = b.cwiseAbs().maxCoeff();
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) CHECK(std::abs(a(i, j) - b(i, j)) <= rel * scale);
}

StateModel random_state(std::mt19937_64& rng, int family) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::complex<double> a = std::polar(2.0 * u(rng), 2.0 * std::numbers::pi * u(rng));
    switch (family % 6) {
    case 0:
        return GaussianState{{2 * u(rng) - 1, 2 * u(rng) - 1},
                             gaussian_cov_from_shape({1.0 + 4 * u(rng), 1.0 + 3 * u(rng), 3 * u(rng)})};
    case 1:
        return FockState{static_cast<int>(10 * u(rng))};
    case 2:
        return CatState{a, Parity::even};
    case 3:
        return CatState{a, Parity::odd};
    case 4:
        return DisplacedFockState{a, static_cast<int>(5 * u(rng))};
    default:
        return PhotonAddedState{a, static_cast<int>(5 * u(rng))};
    }
}

StateModel rotated(const StateModel& s, double phi) {
    const std::complex<double> ph = std::polar(1.0, phi);
    return std::visit(
        [&](const auto& v) -> StateModel {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, GaussianState>) return GaussianState{rotate(v.r0, phi), rotate(v.g, phi)};
            else if constexpr (std::is_same_v<T, FockState>) return v;
            else {
                T w = v;
                w.alpha0 = v.alpha0 * ph;
                return w;
            }
        },
        s);
}

} // namespace

TEST_CASE("first-moment homodyne Fisher matrix") {
    check_matrix(fisher_hom_first(make_vacuum()).matrix, Eigen::Matrix2d::Identity(), 1e-14);
    for (int n : {1, 4}) {
        check_matrix(fisher_hom_first(FockState{n}).matrix, Eigen::Matrix2d::Identity() / (2 * n + 1.0), 1e-14);
        check_matrix(fisher_hom_first(FockState{n}, FisherMethod::quadrature).matrix,
                     Eigen::Matrix2d::Identity() / (2 * n + 1.0), 1e-12);
    }
    const StateModel sq = GaussianState{{0.0, 0.0}, {0.25, 0.0, 1.0}};
    CHECK(fisher_hom_first(sq).trace_inverse() == Approx(9.0 / 4));
    CHECK(fisher_hom_first(sq, FisherMethod::quadrature).trace_inverse() == Approx(9.0 / 4).epsilon(1e-11));
    CHECK(scrb_hom_first(sq) == Approx(9.0 / 4));
}

TEST_CASE("first-moment sCRBs") {
    CHECK(scrb_hom_first(make_vacuum()) == Approx(2.0));
    CHECK(scrb_het_first(make_vacuum()) == Approx(2.0));
    for (int n = 0; n <= 20; ++n) {
        CHECK(scrb_hom_first(FockState{n}) == Approx(2.0 * (2 * n + 1)));
        CHECK(scrb_het_first(FockState{n}) == Approx(2.0 * (n + 1)));
    }
    for (double a0 : {0.3, 1.0, 1.7}) {
        const double a = a0 * a0;
        const double b = a * std::tanh(a) + 0.5;
        CHECK(scrb_hom_first(CatState{a0, Parity::even}) == Approx(2 * (b + std::sqrt(b * b - a * a))));
    }
    for (int m : {0, 1, 3})
        for (double a0 : {0.0, 0.5, 1.4}) {
            const double x = a0 * a0;
            const double f11 = hyp1f1(m + 1, 1, x), f22 = hyp1f1(m + 2, 2, x), f33 = hyp1f1(m + 3, 3, x);
            const double a = -x * (m + 1) / (2 * f11 * f11) * (2 * (m + 1) * f22 * f22 - (m + 2) * f11 * f33);
            CHECK(scrb_het_first(PhotonAddedState{a0, m}) == Approx(2 * (a + (m + 1) * f22 / f11)));
        }
}

TEST_CASE("first-moment ratio") {
    CHECK(gamma1(FockState{1}) == Approx(2.0 / 3));
    for (int n = 0; n < 10; ++n) CHECK(gamma1(FockState{n}) == Approx((n + 1.0) / (2 * n + 1)));
    CHECK(gamma1(make_coherent({0.7, -0.3})) == Approx(1.0));
    CHECK(gamma1(GaussianState{{0.4, 0.1}, {0.125, 0.0, 2.0}}) == Approx(1.0));
    CHECK(gamma1(GaussianState{{0.0, 0.0}, CovarianceMatrix::identity(2.0)}) == Approx(5.0 / 8));

    const Minimum even = global_minimize_1d([](double a) { return gamma1(CatState{a, Parity::even}); }, 0.0, 4.0,
                                            800, 1e-10);
    CHECK(even.value == Approx(0.7577).epsilon(2e-3));
    CHECK(even.x == Approx(1.715).epsilon(2e-3));
}

TEST_CASE("gamma1 never exceeds one") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 500; ++i) {
        const StateModel s = random_state(rng, i);
        CHECK(gamma1(s) <= 1.0 + 1e-12);
    }
}

TEST_CASE("second-moment Fisher matrix of Fock states") {
    for (int n : {0, 1, 5}) {
        Eigen::Matrix3d expected;
        expected << 3, 0, 1, 0, 2, 0, 1, 0, 3;
        expected /= 4.0 * (n * n + n + 1);
        check_matrix(fisher_hom_second(FockState{n}, FisherMethod::closed_form).matrix, expected, 1e-14);
        check_matrix(fisher_hom_second(FockState{n}, FisherMethod::quadrature).matrix, expected, 1e-12);
        CHECK(scrb_hom_second(FockState{n}) == Approx(5.0 * (n * n + n + 1)));
    }
}

TEST_CASE("second-moment bounds of a central thermal state") {
    const double mu = 3.0;
    const StateModel s = GaussianState{{0.0, 0.0}, CovarianceMatrix::identity(mu / 2)};
    for (double theta : {0.0, 1.0, 2.0})
        CHECK(quadrature_moments(s, theta).second_moment_variance() == Approx(mu * mu / 2));
    CHECK(scrb_hom_second(s) == Approx(5 * mu * mu));
    CHECK(scrb_het_second(s) == Approx(1.5 * (mu + 1) * (mu + 1)));
    CHECK(gamma2(s) == Approx(0.3 * (mu + 1) * (mu + 1) / (mu * mu)));
}

TEST_CASE("noncentral Gaussian closed form equals theta quadrature") {
    const StateModel s = GaussianState{{0.3, -0.2}, {0.6, 0.0, 0.5}};
    check_matrix(fisher_hom_second(s, FisherMethod::closed_form).matrix,
                 fisher_hom_second(s, FisherMethod::quadrature).matrix, 1e-10);
    check_matrix(fisher_hom_second(s, FisherMethod::closed_form).matrix,
                 oracle::numeric_fisher(s, MomentOrder::second).matrix, 1e-10);
    // Degenerate branches: centred states and isotropic G.
    for (const StateModel& t : {StateModel{GaussianState{{0.0, 0.0}, {0.7, 0.2, 0.5}}},
                                StateModel{GaussianState{{1.0, 0.5}, {0.8, 0.0, 0.8}}},
                                StateModel{GaussianState{{0.0, 0.0}, {0.5, 0.0, 0.5}}}})
        check_matrix(fisher_hom_second(t, FisherMethod::closed_form).matrix,
                     fisher_hom_second(t, FisherMethod::quadrature).matrix, 1e-10);
}

TEST_CASE("single-factor closed forms equal theta quadrature") {
    const std::vector<StateModel> states = {CatState{{0.8, 0.3}, Parity::even}, CatState{{1.3, 0.0}, Parity::odd},
                                            DisplacedFockState{{0.4, -0.9}, 2}, FockState{3}};
    for (const auto& s : states) {
        check_matrix(fisher_hom_second(s, FisherMethod::closed_form).matrix,
                     oracle::numeric_fisher(s, MomentOrder::second).matrix, 1e-10);
        check_matrix(fisher_hom_first(s, FisherMethod::closed_form).matrix,
                     oracle::numeric_fisher(s, MomentOrder::first).matrix, 1e-10);
    }
    CHECK_FALSE(has_closed_form_hom_second(PhotonAddedState{{0.5, 0.0}, 1}));
    CHECK_THROWS_AS(fisher_hom_second(PhotonAddedState{{0.5, 0.0}, 1}, FisherMethod::closed_form),
                    std::invalid_argument);
}

TEST_CASE("homodyne second-moment sCRB examples") {
    CHECK(scrb_hom_second(FockState{1}) == Approx(15.0));
    const double a0 = std::sqrt(5.0 / 32);
    CHECK(scrb_hom_second(make_coherent({a0, 0.0})) == Approx(63.0 / 8));
    // Small-amplitude expansion 5(m^2+m+1) + 10 a^2 (m+1)(m+2) = 15.15; the exact value is slightly lower.
    const double pa = scrb_hom_second(PhotonAddedState{0.05, 1});
    CHECK(pa == Approx(15.15).epsilon(2e-4));
    CHECK(pa == Approx(oracle::numeric_fisher(PhotonAddedState{0.05, 1}, MomentOrder::second).trace_inverse())
                    .epsilon(1e-10));
    CHECK(scrb_hom_second(GaussianState{{0.0, 0.0}, {0.5, 0.0, 0.5}}) == Approx(5.0));
}

TEST_CASE("heterodyne second-moment sCRB examples") {
    CHECK(scrb_het_second(FockState{2}) == Approx(30.0));
    CHECK(scrb_het_second(make_vacuum()) == Approx(6.0));
    for (int n = 0; n <= 50; ++n) CHECK(scrb_het_second(FockState{n}) == Approx(2.0 * (n + 1) * (n + 3)));

    // Displaced Fock m=1, alpha0=1: 2(m+1)(m+3+6|alpha0|^2) = 40, cross-checked by
    // 2-D integration of the Husimi density.
    const StateModel df = DisplacedFockState{{1.0, 0.0}, 1};
    CHECK(scrb_het_second(df) == Approx(40.0));
    auto q = [&](int kx, int kp) { return oracle::numeric_husimi_moment(df, kx, kp).value; };
    const double numeric = (q(4, 0) - q(2, 0) * q(2, 0)) + (q(0, 4) - q(0, 2) * q(0, 2)) + 2 * (q(2, 2) - q(1, 1) * q(1, 1));
    CHECK(numeric == Approx(40.0).epsilon(1e-9));

    CHECK(scrb_het_second(make_coherent({1.0, 0.0})) == Approx(2.0 * (3 + 6)));
}

TEST_CASE("family closed forms agree with the generic routes") {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 120; ++i) {
        const StateModel s = random_state(rng, i);
        if (auto v = scrb_het_first_family(s)) CHECK(*v == Approx(scrb_het_first(s)).epsilon(1e-10));
        if (auto v = scrb_het_second_family(s)) CHECK(*v == Approx(scrb_het_second(s)).epsilon(1e-9));
        if (auto v = scrb_hom_second_family(s))
            CHECK(*v == Approx(scrb_hom_second(s, FisherMethod::quadrature)).epsilon(1e-9));
    }
}

TEST_CASE("bounds are invariant under phase-space rotation") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 60; ++i) {
        const StateModel s = random_state(rng, i);
        const StateModel r = rotated(s, u(rng));
        const CrbReport a = crb_report(s), b = crb_report(r);
        CHECK(a.h1_hom == Approx(b.h1_hom).epsilon(1e-9));
        CHECK(a.h1_het == Approx(b.h1_het).epsilon(1e-9));
        CHECK(a.h2_hom == Approx(b.h2_hom).epsilon(1e-9));
        CHECK(a.h2_het == Approx(b.h2_het).epsilon(1e-9));
    }
}

TEST_CASE("second-moment ratio") {
    CHECK(gamma2(make_vacuum()) == Approx(6.0 / 5));
    CHECK(gamma2(FockState{1}) == Approx(16.0 / 15));
    CHECK(gamma2(FockState{10000}) == Approx(0.4).epsilon(1e-3));
    for (int n = 0; n < 30; ++n) CHECK(gamma2(FockState{n + 1}) < gamma2(FockState{n}));
}

TEST_CASE("crossovers") {
    const Crossover c = find_crossover(FreeFamily::coherent, 0);
    CHECK_FALSE(c.always_below_unity);
    CHECK(c.alpha0 == Approx(std::sqrt(5.0 / 32)).epsilon(1e-8));
    CHECK(c.h2 == Approx(63.0 / 8).epsilon(1e-8));

    CHECK(find_crossover(FreeFamily::even_coherent, 0).alpha0 == Approx(0.693).epsilon(1e-3));
    CHECK(find_crossover(FreeFamily::odd_coherent, 0).alpha0 == Approx(1.128).epsilon(1e-3));
    CHECK(find_crossover(FreeFamily::displaced_fock, 1).alpha0 ==
          Approx(0.5 * std::sqrt(19.0 / 3 - 2 * std::sqrt(87.0) / 3)).epsilon(1e-8));
    CHECK(find_crossover(FreeFamily::photon_added, 1).alpha0 == Approx(0.2).epsilon(1e-2));
    for (int m : {2, 3, 10}) CHECK(find_crossover(FreeFamily::displaced_fock, m).always_below_unity);
    CHECK(find_crossover(FreeFamily::photon_added, 2).always_below_unity);
    CHECK_THROWS_AS(find_crossover(FreeFamily::even_coherent, 0, 0.0, 0.5), NumericalError);
}

TEST_CASE("gamma2 minima") {
    const auto even = minimize_gamma2(FreeFamily::even_coherent, 0);
    CHECK(even.gamma2 == Approx(0.77096).epsilon(1e-5));
    CHECK(even.alpha0 == Approx(1.148).epsilon(1e-3));
    const auto odd = minimize_gamma2(FreeFamily::odd_coherent, 0);
    CHECK(odd.gamma2 == Approx(0.86796).epsilon(1e-5));
    CHECK(odd.alpha0 == Approx(1.980).epsilon(1e-3));
    const auto pa = minimize_gamma2(FreeFamily::photon_added, 0);
    CHECK(pa.gamma2 == Approx(3 * (6 - std::sqrt(21.0)) / 5).epsilon(1e-8));
    CHECK(pa.alpha0 == Approx(std::sqrt(13 + 3 * std::sqrt(21.0)) / 4).epsilon(1e-6));
    const auto coh = minimize_gamma2(FreeFamily::coherent, 0);
    CHECK(coh.gamma2 == Approx(pa.gamma2));
}

TEST_CASE("even and odd cat ratios intersect near 0.631") {
    auto diff = [](double a) { return gamma2(CatState{a, Parity::even}) - gamma2(CatState{a, Parity::odd}); };
    const double x = bisect(diff, 0.5, 0.8, 1e-10);
    CHECK(x == Approx(0.6315).epsilon(0.01 / 0.6315));
    const double het = scrb_het_second(CatState{x, Parity::odd}) / scrb_het_second(CatState{x, Parity::even});
    const double hom = scrb_hom_second(CatState{x, Parity::odd}) / scrb_hom_second(CatState{x, Parity::even});
    CHECK(het == Approx(2.0694).epsilon(1e-3));
    CHECK(hom == Approx(het).epsilon(1e-9));
}

TEST_CASE("crb report tags its methods") {
    const CrbReport r = crb_report(PhotonAddedState{0.4, 2});
    CHECK(r.h2_hom_method == FisherMethod::quadrature);
    const CrbReport f = crb_report(FockState{2});
    CHECK(f.h2_hom_method == FisherMethod::closed_form);
    CHECK(f.gamma2 == Approx(30.0 / 35));
    CHECK(to_string(FisherMethod::quadrature) == "quadrature");
    CHECK_THROWS_AS(parse_free_family("fock"), ConfigError);
}
