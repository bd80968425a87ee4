#include "mtlab/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace mtlab;
using namespace mtlab::oracle;
using doctest::Approx;

TEST_CASE("density-integration moments") {
    CHECK(numeric_quadrature_moment(make_vacuum(), 0.3, 2).value == Approx(0.5).epsilon(1e-10));
    // <X^4> = (3/2)(5/2)^2 + 3/8 for Fock n = 2.
    CHECK(numeric_quadrature_moment(FockState{2}, 1.0, 4).value == Approx(9.75).epsilon(1e-10));
    const StateModel pa = PhotonAddedState{{1.0, 0.0}, 1};
    const double theta = std::numbers::pi / 5;
    CHECK(numeric_quadrature_moment(pa, theta, 3).value == Approx(quadrature_moments(pa, theta).m3).epsilon(1e-6));
    CHECK(cf_quadrature_moment(pa, theta, 3).value == Approx(quadrature_moments(pa, theta).m3).epsilon(1e-6));
}

TEST_CASE("generating-function moments") {
    const StateModel g = GaussianState{{0.7, -1.2}, {0.9, 0.2, 0.6}};
    for (double th : {0.0, 0.8, 2.0})
        CHECK(cf_quadrature_moment(g, th, 1).value == Approx(0.7 * std::cos(th) - 1.2 * std::sin(th)).epsilon(1e-7));
    CHECK(cf_husimi_moment(FockState{1}, 4, 0).value == Approx(9.0).epsilon(1e-7));
    CHECK(numeric_husimi_moment(FockState{1}, 4, 0).value == Approx(9.0).epsilon(1e-10));

    const StateModel cat = CatState{{1.0, 0.0}, Parity::even};
    CHECK(cf_quadrature_moment(cat, 0.0, 2).value ==
          Approx(numeric_quadrature_moment(cat, 0.0, 2).value).epsilon(1e-7));
}

TEST_CASE("generating functions at special points") {
    CHECK(quadrature_mgf(FockState{3}, 0.4, 0.0) == Approx(1.0));
    CHECK(husimi_mgf(CatState{{0.5, 0.5}, Parity::odd}, 0.0, 0.0) == Approx(1.0));
    for (double k : {0.3, 1.0})
        CHECK(quadrature_mgf(make_vacuum(), 1.1, k) == Approx(std::exp(k * k / 4)));
    CHECK(husimi_mgf(make_vacuum(), 0.5, -0.3) == Approx(std::exp(0.5 * (0.25 + 0.09))));
    const auto s = symmetric_generating_function(FockState{0}, {0.2, 0.1}, {0.3, -0.4});
    CHECK(std::abs(s - std::exp(0.5 * std::complex<double>(0.2, 0.1) * std::complex<double>(0.3, -0.4))) < 1e-14);
}

TEST_CASE("both oracle routes agree with the closed forms on random states") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto alpha = [&] { return std::polar(1.5 * u(rng), 2 * std::numbers::pi * u(rng)); };
    for (int draw = 0; draw < 4; ++draw) {
        const std::vector<StateModel> states = {
            GaussianState{{u(rng) - 0.5, u(rng) - 0.5},
                          gaussian_cov_from_shape({1 + 2 * u(rng), 1 + 2 * u(rng), 3 * u(rng)})},
            FockState{static_cast<int>(8 * u(rng))},
            CatState{alpha(), u(rng) < 0.5 ? Parity::even : Parity::odd},
            DisplacedFockState{alpha(), static_cast<int>(4 * u(rng))},
            PhotonAddedState{alpha(), static_cast<int>(4 * u(rng))},
        };
        for (const auto& s : states) {
            const double theta = std::numbers::pi * u(rng);
            const auto t = quadrature_moments(s, theta);
            const double exact[4] = {t.m1, t.m2, t.m3, t.m4};
            for (int m = 1; m <= 4; ++m) {
                const double scale = std::pow(t.m2, 0.5 * m);
                CHECK(std::abs(numeric_quadrature_moment(s, theta, m).value - exact[m - 1]) <= 1e-5 * scale);
                CHECK(std::abs(cf_quadrature_moment(s, theta, m).value - exact[m - 1]) <= 1e-5 * scale);
            }
            const auto h = husimi_moments(s);
            const double hs = h.mxx + h.mpp;
            CHECK(std::abs(cf_husimi_moment(s, 2, 2).value - h.mx2p2) <= 1e-5 * hs * hs);
            CHECK(std::abs(numeric_husimi_moment(s, 3, 1).value - h.mx3p) <= 1e-5 * hs * hs);
            CHECK(std::abs(numeric_husimi_moment(s, 1, 0).value - h.mx) <= 1e-5 * std::sqrt(hs));
        }
    }
}

TEST_CASE("numeric Fisher matrices") {
    for (int n : {0, 2}) {
        const auto f = numeric_fisher(FockState{n}, MomentOrder::second);
        CHECK(f.matrix(0, 0) == Approx(3.0 / (4 * (n * n + n + 1))));
        CHECK(f.matrix(0, 2) == Approx(1.0 / (4 * (n * n + n + 1))));
        CHECK(f.matrix(1, 1) == Approx(2.0 / (4 * (n * n + n + 1))));
        CHECK(std::abs(f.matrix(0, 1)) < 1e-14);
    }
    CHECK(numeric_fisher(GaussianState{{0.0, 0.0}, gaussian_cov_from_shape({1, 1, 0})}, MomentOrder::second)
              .trace_inverse() == Approx(5.0));
    const StateModel g = GaussianState{{-0.4, 0.9}, {1.1, -0.3, 0.7}};
    const auto a = numeric_fisher(g, MomentOrder::second).matrix;
    const auto b = fisher_hom_second(g, FisherMethod::closed_form).matrix;
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-10 * b.cwiseAbs().maxCoeff());
    CHECK(numeric_fisher(g, MomentOrder::first).trace_inverse() == Approx(scrb_hom_first(g)).epsilon(1e-12));
}

TEST_CASE("oracle configuration is validated") {
    OracleConfig c;
    CHECK_NOTHROW(c.validate());
    c.nodes_1d = 100;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    OracleConfig d;
    d.fd_step = -1;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    CHECK_THROWS(numeric_quadrature_moment(make_vacuum(), 0.0, 9));
}
