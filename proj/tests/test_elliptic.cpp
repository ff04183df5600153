#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "kdvsm/elliptic.hpp"
#include "oracles.hpp"

using namespace kdvsm::elliptic;

TEST_CASE("complete integrals against AGM oracles") {
    CHECK(ellip_K(0.0) == doctest::Approx(M_PI_2).epsilon(1e-14));
    CHECK(ellip_E(0.0) == doctest::Approx(M_PI_2).epsilon(1e-14));
    CHECK(ellip_E(1.0) == doctest::Approx(1.0).epsilon(1e-14));

    for (double m = 0.05; m < 1.0; m += 0.05) {
        CHECK(ellip_K(m) == doctest::Approx(oracles::agm_K(m)).epsilon(1e-12));
        CHECK(ellip_E(m) == doctest::Approx(oracles::agm_E(m)).epsilon(1e-12));
    }
    // frozen oracle values at m = 1/2
    CHECK(ellip_K(0.5) == doctest::Approx(1.85407467730137).epsilon(1e-12));
    CHECK(ellip_E(0.5) == doctest::Approx(1.35064388104768).epsilon(1e-12));
}

TEST_CASE("monotonicity in m") {
    double prevK = ellip_K(0.0), prevE = ellip_E(0.0);
    for (double m = 0.02; m < 1.0; m += 0.02) {
        CHECK(ellip_K(m) > prevK);
        CHECK(ellip_E(m) < prevE);
        prevK = ellip_K(m);
        prevE = ellip_E(m);
    }
}

TEST_CASE("logarithmic blow-up of K near m = 1") {
    const double m = 1.0 - 1e-6;
    const double asym = 0.5 * std::log(16.0 / (1.0 - m));
    CHECK(std::abs(ellip_K(m) - asym) / asym < 1e-3);
}

TEST_CASE("small-m series") {
    // the two-term series truncates at O(m^3): |R| <= 0.16 m^3 for K, and
    // smaller for E; allow exactly that remainder on top of 1e-6
    for (double m = 0.005; m <= 0.05; m += 0.005) {
        const double Ks = M_PI_2 * (1.0 + m / 4.0 + 9.0 * m * m / 64.0);
        const double Es = M_PI_2 * (1.0 - m / 4.0 - 3.0 * m * m / 64.0);
        const double r3 = 0.16 * m * m * m;
        CHECK(std::abs(ellip_K(m) - Ks) < 1e-6 + r3);
        CHECK(std::abs(ellip_E(m) - Es) < 1e-6 + r3);
    }
}

TEST_CASE("Legendre relation on a parameter grid") {
    for (double m = 0.01; m < 1.0; m += 0.01) {
        const double res = ellip_E(m) * ellip_K(1.0 - m) + ellip_E(1.0 - m) * ellip_K(m)
                         - ellip_K(m) * ellip_K(1.0 - m) - M_PI_2;
        CHECK(std::abs(res) < 1e-10);
    }
}

TEST_CASE("incomplete integrals") {
    CHECK(ellip_F_inc(M_PI_2, 0.5) == doctest::Approx(ellip_K(0.5)).epsilon(1e-12));
    CHECK(ellip_E_inc(M_PI_2, 0.5) == doctest::Approx(ellip_E(0.5)).epsilon(1e-12));
    CHECK(ellip_E_inc(0.0, 0.7) == 0.0);
    CHECK(ellip_F_inc(0.0, 0.7) == 0.0);

    // quadrature oracle across the quarter period
    for (double m : {0.1, 0.5, 0.9})
        for (double psi = 0.2; psi < M_PI_2; psi += 0.3) {
            CHECK(ellip_F_inc(psi, m) == doctest::Approx(oracles::quad_F(psi, m)).epsilon(1e-11));
            CHECK(ellip_E_inc(psi, m) == doctest::Approx(oracles::quad_E_inc(psi, m)).epsilon(1e-11));
        }
    CHECK(ellip_F_inc(M_PI_4, 0.5) == doctest::Approx(oracles::quad_F(M_PI_4, 0.5)).epsilon(1e-12));
    CHECK(oracles::quad_F(M_PI_4, 0.5) == doctest::Approx(0.826017).epsilon(1e-5));
}

TEST_CASE("jacobi cn special values and identities") {
    CHECK(jacobi_cn(0.0, 0.3) == doctest::Approx(1.0).epsilon(1e-14));
    for (double u = -3.0; u <= 3.0; u += 0.7) {
        CHECK(jacobi_cn(u, 0.0) == doctest::Approx(std::cos(u)).epsilon(1e-12));
        CHECK(jacobi_cn(u, 1.0) == doctest::Approx(1.0 / std::cosh(u)).epsilon(1e-12));
    }

    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> um(0.05, 0.95), uu(-8.0, 8.0);
    for (int i = 0; i < 200; ++i) {
        const double m = um(rng), u = uu(rng);
        const double cn = jacobi_cn(u, m);
        CHECK(cn >= -1.0 - 1e-12);
        CHECK(cn <= 1.0 + 1e-12);
        // periodicity with period 4K
        const double K = ellip_K(m);
        CHECK(jacobi_cn(u + 4.0 * K, m) == doctest::Approx(cn).epsilon(1e-9));
        // cn^2 + sn^2 = 1 via the inverse-integral oracle inside one quarter period
        const double ur = std::fmod(std::abs(u), 4.0 * K);
        if (ur > 0.05 && ur < K - 0.05) {
            CHECK(jacobi_cn(ur, m) == doctest::Approx(oracles::inverse_cn(ur, m)).epsilon(1e-9));
        }
    }
}

TEST_CASE("jacobi zeta endpoints and oracle value") {
    for (double m : {0.0, 0.3, 0.5, 0.9}) {
        CHECK(std::abs(jacobi_zeta(0.0, m)) < 1e-14);
        CHECK(std::abs(jacobi_zeta(M_PI_2, m)) < 1e-13);
    }
    for (double psi = 0.1; psi < 1.5; psi += 0.2)
        CHECK(std::abs(jacobi_zeta(psi, 0.0)) < 1e-13);

    const double z = oracles::quad_E_inc(M_PI_4, 0.5)
                   - oracles::agm_E(0.5) / oracles::agm_K(0.5) * oracles::quad_F(M_PI_4, 0.5);
    CHECK(jacobi_zeta(M_PI_4, 0.5) == doctest::Approx(z).epsilon(1e-11));
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(ellip_K(-0.1), std::domain_error);
    CHECK_THROWS_AS(ellip_K(1.0), std::domain_error);
    CHECK_THROWS_AS(ellip_E(1.2), std::domain_error);
    CHECK_THROWS_AS(jacobi_zeta(0.3, 1.0), std::domain_error);
    CHECK_THROWS_AS(jacobi_cn(std::nan(""), 0.5), std::domain_error);
}
