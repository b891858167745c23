#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "kerrpair/errors.hpp"
#include "kerrpair/model.hpp"

using namespace kerrpair;

TEST_CASE("derived_mu at the classical-portrait parameters is 27") {
    const auto p = ModelParams::from_delta(0.25, 40, 1.0, 0.5, 0.0);
    CHECK(derived_mu(p) == doctest::Approx(27.0).epsilon(1e-15));
}

TEST_CASE("derived_mu vanishes when delta = -a2 N") {
    const auto p = ModelParams::from_delta(-0.7 * 13, 13, 1.0, 0.7, 0.0);
    CHECK(std::abs(derived_mu(p)) < 1e-14);
}

TEST_CASE("derived_mu at the Rabi parameters is 6") {
    const auto p = ModelParams::from_delta(-4.0, 10, 1.0, 1.0, 0.05);
    CHECK(derived_mu(p) == 6.0);
}

TEST_CASE("derived_mu rejects a vanishing nonlinearity") {
    auto p = ModelParams::from_delta(1.0, 4, 0.0, 0.0, 0.0);
    CHECK_THROWS_AS((void)derived_mu(p), DomainError);
}

TEST_CASE("delta_for_mu examples") {
    CHECK(delta_for_mu(6.0, ModelParams::from_delta(0, 10, 1, 1, 0)) == -4.0);
    CHECK(delta_for_mu(14.0, ModelParams::from_delta(0, 50, 1, 1.5, 0)) == doctest::Approx(-57.5));
    CHECK(delta_for_mu(0.0, ModelParams::from_delta(0, 0, 1, 1, 0)) == 0.0);
}

TEST_CASE("delta_for_mu round-trips through derived_mu") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = static_cast<int>(u(rng) * 64);
        const double a1 = 0.1 + 2.0 * u(rng);
        const double a2 = 2.0 * u(rng);
        const double mu = -20.0 + 120.0 * u(rng);
        auto p = ModelParams::from_mu(mu, n, a1, a2, u(rng));
        const double back = derived_mu(p);
        const double scale = std::abs(mu) + a2 * n / (a1 + a2) * 2.0 + 1.0;
        worst = std::max(worst, std::abs(back - mu) / scale);
    }
    CHECK(worst < 4e-16 * 8);
}

TEST_CASE("N = 1 block, offset included") {
    const double w2 = 0.3, a1 = 1.2, a2 = 0.4, g = 0.17;
    const auto p = ModelParams::from_delta(w2, 1, a1, a2, g);
    const double mu1 = derived_mu(p);
    const auto h = build_subspace_hamiltonian(p, EnergyOffset::included);
    REQUIRE(h.n_dim == 2);
    REQUIRE(h.offdiag.size() == 1);
    CHECK(h.offdiag[0] == doctest::Approx(g));
    CHECK(h.diag[0] == doctest::Approx(w2 + a2 / 2));
    CHECK(h.diag[1] == doctest::Approx((a1 + a2) * (1 - mu1) / 2 + w2 + a2 / 2));
    // with w1 = 0 the n = 1 entry is eps0(1, 0) = a1/2
    CHECK(h.diag[1] == doctest::Approx(a1 / 2).epsilon(1e-14));
    CHECK(h.diag[1] == doctest::Approx(unperturbed_energy(1, 0, p)).epsilon(1e-14));
}

TEST_CASE("offset excluded by default") {
    const auto p = ModelParams::from_mu(3.3, 5, 1.0, 0.6, 0.2);
    const auto h = build_subspace_hamiltonian(p);
    CHECK(h.energy_offset == 0.0);
    CHECK(h.diag[0] == 0.0);
}

TEST_CASE("g = 0 gives a diagonal block") {
    const auto h = build_subspace_hamiltonian(ModelParams::from_mu(4.5, 9, 1, 1, 0.0));
    for (double e : h.offdiag) CHECK(e == 0.0);
}

TEST_CASE("off-diagonal elements are g sqrt((n+1)(N-n))") {
    const auto p = ModelParams::from_mu(7.1, 20, 1, 0.3, 0.37);
    const auto h = build_subspace_hamiltonian(p);
    for (int n = 0; n < 20; ++n) {
        CHECK(h.offdiag[n] == doctest::Approx(0.37 * std::sqrt((n + 1.0) * (20 - n))).epsilon(1e-15));
    }
}

TEST_CASE("unperturbed energy examples") {
    const auto p = ModelParams::from_delta(0.8, 5, 1.3, 0.2, 0.0);
    CHECK(unperturbed_energy(0, 0, p) == 0.0);
    CHECK(unperturbed_energy(1, 0, p) == doctest::Approx(p.omega1 + 1.3 / 2));
    CHECK_THROWS_AS((void)unperturbed_energy(-1, 0, p), DomainError);
}

TEST_CASE("diagonal plus offset reproduces eps0(n, N - n), including nonzero w1") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int big_n = 0; big_n <= 64; ++big_n) {
        ModelParams p;
        p.omega1 = 2.0 * u(rng);
        p.omega2 = p.omega1 + 10.0 * u(rng);
        p.alpha1 = 1.0 + 0.5 * u(rng);
        p.alpha2 = 0.5 + 0.5 * u(rng);
        p.big_n = big_n;
        const auto h = build_subspace_hamiltonian(p, EnergyOffset::included);
        for (int n = 0; n <= big_n; ++n) {
            const double e0 = unperturbed_energy(n, big_n - n, p);
            const double scale = 1.0 + std::abs(e0) + p.alpha_sum() * big_n * big_n;
            CHECK(std::abs(h.diag[n] - e0) / scale < 1e-13);
        }
    }
}

TEST_CASE("integer mu pairs eps0(n) with eps0(m - n)") {
    for (int big_n : {10, 23, 40}) {
        for (int m = 0; m <= 2 * big_n; ++m) {
            const auto p = ModelParams::from_mu(m, big_n, 1.0, 0.8, 0.0);
            for (int n = 0; n <= m; ++n) {
                if (n > big_n || m - n > big_n || m - n < 0) continue;
                const double a = unperturbed_energy(n, big_n - n, p);
                const double b = unperturbed_energy(m - n, big_n - m + n, p);
                CHECK(a == doctest::Approx(b).epsilon(1e-12).scale(1.0 + big_n * big_n));
            }
        }
    }
}

TEST_CASE("degeneracy census at integer mu") {
    for (int big_n = 1; big_n <= 64; big_n += 3) {
        for (int m = 0; m <= 2 * big_n; ++m) {
            // exact integer arithmetic: 2 d_n/(a1 + a2) = n(n - m)
            std::map<long long, int> multiplicity;
            for (int n = 0; n <= big_n; ++n) ++multiplicity[static_cast<long long>(n) * (n - m)];
            int pairs = 0;
            for (const auto& [value, count] : multiplicity) {
                (void)value;
                CHECK(count <= 2);
                if (count == 2) ++pairs;
            }
            const int expected = (std::min(m, 2 * big_n - m) + 1) / 2;
            CHECK(pairs == expected);
        }
    }
}

TEST_CASE("validate rejects bad parameters") {
    auto p = ModelParams::from_mu(2, 4, 1, 0, 0.1);
    p.g = -0.1;
    CHECK_THROWS_AS(validate(p), DomainError);
    p.g = 0.1;
    p.big_n = -1;
    CHECK_THROWS_AS(validate(p), DomainError);
    p.big_n = 4;
    p.alpha1 = -1;
    CHECK_THROWS_AS(validate(p), DomainError);
    p.alpha1 = 1;
    p.omega2 = std::nan("");
    CHECK_THROWS_AS(validate(p), DomainError);
}

TEST_CASE("overflow guard for absurd N") {
    const auto p = ModelParams::from_mu(2, 2'000'000'000, 1e300, 0, 0.0);
    CHECK_THROWS_AS((void)build_subspace_hamiltonian(p), DomainError);
}
