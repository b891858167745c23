#include <doctest.h>

#include <cmath>
#include <random>

#include "kerrpair/precision.hpp"
#include "kerrpair/tridiagonal.hpp"
#include "oracles/dense_jacobi.hpp"

using namespace kerrpair;

namespace {

double residual(const std::vector<double>& d, const std::vector<double>& e,
                const tridiag::Decomposition<double>& dec) {
    const int n = dec.dim;
    double worst = 0.0;
    for (int l = 0; l < n; ++l) {
        const auto v = dec.column(l);
        for (int k = 0; k < n; ++k) {
            double hv = d[k] * v[k];
            if (k > 0) hv += e[k - 1] * v[k - 1];
            if (k + 1 < n) hv += e[k] * v[k + 1];
            worst = std::max(worst, std::abs(hv - dec.values[l] * v[k]));
        }
    }
    return worst;
}

double orthonormality(const tridiag::Decomposition<double>& dec) {
    const int n = dec.dim;
    double worst = 0.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += dec.column(a)[k] * dec.column(b)[k];
            worst = std::max(worst, std::abs(s - (a == b ? 1.0 : 0.0)));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("2x2 block with equal diagonal") {
    const std::vector<double> d{0.7, 0.7};
    const std::vector<double> e{0.2};
    const auto dec = tridiag::solve<double>(d, e);
    CHECK(dec.values[0] == doctest::Approx(0.5));
    CHECK(dec.values[1] == doctest::Approx(0.9));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(dec.column(0)[0]) == doctest::Approx(r));
    CHECK(dec.column(0)[0] * dec.column(0)[1] < 0.0);
    CHECK(dec.column(1)[0] * dec.column(1)[1] > 0.0);
}

TEST_CASE("zero coupling returns sorted diagonal and unit vectors") {
    const std::vector<double> d{3.0, -1.0, 2.0, 0.5};
    const std::vector<double> e{0.0, 0.0, 0.0};
    for (auto method : {tridiag::Method::implicit_ql, tridiag::Method::bisection}) {
        const auto dec = tridiag::solve<double>(d, e, method);
        const std::vector<double> sorted{-1.0, 0.5, 2.0, 3.0};
        for (int l = 0; l < 4; ++l) CHECK(dec.values[l] == doctest::Approx(sorted[l]).epsilon(1e-14));
        CHECK(dec.column(0)[1] == doctest::Approx(1.0));
        CHECK(dec.column(3)[0] == doctest::Approx(1.0));
    }
}

TEST_CASE("the zero matrix, including 1 x 1") {
    for (int n : {1, 3}) {
        const std::vector<double> d(n, 0.0), e(n - 1, 0.0);
        for (auto method : {tridiag::Method::implicit_ql, tridiag::Method::bisection}) {
            const auto dec = tridiag::solve<double>(d, e, method);
            for (int l = 0; l < n; ++l) {
                CHECK(dec.values[l] == 0.0);
                for (int i = 0; i < n; ++i) CHECK(dec.column(l)[i] == (i == l ? 1.0 : 0.0));
            }
        }
    }
}

TEST_CASE("both methods agree with the dense Jacobi oracle on 100 random blocks") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 33);
    double worst_value = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = dim(rng);
        std::vector<double> d(n), e(n > 0 ? n - 1 : 0);
        for (auto& x : d) x = 10.0 * u(rng);
        for (auto& x : e) x = u(rng);
        const auto ref = oracle::jacobi_eigen(oracle::tridiagonal_to_dense(d, e), n);
        for (auto method : {tridiag::Method::implicit_ql, tridiag::Method::bisection}) {
            const auto dec = tridiag::solve<double>(d, e, method);
            for (int l = 0; l < n; ++l) {
                worst_value = std::max(worst_value, std::abs(dec.values[l] - ref.values[l]));
            }
            CHECK(residual(d, e, dec) < 1e-12 * 11.0);
            CHECK(orthonormality(dec) < 1e-10 * n);
        }
    }
    CHECK(worst_value < 1e-10);
}

TEST_CASE("near-degenerate pair from the Kerr block is resolved by bisection too") {
    // diagonal n(n - 6), tiny coupling: levels n and 6 - n nearly degenerate
    std::vector<double> d(11), e(10);
    for (int n = 0; n <= 10; ++n) d[n] = n * (n - 6.0);
    for (int n = 0; n < 10; ++n) e[n] = 1e-3 * std::sqrt((n + 1.0) * (10 - n));
    const auto ql = tridiag::solve<double>(d, e);
    const auto bi = tridiag::solve<double>(d, e, tridiag::Method::bisection);
    for (int l = 0; l <= 10; ++l) CHECK(ql.values[l] == doctest::Approx(bi.values[l]).epsilon(1e-12));
    CHECK(orthonormality(bi) < 1e-10);
    CHECK(residual(d, e, bi) < 1e-10);
}

TEST_CASE("sign convention: largest component of each eigenvector is positive") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> d(12), e(11);
    for (auto& x : d) x = u(rng);
    for (auto& x : e) x = u(rng);
    const auto dec = tridiag::solve<double>(d, e);
    for (int l = 0; l < 12; ++l) {
        const auto v = dec.column(l);
        int best = 0;
        for (int k = 1; k < 12; ++k) {
            if (std::abs(v[k]) > std::abs(v[best])) best = k;
        }
        CHECK(v[best] > 0.0);
    }
}

TEST_CASE("quad precision solve matches double to double accuracy") {
    const auto h = build_quad_block(8, Quad(3.7), Quad(2), Quad("0.05"));
    const auto dq = quad_eigendecompose(h);
    std::vector<double> d, e;
    for (const auto& x : h.diag) d.push_back(static_cast<double>(x));
    for (const auto& x : h.offdiag) e.push_back(static_cast<double>(x));
    const auto dd = tridiag::solve<double>(d, e);
    for (int l = 0; l < 9; ++l) {
        CHECK(static_cast<double>(dq.values[l]) == doctest::Approx(dd.values[l]).epsilon(1e-13));
    }
}
