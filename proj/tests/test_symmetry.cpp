#include <doctest.h>

#include <gmpxx.h>

#include <cmath>
#include <random>
#include <vector>

#include "kerrpair/errors.hpp"
#include "kerrpair/symmetry.hpp"

using namespace kerrpair;

namespace {

// Plain dense rational matrices built straight from the entry formulas, so the
// banded storage and product in the library are not used on this side.
using Dense = std::vector<std::vector<mpq_class>>;

Dense zeros(int d) { return Dense(d, std::vector<mpq_class>(d, mpq_class(0))); }

mpq_class qpow(const mpq_class& x, int k) {
    mpq_class r = 1;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

mpz_class binom(int n, int k) {
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

Dense dense_T(int lo, int hi, int p, const mpq_class& x) {
    const int d = hi - lo + 1;
    Dense t = zeros(d);
    for (int r = 0; r < d; ++r) {
        for (int c = r; c < d; ++c) t[r][c] = mpq_class(binom(p + (c - r) - 1, c - r)) * qpow(x, c - r);
    }
    return t;
}

Dense dense_H(int lo, int hi, int big_n, int mu, const mpq_class& x, bool second) {
    const int d = hi - lo + 1;
    Dense h = zeros(d);
    for (int r = 0; r < d; ++r) {
        const int s = lo + r;
        h[r][r] = mpq_class(s) * (s - mu);
        if (r > 0) {
            h[r][r - 1] = x;  // (sigma, sigma - 1)
            const mpq_class up = second ? mpq_class((mu - s + 1) * (big_n - mu + s)) : mpq_class(s * (big_n - s + 1));
            h[r - 1][r] = x * up;  // (sigma - 1, sigma)
        }
    }
    return h;
}

Dense mul(const Dense& a, const Dense& b) {
    const int d = static_cast<int>(a.size());
    Dense c = zeros(d);
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
            if (a[i][k] == 0) continue;
            for (int j = 0; j < d; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    }
    return c;
}

}  // namespace

TEST_CASE("Taylor coefficients of T") {
    CHECK(taylor_coefficient_T(0, 10, 6) == 1);
    CHECK(taylor_coefficient_T(1, 10, 6) == 4);
    CHECK(taylor_coefficient_T(3, 10, 6) == 20);
    CHECK(taylor_coefficient_T(3, 11, 6) == 35);
    CHECK(taylor_coefficient_T(7, 7, 6) == 1);
    CHECK_THROWS_AS((void)taylor_coefficient_T(-1, 10, 6), DomainError);
    CHECK_THROWS_AS((void)taylor_coefficient_T(2, 6, 6), DomainError);
}

TEST_CASE("default window") {
    const auto w = default_window(10, 6);
    CHECK(w.lo == -15);
    CHECK(w.hi == 21);
    CHECK(w.size() == 37);
    CHECK(w.contains(0));
    CHECK_FALSE(w.contains(22));
    CHECK_THROWS_AS((void)default_window(6, 6), DomainError);
}

TEST_CASE("T at x = 0 is the identity, and all ones when N - mu = 1") {
    const LatticeWindow w{-3, 5, 6, 10};
    const auto t0 = build_T(w, mpq_class(0));
    for (int r = w.lo; r <= w.hi; ++r) {
        for (int c = w.lo; c <= w.hi; ++c) CHECK(t0.value(r, c) == (r == c ? 1 : 0));
    }
    const LatticeWindow w1{-3, 5, 6, 7};
    const mpq_class x(2, 9);
    const auto t1 = build_T(w1, x);
    for (int r = w1.lo; r <= w1.hi; ++r) {
        for (int c = r; c <= w1.hi; ++c) {
            CHECK(t1.coefficient(r, c) == 1);
            CHECK(t1.value(r, c) == qpow(x, c - r));
        }
    }
}

TEST_CASE("T matches a dense rational oracle") {
    const LatticeWindow w{-4, 9, 6, 10};
    const mpq_class x(3, 7);
    const auto t = build_T(w, x);
    const auto ref = dense_T(w.lo, w.hi, 4, x);
    for (int r = w.lo; r <= w.hi; ++r) {
        for (int c = w.lo; c <= w.hi; ++c) CHECK(t.value(r, c) == ref[r - w.lo][c - w.lo]);
    }
    CHECK(check_T_grading(t));
}

TEST_CASE("H1 and H2 coincide at mu = N") {
    const LatticeWindow w{-5, 15, 9, 9};
    const mpq_class x(1, 3);
    const auto h1 = build_H1(w, x);
    const auto h2 = build_H2(w, x);
    for (int r = w.lo; r <= w.hi; ++r) {
        for (int c = w.lo; c <= w.hi; ++c) CHECK(h1.value(r, c) == h2.value(r, c));
    }
    // and match the entry formulas
    const auto ref = dense_H(w.lo, w.hi, 9, 9, x, false);
    for (int r = w.lo; r <= w.hi; ++r) {
        for (int c = w.lo; c <= w.hi; ++c) CHECK(h1.value(r, c) == ref[r - w.lo][c - w.lo]);
    }
}

TEST_CASE("Taylor recurrence holds exactly") {
    CHECK(verify_recurrence(default_window(10, 6), 10) == 0);
    CHECK(verify_recurrence(default_window(40, 27), 12) == 0);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> pick_n(1, 30);
    for (int i = 0; i < 100; ++i) {
        const int big_n = pick_n(rng);
        std::uniform_int_distribution<int> pick_mu(-big_n, big_n - 1);
        const int mu = pick_mu(rng);
        CHECK(verify_recurrence(default_window(big_n, mu), 8) == 0);
    }
    CHECK_THROWS_AS((void)verify_recurrence(default_window(10, 6), 0), DomainError);
}

TEST_CASE("intertwining H1 T = T H2 on a finite window") {
    const LatticeWindow w{-15, 25, 6, 10};
    const mpq_class x(3, 7);
    const auto res = verify_intertwining(w, x, 12);
    CHECK(res.interior == 0);
    // truncating T at the window edge spoils the identity there
    CHECK(res.boundary > 0);

    // dense oracle for the same products: zero away from the last column
    const auto t = dense_T(w.lo, w.hi, 4, x);
    const auto lhs = mul(dense_H(w.lo, w.hi, 10, 6, x, false), t);
    const auto rhs = mul(t, dense_H(w.lo, w.hi, 10, 6, x, true));
    const int d = w.size();
    for (int r = 1; r + 1 < d; ++r) {
        for (int c = 1; c + 1 < d; ++c) CHECK(lhs[r][c] == rhs[r][c]);
    }
}

TEST_CASE("intertwining for several x, including negative and large") {
    for (const char* s : {"1/3", "2/7", "-5/11", "7/2", "1/100"}) {
        const auto res = verify_intertwining(default_window(10, 6), parse_rational(s), 12);
        CHECK(res.interior == 0);
    }
}

TEST_CASE("T times T inverse is the identity") {
    for (const char* s : {"1/3", "-5/11", "7/2"}) {
        CHECK(verify_T_inverse(default_window(10, 6), parse_rational(s)) == 0);
        CHECK(verify_T_inverse(default_window(12, 1), parse_rational(s)) == 0);
    }
}

TEST_CASE("grading detects a tampered entry") {
    const LatticeWindow w{-2, 6, 3, 5};
    auto t = build_T(w, mpq_class(1, 2));
    CHECK(check_T_grading(t));
    t.set(0, 2, mpq_class(3), 1);
    CHECK_FALSE(check_T_grading(t));
}

TEST_CASE("similarity transforms reproduce H1 and H2") {
    for (const char* s : {"1/3", "2/7", "7/2"}) {
        const auto r = similarity_check(10, 6, parse_rational(s));
        CHECK(r.h1 <= 1e-12);
        CHECK(r.h2 <= 1e-12);
        CHECK(r.lo == 0);
        CHECK(r.hi == 6);
    }
    const auto r = similarity_check(10, 14, mpq_class(1, 5));
    CHECK(r.lo == 4);
    CHECK(r.hi == 10);
}

TEST_CASE("spectral pairing: normalized splittings approach 2 omega_R / g^order") {
    const auto p = ModelParams::from_mu(6, 10, 1.0, 1.0, 0.01);
    const auto recs = verify_spectral_pairing(p, 6);
    REQUIRE(recs.size() == 3);
    for (const auto& r : recs) {
        CHECK(r.partner == 6 - r.n);
        CHECK(r.order == 6 - 2 * r.n);
        CHECK(r.normalized == doctest::Approx(r.predicted).epsilon(0.01));
        CHECK(r.splitting == doctest::Approx(r.normalized * std::pow(0.01, r.order)));
    }
    CHECK_THROWS_AS((void)verify_spectral_pairing(p.with_g(0.0), 6), DomainError);
}

TEST_CASE("parse_rational") {
    CHECK(parse_rational("3/7") == mpq_class(3, 7));
    CHECK(parse_rational("-5/11") == mpq_class(-5, 11));
    CHECK(parse_rational("4/8") == mpq_class(1, 2));
    CHECK(parse_rational("12") == 12);
    CHECK(parse_rational("+2") == 2);
    for (const char* bad : {"", "1/0", "abc", "1/", "/3", "1.5", "1/2/3", "-"}) {
        CHECK_THROWS_AS((void)parse_rational(bad), ConfigError);
    }
}
