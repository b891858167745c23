#pragma once

// Exact-arithmetic check of the intertwining H1 T = T H2 between the generalised
// Hamiltonians for indices nu and mu - nu. Matrices live on a finite lattice window
// sigma in [lo, hi] and are scaled by 2/(a1 + a2), so with x = 2g/(a1 + a2) every
// entry is an exact rational monomial c x^k.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "kerrpair/model.hpp"

namespace kerrpair {

struct LatticeWindow {
    int lo = 0;
    int hi = 0;
    int mu = 0;
    int big_n = 0;

    [[nodiscard]] int size() const noexcept { return hi - lo + 1; }
    [[nodiscard]] bool contains(int sigma) const noexcept { return sigma >= lo && sigma <= hi; }
};

// [-(N+5), mu+N+5]; throws DomainError unless N - mu >= 1.
[[nodiscard]] LatticeWindow default_window(int big_n, int mu);

// Square banded matrix on a window. Entry (r, c) equals coeff * x^power; products
// of matrices keep power = 0 and store the evaluated value.
class BandedExactMatrix {
public:
    BandedExactMatrix() = default;
    BandedExactMatrix(int lo, int hi, int lower, int upper, mpq_class x);

    [[nodiscard]] int lo() const noexcept { return lo_; }
    [[nodiscard]] int hi() const noexcept { return hi_; }
    [[nodiscard]] int lower() const noexcept { return lower_; }
    [[nodiscard]] int upper() const noexcept { return upper_; }
    [[nodiscard]] const mpq_class& x() const noexcept { return x_; }
    [[nodiscard]] bool in_band(int r, int c) const noexcept;

    void set(int r, int c, const mpq_class& coeff, int power);
    [[nodiscard]] mpq_class coefficient(int r, int c) const;
    [[nodiscard]] int power(int r, int c) const;
    [[nodiscard]] mpq_class value(int r, int c) const;

private:
    [[nodiscard]] std::size_t slot(int r, int c) const noexcept;

    int lo_ = 0;
    int hi_ = -1;
    int lower_ = 0;
    int upper_ = 0;
    mpq_class x_;
    std::vector<mpq_class> coeff_;
    std::vector<int> power_;
    std::vector<mpq_class> xpow_;  // x^k for k = 0..band
};

// Banded product restricted to the common window.
[[nodiscard]] BandedExactMatrix multiply(const BandedExactMatrix& a, const BandedExactMatrix& b);

// C(N - mu + k - 1, k). Throws DomainError unless k >= 0 and N - mu >= 1.
[[nodiscard]] mpz_class taylor_coefficient_T(int k, int big_n, int mu);

// T = (1 - x S)^{-(N-mu)}, S = sum |sigma><sigma+1|: T_{s,s+k} = C(N-mu+k-1,k) x^k.
[[nodiscard]] BandedExactMatrix build_T(const LatticeWindow& w, const mpq_class& x);
// T^{-1} = (1 - x S)^{N-mu}: finite binomial expansion.
[[nodiscard]] BandedExactMatrix build_T_inverse(const LatticeWindow& w, const mpq_class& x);

// Tridiagonal, diagonal sigma(sigma - mu), sub-diagonal (sigma, sigma-1) = x and
// super-diagonal (sigma-1, sigma) = x sigma(N - sigma + 1) for H1,
// x (mu - sigma + 1)(N - mu + sigma) for H2.
[[nodiscard]] BandedExactMatrix build_H1(const LatticeWindow& w, const mpq_class& x);
[[nodiscard]] BandedExactMatrix build_H2(const LatticeWindow& w, const mpq_class& x);

// Max |LHS - RHS| of the order-by-order identity satisfied by the Taylor
// coefficients of T, over sigma, sigma' in the window interior and k < k_max.
[[nodiscard]] mpq_class verify_recurrence(const LatticeWindow& w, int k_max);

struct IntertwiningResidual {
    mpq_class interior;  // rows and columns at least edge_margin from the boundary
    mpq_class boundary;  // everything else (truncation effect; reported only)
};

[[nodiscard]] IntertwiningResidual verify_intertwining(const LatticeWindow& w, const mpq_class& x,
                                                       int edge_margin);

// Max |T T^{-1} - 1| over the window.
[[nodiscard]] mpq_class verify_T_inverse(const LatticeWindow& w, const mpq_class& x);

// Checks that each monomial entry of T at (s, s+k) carries x^k.
[[nodiscard]] bool check_T_grading(const BandedExactMatrix& t);

struct SimilarityResidual {
    double h1 = 0.0;  // max relative deviation of U^{-1} H U from H1
    double h2 = 0.0;  // same for the mirrored Hamiltonian against H2
    int lo = 0;       // sigma range where every gamma argument is positive
    int hi = 0;
};

// Floating-point similarity check on sigma in [max(0, mu-N), min(mu, N)] with
// U = diag sqrt(Gamma(s+1)/Gamma(N-s+1)) and V = diag sqrt(Gamma(mu-s+1)/Gamma(N-mu+s+1)).
// H2 is reached as V M V^{-1} with M the mirrored Hamiltonian.
[[nodiscard]] SimilarityResidual similarity_check(int big_n, int mu, const mpq_class& x);

struct PairingRecord {
    int n = 0;
    int partner = 0;
    int order = 0;
    double splitting = 0.0;
    double normalized = 0.0;  // splitting / g^order
    double predicted = 0.0;   // 2 omega_R / g^order
};

// Normalized splittings of every resonant pair at integer mu_N = m.
[[nodiscard]] std::vector<PairingRecord> verify_spectral_pairing(const ModelParams& p, int m);

// "p/q" or "p"; throws ConfigError on malformed input or zero denominator.
[[nodiscard]] mpq_class parse_rational(const std::string& text);

}  // namespace kerrpair
