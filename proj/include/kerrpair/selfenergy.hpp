#pragma once

// Leading-order resolvent treatment of a resonant pair (n, m - n) at integer mu_N = m.
// The off-diagonal self-energy connecting the pair is a chain of m - 2n couplings
// through the intermediate levels n+1 .. m-n-1; its value at the unperturbed pair
// energy is the multi-photon Rabi frequency.

#include <utility>
#include <vector>

#include "kerrpair/model.hpp"

namespace kerrpair {

struct ResonantPair {
    int n = 0;
    int m = 0;
    int big_n = 0;

    [[nodiscard]] int partner() const noexcept { return m - n; }
    [[nodiscard]] int order() const noexcept { return m - 2 * n; }
};

// Checks 0 <= n < m - n <= N; throws DomainError otherwise.
[[nodiscard]] ResonantPair make_resonant_pair(int n, int m, int big_n);

// g^{m-2n} sqrt((m-n)!/n! (N-n)!/(N-m+n)!) / prod_{k=n+1}^{m-n-1} (omega - eps0_k)
// with eps0_k = unperturbed_energy(k, N - k). Throws PoleError if omega sits on an
// intermediate level.
[[nodiscard]] double leading_sigma(const ResonantPair& pair, const ModelParams& p, double omega);

// (a1+a2)/2 (2g/(a1+a2))^{m-2n} sqrt((m-n)!/n! (N-n)!/(N-m+n)!) / ((m-2n-1)!)^2,
// evaluated in log space.
[[nodiscard]] double rabi_frequency(const ResonantPair& pair, const ModelParams& p);

// (mean + root, mean - root), root = sqrt(((e1 - e2)/2)^2 + sigma^2).
[[nodiscard]] std::pair<double, double> anticrossing_energies(double eps1, double eps2,
                                                              double sigma) noexcept;

// 2 sqrt(((e1 - e2)/2)^2 + sigma^2).
[[nodiscard]] double splitting(double eps1, double eps2, double sigma) noexcept;

struct ResolventOptions {
    int samples = 20000;      // uniform omega grid between the bracket ends
    double margin = 1.0;      // grid extends this far beyond the Gershgorin interval
    double tolerance = 1e-13; // bisection stopping width, relative to the bracket scale
};

// Dense-resolvent Dyson check. The 2x2 block of G(omega) = (omega - H)^{-1} on
// {|n>, |m-n>} is inverted and the zeros of its determinant are located from sign
// changes on a real grid, refined by bisection. Grid cells are split (guided by
// inertia counts of omega - H and omega - H_QQ) until no zero shares a cell with a
// pole. Those zeros are the eigenvalues of H that couple to the pair; a level whose
// zero and pole coincide to within the tolerance is dropped as decoupled. Only meant
// for small N (dense LU per probe).
[[nodiscard]] std::vector<double> resolvent_block_poles(const ModelParams& p, int n, int partner,
                                                        const ResolventOptions& options = {});

}  // namespace kerrpair
