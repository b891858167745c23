#pragma once

// Two Kerr oscillators coupled in the rotating-wave approximation:
//
//   H = w1 a'a + w2 b'b + (a1/2)(a'a)^2 + (a2/2)(b'b)^2 + g (a'b + b'a)
//
// H conserves N = a'a + b'b, so everything here works inside one fixed-N block
// spanned by |n, N-n>, n = 0..N (n counts quanta in mode a).

#include <vector>

namespace kerrpair {

struct ModelParams {
    double omega1 = 0.0;
    double omega2 = 0.0;
    double alpha1 = 1.0;
    double alpha2 = 0.0;
    double g = 0.0;
    int big_n = 0;

    [[nodiscard]] double delta() const noexcept { return omega2 - omega1; }
    [[nodiscard]] double alpha_sum() const noexcept { return alpha1 + alpha2; }

    // Canonical construction: omega1 = 0, omega2 = delta.
    static ModelParams from_delta(double delta, int big_n, double alpha1, double alpha2,
                                  double g);
    // Detuning chosen so that the resonance parameter equals `mu`.
    static ModelParams from_mu(double mu, int big_n, double alpha1, double alpha2, double g);

    // Same oscillators with the detuning moved so that derived_mu == mu.
    [[nodiscard]] ModelParams with_mu(double mu) const;
    [[nodiscard]] ModelParams with_g(double coupling) const;
};

// Throws DomainError unless alpha1 + alpha2 > 0, N >= 0, g >= 0 and all fields finite.
void validate(const ModelParams& p);

// mu_N = 2 (Delta + a2 N) / (a1 + a2). Throws DomainError when a1 + a2 == 0.
[[nodiscard]] double derived_mu(const ModelParams& p);

// Delta = mu (a1 + a2)/2 - a2 N.
[[nodiscard]] double delta_for_mu(double mu, const ModelParams& p) noexcept;

// eps0(n_a, n_b) = a1 n_a^2/2 + a2 n_b^2/2 + w1 n_a + w2 n_b.
[[nodiscard]] double unperturbed_energy(int n_a, int n_b, const ModelParams& p);

// Offset-free diagonal of the N block: (a1 + a2)/2 * n (n - mu).
[[nodiscard]] double relative_level(double n, double mu, double alpha_sum) noexcept;

// The constant w2 N + a2 N^2 / 2 separating the block diagonal from eps0(n, N-n).
[[nodiscard]] double block_energy_offset(const ModelParams& p) noexcept;

enum class EnergyOffset { excluded, included };

// Real symmetric tridiagonal N-quanta block.
struct SubspaceHamiltonian {
    int n_dim = 0;
    std::vector<double> diag;     // d_n, n = 0..N
    std::vector<double> offdiag;  // e_n couples n <-> n+1, n = 0..N-1
    double energy_offset = 0.0;   // already folded into diag when included
};

// e_n = g sqrt((n+1)(N-n)).
[[nodiscard]] double coupling_element(int n, int big_n, double g) noexcept;

[[nodiscard]] SubspaceHamiltonian build_subspace_hamiltonian(
    const ModelParams& p, EnergyOffset offset = EnergyOffset::excluded);

}  // namespace kerrpair
