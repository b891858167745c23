#pragma once

// Unitary evolution inside the N block by spectral decomposition:
//   psi(t) = sum_l exp(-i eps_l t) <v_l|psi0> |v_l>
// Times are in units of 1/alpha1 when the parameters are.

#include <complex>
#include <span>
#include <vector>

#include "kerrpair/model.hpp"
#include "kerrpair/parallel.hpp"
#include "kerrpair/spectral.hpp"

namespace kerrpair {

using Complex = std::complex<double>;

struct WaveFunction {
    std::vector<Complex> amps;  // amps[n] multiplies |n, N-n>

    [[nodiscard]] int big_n() const noexcept { return static_cast<int>(amps.size()) - 1; }
    [[nodiscard]] double norm() const;

    static WaveFunction fock(int big_n, int n);
};

// Throws DomainError unless the state has N + 1 amplitudes and unit norm (1e-12).
void check_state(const WaveFunction& psi, int big_n);

[[nodiscard]] std::vector<WaveFunction> evolve(const ModelParams& p, const WaveFunction& psi0,
                                               std::span<const double> times,
                                               Execution exec = Execution::serial);

// Same as evolve with a precomputed spectrum of p's (offset-free) block.
[[nodiscard]] std::vector<WaveFunction> evolve(const Spectrum& spectrum, const WaveFunction& psi0,
                                               std::span<const double> times,
                                               Execution exec = Execution::serial);

// <psi|H|psi> for the offset-free block of p.
[[nodiscard]] double energy_expectation(const ModelParams& p, const WaveFunction& psi);

struct TraceTable {
    std::vector<double> times;
    std::vector<int> targets;
    std::vector<double> values;  // row-major: values[t * targets.size() + j]

    [[nodiscard]] double at(std::size_t t, std::size_t j) const {
        return values[t * targets.size() + j];
    }
};

// |<target_j, N - target_j|psi(t)>|^2. Throws DomainError for targets outside [0, N].
[[nodiscard]] TraceTable projection_traces(const ModelParams& p, const WaveFunction& psi0,
                                           std::span<const int> targets,
                                           std::span<const double> times,
                                           Execution exec = Execution::serial);

struct TwoLevelTraces {
    double omega_r = 0.0;
    double t_star = 0.0;  // pi / (4 omega_r): maximally entangling time
    std::vector<double> times;
    std::vector<double> stay;      // cos^2(omega_r t)
    std::vector<double> transfer;  // sin^2(omega_r t)
};

// Two-level picture of the resonant pair (n, m - n), m = mu_N (must be integral).
[[nodiscard]] TwoLevelTraces two_level_approximation(const ModelParams& p, int n,
                                                     std::span<const double> times);

// mu_N rounded to the nearest integer; throws DomainError when it is farther than
// 1e-9 max(1, |mu|) from it.
[[nodiscard]] int integer_mu(const ModelParams& p);

}  // namespace kerrpair
