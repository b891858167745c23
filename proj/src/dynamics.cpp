#include "kerrpair/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kerrpair/errors.hpp"
#include "kerrpair/selfenergy.hpp"

namespace kerrpair {

double WaveFunction::norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

WaveFunction WaveFunction::fock(int big_n, int n) {
    if (big_n < 0 || n < 0 || n > big_n) throw DomainError("Fock index outside [0, N]");
    WaveFunction psi;
    psi.amps.assign(static_cast<std::size_t>(big_n) + 1, Complex(0.0, 0.0));
    psi.amps[static_cast<std::size_t>(n)] = 1.0;
    return psi;
}

void check_state(const WaveFunction& psi, int big_n) {
    if (psi.big_n() != big_n) {
        throw DomainError("wave function has " + std::to_string(psi.amps.size()) +
                          " amplitudes, expected N + 1 = " + std::to_string(big_n + 1));
    }
    if (std::abs(psi.norm() - 1.0) > 1e-12) throw DomainError("wave function is not normalized");
}

std::vector<WaveFunction> evolve(const Spectrum& spectrum, const WaveFunction& psi0,
                                 std::span<const double> times, Execution exec) {
    const int dim = spectrum.dim;
    check_state(psi0, dim - 1);
    for (double t : times) {
        if (!std::isfinite(t)) throw DomainError("evolution times must be finite");
    }
    const std::size_t d = static_cast<std::size_t>(dim);
    std::vector<Complex> overlap(d);
    for (std::size_t l = 0; l < d; ++l) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += spectrum.eigenvectors[l * d + k] * psi0.amps[k];
        overlap[l] = s;
    }
    std::vector<WaveFunction> out(times.size());
    for_each_index(times.size(), exec, [&](std::size_t ti) {
        const double t = times[ti];
        std::vector<Complex> w(d);
        for (std::size_t l = 0; l < d; ++l) {
            // std::polar keeps the phase exact to double rounding for large eps t
            w[l] = overlap[l] * std::polar(1.0, -spectrum.eigenvalues[l] * t);
        }
        WaveFunction& psi = out[ti];
        psi.amps.assign(d, Complex(0.0, 0.0));
        for (std::size_t l = 0; l < d; ++l) {
            for (std::size_t k = 0; k < d; ++k) {
                psi.amps[k] += spectrum.eigenvectors[l * d + k] * w[l];
            }
        }
    });
    return out;
}

std::vector<WaveFunction> evolve(const ModelParams& p, const WaveFunction& psi0,
                                 std::span<const double> times, Execution exec) {
    check_state(psi0, p.big_n);
    return evolve(eigendecompose(build_subspace_hamiltonian(p)), psi0, times, exec);
}

double energy_expectation(const ModelParams& p, const WaveFunction& psi) {
    check_state(psi, p.big_n);
    const SubspaceHamiltonian h = build_subspace_hamiltonian(p);
    double e = 0.0;
    for (int n = 0; n <= p.big_n; ++n) {
        const auto i = static_cast<std::size_t>(n);
        e += h.diag[i] * std::norm(psi.amps[i]);
        if (n < p.big_n) e += 2.0 * h.offdiag[i] * std::real(std::conj(psi.amps[i]) * psi.amps[i + 1]);
    }
    return e;
}

TraceTable projection_traces(const ModelParams& p, const WaveFunction& psi0,
                             std::span<const int> targets, std::span<const double> times,
                             Execution exec) {
    for (int t : targets) {
        if (t < 0 || t > p.big_n) {
            throw DomainError("projection target " + std::to_string(t) + " outside [0, N]");
        }
    }
    const auto states = evolve(p, psi0, times, exec);
    TraceTable table;
    table.times.assign(times.begin(), times.end());
    table.targets.assign(targets.begin(), targets.end());
    table.values.resize(times.size() * targets.size());
    for (std::size_t ti = 0; ti < states.size(); ++ti) {
        for (std::size_t j = 0; j < targets.size(); ++j) {
            table.values[ti * targets.size() + j] =
                std::norm(states[ti].amps[static_cast<std::size_t>(targets[j])]);
        }
    }
    return table;
}

int integer_mu(const ModelParams& p) {
    const double mu = derived_mu(p);
    const double m = std::round(mu);
    if (std::abs(mu - m) > 1e-9 * std::max(1.0, std::abs(mu))) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "mu_N = " << mu << " is not an integer";
        throw DomainError(msg.str());
    }
    return static_cast<int>(m);
}

TwoLevelTraces two_level_approximation(const ModelParams& p, int n,
                                       std::span<const double> times) {
    const ResonantPair pair = make_resonant_pair(n, integer_mu(p), p.big_n);
    TwoLevelTraces out;
    out.omega_r = rabi_frequency(pair, p);
    out.t_star = out.omega_r > 0.0 ? std::numbers::pi / (4.0 * out.omega_r)
                                   : std::numeric_limits<double>::infinity();
    out.times.assign(times.begin(), times.end());
    for (double t : times) {
        const double c = std::cos(out.omega_r * t);
        const double s = std::sin(out.omega_r * t);
        out.stay.push_back(c * c);
        out.transfer.push_back(s * s);
    }
    return out;
}

}  // namespace kerrpair
