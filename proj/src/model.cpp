#include "kerrpair/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "kerrpair/errors.hpp"

namespace kerrpair {

ModelParams ModelParams::from_delta(double delta, int big_n, double alpha1, double alpha2,
                                    double g) {
    ModelParams p;
    p.omega1 = 0.0;
    p.omega2 = delta;
    p.alpha1 = alpha1;
    p.alpha2 = alpha2;
    p.g = g;
    p.big_n = big_n;
    return p;
}

ModelParams ModelParams::from_mu(double mu, int big_n, double alpha1, double alpha2,
                                 double g) {
    ModelParams p = from_delta(0.0, big_n, alpha1, alpha2, g);
    p.omega2 = delta_for_mu(mu, p);
    return p;
}

ModelParams ModelParams::with_mu(double mu) const {
    ModelParams p = *this;
    p.omega2 = omega1 + delta_for_mu(mu, *this);
    return p;
}

ModelParams ModelParams::with_g(double coupling) const {
    ModelParams p = *this;
    p.g = coupling;
    return p;
}

void validate(const ModelParams& p) {
    for (double v : {p.omega1, p.omega2, p.alpha1, p.alpha2, p.g}) {
        if (!std::isfinite(v)) throw DomainError("model parameters must be finite");
    }
    if (p.big_n < 0) throw DomainError("total quanta N must be >= 0");
    if (!(p.alpha_sum() > 0.0)) throw DomainError("alpha1 + alpha2 must be > 0");
    if (p.g < 0.0) throw DomainError("coupling g must be >= 0");
}

double derived_mu(const ModelParams& p) {
    const double a = p.alpha_sum();
    if (a == 0.0) throw DomainError("degenerate nonlinearity: alpha1 + alpha2 == 0");
    return 2.0 * (p.delta() + p.alpha2 * p.big_n) / a;
}

double delta_for_mu(double mu, const ModelParams& p) noexcept {
    return 0.5 * mu * p.alpha_sum() - p.alpha2 * p.big_n;
}

double unperturbed_energy(int n_a, int n_b, const ModelParams& p) {
    if (n_a < 0 || n_b < 0) throw DomainError("occupation numbers must be >= 0");
    const double na = n_a;
    const double nb = n_b;
    return 0.5 * p.alpha1 * na * na + 0.5 * p.alpha2 * nb * nb + p.omega1 * na + p.omega2 * nb;
}

double relative_level(double n, double mu, double alpha_sum) noexcept {
    return 0.5 * alpha_sum * n * (n - mu);
}

double block_energy_offset(const ModelParams& p) noexcept {
    const double n = p.big_n;
    return p.omega2 * n + 0.5 * p.alpha2 * n * n;
}

double coupling_element(int n, int big_n, double g) noexcept {
    return g * std::sqrt(static_cast<double>(n + 1) * static_cast<double>(big_n - n));
}

SubspaceHamiltonian build_subspace_hamiltonian(const ModelParams& p, EnergyOffset offset) {
    validate(p);
    const double n_big = p.big_n;
    // The largest diagonal entries scale like (a1 + a2) N^2; keep them well inside range.
    const double scale = p.alpha_sum() * n_big * n_big + std::abs(p.delta()) * n_big;
    if (!(scale < std::numeric_limits<double>::max() / 16.0)) {
        throw DomainError("N = " + std::to_string(p.big_n) +
                          " overflows the representable energy range");
    }

    const double mu = derived_mu(p);
    SubspaceHamiltonian h;
    h.n_dim = p.big_n + 1;
    h.energy_offset = offset == EnergyOffset::included ? block_energy_offset(p) : 0.0;
    h.diag.resize(static_cast<std::size_t>(h.n_dim));
    h.offdiag.resize(static_cast<std::size_t>(p.big_n));
    for (int n = 0; n <= p.big_n; ++n) {
        h.diag[static_cast<std::size_t>(n)] = relative_level(n, mu, p.alpha_sum()) + h.energy_offset;
    }
    for (int n = 0; n < p.big_n; ++n) {
        h.offdiag[static_cast<std::size_t>(n)] = coupling_element(n, p.big_n, p.g);
    }
    return h;
}

}  // namespace kerrpair
