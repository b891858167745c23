#include "kerrpair/selfenergy.hpp"

#include <cmath>
#include <sstream>

#include "kerrpair/errors.hpp"

namespace kerrpair {

ResonantPair make_resonant_pair(int n, int m, int big_n) {
    if (!(n >= 0 && n < m - n && m - n <= big_n)) {
        std::ostringstream msg;
        msg << "resonant pair needs 0 <= n < m - n <= N (got n=" << n << ", m=" << m
            << ", N=" << big_n << ")";
        throw DomainError(msg.str());
    }
    return {n, m, big_n};
}

namespace {

void check_pair(const ResonantPair& pair, const ModelParams& p) {
    (void)make_resonant_pair(pair.n, pair.m, pair.big_n);
    if (pair.big_n != p.big_n) throw DomainError("resonant pair N differs from model N");
}

// log sqrt((m-n)!/n! * (N-n)!/(N-m+n)!)
double log_chain_norm(const ResonantPair& pair) {
    const double n = pair.n;
    const double mn = pair.partner();
    const double big = pair.big_n;
    return 0.5 * (std::lgamma(mn + 1) - std::lgamma(n + 1) + std::lgamma(big - n + 1) -
                  std::lgamma(big - mn + 1));
}

}  // namespace

double leading_sigma(const ResonantPair& pair, const ModelParams& p, double omega) {
    check_pair(pair, p);
    double denom = 1.0;
    for (int k = pair.n + 1; k < pair.partner(); ++k) {
        const double d = omega - unperturbed_energy(k, p.big_n - k, p);
        if (d == 0.0) {
            throw PoleError("leading_sigma: omega coincides with intermediate level " +
                            std::to_string(k));
        }
        denom *= d;
    }
    if (p.g == 0.0) return 0.0;
    const double magnitude =
        std::exp(pair.order() * std::log(p.g) + log_chain_norm(pair));
    return magnitude / denom;
}

double rabi_frequency(const ResonantPair& pair, const ModelParams& p) {
    check_pair(pair, p);
    validate(p);
    if (p.g == 0.0) return 0.0;
    const double a = p.alpha_sum();
    const int order = pair.order();
    const double log_value = std::log(0.5 * a) + order * std::log(2.0 * p.g / a) +
                             log_chain_norm(pair) - 2.0 * std::lgamma(order);
    const double value = std::exp(log_value);
    if (!std::isfinite(value)) throw NumericalError("rabi_frequency overflow");
    return value;
}

std::pair<double, double> anticrossing_energies(double eps1, double eps2, double sigma) noexcept {
    const double mean = 0.5 * (eps1 + eps2);
    const double root = std::hypot(0.5 * (eps1 - eps2), sigma);
    return {mean + root, mean - root};
}

double splitting(double eps1, double eps2, double sigma) noexcept {
    return 2.0 * std::hypot(0.5 * (eps1 - eps2), sigma);
}

}  // namespace kerrpair
