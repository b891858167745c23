#pragma once

#include <span>
#include <string>
#include <vector>

#include "kerrpair/model.hpp"
#include "kerrpair/parallel.hpp"
#include "kerrpair/tridiagonal.hpp"

namespace kerrpair {

// Ascending eigenvalues with orthonormal eigenvectors; column l holds the
// Fock-basis coefficients c_{l,n}.
struct Spectrum {
    int dim = 0;
    std::vector<double> eigenvalues;
    std::vector<double> eigenvectors;  // column-major, dim x dim

    [[nodiscard]] double coefficient(int level, int n) const {
        return eigenvectors[static_cast<std::size_t>(level) * dim + n];
    }
    [[nodiscard]] std::span<const double> eigenvector(int level) const {
        return {eigenvectors.data() + static_cast<std::size_t>(level) * dim,
                static_cast<std::size_t>(dim)};
    }
};

[[nodiscard]] Spectrum eigendecompose(const SubspaceHamiltonian& h,
                                      tridiag::Method method = tridiag::Method::implicit_ql);

// (a1 + a2) / (Delta + a2 N)^2; throws DomainError when mu_N == 0.
[[nodiscard]] double dimensionless_scale(const ModelParams& p);
[[nodiscard]] std::vector<double> dimensionless_energies(const Spectrum& s, const ModelParams& p);

enum class SweepParameter { mu, g };

struct SweepPoint {
    double grid_value = 0.0;
    ModelParams params;
    std::vector<double> eigenvalues;
    std::vector<double> dimensionless;
    std::vector<double> eigenvectors;  // empty unless requested
};

struct SweepResult {
    SweepParameter parameter = SweepParameter::mu;
    ModelParams base;
    EnergyOffset offset = EnergyOffset::excluded;
    std::vector<SweepPoint> points;

    [[nodiscard]] bool has_eigenvectors() const {
        return !points.empty() && !points.front().eigenvectors.empty();
    }
};

struct SweepOptions {
    bool keep_eigenvectors = false;
    EnergyOffset offset = EnergyOffset::excluded;
    Execution exec = Execution::serial;
};

// Grid points are diagonalized independently; throws DomainError on a grid that is
// not strictly increasing and NumericalError naming the failing grid value.
[[nodiscard]] SweepResult sweep_mu(const ModelParams& p, std::span<const double> mu_grid,
                                   const SweepOptions& options = {});
[[nodiscard]] SweepResult sweep_g(const ModelParams& p, std::span<const double> g_grid,
                                  const SweepOptions& options = {});

// Greedy maximal assignment on |<prev_i|next_j>|: result[i] is the index in `next`
// continuing level i of `prev`. Ties go to the lower index.
[[nodiscard]] std::vector<int> match_by_overlap(std::span<const double> prev,
                                                std::span<const double> next, int dim);

// branches[k][b] = sorted level index carrying branch b at sweep point k, with
// branch b defined as sorted level b at the first point. Needs eigenvectors.
[[nodiscard]] std::vector<std::vector<int>> track_levels(const SweepResult& sweep);

struct AnticrossingRecord {
    int level_lo = 0;  // adjacent sorted levels (level_lo, level_lo + 1)
    int level_hi = 1;
    double mu_star = 0.0;
    double gap_min = 0.0;
    int fock_n = 0;          // Fock states the two levels connect to as g -> 0+
    int fock_partner = 0;    // at fixed mu_star; fock_n <= fock_partner
    double isolation = 0.0;  // gap_min / nearest neighbouring gap at mu_star
};

struct AnticrossingOptions {
    double tolerance = 1e-6;
    // A gap minimum counts as a two-level anticrossing only when it is this much
    // smaller than the neighbouring level spacings.
    double max_isolation = 0.05;
    Execution exec = Execution::serial;
};

// Local minima of every adjacent gap on the sweep grid, refined by golden-section
// search with re-diagonalization. Sorted by mu_star. Requires a mu sweep with >= 3
// points.
[[nodiscard]] std::vector<AnticrossingRecord> detect_anticrossings(
    const SweepResult& sweep, const AnticrossingOptions& options = {});

// Splitting eps+ - eps- of the resonant pair (n, m - n) at integer mu_N = m.
// Evaluated in quadruple precision with mu fixed to exactly m, so splittings far
// below double resolution are resolved. Throws NumericalError when the best overlap
// onto (|n> +- |m-n>)/sqrt(2) is below 0.5.
[[nodiscard]] double pair_splitting(const ModelParams& p, int n, int m);

struct PowerLawFit {
    double slope = 0.0;
    double intercept = 0.0;  // log(splitting) at log(g) = 0
    std::vector<double> g_values;
    std::vector<double> splittings;
};

// Least-squares slope of log(pair_splitting) vs log(g) on a geometric g grid.
[[nodiscard]] PowerLawFit fit_splitting_power_law(const ModelParams& p, int n, int m,
                                                  double g_lo, double g_hi, int count);

}  // namespace kerrpair
