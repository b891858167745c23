#pragma once

// Classical limit on the Bloch sphere. With the Schwinger mapping
// L_z = (n_a - n_b)/2 (so |n, N-n> sits at L_z = n - N/2) the Hamiltonian becomes
//
//   H = -Delta (L_z + N/2) + (a1/2)(L_z + N/2)^2 + (a2/2)(L_z - N/2)^2 + 2 g L_x + w2 N
//
// and the flow preserves L^2. Equilibria lie on the L_y = 0 great circle,
// parametrised as L_z = R cos(theta), L_x = R sin(theta).

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kerrpair/model.hpp"
#include "kerrpair/parallel.hpp"

namespace kerrpair {

struct ClassicalState {
    double lx = 0.0;
    double ly = 0.0;
    double lz = 0.0;

    [[nodiscard]] double l2() const noexcept { return lx * lx + ly * ly + lz * lz; }
};

enum class RadiusConvention {
    quantum,  // R^2 = N(N+2)/4
    large_n,  // R^2 = N^2/4
};

[[nodiscard]] double sphere_radius(int big_n, RadiusConvention convention);

[[nodiscard]] double classical_hamiltonian(const ClassicalState& s, const ModelParams& p);
[[nodiscard]] std::array<double, 3> eom_rhs(const ClassicalState& s, const ModelParams& p);

// Point on the L_y = 0 circle of radius r.
[[nodiscard]] ClassicalState state_on_circle(double theta, double radius);

struct TrajectoryOptions {
    double rtol = 1e-10;
    double atol = 0.0;  // 0: rtol * |L| of the initial state
    std::vector<double> sample_times;  // empty: 'samples' uniform points over [0, t_span]
    int samples = 201;
    long max_steps = 5'000'000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ClassicalState> states;
    std::vector<double> energy;
    // Maximum relative deviations from the initial values, checked at every
    // accepted step (not only at the samples).
    double l2_drift = 0.0;
    double h_drift = 0.0;
    long steps = 0;
    bool completed = true;
    std::string diagnostic;  // set when the integrator stopped early
};

// Adaptive Dormand-Prince 5(4) with dense output, no projection onto the sphere.
[[nodiscard]] Trajectory integrate_trajectory(const ClassicalState& s0, const ModelParams& p,
                                              double t_span, const TrajectoryOptions& options = {});

struct PeriodAverage {
    double period = 0.0;  // 0 for an equilibrium start
    double lx = 0.0;
    double ly = 0.0;
    double lz = 0.0;
};

struct PeriodOptions {
    double rtol = 1e-10;
    double max_time = 1e6;
    long max_steps = 5'000'000;
};

// Time averages over one period, measured between successive crossings of the
// L_y = 0 section with dL_y/dt > 0. Throws NumericalError when no return is found.
[[nodiscard]] PeriodAverage period_average(const ClassicalState& s0, const ModelParams& p,
                                           const PeriodOptions& options = {});

enum class Stability { stable, unstable };
enum class EquilibriumLabel { P1, P2, P3, S };

[[nodiscard]] const char* label_name(EquilibriumLabel label) noexcept;

struct EquilibriumPoint {
    double theta = 0.0;
    ClassicalState state;
    Stability stability = Stability::stable;
    EquilibriumLabel label = EquilibriumLabel::P1;
    double residual = 0.0;  // |sin t + a tan t - c| / max(1, c)
};

struct EquilibriumOptions {
    RadiusConvention radius = RadiusConvention::large_n;
    double beta_start = 1e-6;  // labels are carried from here by continuation
    int continuation_steps = 400;
};

// Roots of sin t + ((N - mu)/(2R)) tan t - 2g/((a1+a2) R) = 0 on (-pi, pi], labelled
// by continuation in beta from beta_start. Sorted by theta. Needs g > 0 and
// mu_N > 0; throws NumericalError when the root count is not 2 or 4.
[[nodiscard]] std::vector<EquilibriumPoint> find_equilibria(const ModelParams& p,
                                                            const EquilibriumOptions& options = {});

// Unlabelled roots of sin t + a tan t = c (sorted), for the dimensionless problem.
[[nodiscard]] std::vector<double> equilibrium_angles(double a, double c);

// beta = 8 g^2 N / ((a1+a2)^2 mu^3); DomainError for mu <= 0.
[[nodiscard]] double beta(const ModelParams& p);
// (gamma/2)(gamma^{2/3} - (gamma-1)^{2/3})^3; DomainError for gamma < 1.
[[nodiscard]] double beta_crit(double gamma);
// Coupling where beta(p) = beta_crit(N/mu).
[[nodiscard]] double g_crit(const ModelParams& p);
// Coupling realising a given beta at p's N, mu and alphas.
[[nodiscard]] double g_for_beta(const ModelParams& p, double beta_value);

// Number of equilibria in the large-N problem at (gamma, beta).
[[nodiscard]] int equilibrium_count(double gamma, double beta_value);
// Bisection on beta for the 4 -> 2 root-count transition.
[[nodiscard]] double locate_bifurcation(double gamma, double tolerance = 1e-12);

struct BranchRow {
    double sqrt_beta = 0.0;
    // indexed by EquilibriumLabel; empty when the point no longer exists
    std::array<std::optional<EquilibriumPoint>, 4> points;
};

// Equilibria along a sqrt(beta) grid with labels carried point to point.
[[nodiscard]] std::vector<BranchRow> equilibrium_branches(const ModelParams& p,
                                                          std::span<const double> sqrt_beta_grid,
                                                          const EquilibriumOptions& options = {});

// theta_i = pi/2 - arctan(L_z / |L_x|), the polar angle used in the branch diagram.
[[nodiscard]] double branch_angle(const ClassicalState& s) noexcept;

enum class LzConvention {
    schwinger,  // L_z = n - N/2
    reversed,   // L_z = N/2 - n
};

struct QuantumAverage {
    int level = 0;
    double energy = 0.0;         // includes the block offset (same frame as H)
    double dimensionless = 0.0;  // offset-free, scaled like the spectra
    double lx = 0.0;
    double lz = 0.0;
};

[[nodiscard]] std::vector<QuantumAverage> quantum_averages(
    const ModelParams& p, LzConvention convention = LzConvention::schwinger);

struct ClassicalOrbit {
    double theta0 = 0.0;  // start on the L_y = 0 circle
    double energy = 0.0;
    PeriodAverage average;
};

// All orbits of energy E, one per root of H = E on the L_y = 0 circle of radius r.
[[nodiscard]] std::vector<ClassicalOrbit> orbits_at_energy(const ModelParams& p, double energy,
                                                           double radius,
                                                           const PeriodOptions& options = {});

struct ComparisonRecord {
    QuantumAverage quantum;
    // Averages in the state actually compared: the eigenstate itself, or for a
    // resonant doublet the member of the L_z-diagonal basis of the pair.
    double local_lx = 0.0;
    double local_lz = 0.0;
    bool doublet = false;
    bool near_separatrix = false;
    int candidates = 0;
    double classical_lx = 0.0;
    double classical_lz = 0.0;
    double lz_difference = 0.0;  // |<L_z>_cl - local_lz| for the closest orbit
};

struct ComparisonOptions {
    RadiusConvention radius = RadiusConvention::quantum;
    double separatrix_band = 1e-3;  // relative to the H range on the sphere
    // Two adjacent levels form a doublet when their splitting is below this
    // fraction of both neighbouring spacings. 0 disables the localization.
    double doublet_ratio = 0.1;
    PeriodOptions period;
    Execution exec = Execution::serial;
};

// Pairs every eigenstate with the classical orbit of equal energy whose <L_z> is
// closest to the quantum value.
//
// At integer mu the quantised levels of the two classical wells coincide and the
// eigenstates come as tunnelling doublets, each member an even superposition of the
// two orbits. Such pairs are replaced by the two states that diagonalise L_z inside
// the pair (one per well) before the comparison; quantum.lx/lz keep the raw values.
//
// A state is flagged near_separatrix, and left without a partner, when it lies within
// the separatrix band or closer to the saddle energy than the local level spacing.
[[nodiscard]] std::vector<ComparisonRecord> compare_averages(const ModelParams& p,
                                                             const ComparisonOptions& options = {});

struct ScanPoint {
    double energy = 0.0;
    double dimensionless = 0.0;
    std::vector<ClassicalOrbit> orbits;
};

// Classical averages on a uniform energy grid across the H range of the sphere,
// skipping the separatrix band.
[[nodiscard]] std::vector<ScanPoint> classical_energy_scan(const ModelParams& p, int count,
                                                           const ComparisonOptions& options = {});

}  // namespace kerrpair
