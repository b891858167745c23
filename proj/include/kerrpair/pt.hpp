#pragma once

// Non-degenerate perturbation series eps_n(g) = sum_k g^k eps_n^(k) of the N-block
// levels. Closed forms exist for k = 2 and k = 4; higher orders come from fitting
// exact (extended-precision) eigenvalues.

#include <vector>

#include "kerrpair/model.hpp"

namespace kerrpair {

struct PTCorrection {
    int order = 0;
    int level = 0;
    double value = 0.0;  // coefficient of g^order
    double error = 0.0;  // fit-based uncertainty (0 for closed forms)
};

// ((2n-mu)^2 - mu^2 + 2N(mu+1)) / ((2n-mu)^2 - 1) / (a1 + a2). PoleError at (2n-mu)^2 = 1.
[[nodiscard]] double epsilon2_closed(double n, double mu, int big_n, double alpha_sum);

// Two-term sum |V_{n,n-1}|^2/(e_n - e_{n-1}) + |V_{n,n+1}|^2/(e_n - e_{n+1}), divided by g^2.
[[nodiscard]] double epsilon2_sum(int n, const ModelParams& p);

// (N^2 A + N B + C) / (((2n-mu)^2 - 1)^3 ((2n-mu)^2 - 4)) / (a1 + a2)^3 with the
// polynomials A, B, C in (2n - mu) and mu. PoleError at (2n-mu)^2 in {1, 4}.
[[nodiscard]] double epsilon4_closed(double n, double mu, int big_n, double alpha_sum);

struct SeriesOptions {
    int grid_points = 12;      // g_j = g0 2^-j, j = 0..grid_points-1
    int guard_orders = 2;      // extra even orders fitted above max_order
    double truncation = 1e-8;  // target |c_{M+2}| g0^{M+2} / (|c_2| g0^2)
    double min_distance = 0.05;
};

// Even-order coefficients 0, 2, .., max_order of the branch connected to |n, N-n>.
// Order 0 is returned in absolute energy (equal to eps0(n, N-n)); the rest are
// offset-independent. Needs mu at least min_distance away from every integer and an
// even max_order in [2, 8]. Throws NumericalError when the branch cannot be followed.
[[nodiscard]] std::vector<PTCorrection> extract_series_coefficients(
    const ModelParams& p, int n, int max_order, const SeriesOptions& options = {});

// |eps_n^(k) - eps_{mu-n}^(k)| from the closed forms, k in {2, 4}.
[[nodiscard]] double check_pt_symmetry(int k, double n, double mu, int big_n,
                                       double alpha_sum = 1.0);

}  // namespace kerrpair
