#include "kerrpair/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <tuple>

#include "kerrpair/errors.hpp"
#include "kerrpair/precision.hpp"

namespace kerrpair {

Spectrum eigendecompose(const SubspaceHamiltonian& h, tridiag::Method method) {
    if (static_cast<int>(h.diag.size()) != h.n_dim ||
        static_cast<int>(h.offdiag.size()) != std::max(h.n_dim - 1, 0)) {
        throw DomainError("eigendecompose: malformed subspace Hamiltonian");
    }
    auto dec = tridiag::solve<double>(h.diag, h.offdiag, method);
    Spectrum s;
    s.dim = dec.dim;
    s.eigenvalues = std::move(dec.values);
    s.eigenvectors = std::move(dec.vectors);
    return s;
}

double dimensionless_scale(const ModelParams& p) {
    const double denom = p.delta() + p.alpha2 * p.big_n;
    if (denom == 0.0) {
        throw DomainError("dimensionless energies undefined at mu_N = 0 (Delta + a2 N = 0)");
    }
    return p.alpha_sum() / (denom * denom);
}

std::vector<double> dimensionless_energies(const Spectrum& s, const ModelParams& p) {
    const double scale = dimensionless_scale(p);
    std::vector<double> out(s.eigenvalues.size());
    std::transform(s.eigenvalues.begin(), s.eigenvalues.end(), out.begin(),
                   [scale](double e) { return scale * e; });
    return out;
}

namespace {

void require_strictly_increasing(std::span<const double> grid, const char* name) {
    if (grid.empty()) throw DomainError(std::string(name) + " grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw DomainError(std::string(name) + " grid must be strictly increasing");
        }
    }
}

SweepResult run_sweep(SweepParameter which, const ModelParams& p, std::span<const double> grid,
                      const SweepOptions& options) {
    validate(p);
    require_strictly_increasing(grid, which == SweepParameter::mu ? "mu" : "g");
    SweepResult result;
    result.parameter = which;
    result.base = p;
    result.offset = options.offset;
    result.points.resize(grid.size());
    for_each_index(grid.size(), options.exec, [&](std::size_t i) {
        SweepPoint& pt = result.points[i];
        pt.grid_value = grid[i];
        pt.params = which == SweepParameter::mu ? p.with_mu(grid[i]) : p.with_g(grid[i]);
        try {
            Spectrum s = eigendecompose(build_subspace_hamiltonian(pt.params, options.offset));
            pt.dimensionless = dimensionless_energies(s, pt.params);
            pt.eigenvalues = std::move(s.eigenvalues);
            if (options.keep_eigenvectors) pt.eigenvectors = std::move(s.eigenvectors);
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "sweep failed at " << (which == SweepParameter::mu ? "mu" : "g") << " = "
                << grid[i] << ": " << e.what();
            throw NumericalError(msg.str());
        }
    });
    return result;
}

}  // namespace

SweepResult sweep_mu(const ModelParams& p, std::span<const double> mu_grid,
                     const SweepOptions& options) {
    return run_sweep(SweepParameter::mu, p, mu_grid, options);
}

SweepResult sweep_g(const ModelParams& p, std::span<const double> g_grid,
                    const SweepOptions& options) {
    for (double g : g_grid) {
        if (g < 0.0) throw DomainError("g grid values must be >= 0");
    }
    return run_sweep(SweepParameter::g, p, g_grid, options);
}

std::vector<int> match_by_overlap(std::span<const double> prev, std::span<const double> next,
                                  int dim) {
    const std::size_t n = static_cast<std::size_t>(dim);
    if (prev.size() != n * n || next.size() != n * n) {
        throw DomainError("match_by_overlap: eigenvector blocks must be dim x dim");
    }
    struct Candidate {
        double overlap;
        int i;
        int j;
    };
    std::vector<Candidate> cands;
    cands.reserve(n * n);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                dot += prev[static_cast<std::size_t>(i) * n + k] *
                       next[static_cast<std::size_t>(j) * n + k];
            }
            cands.push_back({std::abs(dot), i, j});
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.overlap != b.overlap) return a.overlap > b.overlap;
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    std::vector<int> assignment(n, -1);
    std::vector<char> taken(n, 0);
    std::size_t assigned = 0;
    for (const auto& c : cands) {
        if (assigned == n) break;
        if (assignment[static_cast<std::size_t>(c.i)] >= 0 || taken[static_cast<std::size_t>(c.j)]) {
            continue;
        }
        assignment[static_cast<std::size_t>(c.i)] = c.j;
        taken[static_cast<std::size_t>(c.j)] = 1;
        ++assigned;
    }
    return assignment;
}

std::vector<std::vector<int>> track_levels(const SweepResult& sweep) {
    if (!sweep.has_eigenvectors()) {
        throw DomainError("track_levels needs a sweep run with keep_eigenvectors");
    }
    const int dim = static_cast<int>(sweep.points.front().eigenvalues.size());
    std::vector<std::vector<int>> branches(sweep.points.size());
    branches[0].resize(static_cast<std::size_t>(dim));
    std::iota(branches[0].begin(), branches[0].end(), 0);
    for (std::size_t k = 1; k < sweep.points.size(); ++k) {
        const auto step = match_by_overlap(sweep.points[k - 1].eigenvectors,
                                           sweep.points[k].eigenvectors, dim);
        branches[k].resize(static_cast<std::size_t>(dim));
        for (int b = 0; b < dim; ++b) {
            branches[k][static_cast<std::size_t>(b)] =
                step[static_cast<std::size_t>(branches[k - 1][static_cast<std::size_t>(b)])];
        }
    }
    return branches;
}

namespace {

double adjacent_gap(const ModelParams& base, EnergyOffset offset, double mu, int level) {
    const Spectrum s = eigendecompose(build_subspace_hamiltonian(base.with_mu(mu), offset));
    return s.eigenvalues[static_cast<std::size_t>(level) + 1] -
           s.eigenvalues[static_cast<std::size_t>(level)];
}

// Golden-section minimization of f on [a, b] seeded with interior point c.
template <class F>
std::pair<double, double> golden_minimize(F&& f, double a, double c, double b, double tol) {
    constexpr double kInvPhi = 0.6180339887498948482;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    (void)c;
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// Fock index of every sorted level in the g -> 0+ limit at fixed mu. An irreducible
// Jacobi matrix has a simple spectrum, so sorted levels never cross while g shrinks
// and level l connects to the l-th smallest diagonal entry.
std::vector<int> adiabatic_fock_labels(int big_n, double mu, double alpha_sum) {
    std::vector<int> order(static_cast<std::size_t>(big_n) + 1);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return relative_level(a, mu, alpha_sum) < relative_level(b, mu, alpha_sum);
    });
    return order;
}

}  // namespace

std::vector<AnticrossingRecord> detect_anticrossings(const SweepResult& sweep,
                                                     const AnticrossingOptions& options) {
    if (sweep.parameter != SweepParameter::mu) {
        throw DomainError("detect_anticrossings needs a sweep over mu");
    }
    if (sweep.points.size() < 3) {
        throw DomainError("detect_anticrossings needs at least 3 sweep points");
    }
    const int dim = static_cast<int>(sweep.points.front().eigenvalues.size());
    if (dim < 2) return {};

    std::vector<std::vector<AnticrossingRecord>> per_level(static_cast<std::size_t>(dim) - 1);
    for_each_index(per_level.size(), options.exec, [&](std::size_t lvl) {
        const int level = static_cast<int>(lvl);
        auto gap_at = [&](std::size_t k) {
            const auto& ev = sweep.points[k].eigenvalues;
            return ev[lvl + 1] - ev[lvl];
        };
        for (std::size_t k = 1; k + 1 < sweep.points.size(); ++k) {
            const double g_prev = gap_at(k - 1);
            const double g_here = gap_at(k);
            const double g_next = gap_at(k + 1);
            if (!(g_here < g_prev && g_here <= g_next)) continue;

            const double a = sweep.points[k - 1].grid_value;
            const double b = sweep.points[k + 1].grid_value;
            auto f = [&](double mu) { return adjacent_gap(sweep.base, sweep.offset, mu, level); };
            auto [mu_star, gap_min] =
                golden_minimize(f, a, sweep.points[k].grid_value, b, options.tolerance);
            // A minimum pinned to the bracket edge is not interior.
            if (mu_star - a < options.tolerance || b - mu_star < options.tolerance) continue;

            const Spectrum s = eigendecompose(
                build_subspace_hamiltonian(sweep.base.with_mu(mu_star), sweep.offset));
            double neighbour = std::numeric_limits<double>::infinity();
            if (level > 0) {
                neighbour = std::min(neighbour, s.eigenvalues[lvl] - s.eigenvalues[lvl - 1]);
            }
            if (level + 2 < dim) {
                neighbour = std::min(neighbour, s.eigenvalues[lvl + 2] - s.eigenvalues[lvl + 1]);
            }
            const double isolation = std::isfinite(neighbour)
                                         ? (neighbour > 0.0 ? gap_min / neighbour
                                                            : std::numeric_limits<double>::infinity())
                                         : 0.0;
            if (isolation > options.max_isolation) continue;

            AnticrossingRecord rec;
            rec.level_lo = level;
            rec.level_hi = level + 1;
            rec.mu_star = mu_star;
            rec.gap_min = std::max(gap_min, 0.0);
            rec.isolation = isolation;
            const auto labels =
                adiabatic_fock_labels(sweep.base.big_n, mu_star, sweep.base.alpha_sum());
            int f1 = labels[lvl];
            int f2 = labels[lvl + 1];
            if (f1 > f2) std::swap(f1, f2);
            rec.fock_n = f1;
            rec.fock_partner = f2;
            per_level[lvl].push_back(rec);
        }
    });

    std::vector<AnticrossingRecord> records;
    for (auto& v : per_level) records.insert(records.end(), v.begin(), v.end());
    std::stable_sort(records.begin(), records.end(),
                     [](const AnticrossingRecord& x, const AnticrossingRecord& y) {
                         if (x.mu_star != y.mu_star) return x.mu_star < y.mu_star;
                         return x.level_lo < y.level_lo;
                     });
    return records;
}

double pair_splitting(const ModelParams& p, int n, int m) {
    validate(p);
    const int partner = m - n;
    if (!(n >= 0 && n < partner && partner <= p.big_n)) {
        throw DomainError("pair_splitting needs 0 <= n < m - n <= N");
    }
    const double mu = derived_mu(p);
    if (std::abs(mu - m) > 1e-9 * std::max(1.0, std::abs(static_cast<double>(m)))) {
        throw DomainError("pair_splitting needs integer mu_N = m (set the detuning with "
                          "delta_for_mu)");
    }
    if (p.g == 0.0) return 0.0;

    const auto dec = quad_eigendecompose(build_quad_block(p.big_n, Quad(m), Quad(p.alpha_sum()),
                                                          Quad(p.g)));
    const Quad inv_sqrt2 = 1 / sqrt(Quad(2));
    int chosen[2] = {-1, -1};
    Quad best_overlap[2] = {Quad(-1), Quad(-1)};
    for (int s = 0; s < 2; ++s) {
        const Quad sign = s == 0 ? Quad(1) : Quad(-1);
        for (int l = 0; l < dec.dim; ++l) {
            const auto col = dec.column(l);
            const Quad ov = abs(inv_sqrt2 * (col[static_cast<std::size_t>(n)] +
                                             sign * col[static_cast<std::size_t>(partner)]));
            if (ov > best_overlap[s]) {
                best_overlap[s] = ov;
                chosen[s] = l;
            }
        }
    }
    const double worst = static_cast<double>(std::min(best_overlap[0], best_overlap[1]));
    if (worst < 0.5 || chosen[0] == chosen[1]) {
        std::ostringstream msg;
        msg << "pair (" << n << ", " << partner << ") is no longer dominated by the resonant "
            << "superpositions (best overlap " << worst << ")";
        throw NumericalError(msg.str());
    }
    const Quad split = abs(dec.values[static_cast<std::size_t>(chosen[0])] -
                           dec.values[static_cast<std::size_t>(chosen[1])]);
    return static_cast<double>(split);
}

PowerLawFit fit_splitting_power_law(const ModelParams& p, int n, int m, double g_lo, double g_hi,
                                    int count) {
    if (!(g_lo > 0.0 && g_hi > g_lo && count >= 2)) {
        throw DomainError("power-law fit needs 0 < g_lo < g_hi and count >= 2");
    }
    PowerLawFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j < count; ++j) {
        const double g = g_lo * std::pow(g_hi / g_lo, static_cast<double>(j) / (count - 1));
        const double split = pair_splitting(p.with_g(g), n, m);
        if (!(split > 0.0)) throw NumericalError("zero splitting in power-law fit");
        fit.g_values.push_back(g);
        fit.splittings.push_back(split);
        const double x = std::log(g);
        const double y = std::log(split);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double k = count;
    fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / k;
    return fit;
}

}  // namespace kerrpair
