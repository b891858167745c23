#include "kerrpair/pt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kerrpair/errors.hpp"
#include "kerrpair/precision.hpp"

namespace kerrpair {

namespace {

double shifted(double n, double mu) { return (2.0 * n - mu) * (2.0 * n - mu); }

void check_alpha(double alpha_sum) {
    if (!(alpha_sum > 0.0)) throw DomainError("alpha1 + alpha2 must be > 0");
}

}  // namespace

double epsilon2_closed(double n, double mu, int big_n, double alpha_sum) {
    check_alpha(alpha_sum);
    const double d2 = shifted(n, mu);
    if (d2 == 1.0) throw PoleError("epsilon2_closed: (2n - mu)^2 = 1");
    return (d2 - mu * mu + 2.0 * big_n * (mu + 1.0)) / (d2 - 1.0) / alpha_sum;
}

double epsilon2_sum(int n, const ModelParams& p) {
    validate(p);
    if (n < 0 || n > p.big_n) throw DomainError("level outside [0, N]");
    const double mu = derived_mu(p);
    const double a = p.alpha_sum();
    const double e_n = relative_level(n, mu, a);
    double sum = 0.0;
    // |V|^2 / g^2 for the two neighbours
    if (n > 0) {
        const double gap = e_n - relative_level(n - 1, mu, a);
        if (gap == 0.0) throw PoleError("epsilon2_sum: level n-1 degenerate with n");
        sum += static_cast<double>(n) * (p.big_n - n + 1) / gap;
    }
    if (n < p.big_n) {
        const double gap = e_n - relative_level(n + 1, mu, a);
        if (gap == 0.0) throw PoleError("epsilon2_sum: level n+1 degenerate with n");
        sum += static_cast<double>(n + 1) * (p.big_n - n) / gap;
    }
    return sum;
}

double epsilon4_closed(double n, double mu, int big_n, double alpha_sum) {
    check_alpha(alpha_sum);
    const double d2 = shifted(n, mu);
    if (d2 == 1.0 || d2 == 4.0) throw PoleError("epsilon4_closed: (2n - mu)^2 in {1, 4}");
    const double d4 = d2 * d2;
    const double d6 = d4 * d2;
    const double mu2 = mu * mu;
    const double mu3 = mu2 * mu;
    const double mu4 = mu2 * mu2;
    const double big_a = -12.0 * d4 + 4.0 * d2 * (5.0 * mu2 + 10.0 * mu + 11.0) +
                         4.0 * (7.0 * mu2 + 14.0 * mu + 4.0);
    const double big_b = 12.0 * d4 * (mu - 1.0) -
                         4.0 * d2 * (5.0 * mu3 + 5.0 * mu2 + mu - 11.0) -
                         4.0 * (7.0 * mu3 + 7.0 * mu2 - 10.0 * mu - 4.0);
    const double big_c = d6 - 3.0 * d4 * (2.0 * mu2 + 3.0) +
                         d2 * (5.0 * mu4 + 2.0 * mu2 + 20.0) + 7.0 * mu4 - 20.0 * mu2;
    const double nn = big_n;
    const double denom = (d2 - 1.0) * (d2 - 1.0) * (d2 - 1.0) * (d2 - 4.0);
    return (nn * nn * big_a + nn * big_b + big_c) / denom /
           (alpha_sum * alpha_sum * alpha_sum);
}

double check_pt_symmetry(int k, double n, double mu, int big_n, double alpha_sum) {
    switch (k) {
        case 2:
            return std::abs(epsilon2_closed(n, mu, big_n, alpha_sum) -
                            epsilon2_closed(mu - n, mu, big_n, alpha_sum));
        case 4:
            return std::abs(epsilon4_closed(n, mu, big_n, alpha_sum) -
                            epsilon4_closed(mu - n, mu, big_n, alpha_sum));
        default:
            throw DomainError("check_pt_symmetry supports k = 2 and k = 4 only");
    }
}

namespace {

struct LeastSquares {
    std::vector<Quad> coef;
    std::vector<Quad> stderr_;
};

// Householder QR least squares for a small dense system (rows x cols, row-major).
LeastSquares solve_least_squares(std::vector<Quad> a, std::vector<Quad> y, int rows, int cols) {
    auto at = [&](int i, int j) -> Quad& { return a[static_cast<std::size_t>(i * cols + j)]; };
    for (int k = 0; k < cols; ++k) {
        Quad norm = 0;
        for (int i = k; i < rows; ++i) norm += at(i, k) * at(i, k);
        norm = sqrt(norm);
        if (norm == 0) throw NumericalError("series fit: singular design matrix");
        const Quad alpha = at(k, k) > 0 ? -norm : norm;
        std::vector<Quad> v(static_cast<std::size_t>(rows - k));
        for (int i = k; i < rows; ++i) v[static_cast<std::size_t>(i - k)] = at(i, k);
        v[0] -= alpha;
        Quad vnorm2 = 0;
        for (const auto& vi : v) vnorm2 += vi * vi;
        if (vnorm2 == 0) continue;
        for (int j = k; j < cols; ++j) {
            Quad dot = 0;
            for (int i = k; i < rows; ++i) dot += v[static_cast<std::size_t>(i - k)] * at(i, j);
            const Quad f = 2 * dot / vnorm2;
            for (int i = k; i < rows; ++i) at(i, j) -= f * v[static_cast<std::size_t>(i - k)];
        }
        Quad dot = 0;
        for (int i = k; i < rows; ++i) dot += v[static_cast<std::size_t>(i - k)] * y[static_cast<std::size_t>(i)];
        const Quad f = 2 * dot / vnorm2;
        for (int i = k; i < rows; ++i) y[static_cast<std::size_t>(i)] -= f * v[static_cast<std::size_t>(i - k)];
    }
    LeastSquares out;
    out.coef.assign(static_cast<std::size_t>(cols), Quad(0));
    for (int k = cols - 1; k >= 0; --k) {
        Quad s = y[static_cast<std::size_t>(k)];
        for (int j = k + 1; j < cols; ++j) s -= at(k, j) * out.coef[static_cast<std::size_t>(j)];
        out.coef[static_cast<std::size_t>(k)] = s / at(k, k);
    }
    Quad rss = 0;
    for (int i = cols; i < rows; ++i) rss += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    const Quad s2 = rows > cols ? rss / (rows - cols) : Quad(0);
    // diag((R^T R)^{-1}) = row norms of R^{-1}
    std::vector<Quad> rinv(static_cast<std::size_t>(cols * cols), Quad(0));
    for (int j = 0; j < cols; ++j) {
        rinv[static_cast<std::size_t>(j * cols + j)] = 1 / at(j, j);
        for (int i = j - 1; i >= 0; --i) {
            Quad s = 0;
            for (int k = i + 1; k <= j; ++k) s += at(i, k) * rinv[static_cast<std::size_t>(k * cols + j)];
            rinv[static_cast<std::size_t>(i * cols + j)] = -s / at(i, i);
        }
    }
    out.stderr_.resize(static_cast<std::size_t>(cols));
    for (int i = 0; i < cols; ++i) {
        Quad s = 0;
        for (int j = 0; j < cols; ++j) s += rinv[static_cast<std::size_t>(i * cols + j)] * rinv[static_cast<std::size_t>(i * cols + j)];
        out.stderr_[static_cast<std::size_t>(i)] = sqrt(s2 * s);
    }
    return out;
}

// Energies (offset-free, minus eps0_n) of the branch connected to level n on the
// grid g0 2^-j, followed upward in g from the smallest grid value.
std::vector<Quad> branch_energies(const ModelParams& p, int n, double mu, double g0, int points) {
    const Quad qmu = mu;
    const Quad qa = p.alpha_sum();
    const Quad qn = n;
    const Quad e0 = qa / 2 * qn * (qn - qmu);
    std::vector<Quad> out(static_cast<std::size_t>(points));
    std::vector<Quad> prev;
    for (int j = points - 1; j >= 0; --j) {
        const Quad g = Quad(g0) / pow(Quad(2), j);
        const auto dec = quad_eigendecompose(build_quad_block(p.big_n, qmu, qa, g));
        int best = -1;
        Quad best_ov = -1;
        Quad second = -1;
        for (int l = 0; l < dec.dim; ++l) {
            const auto col = dec.column(l);
            Quad ov;
            if (prev.empty()) {
                ov = abs(col[static_cast<std::size_t>(n)]);
            } else {
                ov = 0;
                for (int k = 0; k < dec.dim; ++k) ov += col[static_cast<std::size_t>(k)] * prev[static_cast<std::size_t>(k)];
                ov = abs(ov);
            }
            if (ov > best_ov) {
                second = best_ov;
                best_ov = ov;
                best = l;
            } else if (ov > second) {
                second = ov;
            }
        }
        if (best_ov < Quad(0.9) || second > Quad(0.5)) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "branch of level " << n << " lost at g = " << static_cast<double>(g)
                << " (overlap " << static_cast<double>(best_ov) << ")";
            throw NumericalError(msg.str());
        }
        const auto col = dec.column(best);
        prev.assign(col.begin(), col.end());
        out[static_cast<std::size_t>(j)] = dec.values[static_cast<std::size_t>(best)] - e0;
    }
    return out;
}

}  // namespace

std::vector<PTCorrection> extract_series_coefficients(const ModelParams& p, int n, int max_order,
                                                      const SeriesOptions& options) {
    validate(p);
    if (n < 0 || n > p.big_n) throw DomainError("level outside [0, N]");
    if (max_order < 2 || max_order > 8 || max_order % 2 != 0) {
        throw DomainError("max_order must be even and in [2, 8]");
    }
    if (options.grid_points < 4 || options.guard_orders < 1) {
        throw DomainError("series fit needs >= 4 grid points and >= 1 guard order");
    }
    const double mu = derived_mu(p);
    if (std::abs(mu - std::round(mu)) < options.min_distance - 1e-12) {
        std::ostringstream msg;
        msg << "mu_N = " << mu << " is closer than " << options.min_distance
            << " to an integer (degenerate regime)";
        throw DomainError(msg.str());
    }
    const int cols_full = max_order / 2 + 1 + options.guard_orders;
    const int rows = options.grid_points;
    if (rows <= cols_full) throw DomainError("not enough grid points for the requested orders");

    std::vector<PTCorrection> out;
    if (p.big_n == 0) {
        for (int k = 0; k <= max_order; k += 2) {
            out.push_back({k, n, k == 0 ? unperturbed_energy(0, 0, p) : 0.0, 0.0});
        }
        return out;
    }

    // Initial g0 from the smallest unperturbed gap relative to the largest coupling factor.
    const double a = p.alpha_sum();
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= p.big_n; ++k) {
        if (k != n) gap = std::min(gap, std::abs(relative_level(n, mu, a) - relative_level(k, mu, a)));
    }
    const double vmax = 0.5 * (p.big_n + 1);
    double g0 = 0.25 * gap / vmax;

    auto fit = [&](double g0_try, int cols) {
        const auto energies = branch_energies(p, n, mu, g0_try, rows);
        std::vector<Quad> design(static_cast<std::size_t>(rows * cols));
        for (int i = 0; i < rows; ++i) {
            const Quad t2 = pow(Quad(2), -2 * i);  // (g / g0)^2
            Quad v = 1;
            for (int j = 0; j < cols; ++j) {
                design[static_cast<std::size_t>(i * cols + j)] = v;
                v *= t2;
            }
        }
        return solve_least_squares(std::move(design), energies, rows, cols);
    };

    LeastSquares full;
    for (int attempt = 0;; ++attempt) {
        full = fit(g0, cols_full);
        const Quad c2 = abs(full.coef[1]);
        const Quad guard = abs(full.coef[static_cast<std::size_t>(max_order / 2 + 1)]);
        if (guard <= Quad(options.truncation) * c2 || c2 == 0) break;
        if (attempt >= 40) throw NumericalError("series fit: could not reach the truncation target");
        g0 *= 0.5;
    }
    const LeastSquares reduced = fit(g0, cols_full - 1);

    for (int j = 0; j <= max_order / 2; ++j) {
        const Quad scale = pow(Quad(g0), 2 * j);
        const auto idx = static_cast<std::size_t>(j);
        const Quad stat = full.stderr_[idx];
        const Quad diff = abs(full.coef[idx] - reduced.coef[idx]);
        const Quad err = (stat > diff ? stat : diff) / scale;
        double value = static_cast<double>(full.coef[idx] / scale);
        if (j == 0) value += unperturbed_energy(n, p.big_n - n, p);
        out.push_back({2 * j, n, value, static_cast<double>(err)});
    }
    return out;
}

}  // namespace kerrpair
