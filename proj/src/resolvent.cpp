#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "kerrpair/errors.hpp"
#include "kerrpair/selfenergy.hpp"

namespace kerrpair {

namespace {

Eigen::MatrixXd dense_block(const SubspaceHamiltonian& h) {
    const int d = h.n_dim;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) m(i, i) = h.diag[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < d; ++i) {
        m(i, i + 1) = h.offdiag[static_cast<std::size_t>(i)];
        m(i + 1, i) = h.offdiag[static_cast<std::size_t>(i)];
    }
    return m;
}

// det of the inverse of the {n, partner} block of (omega - H)^{-1}. By the Schur
// complement formula it equals det(omega - H) / det(omega - H_QQ), where Q is the
// complement of the pair. Evaluating the ratio of LU determinants avoids the
// cancellation of inverting a nearly singular 2x2 block close to an eigenvalue.
struct BlockDeterminant {
    Eigen::MatrixXd h;
    Eigen::MatrixXd h_qq;

    double operator()(double omega) const {
        const int d = static_cast<int>(h.rows());
        const Eigen::MatrixXd a = omega * Eigen::MatrixXd::Identity(d, d) - h;
        const double num = a.partialPivLu().determinant();
        if (h_qq.rows() == 0) return num;
        const int q = static_cast<int>(h_qq.rows());
        const Eigen::MatrixXd b = omega * Eigen::MatrixXd::Identity(q, q) - h_qq;
        return num / b.partialPivLu().determinant();
    }
};

// Number of eigenvalues of the symmetric matrix m below x, from the signs of the
// unpivoted LDL' pivots of m - x (Sylvester inertia). The blocks here are
// tridiagonal or the tridiagonal with two rows and columns removed, so no fill-in
// appears and skipping pivoting is safe apart from exact zero pivots.
int count_below(const Eigen::MatrixXd& m, double x) {
    const int d = static_cast<int>(m.rows());
    if (d == 0) return 0;
    Eigen::MatrixXd a = m - x * Eigen::MatrixXd::Identity(d, d);
    const double tiny = 1e-300 + 1e-18 * a.cwiseAbs().maxCoeff();
    int negative = 0;
    for (int k = 0; k < d; ++k) {
        double piv = a(k, k);
        if (piv == 0.0) piv = tiny;
        if (piv < 0.0) ++negative;
        for (int i = k + 1; i < d; ++i) {
            if (a(i, k) == 0.0) continue;
            const double l = a(i, k) / piv;
            for (int j = k + 1; j < d; ++j) a(i, j) -= l * a(k, j);
        }
    }
    return negative;
}

}  // namespace

std::vector<double> resolvent_block_poles(const ModelParams& p, int n, int partner,
                                          const ResolventOptions& options) {
    validate(p);
    if (!(0 <= n && n < partner && partner <= p.big_n)) {
        throw DomainError("resolvent block needs 0 <= n < partner <= N");
    }
    if (options.samples < 2) throw DomainError("resolvent scan needs >= 2 samples");
    const SubspaceHamiltonian sh = build_subspace_hamiltonian(p);

    BlockDeterminant f;
    f.h = dense_block(sh);
    std::vector<int> keep;
    for (int i = 0; i < sh.n_dim; ++i) {
        if (i != n && i != partner) keep.push_back(i);
    }
    f.h_qq.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        for (std::size_t j = 0; j < keep.size(); ++j) {
            f.h_qq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                f.h(keep[i], keep[j]);
        }
    }

    double lo = sh.diag.front();
    double hi = sh.diag.front();
    for (int i = 0; i < sh.n_dim; ++i) {
        const double r = (i > 0 ? std::abs(sh.offdiag[static_cast<std::size_t>(i) - 1]) : 0.0) +
                         (i + 1 < sh.n_dim ? std::abs(sh.offdiag[static_cast<std::size_t>(i)]) : 0.0);
        lo = std::min(lo, sh.diag[static_cast<std::size_t>(i)] - r);
        hi = std::max(hi, sh.diag[static_cast<std::size_t>(i)] + r);
    }
    lo -= options.margin;
    hi += options.margin;
    const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
    const double width_tol = options.tolerance * scale;

    // The uniform grid alone is not enough: a level with small weight on the pair puts
    // a zero of f right next to a pole of f (an eigenvalue of H_QQ), and both sign
    // changes cancel inside one cell. Cells are split until each holds at most one
    // eigenvalue of H or H_QQ (counted by inertia), then f is bisected.
    std::vector<double> roots;
    auto refine = [&](auto&& self, double a, double b, int depth) -> void {
        const int n_h = count_below(f.h, b) - count_below(f.h, a);
        const int n_q = count_below(f.h_qq, b) - count_below(f.h_qq, a);
        if (n_h == 0) return;
        if (n_h + n_q >= 2 && b - a > width_tol && depth < 80) {
            const double mid = 0.5 * (a + b);
            self(self, a, mid, depth + 1);
            self(self, mid, b, depth + 1);
            return;
        }
        if (n_q > 0) return;  // cancelled within tolerance: the level decouples from the pair
        if (n_h > 1) {
            // unresolved cluster narrower than the tolerance
            for (int k = 0; k < n_h; ++k) roots.push_back(0.5 * (a + b));
            return;
        }
        double fa = f(a);
        for (int it = 0; it < 200 && b - a > width_tol; ++it) {
            const double mid = 0.5 * (a + b);
            const double fm = f(mid);
            if (fm == 0.0) {
                a = b = mid;
                break;
            }
            if ((fm < 0.0) == (fa < 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        roots.push_back(0.5 * (a + b));
    };
    for (int s = 1; s < options.samples; ++s) {
        const double a = lo + (hi - lo) * (s - 1) / (options.samples - 1);
        const double b = lo + (hi - lo) * s / (options.samples - 1);
        refine(refine, a, b, 0);
    }
    return roots;
}

}  // namespace kerrpair
