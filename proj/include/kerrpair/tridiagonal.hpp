#pragma once

// Symmetric tridiagonal eigensolvers, templated on the scalar so the same code
// runs in double and in extended precision (boost::multiprecision).
//
// Primary route: implicit-shift QL with full eigenvector accumulation.
// Fallback: Sturm-sequence bisection for eigenvalues + inverse iteration with
// Gram-Schmidt inside clusters for eigenvectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "kerrpair/errors.hpp"

namespace kerrpair::tridiag {

enum class Method { implicit_ql, bisection };

template <class Real>
struct Decomposition {
    int dim = 0;
    std::vector<Real> values;   // ascending
    std::vector<Real> vectors;  // column-major: vectors[l * dim + k] = c_{l,k}

    [[nodiscard]] std::span<const Real> column(int l) const {
        return {vectors.data() + static_cast<std::size_t>(l) * dim, static_cast<std::size_t>(dim)};
    }
};

namespace detail {

template <class Real>
Real hypot2(const Real& a, const Real& b) {
    using std::abs;
    using std::sqrt;
    const Real aa = abs(a);
    const Real bb = abs(b);
    if (aa > bb) {
        const Real r = bb / aa;
        return aa * sqrt(Real(1) + r * r);
    }
    if (bb == Real(0)) return Real(0);
    const Real r = aa / bb;
    return bb * sqrt(Real(1) + r * r);
}

template <class Real>
Real sign_of(const Real& magnitude, const Real& s) {
    using std::abs;
    return s >= Real(0) ? abs(magnitude) : -abs(magnitude);
}

// Sort ascending and fix the sign: largest-|c| component of every vector positive
// (first such index on exact ties).
template <class Real>
void canonicalize(Decomposition<Real>& dec) {
    using std::abs;
    const int n = dec.dim;
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dec.values[a] < dec.values[b]; });
    Decomposition<Real> out;
    out.dim = n;
    out.values.resize(static_cast<std::size_t>(n));
    out.vectors.resize(static_cast<std::size_t>(n) * n);
    for (int l = 0; l < n; ++l) {
        const int src = order[static_cast<std::size_t>(l)];
        out.values[static_cast<std::size_t>(l)] = dec.values[static_cast<std::size_t>(src)];
        int best = 0;
        Real best_mag(-1);
        for (int k = 0; k < n; ++k) {
            const Real mag = abs(dec.vectors[static_cast<std::size_t>(src) * n + k]);
            if (mag > best_mag) {
                best_mag = mag;
                best = k;
            }
        }
        const bool flip = dec.vectors[static_cast<std::size_t>(src) * n + best] < Real(0);
        for (int k = 0; k < n; ++k) {
            const Real v = dec.vectors[static_cast<std::size_t>(src) * n + k];
            out.vectors[static_cast<std::size_t>(l) * n + k] = flip ? Real(-v) : v;
        }
    }
    dec = std::move(out);
}

template <class Real>
Real gershgorin_norm(std::span<const Real> diag, std::span<const Real> off) {
    using std::abs;
    Real norm(0);
    const std::size_t n = diag.size();
    for (std::size_t i = 0; i < n; ++i) {
        Real row = abs(diag[i]);
        if (i > 0) row += abs(off[i - 1]);
        if (i + 1 < n) row += abs(off[i]);
        norm = std::max(norm, row);
    }
    return norm;
}

}  // namespace detail

// Implicit QL. `max_sweeps` bounds the iterations spent on any single eigenvalue.
template <class Real>
Decomposition<Real> implicit_ql(std::span<const Real> diag, std::span<const Real> offdiag,
                                int max_sweeps = 60) {
    using std::abs;
    const int n = static_cast<int>(diag.size());
    if (n > 0 && static_cast<int>(offdiag.size()) != n - 1) {
        throw DomainError("tridiagonal: offdiag must have length dim - 1");
    }
    Decomposition<Real> dec;
    dec.dim = n;
    dec.values.assign(diag.begin(), diag.end());
    dec.vectors.assign(static_cast<std::size_t>(n) * n, Real(0));
    for (int k = 0; k < n; ++k) dec.vectors[static_cast<std::size_t>(k) * n + k] = Real(1);
    if (n == 0) return dec;

    std::vector<Real> e(static_cast<std::size_t>(n), Real(0));
    std::copy(offdiag.begin(), offdiag.end(), e.begin());
    auto& d = dec.values;
    auto z = [&](int row, int col) -> Real& {
        return dec.vectors[static_cast<std::size_t>(col) * n + row];
    };
    const Real eps = std::numeric_limits<Real>::epsilon();

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m = l;
        do {
            for (m = l; m < n - 1; ++m) {
                const Real dd = abs(d[m]) + abs(d[m + 1]);
                if (abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == max_sweeps) {
                    throw NumericalError("implicit QL did not converge for eigenvalue " +
                                         std::to_string(l) + " within " +
                                         std::to_string(max_sweeps) + " sweeps");
                }
                Real g = (d[l + 1] - d[l]) / (Real(2) * e[l]);
                Real r = detail::hypot2(g, Real(1));
                g = d[m] - d[l] + e[l] / (g + detail::sign_of(r, g));
                Real s(1), c(1), p(0);
                int i = m - 1;
                bool underflow = false;
                for (; i >= l; --i) {
                    const Real f = s * e[i];
                    const Real b = c * e[i];
                    r = detail::hypot2(f, g);
                    e[i + 1] = r;
                    if (r == Real(0)) {
                        d[i + 1] -= p;
                        e[m] = Real(0);
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + Real(2) * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (int k = 0; k < n; ++k) {
                        const Real fz = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * fz;
                        z(k, i) = c * z(k, i) - s * fz;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = Real(0);
            }
        } while (m != l);
    }
    detail::canonicalize(dec);
    return dec;
}

// Number of eigenvalues strictly below x (Sturm sequence of the LDL' pivots).
template <class Real>
int sturm_count(std::span<const Real> diag, std::span<const Real> off, const Real& x,
                const Real& pivmin) {
    using std::abs;
    int count = 0;
    Real q = diag[0] - x;
    if (abs(q) < pivmin) q = -pivmin;
    if (q < Real(0)) ++count;
    for (std::size_t i = 1; i < diag.size(); ++i) {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if (abs(q) < pivmin) q = -pivmin;
        if (q < Real(0)) ++count;
    }
    return count;
}

template <class Real>
Decomposition<Real> bisection_inverse_iteration(std::span<const Real> diag,
                                                std::span<const Real> offdiag) {
    using std::abs;
    using std::sqrt;
    const int n = static_cast<int>(diag.size());
    if (n > 0 && static_cast<int>(offdiag.size()) != n - 1) {
        throw DomainError("tridiagonal: offdiag must have length dim - 1");
    }
    Decomposition<Real> dec;
    dec.dim = n;
    if (n == 0) return dec;
    const Real eps = std::numeric_limits<Real>::epsilon();
    const Real gnorm = detail::gershgorin_norm(diag, offdiag);
    if (gnorm == Real(0)) {
        // the zero matrix: any floor on the pivots would overflow the inverse iteration
        dec.values.assign(static_cast<std::size_t>(n), Real(0));
        dec.vectors.assign(static_cast<std::size_t>(n) * n, Real(0));
        for (int i = 0; i < n; ++i) dec.vectors[static_cast<std::size_t>(i) * n + i] = Real(1);
        return dec;
    }
    const Real norm = std::max(gnorm, Real(1e-300));
    const Real pivmin = std::numeric_limits<Real>::min() / eps;

    Real lower = diag[0], upper = diag[0];
    for (int i = 0; i < n; ++i) {
        Real radius(0);
        if (i > 0) radius += abs(offdiag[static_cast<std::size_t>(i) - 1]);
        if (i + 1 < n) radius += abs(offdiag[static_cast<std::size_t>(i)]);
        lower = std::min(lower, Real(diag[static_cast<std::size_t>(i)] - radius));
        upper = std::max(upper, Real(diag[static_cast<std::size_t>(i)] + radius));
    }
    lower -= Real(2) * eps * norm;
    upper += Real(2) * eps * norm;

    dec.values.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        Real lo = lower, hi = upper;
        for (int it = 0; it < 4 * std::numeric_limits<Real>::digits + 64; ++it) {
            const Real mid = (lo + hi) / Real(2);
            if (mid == lo || mid == hi || hi - lo <= Real(2) * eps * norm) break;
            if (sturm_count(diag, offdiag, mid, pivmin) > k) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        dec.values[static_cast<std::size_t>(k)] = (lo + hi) / Real(2);
    }

    // Inverse iteration: solve (T - lambda) x = b by Gaussian elimination with
    // partial pivoting on the tridiagonal band.
    dec.vectors.assign(static_cast<std::size_t>(n) * n, Real(0));
    const Real cluster_gap = Real(1e-3) * norm;
    int cluster_start = 0;
    for (int k = 0; k < n; ++k) {
        if (k > 0 && dec.values[static_cast<std::size_t>(k)] -
                             dec.values[static_cast<std::size_t>(k) - 1] > cluster_gap) {
            cluster_start = k;
        }
        Real lambda = dec.values[static_cast<std::size_t>(k)];
        std::vector<Real> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = Real(1 + (i * 7 + k * 13) % 5);
        bool converged = false;
        for (int sweep = 0; sweep < 8; ++sweep) {
            // Band LU with row interchanges: u0 diag, u1 first super, u2 second super.
            std::vector<Real> a(diag.begin(), diag.end());
            for (auto& v : a) v -= lambda;
            std::vector<Real> lo_band(offdiag.begin(), offdiag.end());
            std::vector<Real> up1(offdiag.begin(), offdiag.end());
            up1.push_back(Real(0));
            std::vector<Real> up2(static_cast<std::size_t>(n), Real(0));
            std::vector<Real> b = x;
            for (int i = 0; i < n - 1; ++i) {
                const std::size_t ui = static_cast<std::size_t>(i);
                if (abs(lo_band[ui]) > abs(a[ui])) {
                    std::swap(a[ui], lo_band[ui]);
                    std::swap(up1[ui], a[ui + 1]);
                    std::swap(up2[ui], up1[ui + 1]);
                    std::swap(b[ui], b[ui + 1]);
                }
                if (abs(a[ui]) < eps * norm) a[ui] = eps * norm;
                const Real factor = lo_band[ui] / a[ui];
                a[ui + 1] -= factor * up1[ui];
                up1[ui + 1] -= factor * up2[ui];
                b[ui + 1] -= factor * b[ui];
            }
            if (abs(a[static_cast<std::size_t>(n) - 1]) < eps * norm) {
                a[static_cast<std::size_t>(n) - 1] = eps * norm;
            }
            for (int i = n - 1; i >= 0; --i) {
                const std::size_t ui = static_cast<std::size_t>(i);
                Real s = b[ui];
                if (i + 1 < n) s -= up1[ui] * b[ui + 1];
                if (i + 2 < n) s -= up2[ui] * b[ui + 2];
                b[ui] = s / a[ui];
            }
            // Orthogonalize against vectors already found in this cluster.
            for (int j = cluster_start; j < k; ++j) {
                Real dot(0);
                for (int i = 0; i < n; ++i) {
                    dot += b[static_cast<std::size_t>(i)] *
                           dec.vectors[static_cast<std::size_t>(j) * n + i];
                }
                for (int i = 0; i < n; ++i) {
                    b[static_cast<std::size_t>(i)] -=
                        dot * dec.vectors[static_cast<std::size_t>(j) * n + i];
                }
            }
            Real nrm(0);
            for (const auto& v : b) nrm += v * v;
            nrm = sqrt(nrm);
            if (!(nrm > Real(0))) break;
            for (auto& v : b) v /= nrm;
            x = std::move(b);
            // Residual check.
            Real res(0);
            for (int i = 0; i < n; ++i) {
                const std::size_t ui = static_cast<std::size_t>(i);
                Real r = (diag[ui] - lambda) * x[ui];
                if (i > 0) r += offdiag[ui - 1] * x[ui - 1];
                if (i + 1 < n) r += offdiag[ui] * x[ui + 1];
                res = std::max(res, abs(r));
            }
            if (sweep >= 2 && res <= Real(64) * eps * norm * Real(n)) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NumericalError("inverse iteration did not converge for eigenvalue " +
                                 std::to_string(k));
        }
        std::copy(x.begin(), x.end(), dec.vectors.begin() + static_cast<std::ptrdiff_t>(k) * n);
    }
    detail::canonicalize(dec);
    return dec;
}

// QL first, bisection + inverse iteration if QL exhausts its sweep budget.
template <class Real>
Decomposition<Real> solve(std::span<const Real> diag, std::span<const Real> offdiag,
                          Method method = Method::implicit_ql) {
    if (method == Method::bisection) return bisection_inverse_iteration(diag, offdiag);
    try {
        return implicit_ql(diag, offdiag);
    } catch (const NumericalError& ql_failure) {
        try {
            return bisection_inverse_iteration(diag, offdiag);
        } catch (const NumericalError& fallback_failure) {
            throw NumericalError(std::string("eigensolver failed: ") + ql_failure.what() +
                                 "; fallback: " + fallback_failure.what());
        }
    }
}

}  // namespace kerrpair::tridiag
